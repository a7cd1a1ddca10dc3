//! Step 3: gadgets, the graph G*, its caterpillar layout, and the hybrid-tree
//! grouping that turns a tree layout of G* into a tree mapping of (G*, 𝒮*).
//!
//! Every part `S(u)` becomes a gadget 𝒢(u): `b` copies of a subdivided path
//! `P_u`, concatenated into `Q_u`, with every pair of vertices from distinct
//! copies joined unless their positions are equal or adjacent along `P_u`
//! (first and last positions count as adjacent, through the concatenation
//! edges). Copies of adjacent G-vertices are joined by bicliques. Like the
//! step-2 graph, G* is stored implicitly.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Adjacency, Graph};
use crate::layout::TreeLayout;
use crate::matching::{cut_value, CutValue, MatchKind};
use crate::red1::Constants;
use crate::red2::{tree_serde, EdgeKind, EdgeValue, MappingValue, PartitionedGraph, TreeMapping};
use crate::tree::Tree;
use crate::wgraph::LinearOrder;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tag {
    /// Stands for this G-vertex.
    Original(usize),
    Subdivision,
    Appended,
}

/// The path `P_u`: originals in chunk order `L_1 … L_a`, where `L_i` runs
/// through `I(u, v, i)` for `v ∈ N(u)` ascending; a subdivision vertex follows
/// every original but the last, which is followed by the appended vertex.
pub fn build_pu(pg: &PartitionedGraph, u: usize, a: usize) -> Result<Vec<Tag>> {
    if u >= pg.part_count() {
        return Err(Error::UnknownVertex(u));
    }
    if a == 0 {
        return Err(Error::InvalidConstants("a must be positive".into()));
    }
    let blocks: Vec<_> = pg.blocks().iter().filter(|b| b.owner == u).collect();
    for b in &blocks {
        if b.len % a != 0 {
            return Err(Error::Indivisible { owner: u, toward: b.toward, len: b.len, a });
        }
    }
    let mut originals = Vec::with_capacity(pg.part(u).len());
    for i in 0..a {
        for b in &blocks {
            let c = b.len / a;
            originals.extend(b.start + i * c..b.start + (i + 1) * c);
        }
    }
    let mut path = Vec::with_capacity(2 * originals.len());
    for (k, &o) in originals.iter().enumerate() {
        path.push(Tag::Original(o));
        path.push(if k + 1 == originals.len() { Tag::Appended } else { Tag::Subdivision });
    }
    Ok(path)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gadget {
    pub owner: usize,
    pub path: Vec<Tag>,
    pub copies: usize,
    /// First G*-vertex of the gadget.
    pub start: usize,
}

/// Edge kinds of G*: `Path` edges lie on some `Q_u`, `Gadget` edges join
/// distinct copies inside a gadget, the rest are inherited from G.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StarEdgeKind {
    Path,
    Gadget,
    Matching,
    Dummy,
}

impl Gadget {
    pub fn path_len(&self) -> usize {
        self.path.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.path.len() * self.copies
    }

    pub fn range(&self) -> Range<usize> {
        self.start..self.start + self.vertex_count()
    }

    /// Local index (position along `Q_u`) of position `pos` in copy `copy`.
    pub fn local(&self, copy: usize, pos: usize) -> usize {
        copy * self.path.len() + pos
    }

    /// `(copy, position)` of a local index.
    pub fn split(&self, x: usize) -> (usize, usize) {
        (x / self.path.len(), x % self.path.len())
    }

    pub fn copy_range(&self, copy: usize) -> Range<usize> {
        let len = self.path.len();
        self.start + copy * len..self.start + (copy + 1) * len
    }

    pub fn local_kind(&self, x: usize, y: usize) -> Option<StarEdgeKind> {
        if x == y {
            return None;
        }
        let len = self.path.len();
        let ((i, p), (j, q)) = (self.split(x), self.split(y));
        if i == j {
            return (p.abs_diff(q) == 1).then_some(StarEdgeKind::Path);
        }
        if (j == i + 1 && p == len - 1 && q == 0) || (i == j + 1 && q == len - 1 && p == 0) {
            return Some(StarEdgeKind::Path);
        }
        let d = p.abs_diff(q);
        (d.min(len - d) > 1).then_some(StarEdgeKind::Gadget)
    }

    pub fn local_adjacent(&self, x: usize, y: usize) -> bool {
        self.local_kind(x, y).is_some()
    }

    /// The `pos`-th edge of copy `copy` as local indices.
    pub fn copy_edge(&self, copy: usize, pos: usize) -> (usize, usize) {
        (self.local(copy, pos), self.local(copy, pos + 1))
    }
}

impl Adjacency for Gadget {
    fn vertex_count(&self) -> usize {
        Gadget::vertex_count(self)
    }

    fn adjacent(&self, u: usize, v: usize) -> bool {
        self.local_adjacent(u, v)
    }
}

pub fn build_gadget(pg: &PartitionedGraph, u: usize, c: &Constants) -> Result<Gadget> {
    if c.b == 0 {
        return Err(Error::InvalidConstants("b must be positive".into()));
    }
    let path = build_pu(pg, u, c.a as usize)?;
    Ok(Gadget { owner: u, path, copies: c.b as usize, start: 0 })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gstar {
    pg: PartitionedGraph,
    gadgets: Vec<Gadget>,
    /// Position of every G-vertex along its `P_u`.
    position: Vec<usize>,
    vertex_count: usize,
}

/// Gadgets of `u` ascending, laid out consecutively.
pub fn build_gstar(pg: &PartitionedGraph, c: &Constants) -> Result<Gstar> {
    let mut gadgets = Vec::with_capacity(pg.part_count());
    let mut next = 0usize;
    for u in 0..pg.part_count() {
        let mut g = build_gadget(pg, u, c)?;
        g.start = next;
        next = next
            .checked_add(g.vertex_count())
            .ok_or_else(|| Error::invalid("G* vertex count overflows"))?;
        gadgets.push(g);
    }
    Gstar::from_parts(pg.clone(), gadgets)
}

impl Gstar {
    /// Validates and indexes a gadget list over `pg`.
    pub fn from_parts(pg: PartitionedGraph, gadgets: Vec<Gadget>) -> Result<Self> {
        if gadgets.len() != pg.part_count() {
            return Err(Error::LengthMismatch { expected: pg.part_count(), got: gadgets.len() });
        }
        let mut position = vec![usize::MAX; pg.vertex_count()];
        let mut next = 0;
        for (u, g) in gadgets.iter().enumerate() {
            if g.owner != u || g.start != next {
                return Err(Error::invalid(format!("gadget {u} is out of place")));
            }
            if g.copies == 0 {
                return Err(Error::invalid(format!("gadget {u} has no copies")));
            }
            next += g.vertex_count();
            for (p, tag) in g.path.iter().enumerate() {
                let expected = if p % 2 == 1 {
                    if p + 1 == g.path.len() {
                        Tag::Appended
                    } else {
                        Tag::Subdivision
                    }
                } else if matches!(tag, Tag::Original(_)) {
                    *tag
                } else {
                    Tag::Original(usize::MAX)
                };
                if *tag != expected {
                    return Err(Error::invalid(format!("gadget {u} has a malformed path at position {p}")));
                }
                if let Tag::Original(o) = *tag {
                    if o >= pg.vertex_count() || pg.part_of(o) != u || position[o] != usize::MAX {
                        return Err(Error::invalid(format!("gadget {u} misplaces original {o}")));
                    }
                    position[o] = p;
                }
            }
            if g.path.len() % 2 == 1 {
                return Err(Error::invalid(format!("gadget {u} has an odd path")));
            }
        }
        if let Some(o) = position.iter().position(|&p| p == usize::MAX) {
            return Err(Error::invalid(format!("G-vertex {o} has no copies")));
        }
        Ok(Gstar { pg, gadgets, position, vertex_count: next })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn partitioned(&self) -> &PartitionedGraph {
        &self.pg
    }

    pub fn gadgets(&self) -> &[Gadget] {
        &self.gadgets
    }

    pub fn gadget(&self, u: usize) -> &Gadget {
        &self.gadgets[u]
    }

    /// The parts `V(𝒢(u))` of 𝒮*.
    pub fn parts(&self) -> Vec<Vec<usize>> {
        self.gadgets.iter().map(|g| g.range().collect()).collect()
    }

    /// `(owner, copy, position)` of a G*-vertex.
    pub fn locate(&self, x: usize) -> (usize, usize, usize) {
        let u = self.gadgets.partition_point(|g| g.start + g.vertex_count() <= x);
        let g = &self.gadgets[u];
        let (copy, pos) = g.split(x - g.start);
        (u, copy, pos)
    }

    pub fn tag(&self, x: usize) -> Tag {
        let (u, _, pos) = self.locate(x);
        self.gadgets[u].path[pos]
    }

    pub fn original_of(&self, x: usize) -> Option<usize> {
        match self.tag(x) {
            Tag::Original(o) => Some(o),
            _ => None,
        }
    }

    /// `Copies(o)` for a G-vertex `o`, by copy index.
    pub fn copies_of(&self, o: usize) -> Vec<usize> {
        let g = &self.gadgets[self.pg.part_of(o)];
        (0..g.copies).map(|k| g.start + g.local(k, self.position[o])).collect()
    }

    pub fn edge_kind(&self, x: usize, y: usize) -> Option<StarEdgeKind> {
        let (ux, ..) = self.locate(x);
        let (uy, ..) = self.locate(y);
        if ux == uy {
            let g = &self.gadgets[ux];
            return g.local_kind(x - g.start, y - g.start);
        }
        match (self.original_of(x), self.original_of(y)) {
            (Some(ox), Some(oy)) => self.pg.edge_kind(ox, oy).map(|k| match k {
                EdgeKind::Matching => StarEdgeKind::Matching,
                EdgeKind::Dummy => StarEdgeKind::Dummy,
            }),
            _ => None,
        }
    }

    pub fn to_graph(&self, cap: usize) -> Result<Graph> {
        Graph::materialize(self, cap)
    }

    /// Edge counts per kind, from a materialized copy.
    pub fn edge_counts(&self, cap: usize) -> Result<[(StarEdgeKind, usize); 4]> {
        let g = self.to_graph(cap)?;
        let mut counts = [
            (StarEdgeKind::Path, 0),
            (StarEdgeKind::Gadget, 0),
            (StarEdgeKind::Matching, 0),
            (StarEdgeKind::Dummy, 0),
        ];
        for (x, y) in g.edges() {
            let k = self.edge_kind(x, y).expect("materialized edge");
            counts.iter_mut().find(|(kk, _)| *kk == k).expect("listed kind").1 += 1;
        }
        Ok(counts)
    }
}

impl Adjacency for Gstar {
    fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    fn adjacent(&self, u: usize, v: usize) -> bool {
        self.edge_kind(u, v).is_some()
    }
}

/// Caterpillar layout whose leaves run through `Q_{ord[0]}, Q_{ord[1]}, …`.
pub fn caterpillar_layout(gs: &Gstar, ord: &LinearOrder) -> Result<TreeLayout> {
    if ord.len() != gs.gadgets.len() {
        return Err(Error::LengthMismatch { expected: gs.gadgets.len(), got: ord.len() });
    }
    let leaves: Vec<usize> = ord.as_slice().iter().flat_map(|&u| gs.gadgets[u].range()).collect();
    TreeLayout::caterpillar(&leaves)
}

/// For a labelling of one gadget's vertices into classes, the largest family
/// of same-position copy edges that all cross between one class and the
/// rest, returned as `(class, edges)` with the class endpoint first. Such a
/// family is an induced matching of the gadget when the path has at least
/// three vertices.
pub fn same_position_crossing(g: &Gadget, class: &[usize]) -> Result<(usize, Vec<(usize, usize)>)> {
    if class.len() != g.vertex_count() {
        return Err(Error::LengthMismatch { expected: g.vertex_count(), got: class.len() });
    }
    let classes = class.iter().max().map_or(0, |m| m + 1);
    let mut best = (0, Vec::new());
    for pos in 0..g.path_len().saturating_sub(1) {
        for c in 0..classes {
            let edges: Vec<(usize, usize)> = (0..g.copies)
                .filter_map(|k| {
                    let (x, y) = g.copy_edge(k, pos);
                    match (class[x] == c, class[y] == c) {
                        (true, false) => Some((x, y)),
                        (false, true) => Some((y, x)),
                        _ => None,
                    }
                })
                .collect();
            if edges.len() > best.1.len() {
                best = (c, edges);
            }
        }
    }
    Ok(best)
}

/// A subcubic tree with every G*-vertex placed on a node.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HybridTree {
    #[serde(with = "tree_serde")]
    pub tree: Tree,
    pub placement: Vec<usize>,
}

/// Where a gadget can be grouped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DefaultSite {
    /// This node already holds exactly the gadget.
    Node(usize),
    /// Both sides of this edge hold a whole copy of `P_u`.
    Edge(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grouped {
    pub tree: HybridTree,
    pub site: DefaultSite,
    /// Every edge of the new tree with its corresponding edge in the old one.
    pub correspondence: Vec<((usize, usize), (usize, usize))>,
}

impl HybridTree {
    pub fn new(tree: Tree, placement: Vec<usize>) -> Result<Self> {
        if tree.max_degree() > 3 {
            return Err(Error::invalid("hybrid trees are subcubic"));
        }
        if let Some(&t) = placement.iter().find(|&&t| t >= tree.node_count()) {
            return Err(Error::invalid(format!("placement refers to missing node {t}")));
        }
        Ok(HybridTree { tree, placement })
    }

    pub fn from_layout(layout: &TreeLayout) -> Result<Self> {
        HybridTree::new(layout.tree.clone(), layout.leaf_of.clone())
    }

    /// Vertices placed on every node, ascending.
    pub fn preimages(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.tree.node_count()];
        for (x, &t) in self.placement.iter().enumerate() {
            out[t].push(x);
        }
        out
    }

    /// Every node holds a whole gadget or at most one vertex.
    pub fn validate(&self, gs: &Gstar) -> Result<()> {
        if self.placement.len() != gs.vertex_count() {
            return Err(Error::LengthMismatch { expected: gs.vertex_count(), got: self.placement.len() });
        }
        for (t, pre) in self.preimages().iter().enumerate() {
            if pre.len() > 1 && !is_whole_gadget(gs, pre) {
                return Err(Error::GroupingIncomplete { node: t });
            }
        }
        Ok(())
    }

    /// Vertices on `p`'s side of edge `(p, q)`, then those on `q`'s side.
    pub fn cut(&self, edge: (usize, usize)) -> Result<(Vec<usize>, Vec<usize>)> {
        let (p, q) = edge;
        if !self.tree.has_edge(p, q) {
            return Err(Error::invalid(format!("({p}, {q}) is not a tree edge")));
        }
        let side = self.tree.side(p, q);
        Ok((0..self.placement.len()).partition(|&x| side[self.placement[x]]))
    }
}

fn is_whole_gadget(gs: &Gstar, pre: &[usize]) -> bool {
    let (u, ..) = gs.locate(pre[0]);
    let r = gs.gadgets[u].range();
    pre.len() == r.len() && pre[0] == r.start && pre[pre.len() - 1] + 1 == r.end
}

fn norm((p, q): (usize, usize)) -> (usize, usize) {
    (p.min(q), p.max(q))
}

/// Largest cut value over the edges of a hybrid tree; with a threshold,
/// stops at the first edge reaching it.
pub fn hybrid_value(
    g: &Graph,
    ht: &HybridTree,
    kind: MatchKind,
    threshold: Option<usize>,
    budget: u64,
) -> Result<MappingValue> {
    let mut out = MappingValue { value: 0, exact: true, edges: Vec::new(), nodes: 0 };
    for edge in ht.tree.edges() {
        let (a, b) = ht.cut(edge)?;
        let CutValue { value, exact, nodes, .. } = cut_value(g, &a, &b, kind, threshold, budget)?;
        out.nodes += nodes;
        out.edges.push(EdgeValue { edge, value, exact });
        out.value = out.value.max(value);
        if !exact {
            out.exact = false;
            break;
        }
    }
    Ok(out)
}

/// A node holding exactly 𝒢(u), else the first edge in breadth-first order
/// from node 0 with a whole copy of `P_u` on each side.
pub fn find_default_edge(gs: &Gstar, ht: &HybridTree, u: usize) -> Result<DefaultSite> {
    if u >= gs.gadgets.len() {
        return Err(Error::UnknownVertex(u));
    }
    ht.validate(gs)?;
    let g = &gs.gadgets[u];
    let r = g.range();
    if r.is_empty() {
        return Err(Error::NoDefaultEdge { owner: u });
    }
    let t = ht.placement[r.start];
    if r.clone().all(|x| ht.placement[x] == t) && ht.placement.iter().filter(|&&s| s == t).count() == r.len() {
        return Ok(DefaultSite::Node(t));
    }
    let rooted = ht.tree.rooted();
    let copies: Vec<Vec<usize>> = (0..g.copies).map(|k| g.copy_range(k).map(|x| ht.placement[x]).collect()).collect();
    for (p, q) in ht.tree.bfs_edges(0) {
        let (mut near, mut far) = (false, false);
        for nodes in &copies {
            let first = rooted.on_side(nodes[0], p, q);
            if nodes.iter().all(|&s| rooted.on_side(s, p, q) == first) {
                if first {
                    far = true;
                } else {
                    near = true;
                }
            }
            if near && far {
                return Ok(DefaultSite::Edge(p, q));
            }
        }
    }
    Err(Error::NoDefaultEdge { owner: u })
}

/// Moves 𝒢(u) onto a new node subdividing its default edge.
pub fn group_gadget(gs: &Gstar, ht: &HybridTree, u: usize) -> Result<Grouped> {
    let site = find_default_edge(gs, ht, u)?;
    let (p, q) = match site {
        DefaultSite::Node(_) => {
            let correspondence = ht.tree.edges().into_iter().map(|e| (e, e)).collect();
            return Ok(Grouped { tree: ht.clone(), site, correspondence });
        }
        DefaultSite::Edge(p, q) => (p, q),
    };
    let mut tree = ht.tree.clone();
    let w = tree.subdivide(p, q)?;
    let mut placement = ht.placement.clone();
    for x in gs.gadgets[u].range() {
        placement[x] = w;
    }
    let correspondence = tree
        .edges()
        .into_iter()
        .map(|e| (e, if e.0 == w || e.1 == w { norm((p, q)) } else { e }))
        .collect();
    Ok(Grouped { tree: HybridTree::new(tree, placement)?, site, correspondence })
}

/// Groups every gadget, `u` ascending.
pub fn group_all(gs: &Gstar, ht: &HybridTree) -> Result<HybridTree> {
    let mut cur = ht.clone();
    for u in 0..gs.gadgets.len() {
        cur = group_gadget(gs, &cur, u)?.tree;
    }
    Ok(cur)
}

/// Contracts empty nodes into neighboring gadget nodes until every node
/// holds exactly one gadget.
pub fn hybrid_to_tree_mapping(gs: &Gstar, ht: &HybridTree) -> Result<TreeMapping> {
    ht.validate(gs)?;
    if let Some(g) = gs.gadgets.iter().find(|g| g.vertex_count() == 0) {
        return Err(Error::invalid(format!("gadget {} is empty", g.owner)));
    }
    let pre = ht.preimages();
    let mut holds: Vec<Option<usize>> = Vec::with_capacity(pre.len());
    for (t, p) in pre.iter().enumerate() {
        holds.push(match p.len() {
            0 => None,
            1 if gs.gadgets[gs.locate(p[0]).0].vertex_count() > 1 => {
                return Err(Error::GroupingIncomplete { node: t })
            }
            _ => Some(gs.locate(p[0]).0),
        });
    }
    let mut tree = ht.tree.clone();
    loop {
        let pair = (0..tree.node_count())
            .filter(|&t| holds[t].is_some())
            .find_map(|t| tree.neighbors(t).iter().find(|&&s| holds[s].is_none()).map(|&s| (t, s)));
        let Some((keep, gone)) = pair else { break };
        let remap = tree.contract(keep, gone)?;
        let mut next = vec![None; tree.node_count()];
        for (old, h) in holds.into_iter().enumerate() {
            if let Some(new) = remap[old] {
                next[new] = h;
            }
        }
        holds = next;
    }
    let mut placement = vec![usize::MAX; gs.gadgets.len()];
    for (t, h) in holds.iter().enumerate() {
        match h {
            Some(u) => placement[*u] = t,
            None => return Err(Error::invalid("tree holds no gadget at all")),
        }
    }
    TreeMapping::new(tree, placement)
}

/// Reads a mapping of (G*, 𝒮*) as a mapping of (G, 𝒮): part `S(u)` sits
/// where `V(𝒢(u))` did.
pub fn project_mapping_to_g(pg: &PartitionedGraph, m: &TreeMapping) -> Result<TreeMapping> {
    if m.placement.len() != pg.part_count() {
        return Err(Error::LengthMismatch { expected: pg.part_count(), got: m.placement.len() });
    }
    TreeMapping::new(m.tree.clone(), m.placement.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::red2::build_partitioned;
    use crate::wgraph::WeightedGraph;

    fn star(weights: &[u64]) -> PartitionedGraph {
        let n = weights.len() + 1;
        let edges: Vec<(usize, usize, u64)> = weights.iter().enumerate().map(|(i, &w)| (0, i + 1, w)).collect();
        build_partitioned(&WeightedGraph::from_edges(n, &edges).unwrap())
    }

    fn consts(a: u64, b: u64) -> Constants {
        Constants { tau: 36, gamma: 3, lambda: 6, a, b }
    }

    #[test]
    fn path_shape_and_chunks() {
        let pg = star(&[3, 3, 3]);
        let p = build_pu(&pg, 0, 3).unwrap();
        assert_eq!(p.len(), 18);
        let originals: Vec<usize> = p.iter().filter_map(|t| if let Tag::Original(o) = t { Some(*o) } else { None }).collect();
        // One vertex from each block per chunk.
        assert_eq!(originals, vec![0, 3, 6, 1, 4, 7, 2, 5, 8]);
        assert!(p.iter().step_by(2).all(|t| matches!(t, Tag::Original(_))));
        assert_eq!(p[17], Tag::Appended);
        let flat = build_pu(&pg, 0, 1).unwrap();
        assert_eq!(flat.len(), 18);
        assert_eq!(flat[2], Tag::Original(1));
        assert!(matches!(build_pu(&star(&[4]), 0, 3), Err(Error::Indivisible { len: 4, a: 3, .. })));
    }

    #[test]
    fn gadget_adjacency() {
        let pg = star(&[3, 3, 3]);
        let g = build_gadget(&pg, 0, &consts(3, 3)).unwrap();
        assert_eq!(g.vertex_count(), 54);
        let len = g.path_len();
        // Mid-path original in copy 1 against copy 2.
        let x = g.local(0, 4);
        let missing: Vec<usize> = (0..len).filter(|&p| !g.local_adjacent(x, g.local(1, p))).collect();
        assert_eq!(missing, vec![3, 4, 5]);
        // Appended vertex of copy 1: its successor along Q_u is a neighbor, the
        // other copies of that successor are not.
        let last = g.local(0, len - 1);
        assert_eq!(g.local_kind(last, g.local(1, 0)), Some(StarEdgeKind::Path));
        assert!(!g.local_adjacent(last, g.local(2, 0)));
        let single = build_gadget(&pg, 0, &consts(3, 1)).unwrap();
        let gg = Graph::materialize(&single, 100).unwrap();
        assert_eq!(gg.edge_count(), len - 1);
        // Copies stay induced paths.
        let full = Graph::materialize(&g, 100).unwrap();
        for k in 0..3 {
            let r: Vec<usize> = (0..len).map(|p| g.local(k, p)).collect();
            assert_eq!(full.induced(&r).edge_count(), len - 1);
        }
    }

    #[test]
    fn gstar_edges() {
        let pg = build_partitioned(&WeightedGraph::from_edges(2, &[(0, 1, 3)]).unwrap());
        let gs = build_gstar(&pg, &consts(3, 3)).unwrap();
        assert_eq!(gs.vertex_count(), 36);
        let counts = gs.edge_counts(100).unwrap();
        assert_eq!(counts[2], (StarEdgeKind::Matching, 3 * 9));
        assert_eq!(counts[3], (StarEdgeKind::Dummy, 0));
        let g = gs.to_graph(100).unwrap();
        for (x, y) in g.edges() {
            if gs.locate(x).0 != gs.locate(y).0 {
                assert!(gs.original_of(x).is_some() && gs.original_of(y).is_some());
            }
        }
        assert_eq!(gs.copies_of(4).len(), 3);
        assert!(gs.copies_of(4).iter().all(|&x| gs.original_of(x) == Some(4)));
    }

    fn two_gadgets() -> (Gstar, TreeLayout) {
        let pg = build_partitioned(&WeightedGraph::from_edges(2, &[(0, 1, 3)]).unwrap());
        let gs = build_gstar(&pg, &consts(3, 3)).unwrap();
        let layout = caterpillar_layout(&gs, &LinearOrder::identity(2)).unwrap();
        (gs, layout)
    }

    #[test]
    fn default_edge_on_caterpillar() {
        let (gs, layout) = two_gadgets();
        let ht = HybridTree::from_layout(&layout).unwrap();
        let site = find_default_edge(&gs, &ht, 0).unwrap();
        let DefaultSite::Edge(p, q) = site else { panic!("expected an edge") };
        let (a, b) = ht.cut((p, q)).unwrap();
        let g = gs.gadget(0);
        let whole = |side: &[usize]| (0..g.copies).any(|k| g.copy_range(k).all(|x| side.contains(&x)));
        assert!(whole(&a) && whole(&b));
    }

    #[test]
    fn grouping_and_contraction() {
        let (gs, layout) = two_gadgets();
        let ht = HybridTree::from_layout(&layout).unwrap();
        let once = group_gadget(&gs, &ht, 0).unwrap();
        let pre = once.tree.preimages();
        assert_eq!(pre.iter().filter(|p| p.len() == 18).count(), 1);
        assert!(pre.iter().all(|p| p.len() == 18 || p.len() <= 1));
        assert!(once.tree.tree.max_degree() <= 3);
        assert_eq!(once.correspondence.len(), once.tree.tree.edges().len());
        let again = group_gadget(&gs, &once.tree, 0).unwrap();
        assert_eq!(again.tree, once.tree);
        assert!(hybrid_to_tree_mapping(&gs, &ht).is_err());
        let all = group_all(&gs, &ht).unwrap();
        let m = hybrid_to_tree_mapping(&gs, &all).unwrap();
        assert_eq!(m.tree.node_count(), 2);
        let proj = project_mapping_to_g(gs.partitioned(), &m).unwrap();
        assert_eq!(proj.placement.len(), 2);
    }

    #[test]
    fn single_copy_has_no_default_edge() {
        let pg = build_partitioned(&WeightedGraph::from_edges(2, &[(0, 1, 3)]).unwrap());
        let gs = build_gstar(&pg, &consts(3, 1)).unwrap();
        let layout = caterpillar_layout(&gs, &LinearOrder::identity(2)).unwrap();
        let ht = HybridTree::from_layout(&layout).unwrap();
        assert_eq!(find_default_edge(&gs, &ht, 0), Err(Error::NoDefaultEdge { owner: 0 }));
    }

    #[test]
    fn crossing_family_is_induced() {
        let pg = star(&[3, 3]);
        let g = build_gadget(&pg, 0, &consts(3, 4)).unwrap();
        let graph = Graph::materialize(&g, 200).unwrap();
        // Cut every copy between positions 2 and 3.
        let class: Vec<usize> = (0..g.vertex_count()).map(|x| usize::from(g.split(x).1 > 2)).collect();
        let (_, edges) = same_position_crossing(&g, &class).unwrap();
        assert_eq!(edges.len(), 4);
        let vs: Vec<usize> = edges.iter().flat_map(|&(x, y)| [x, y]).collect();
        assert_eq!(graph.induced(&vs).edge_count(), 4);
    }
}
