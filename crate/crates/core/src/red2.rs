//! Step 2: the partitioned graph (G, 𝒮) of a weighted graph H, and tree
//! mappings of partitioned graphs.
//!
//! Every H-vertex `u` becomes an independent part `S(u)`, split into blocks
//! `I(u, v)` of size `ω(uv)`, one per neighbor. Blocks `I(u, v)` and `I(v, u)`
//! are joined by a perfect matching; blocks of disjoint H-edges by bicliques.
//! Dummy bicliques are quadratic in the total weight, so adjacency is computed
//! from the block layout rather than stored.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Adjacency, Graph};
use crate::matching::{cut_value, CutValue, MatchKind};
use crate::tree::Tree;
use crate::wgraph::{BalancingTree, LinearOrder, WeightedGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Matching,
    Dummy,
}

/// `I(owner, toward)`: vertices `start..start + len`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub owner: usize,
    pub toward: usize,
    pub start: usize,
    pub len: usize,
}

impl Block {
    pub fn range(&self) -> Range<usize> {
        self.start..self.start + self.len
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionedGraph {
    blocks: Vec<Block>,
    /// Index of the block `I(v, u)` paired with each block `I(u, v)`.
    mirror: Vec<usize>,
    parts: Vec<Range<usize>>,
    block_of: Vec<u32>,
}

/// Lays out `I(u, v)` for `u` ascending and `v ∈ N(u)` ascending.
pub fn build_partitioned(h: &WeightedGraph) -> PartitionedGraph {
    let mut blocks = Vec::new();
    let mut parts = Vec::with_capacity(h.vertex_count());
    let mut next = 0;
    for u in 0..h.vertex_count() {
        let mut nbrs = h.neighbors(u).to_vec();
        nbrs.sort_unstable();
        let begin = next;
        for (v, w) in nbrs {
            blocks.push(Block { owner: u, toward: v, start: next, len: w as usize });
            next += w as usize;
        }
        parts.push(begin..next);
    }
    PartitionedGraph::from_blocks(blocks, parts)
}

impl PartitionedGraph {
    fn from_blocks(blocks: Vec<Block>, parts: Vec<Range<usize>>) -> Self {
        let n = parts.last().map_or(0, |r| r.end);
        let mut block_of = vec![0u32; n];
        for (i, b) in blocks.iter().enumerate() {
            for x in b.range() {
                block_of[x] = i as u32;
            }
        }
        let index: std::collections::HashMap<(usize, usize), usize> =
            blocks.iter().enumerate().map(|(i, b)| ((b.owner, b.toward), i)).collect();
        let mirror = blocks.iter().map(|b| index[&(b.toward, b.owner)]).collect();
        PartitionedGraph { blocks, mirror, parts, block_of }
    }

    /// Rebuilds a partitioned graph from a serialized block list.
    pub fn from_block_list(part_count: usize, blocks: Vec<Block>) -> Result<Self> {
        let mut parts = Vec::with_capacity(part_count);
        let mut next = 0;
        let mut i = 0;
        for u in 0..part_count {
            let begin = next;
            while i < blocks.len() && blocks[i].owner == u {
                if blocks[i].start != next {
                    return Err(Error::invalid(format!("block {i} does not start at {next}")));
                }
                next += blocks[i].len;
                i += 1;
            }
            parts.push(begin..next);
        }
        if i != blocks.len() {
            return Err(Error::invalid("blocks are not grouped by ascending owner"));
        }
        let index: std::collections::HashSet<(usize, usize)> = blocks.iter().map(|b| (b.owner, b.toward)).collect();
        for b in &blocks {
            if b.toward >= part_count || b.owner == b.toward {
                return Err(Error::invalid(format!("block I({},{}) points nowhere", b.owner, b.toward)));
            }
            if !index.contains(&(b.toward, b.owner)) {
                return Err(Error::invalid(format!("block I({},{}) has no mirror", b.owner, b.toward)));
            }
        }
        let pg = PartitionedGraph::from_blocks(blocks, parts);
        for (i, b) in pg.blocks.iter().enumerate() {
            if pg.blocks[pg.mirror[i]].len != b.len {
                return Err(Error::invalid(format!("blocks I({},{}) and its mirror differ in size", b.owner, b.toward)));
            }
        }
        Ok(pg)
    }

    pub fn vertex_count(&self) -> usize {
        self.block_of.len()
    }

    pub fn part_count(&self) -> usize {
        self.parts.len()
    }

    pub fn part(&self, u: usize) -> Range<usize> {
        self.parts[u].clone()
    }

    pub fn parts(&self) -> Vec<Vec<usize>> {
        self.parts.iter().map(|r| r.clone().collect()).collect()
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block(&self, u: usize, v: usize) -> Option<&Block> {
        self.blocks.iter().find(|b| b.owner == u && b.toward == v)
    }

    pub fn block_of(&self, x: usize) -> &Block {
        &self.blocks[self.block_of[x] as usize]
    }

    pub fn part_of(&self, x: usize) -> usize {
        self.block_of(x).owner
    }

    /// The other endpoint of the matching edge at `x`.
    pub fn matching_partner(&self, x: usize) -> usize {
        let bi = self.block_of[x] as usize;
        self.blocks[self.mirror[bi]].start + (x - self.blocks[bi].start)
    }

    pub fn edge_kind(&self, x: usize, y: usize) -> Option<EdgeKind> {
        let (bx, by) = (self.block_of(x), self.block_of(y));
        if bx.owner == by.owner {
            None
        } else if bx.owner == by.toward && bx.toward == by.owner {
            (x - bx.start == y - by.start).then_some(EdgeKind::Matching)
        } else if bx.owner != by.toward && bx.toward != by.owner && bx.toward != by.toward {
            Some(EdgeKind::Dummy)
        } else {
            None
        }
    }

    /// Matching edges `(x, y)` with `x < y`, ascending.
    pub fn matching_edges(&self) -> Vec<(usize, usize)> {
        (0..self.vertex_count())
            .filter_map(|x| {
                let y = self.matching_partner(x);
                (x < y).then_some((x, y))
            })
            .collect()
    }

    /// `(matching, dummy)` edge counts, computed from the block sizes.
    pub fn edge_counts(&self) -> (usize, usize) {
        let matching = self.vertex_count() / 2;
        let mut dummy = 0;
        for (i, b) in self.blocks.iter().enumerate() {
            for c in &self.blocks[i + 1..] {
                let disjoint = b.owner != c.owner && b.owner != c.toward && b.toward != c.owner && b.toward != c.toward;
                if disjoint {
                    dummy += b.len * c.len;
                }
            }
        }
        (matching, dummy)
    }

    pub fn to_graph(&self, cap: usize) -> Result<Graph> {
        Graph::materialize(self, cap)
    }

    /// Checks the layout against `h`: block sizes equal edge weights, parts
    /// are the union of their blocks, and (up to `cap` vertices) the explicit
    /// adjacency has independent parts, perfect matchings between paired
    /// blocks, and complete bicliques exactly between disjoint H-edges.
    pub fn check_against(&self, h: &WeightedGraph, cap: usize) -> Result<()> {
        if self.part_count() != h.vertex_count() {
            return Err(Error::invalid("part count differs from the H vertex count"));
        }
        for b in &self.blocks {
            if h.weight(b.owner, b.toward) != Some(b.len as u64) {
                return Err(Error::invalid(format!("|I({},{})| is not ω({},{})", b.owner, b.toward, b.owner, b.toward)));
            }
        }
        for u in 0..h.vertex_count() {
            let w = h.vertex_weight(u)? as usize;
            if self.parts[u].len() != w {
                return Err(Error::invalid(format!("|S({u})| = {} but u has weight {w}", self.parts[u].len())));
            }
        }
        if self.vertex_count() as u64 != 2 * h.total_weight() {
            return Err(Error::invalid("vertex count is not twice the total weight"));
        }
        if self.vertex_count() > cap {
            return Ok(());
        }
        let g = self.to_graph(cap)?;
        for u in 0..self.part_count() {
            let r = self.part(u);
            for x in r.clone() {
                if r.clone().any(|y| g.has_edge(x, y)) {
                    return Err(Error::invalid(format!("S({u}) is not independent")));
                }
            }
        }
        for (i, b) in self.blocks.iter().enumerate() {
            let m = &self.blocks[self.mirror[i]];
            for x in b.range() {
                let hits: Vec<usize> = m.range().filter(|&y| g.has_edge(x, y)).collect();
                if hits.len() != 1 {
                    return Err(Error::invalid(format!("vertex {x} is not matched exactly once into I({},{})", m.owner, m.toward)));
                }
            }
            for c in &self.blocks {
                let disjoint = b.owner != c.owner && b.owner != c.toward && b.toward != c.owner && b.toward != c.toward;
                if c.owner == b.toward && c.toward == b.owner {
                    continue;
                }
                let edges = b.range().flat_map(|x| c.range().map(move |y| (x, y))).filter(|&(x, y)| g.has_edge(x, y)).count();
                let expect = if disjoint { b.len * c.len } else { 0 };
                if edges != expect {
                    return Err(Error::invalid(format!(
                        "blocks I({},{}) and I({},{}) share {edges} edges, expected {expect}",
                        b.owner, b.toward, c.owner, c.toward
                    )));
                }
            }
        }
        Ok(())
    }
}

impl Adjacency for PartitionedGraph {
    fn vertex_count(&self) -> usize {
        self.block_of.len()
    }

    fn adjacent(&self, u: usize, v: usize) -> bool {
        self.edge_kind(u, v).is_some()
    }
}

/// A tree whose nodes carry the parts of a partition bijectively.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeMapping {
    #[serde(with = "tree_serde")]
    pub tree: Tree,
    /// `placement[u]` is the node holding part `u`.
    pub placement: Vec<usize>,
    pub path: bool,
}

impl TreeMapping {
    pub fn new(tree: Tree, placement: Vec<usize>) -> Result<Self> {
        let n = tree.node_count();
        if placement.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: placement.len() });
        }
        let mut seen = vec![false; n];
        for &p in &placement {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::invalid("placement is not a bijection onto the tree nodes"));
            }
        }
        let path = tree.is_path();
        Ok(TreeMapping { tree, placement, path })
    }

    /// Part held by every node.
    pub fn part_at(&self) -> Vec<usize> {
        let mut at = vec![0; self.placement.len()];
        for (u, &p) in self.placement.iter().enumerate() {
            at[p] = u;
        }
        at
    }
}

/// Serializes a tree as its sorted edge list plus node count.
pub(crate) mod tree_serde {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::tree::Tree;

    #[derive(Serialize, Deserialize)]
    struct Repr {
        nodes: usize,
        edges: Vec<(usize, usize)>,
    }

    pub fn serialize<S: Serializer>(t: &Tree, s: S) -> Result<S::Ok, S::Error> {
        Repr { nodes: t.node_count(), edges: t.edges() }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Tree, D::Error> {
        let r = Repr::deserialize(d)?;
        Tree::from_edges(r.nodes, &r.edges).map_err(serde::de::Error::custom)
    }
}

/// The cut of the partition defined by tree edge `(p, q)`: parts on `p`'s
/// side, then parts on `q`'s side.
pub fn mapping_cut(parts: &[Vec<usize>], m: &TreeMapping, edge: (usize, usize)) -> Result<(Vec<usize>, Vec<usize>)> {
    let (p, q) = edge;
    if !m.tree.has_edge(p, q) {
        return Err(Error::invalid(format!("({p}, {q}) is not a tree edge")));
    }
    if parts.len() != m.placement.len() {
        return Err(Error::LengthMismatch { expected: m.placement.len(), got: parts.len() });
    }
    let side = m.tree.side(p, q);
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for (u, part) in parts.iter().enumerate() {
        if side[m.placement[u]] {
            a.extend(part);
        } else {
            b.extend(part);
        }
    }
    a.sort_unstable();
    b.sort_unstable();
    Ok((a, b))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeValue {
    pub edge: (usize, usize),
    pub value: usize,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingValue {
    pub value: usize,
    /// False when some edge stopped at the threshold.
    pub exact: bool,
    pub edges: Vec<EdgeValue>,
    pub nodes: u64,
}

/// Largest cut value over the tree edges. With a threshold, stops at the first
/// edge whose value reaches it.
pub fn mapping_value(
    g: &Graph,
    parts: &[Vec<usize>],
    m: &TreeMapping,
    kind: MatchKind,
    threshold: Option<usize>,
    budget: u64,
) -> Result<MappingValue> {
    let mut out = MappingValue { value: 0, exact: true, edges: Vec::new(), nodes: 0 };
    for edge in m.tree.edges() {
        let (a, b) = mapping_cut(parts, m, edge)?;
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

/// The path mapping placing part `ord[i]` on node `i`.
pub fn path_mapping_from_order(part_count: usize, ord: &LinearOrder) -> Result<TreeMapping> {
    if ord.len() != part_count {
        return Err(Error::LengthMismatch { expected: part_count, got: ord.len() });
    }
    if part_count == 0 {
        return Err(Error::invalid("no parts to map"));
    }
    TreeMapping::new(Tree::path(part_count), ord.positions())
}

/// Reads a mapping of `(G(H), 𝒮(H))` as a balancing tree of `H`: vertex `u`
/// goes where part `S(u)` was.
pub fn balancing_tree_from_mapping(h: &WeightedGraph, m: &TreeMapping) -> Result<BalancingTree> {
    if m.placement.len() != h.vertex_count() {
        return Err(Error::LengthMismatch { expected: h.vertex_count(), got: m.placement.len() });
    }
    BalancingTree::new(m.tree.clone(), m.placement.clone())
}
