//! JSON documents for every graph the pipeline produces.
//!
//! Weighted graphs list their edges with weights. The step-2 and step-3
//! graphs are rebuilt from their blocks and gadgets; their edges are listed
//! (with kinds) only up to [`EXPLICIT_EDGE_CAP`] vertices, and a short rule
//! text describes the adjacency otherwise.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::red1::{BuiltH, Constants, HMeta};
use crate::red2::{Block, PartitionedGraph};
use crate::red3::{Gadget, Gstar, HybridTree, Tag};
use crate::wgraph::{Role, WeightedGraph};

pub const FORMAT_VERSION: u32 = 1;
pub const EXPLICIT_EDGE_CAP: usize = 512;
/// Documents list every vertex, so they stop here.
pub const DOCUMENT_VERTEX_CAP: usize = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Plain,
    H,
    G,
    Gstar,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexEntry {
    pub id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<Role>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub part: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub copy: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<Tag>,
}

impl VertexEntry {
    fn bare(id: usize) -> Self {
        VertexEntry { id, label: None, role: None, part: None, copy: None, position: None, tag: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeEntry {
    pub u: usize,
    pub v: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<Constants>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub groups: BTreeMap<String, Vec<usize>>,
    #[serde(default)]
    pub provenance: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<HMeta>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub format_version: u32,
    pub stage: Stage,
    pub vertices: Vec<VertexEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<EdgeEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parts: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<Block>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gadgets: Option<Vec<Gadget>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_rules: Option<Vec<String>>,
    pub meta: Meta,
}

const G_RULES: [&str; 2] = [
    "matching: the i-th vertex of block I(u,v) and the i-th vertex of block I(v,u)",
    "dummy: every vertex of I(u,v) and every vertex of I(p,q) when {u,v} and {p,q} are disjoint",
];

const GSTAR_RULES: [&str; 4] = [
    "path: consecutive vertices of Q_u, the concatenation of the copies of P_u",
    "gadget: vertices of distinct copies whose positions differ by at least 2 cyclically along P_u",
    "matching: copies of the two ends of a matching edge of G",
    "dummy: copies of the two ends of a dummy edge of G",
];

fn kind_name<T: Serialize>(k: T) -> String {
    serde_json::to_value(k).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
}

impl GraphDocument {
    fn empty(stage: Stage, n: usize) -> Self {
        GraphDocument {
            format_version: FORMAT_VERSION,
            stage,
            vertices: (0..n).map(VertexEntry::bare).collect(),
            edges: None,
            parts: None,
            blocks: None,
            gadgets: None,
            edge_rules: None,
            meta: Meta::default(),
        }
    }

    pub fn from_plain(g: &Graph) -> Self {
        let mut doc = GraphDocument::empty(Stage::Plain, g.vertex_count());
        doc.edges = Some(g.edges().into_iter().map(|(u, v)| EdgeEntry { u, v, weight: None, kind: None }).collect());
        doc.meta.provenance = "plain".into();
        doc
    }

    pub fn from_weighted(h: &WeightedGraph) -> Self {
        let mut doc = GraphDocument::empty(Stage::H, h.vertex_count());
        for (e, v) in doc.vertices.iter_mut().zip(h.vertices()) {
            e.label = Some(v.label.clone());
            e.role = Some(v.role);
        }
        doc.edges =
            Some(h.edges().iter().map(|&(u, v, w)| EdgeEntry { u, v, weight: Some(w), kind: None }).collect());
        doc.meta.provenance = "weighted".into();
        doc
    }

    pub fn from_h(h: &BuiltH) -> Self {
        let mut doc = GraphDocument::from_weighted(&h.graph);
        let m = &h.meta;
        doc.meta.constants = Some(m.constants);
        for (name, group) in [
            ("variables", &m.variables),
            ("variable_bars", &m.variable_bars),
            ("t", &m.t),
            ("t_bars", &m.t_bars),
            ("f", &m.f),
            ("f_bars", &m.f_bars),
            ("clauses", &m.clauses),
            ("x", &m.x),
            ("y", &m.y),
        ] {
            doc.meta.groups.insert(name.into(), group.clone());
        }
        doc.meta.provenance = "step1".into();
        doc.meta.h = Some(m.clone());
        doc
    }

    pub fn from_partitioned(pg: &PartitionedGraph, constants: Option<Constants>) -> Result<Self> {
        let n = pg.vertex_count();
        if n > DOCUMENT_VERTEX_CAP {
            return Err(Error::CapExceeded { size: n, cap: DOCUMENT_VERTEX_CAP });
        }
        let mut doc = GraphDocument::empty(Stage::G, n);
        for (x, e) in doc.vertices.iter_mut().enumerate() {
            e.part = Some(pg.part_of(x));
        }
        doc.parts = Some(pg.parts());
        doc.blocks = Some(pg.blocks().to_vec());
        doc.edge_rules = Some(G_RULES.iter().map(|s| s.to_string()).collect());
        if n <= EXPLICIT_EDGE_CAP {
            let g = pg.to_graph(EXPLICIT_EDGE_CAP)?;
            doc.edges = Some(
                g.edges()
                    .into_iter()
                    .map(|(u, v)| EdgeEntry { u, v, weight: None, kind: pg.edge_kind(u, v).map(kind_name) })
                    .collect(),
            );
        }
        doc.meta.constants = constants;
        doc.meta.provenance = "step2".into();
        Ok(doc)
    }

    pub fn from_gstar(gs: &Gstar, constants: Option<Constants>) -> Result<Self> {
        let n = gs.vertex_count();
        if n > DOCUMENT_VERTEX_CAP {
            return Err(Error::CapExceeded { size: n, cap: DOCUMENT_VERTEX_CAP });
        }
        let mut doc = GraphDocument::empty(Stage::Gstar, n);
        for (x, e) in doc.vertices.iter_mut().enumerate() {
            let (u, copy, pos) = gs.locate(x);
            e.part = Some(u);
            e.copy = Some(copy);
            e.position = Some(pos);
            e.tag = Some(gs.gadget(u).path[pos]);
        }
        doc.blocks = Some(gs.partitioned().blocks().to_vec());
        doc.gadgets = Some(gs.gadgets().to_vec());
        doc.edge_rules = Some(GSTAR_RULES.iter().map(|s| s.to_string()).collect());
        if n <= EXPLICIT_EDGE_CAP {
            let g = gs.to_graph(EXPLICIT_EDGE_CAP)?;
            doc.edges = Some(
                g.edges()
                    .into_iter()
                    .map(|(u, v)| EdgeEntry { u, v, weight: None, kind: gs.edge_kind(u, v).map(kind_name) })
                    .collect(),
            );
        }
        doc.meta.constants = constants;
        doc.meta.provenance = "step3".into();
        Ok(doc)
    }

    /// Structural checks shared by every stage.
    pub fn validate(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::invalid(format!("unsupported format version {}", self.format_version)));
        }
        let n = self.vertices.len();
        for (i, v) in self.vertices.iter().enumerate() {
            if v.id != i {
                return Err(Error::invalid(format!("vertex ids must be dense: found {} at index {i}", v.id)));
            }
        }
        let weighted = matches!(self.stage, Stage::H);
        let kinded = matches!(self.stage, Stage::G | Stage::Gstar);
        for e in self.edges.iter().flatten() {
            if e.u >= n || e.v >= n {
                return Err(Error::UnknownVertex(e.u.max(e.v)));
            }
            if e.weight.is_some() != weighted {
                return Err(Error::invalid(format!("edge ({}, {}): weight present iff the graph is weighted", e.u, e.v)));
            }
            if e.kind.is_some() != kinded {
                return Err(Error::invalid(format!("edge ({}, {}): kind present iff step 2 or 3", e.u, e.v)));
            }
        }
        for group in self.meta.groups.values().chain(self.parts.iter().flatten()) {
            if let Some(&x) = group.iter().find(|&&x| x >= n) {
                return Err(Error::UnknownVertex(x));
            }
        }
        match self.stage {
            Stage::Plain | Stage::H if self.edges.is_none() => Err(Error::invalid("edge list missing")),
            Stage::G if self.blocks.is_none() => Err(Error::invalid("blocks missing")),
            Stage::Gstar if self.gadgets.is_none() || self.blocks.is_none() => {
                Err(Error::invalid("gadgets or blocks missing"))
            }
            _ => Ok(()),
        }
    }

    fn expect(&self, stage: Stage) -> Result<()> {
        self.validate()?;
        if self.stage != stage {
            return Err(Error::invalid(format!("expected a {} document, found {}", kind_name(stage), kind_name(self.stage))));
        }
        Ok(())
    }

    pub fn to_weighted(&self) -> Result<WeightedGraph> {
        self.expect(Stage::H)?;
        let mut h = WeightedGraph::new();
        for v in &self.vertices {
            h.add_vertex(v.label.clone().unwrap_or_default(), v.role.unwrap_or(Role::Plain));
        }
        for e in self.edges.iter().flatten() {
            h.add_edge(e.u, e.v, e.weight.expect("validated"))?;
        }
        Ok(h)
    }

    pub fn to_h(&self) -> Result<BuiltH> {
        let graph = self.to_weighted()?;
        let meta = self.meta.h.clone().ok_or_else(|| Error::invalid("document carries no H(φ) metadata"))?;
        Ok(BuiltH { graph, meta })
    }

    pub fn to_partitioned(&self) -> Result<PartitionedGraph> {
        self.expect(Stage::G)?;
        let pg = self.rebuild_partitioned()?;
        if pg.vertex_count() != self.vertices.len() {
            return Err(Error::LengthMismatch { expected: self.vertices.len(), got: pg.vertex_count() });
        }
        if self.parts.as_ref().is_some_and(|p| *p != pg.parts()) {
            return Err(Error::invalid("parts disagree with the blocks"));
        }
        self.check_edges(|| pg.to_graph(EXPLICIT_EDGE_CAP.max(self.vertices.len())), |u, v| {
            pg.edge_kind(u, v).map(kind_name)
        })?;
        Ok(pg)
    }

    fn rebuild_partitioned(&self) -> Result<PartitionedGraph> {
        let blocks = self.blocks.clone().expect("validated");
        let parts = match &self.gadgets {
            Some(g) => g.len(),
            None => self.parts.as_ref().map_or_else(|| blocks.iter().map(|b| b.owner + 1).max().unwrap_or(0), Vec::len),
        };
        PartitionedGraph::from_block_list(parts, blocks)
    }

    pub fn to_gstar(&self) -> Result<Gstar> {
        self.expect(Stage::Gstar)?;
        let gs = Gstar::from_parts(self.rebuild_partitioned()?, self.gadgets.clone().expect("validated"))?;
        if gs.vertex_count() != self.vertices.len() {
            return Err(Error::LengthMismatch { expected: self.vertices.len(), got: gs.vertex_count() });
        }
        for (x, v) in self.vertices.iter().enumerate() {
            let (u, copy, pos) = gs.locate(x);
            let tag = gs.gadget(u).path[pos];
            let agrees = v.part.is_none_or(|p| p == u)
                && v.copy.is_none_or(|c| c == copy)
                && v.position.is_none_or(|p| p == pos)
                && v.tag.is_none_or(|t| t == tag);
            if !agrees {
                return Err(Error::invalid(format!("vertex {x} disagrees with the gadget layout")));
            }
        }
        self.check_edges(|| gs.to_graph(EXPLICIT_EDGE_CAP.max(self.vertices.len())), |u, v| {
            gs.edge_kind(u, v).map(kind_name)
        })?;
        Ok(gs)
    }

    /// Listed edges, when present, must be exactly the rebuilt ones.
    fn check_edges(
        &self,
        rebuild: impl FnOnce() -> Result<Graph>,
        kind: impl Fn(usize, usize) -> Option<String>,
    ) -> Result<()> {
        let Some(edges) = &self.edges else { return Ok(()) };
        let g = rebuild()?;
        if edges.len() != g.edge_count() {
            return Err(Error::invalid(format!("{} edges listed, {} rebuilt", edges.len(), g.edge_count())));
        }
        for e in edges {
            if !g.has_edge(e.u, e.v) || e.kind != kind(e.u, e.v) {
                return Err(Error::invalid(format!("edge ({}, {}) disagrees with the construction", e.u, e.v)));
            }
        }
        Ok(())
    }

    /// The unweighted graph of any stage, refusing more than `cap` vertices.
    pub fn to_graph(&self, cap: usize) -> Result<Graph> {
        self.validate()?;
        match self.stage {
            Stage::Plain | Stage::H => {
                let n = self.vertices.len();
                if n > cap {
                    return Err(Error::CapExceeded { size: n, cap });
                }
                let mut g = Graph::new(n);
                for e in self.edges.iter().flatten() {
                    g.add_edge(e.u, e.v)?;
                }
                Ok(g)
            }
            Stage::G => self.to_partitioned()?.to_graph(cap),
            Stage::Gstar => self.to_gstar()?.to_graph(cap),
        }
    }

    /// Vertex sets of the parts, if the stage has any.
    pub fn part_sets(&self) -> Result<Option<Vec<Vec<usize>>>> {
        match self.stage {
            Stage::G => Ok(Some(self.to_partitioned()?.parts())),
            Stage::Gstar => Ok(Some(self.to_gstar()?.parts())),
            _ => Ok(self.parts.clone()),
        }
    }
}

/// A hybrid tree with the vertices held by every node.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HybridDocument {
    pub format_version: u32,
    #[serde(flatten)]
    pub hybrid: HybridTree,
    pub preimages: Vec<Vec<usize>>,
}

impl HybridDocument {
    pub fn new(hybrid: HybridTree) -> Self {
        let preimages = hybrid.preimages();
        HybridDocument { format_version: FORMAT_VERSION, hybrid, preimages }
    }

    pub fn into_hybrid(self) -> Result<HybridTree> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::invalid(format!("unsupported format version {}", self.format_version)));
        }
        let ht = HybridTree::new(self.hybrid.tree, self.hybrid.placement)?;
        if ht.preimages() != self.preimages {
            return Err(Error::invalid("preimages disagree with the placement"));
        }
        Ok(ht)
    }
}

/// A vertex bipartition to evaluate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutDocument {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

pub fn to_json<T: Serialize>(x: &T) -> String {
    let mut s = serde_json::to_string_pretty(x).expect("serializable");
    s.push('\n');
    s
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Syntax { line: e.line(), col: e.column(), msg: e.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_nae_dimacs;
    use crate::red1::build_h_scaled;
    use crate::red2::build_partitioned;
    use crate::red3::build_gstar;

    fn tiny() -> (PartitionedGraph, Constants) {
        let h = WeightedGraph::from_edges(3, &[(0, 1, 3), (1, 2, 3)]).unwrap();
        (build_partitioned(&h), Constants { tau: 36, gamma: 3, lambda: 6, a: 3, b: 2 })
    }

    #[test]
    fn plain_round_trip() {
        let g = Graph::cycle(5);
        let doc = GraphDocument::from_plain(&g);
        let back: GraphDocument = from_json(&to_json(&doc)).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.to_graph(10).unwrap(), g);
    }

    #[test]
    fn h_round_trip() {
        let f = parse_nae_dimacs("p cnf 3 4\n1 2 3 0\n1 2 3 0\n1 2 3 0\n1 2 3 0\n", true).unwrap();
        let h = build_h_scaled(&f, &Constants::small(3)).unwrap();
        let doc = GraphDocument::from_h(&h);
        let back: GraphDocument = from_json(&to_json(&doc)).unwrap();
        assert_eq!(back.to_h().unwrap().graph, h.graph);
        assert_eq!(back.to_h().unwrap().meta, h.meta);
    }

    #[test]
    fn step_documents_round_trip() {
        let (pg, c) = tiny();
        let doc = GraphDocument::from_partitioned(&pg, Some(c)).unwrap();
        let back: GraphDocument = from_json(&to_json(&doc)).unwrap();
        assert_eq!(back.to_partitioned().unwrap(), pg);
        let gs = build_gstar(&pg, &c).unwrap();
        let doc = GraphDocument::from_gstar(&gs, Some(c)).unwrap();
        let back: GraphDocument = from_json(&to_json(&doc)).unwrap();
        assert_eq!(back.to_gstar().unwrap(), gs);
    }

    #[test]
    fn tampering_detected() {
        let (pg, c) = tiny();
        let mut doc = GraphDocument::from_partitioned(&pg, Some(c)).unwrap();
        doc.edges.as_mut().unwrap().pop();
        assert!(doc.to_partitioned().is_err());
        let mut doc = GraphDocument::from_plain(&Graph::path(3));
        doc.vertices[1].id = 7;
        assert!(doc.validate().is_err());
        let mut doc = GraphDocument::from_plain(&Graph::path(3));
        doc.edges.as_mut().unwrap()[0].weight = Some(2);
        assert!(doc.validate().is_err());
    }
}
