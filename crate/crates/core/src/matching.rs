//! Exact maximum induced matchings across a cut.
//!
//! A set of cut edges is acceptable when no graph edge joins endpoints of two
//! different chosen edges, except along the sides the conflict rule ignores.
//! The search is a maximum clique over the compatibility graph of the cut
//! edges, bounded by greedy colouring.

use serde::{Deserialize, Serialize};

use crate::bits::BitSet;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Which adjacencies between two chosen edges `a1b1`, `a2b2` are forbidden.
/// Cross adjacencies `a1b2`, `a2b1` always are.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Conflict {
    pub within_a: bool,
    pub within_b: bool,
}

impl Conflict {
    /// Induced in the bipartite cut graph only.
    pub const SEMI: Conflict = Conflict { within_a: false, within_b: false };
    /// Induced in the whole graph.
    pub const FULL: Conflict = Conflict { within_a: true, within_b: true };
    /// Induced after deleting the edges inside `B`.
    pub const UPPER: Conflict = Conflict { within_a: true, within_b: false };
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchKind {
    Mim,
    Sim,
}

impl MatchKind {
    pub fn conflict(self) -> Conflict {
        match self {
            MatchKind::Mim => Conflict::SEMI,
            MatchKind::Sim => Conflict::FULL,
        }
    }
}

impl std::str::FromStr for MatchKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mim" => Ok(MatchKind::Mim),
            "sim" => Ok(MatchKind::Sim),
            _ => Err(Error::invalid(format!("unknown matching kind {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutValue {
    pub value: usize,
    /// False when the search stopped at the threshold: the true value is `≥ value`.
    pub exact: bool,
    /// Matching edges as `(a, b)` with `a ∈ A`, `b ∈ B`.
    pub witness: Vec<(usize, usize)>,
    pub nodes: u64,
}

impl CutValue {
    pub fn at_least(&self, t: usize) -> bool {
        self.value >= t
    }
}

/// Maximum acceptable matching between `a` and `b` (disjoint, any vertices
/// outside both are ignored). With `threshold`, stops once that size is found.
pub fn max_cut_matching(
    g: &Graph,
    a: &[usize],
    b: &[usize],
    conflict: Conflict,
    threshold: Option<usize>,
    budget: u64,
) -> Result<CutValue> {
    let n = g.vertex_count();
    let mut in_a = BitSet::new(n);
    let mut in_b = BitSet::new(n);
    for &v in a {
        if v >= n {
            return Err(Error::UnknownVertex(v));
        }
        in_a.insert(v);
    }
    for &v in b {
        if v >= n {
            return Err(Error::UnknownVertex(v));
        }
        if in_a.contains(v) {
            return Err(Error::invalid(format!("vertex {v} is on both sides of the cut")));
        }
        in_b.insert(v);
    }
    let mut cands: Vec<(usize, usize)> = Vec::new();
    for x in in_a.iter() {
        for y in g.neighbors(x).intersection(&in_b).iter() {
            cands.push((x, y));
        }
    }
    let m = cands.len();
    let mut compat: Vec<BitSet> = (0..m).map(|_| BitSet::new(m)).collect();
    for i in 0..m {
        let (a1, b1) = cands[i];
        for j in i + 1..m {
            let (a2, b2) = cands[j];
            let clash = a1 == a2
                || b1 == b2
                || g.has_edge(a1, b2)
                || g.has_edge(a2, b1)
                || (conflict.within_a && g.has_edge(a1, a2))
                || (conflict.within_b && g.has_edge(b1, b2));
            if !clash {
                compat[i].insert(j);
                compat[j].insert(i);
            }
        }
    }
    let mut search = Clique {
        compat: &compat,
        best: Vec::new(),
        current: Vec::new(),
        target: threshold.unwrap_or(usize::MAX),
        nodes: 0,
        budget,
    };
    search.expand(BitSet::full(m))?;
    let value = search.best.len();
    let exact = threshold.is_none_or(|t| value < t);
    Ok(CutValue { value, exact, witness: search.best.iter().map(|&i| cands[i]).collect(), nodes: search.nodes })
}

struct Clique<'a> {
    compat: &'a [BitSet],
    best: Vec<usize>,
    current: Vec<usize>,
    target: usize,
    nodes: u64,
    budget: u64,
}

impl Clique<'_> {
    fn done(&self) -> bool {
        self.best.len() >= self.target
    }

    fn expand(&mut self, mut p: BitSet) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded { budget: self.budget });
        }
        if p.is_empty() {
            if self.current.len() > self.best.len() {
                self.best = self.current.clone();
            }
            return Ok(());
        }
        let (order, colors) = self.color(&p);
        for i in (0..order.len()).rev() {
            if self.current.len() + colors[i] <= self.best.len() || self.done() {
                return Ok(());
            }
            let v = order[i];
            self.current.push(v);
            self.expand(p.intersection(&self.compat[v]))?;
            self.current.pop();
            p.remove(v);
        }
        Ok(())
    }

    /// Greedy colouring of `p`; vertices listed by nondecreasing colour.
    fn color(&self, p: &BitSet) -> (Vec<usize>, Vec<usize>) {
        let mut order = Vec::with_capacity(p.count());
        let mut colors = Vec::with_capacity(order.capacity());
        let mut uncolored = p.clone();
        let mut k = 0;
        while !uncolored.is_empty() {
            k += 1;
            let mut q = uncolored.clone();
            while let Some(v) = q.first() {
                q.remove(v);
                q.difference_with(&self.compat[v]);
                uncolored.remove(v);
                order.push(v);
                colors.push(k);
            }
        }
        (order, colors)
    }
}

/// Checks a matching given as oriented edges `(a, b)` against `conflict`.
pub fn is_acceptable_matching(g: &Graph, edges: &[(usize, usize)], conflict: Conflict) -> bool {
    let n = g.vertex_count();
    if edges.iter().any(|&(a, b)| a >= n || b >= n || !g.has_edge(a, b)) {
        return false;
    }
    edges.iter().enumerate().all(|(i, &(a1, b1))| {
        edges[i + 1..].iter().all(|&(a2, b2)| {
            let distinct = a1 != a2 && b1 != b2 && a1 != b2 && a2 != b1;
            distinct
                && !g.has_edge(a1, b2)
                && !g.has_edge(a2, b1)
                && !(conflict.within_a && g.has_edge(a1, a2))
                && !(conflict.within_b && g.has_edge(b1, b2))
        })
    })
}

/// Exact (or threshold) mim/sim value of the cut `(A, B)`.
pub fn cut_value(
    g: &Graph,
    a: &[usize],
    b: &[usize],
    kind: MatchKind,
    threshold: Option<usize>,
    budget: u64,
) -> Result<CutValue> {
    max_cut_matching(g, a, b, kind.conflict(), threshold, budget)
}

/// Upper-induced matching number of `x`: edges inside the complement are
/// deleted before the induced matching search.
pub fn uim(g: &Graph, x: &[usize], budget: u64) -> Result<CutValue> {
    let mut inside = vec![false; g.vertex_count()];
    for &v in x {
        if v >= inside.len() {
            return Err(Error::UnknownVertex(v));
        }
        inside[v] = true;
    }
    let rest: Vec<usize> = (0..g.vertex_count()).filter(|&v| !inside[v]).collect();
    max_cut_matching(g, x, &rest, Conflict::UPPER, None, budget)
}
