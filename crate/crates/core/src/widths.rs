//! Cut values of tree layouts and exhaustive exact widths of tiny graphs.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::layout::{LayoutRepr, TreeLayout};
use crate::matching::{cut_value, uim, MatchKind};
use crate::tree::Tree;

pub const GENERAL_CAP: usize = 8;
pub const LINEAR_CAP: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WidthKind {
    Mim,
    Sim,
    Omim,
}

impl WidthKind {
    pub const ALL: [WidthKind; 3] = [WidthKind::Sim, WidthKind::Omim, WidthKind::Mim];
}

impl std::str::FromStr for WidthKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mim" => Ok(WidthKind::Mim),
            "sim" => Ok(WidthKind::Sim),
            "omim" => Ok(WidthKind::Omim),
            _ => Err(Error::invalid(format!("unknown width kind {s:?}"))),
        }
    }
}

/// Value of the cut `(a, b)` under `kind`, with the search nodes spent.
pub fn cut_width(g: &Graph, a: &[usize], b: &[usize], kind: WidthKind, budget: u64) -> Result<(usize, u64)> {
    match kind {
        WidthKind::Mim | WidthKind::Sim => {
            let mk = if kind == WidthKind::Mim { MatchKind::Mim } else { MatchKind::Sim };
            let r = cut_value(g, a, b, mk, None, budget)?;
            Ok((r.value, r.nodes))
        }
        WidthKind::Omim => {
            let ra = uim(g, a, budget)?;
            let rb = uim(g, b, budget)?;
            Ok((ra.value.min(rb.value), ra.nodes + rb.nodes))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutValue {
    pub value: usize,
    /// Value of every tree edge, in edge order.
    pub edges: Vec<((usize, usize), usize)>,
    pub nodes: u64,
}

pub fn layout_value(g: &Graph, layout: &TreeLayout, kind: WidthKind, budget: u64) -> Result<LayoutValue> {
    if layout.vertex_count() != g.vertex_count() {
        return Err(Error::LengthMismatch { expected: g.vertex_count(), got: layout.vertex_count() });
    }
    let mut out = LayoutValue { value: 0, edges: Vec::new(), nodes: 0 };
    for (edge, a, b) in layout.cuts() {
        let (v, nodes) = cut_width(g, &a, &b, kind, budget.saturating_sub(out.nodes))?;
        out.nodes += nodes;
        out.value = out.value.max(v);
        out.edges.push((edge, v));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WidthReport {
    pub kind: WidthKind,
    pub linear: bool,
    pub value: usize,
    pub witness: LayoutRepr,
    /// Layouts (general) or subsets (linear) examined.
    pub explored: u64,
    /// Matching-search nodes spent.
    pub nodes: u64,
    pub budget: u64,
}

/// Memoized cut values by vertex subset.
struct CutTable<'a> {
    g: &'a Graph,
    kind: WidthKind,
    budget: u64,
    nodes: u64,
    memo: HashMap<u64, usize>,
}

impl CutTable<'_> {
    fn value(&mut self, mask: u64) -> Result<usize> {
        let n = self.g.vertex_count();
        let full = (1u64 << n) - 1;
        let key = mask.min(full & !mask);
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        let (a, b): (Vec<usize>, Vec<usize>) = (0..n).partition(|&v| key >> v & 1 == 1);
        let remaining = self.budget.saturating_sub(self.nodes);
        if remaining == 0 {
            return Err(Error::BudgetExceeded { budget: self.budget });
        }
        let (v, nodes) = cut_width(self.g, &a, &b, self.kind, remaining).map_err(|e| match e {
            Error::BudgetExceeded { .. } => Error::BudgetExceeded { budget: self.budget },
            e => e,
        })?;
        self.nodes += nodes;
        self.memo.insert(key, v);
        Ok(v)
    }
}

/// Exact width with a deterministic witness: the lexicographically least
/// optimal vertex order (linear), or the optimal layout with the
/// lexicographically least sorted split list (general).
pub fn exact_width(g: &Graph, kind: WidthKind, linear: bool, cap: usize, budget: u64) -> Result<WidthReport> {
    let n = g.vertex_count();
    if n > cap {
        return Err(Error::CapExceeded { size: n, cap });
    }
    let hard = if linear { 20 } else { 12 };
    if n > hard {
        return Err(Error::CapExceeded { size: n, cap: hard });
    }
    if n == 0 {
        return Err(Error::invalid("width of the empty graph is undefined"));
    }
    let mut table = CutTable { g, kind, budget, nodes: 0, memo: HashMap::new() };
    let (value, layout, explored) = if linear { linear_width(&mut table)? } else { general_width(&mut table)? };
    Ok(WidthReport { kind, linear, value, witness: layout.to_repr(), explored, nodes: table.nodes, budget })
}

fn linear_width(table: &mut CutTable) -> Result<(usize, TreeLayout, u64)> {
    let n = table.g.vertex_count();
    let full = (1u64 << n) - 1;
    let mut single = 0;
    for v in 0..n {
        single = single.max(table.value(1 << v)?);
    }
    // best[S]: least possible maximum prefix value over the suffixes after prefix S.
    let mut best = vec![0usize; 1 << n];
    for s in (0..full).rev() {
        let here = table.value(s)?;
        let mut m = usize::MAX;
        for v in 0..n {
            if s >> v & 1 == 0 {
                m = m.min(best[(s | 1 << v) as usize]);
            }
        }
        best[s as usize] = here.max(m);
    }
    let value = single.max(best[0]);
    let mut order = Vec::with_capacity(n);
    let mut s = 0u64;
    while s != full {
        let v = (0..n).find(|&v| s >> v & 1 == 0 && best[(s | 1 << v) as usize] <= value).expect("optimal extension");
        order.push(v);
        s |= 1 << v;
    }
    Ok((value, TreeLayout::caterpillar(&order)?, 1 << n))
}

/// Ternary trees whose leaves `0..l` are labelled, generated once each by
/// inserting leaf `k` on every edge of the trees on leaves `0..k`.
/// Internal nodes are numbered from `l`.
pub fn ternary_trees(l: usize, mut visit: impl FnMut(&[(usize, usize)]) -> Result<()>) -> Result<u64> {
    if l == 0 {
        return Ok(0);
    }
    if l == 1 {
        visit(&[])?;
        return Ok(1);
    }
    if l == 2 {
        visit(&[(0, 1)])?;
        return Ok(1);
    }
    let mut edges = vec![(0, l), (1, l), (2, l)];
    let mut count = 0;
    insert_leaf(l, 3, l + 1, &mut edges, &mut visit, &mut count)?;
    Ok(count)
}

fn insert_leaf(
    l: usize,
    k: usize,
    next: usize,
    edges: &mut Vec<(usize, usize)>,
    visit: &mut impl FnMut(&[(usize, usize)]) -> Result<()>,
    count: &mut u64,
) -> Result<()> {
    if k == l {
        *count += 1;
        return visit(edges);
    }
    for i in 0..edges.len() {
        let (p, q) = edges[i];
        edges[i] = (p, next);
        edges.push((next, q));
        edges.push((next, k));
        insert_leaf(l, k + 1, next + 1, edges, visit, count)?;
        edges.pop();
        edges.pop();
        edges[i] = (p, q);
    }
    Ok(())
}

/// Leaf sets (as masks, normalized to exclude leaf 0) of every edge split.
pub fn splits(l: usize, edges: &[(usize, usize)]) -> Vec<u64> {
    let nodes = if l <= 2 { l } else { 2 * l - 2 };
    let mut adj = vec![Vec::new(); nodes];
    for &(p, q) in edges {
        adj[p].push(q);
        adj[q].push(p);
    }
    let full = if l == 64 { u64::MAX } else { (1u64 << l) - 1 };
    let mut out: Vec<u64> = edges
        .iter()
        .map(|&(p, q)| {
            let mut mask = 0u64;
            let mut stack = vec![(q, p)];
            while let Some((x, from)) = stack.pop() {
                if x < l {
                    mask |= 1 << x;
                }
                stack.extend(adj[x].iter().filter(|&&y| y != from).map(|&y| (y, x)));
            }
            if mask & 1 == 1 {
                full & !mask
            } else {
                mask
            }
        })
        .collect();
    out.sort_unstable();
    out
}

fn general_width(table: &mut CutTable) -> Result<(usize, TreeLayout, u64)> {
    let n = table.g.vertex_count();
    // (value, sorted splits, tree edges)
    type Best = (usize, Vec<u64>, Vec<(usize, usize)>);
    let mut best: Option<Best> = None;
    let count = ternary_trees(n, |edges| {
        let sp = splits(n, edges);
        let mut value = 0;
        for &s in &sp {
            value = value.max(table.value(s)?);
        }
        let better = match &best {
            None => true,
            Some((bv, bs, _)) => value < *bv || (value == *bv && sp < *bs),
        };
        if better {
            best = Some((value, sp, edges.to_vec()));
        }
        Ok(())
    })?;
    let (value, _, edges) = best.expect("at least one layout");
    let nodes = if n <= 2 { n } else { 2 * n - 2 };
    let tree = Tree::from_edges(nodes, &edges)?;
    Ok((value, TreeLayout::new(tree, (0..n).collect())?, count))
}

/// `(2l − 5)!!` for `l ≥ 3`, and 1 below.
pub fn ternary_tree_count(l: usize) -> u64 {
    (3..l).map(|k| (2 * k - 3) as u64).product()
}

/// One representative of every isomorphism class of graphs on `n ≤ 7`
/// vertices, each relabelled to its canonical (least edge-mask) form.
pub fn nonisomorphic_graphs(n: usize) -> Result<Vec<Graph>> {
    if n > 7 {
        return Err(Error::CapExceeded { size: n, cap: 7 });
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let index: HashMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut perms = Vec::new();
    permutations(&mut (0..n).collect(), 0, &mut perms);
    let images: Vec<Vec<usize>> = perms
        .iter()
        .map(|p| pairs.iter().map(|&(u, v)| index[&(p[u].min(p[v]), p[u].max(p[v]))]).collect())
        .collect();
    let mut seen = std::collections::BTreeSet::new();
    for mask in 0u64..1 << pairs.len() {
        let canon = images
            .iter()
            .map(|img| img.iter().enumerate().filter(|&(i, _)| mask >> i & 1 == 1).fold(0u64, |m, (_, &j)| m | 1 << j))
            .min()
            .unwrap_or(0);
        if canon == mask {
            seen.insert(mask);
        }
    }
    seen.into_iter()
        .map(|mask| {
            let edges: Vec<(usize, usize)> =
                pairs.iter().enumerate().filter(|&(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect();
            Graph::from_edges(n, &edges)
        })
        .collect()
}

fn permutations(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, out);
        items.swap(k, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BUDGET: u64 = 10_000_000;

    #[test]
    fn simple_layout_values() {
        let k5 = Graph::complete(5);
        let l = TreeLayout::caterpillar(&[0, 1, 2, 3, 4]).unwrap();
        assert_eq!(layout_value(&k5, &l, WidthKind::Mim, BUDGET).unwrap().value, 1);
        assert_eq!(layout_value(&Graph::new(5), &l, WidthKind::Mim, BUDGET).unwrap().value, 0);
        let p4 = Graph::path(4);
        let l = TreeLayout::caterpillar(&[0, 1, 2, 3]).unwrap();
        assert_eq!(layout_value(&p4, &l, WidthKind::Mim, BUDGET).unwrap().value, 1);
    }

    #[test]
    fn counts_match_double_factorial() {
        for l in 1..=8 {
            let mut seen = std::collections::HashSet::new();
            let c = ternary_trees(l, |e| {
                seen.insert(splits(l, e));
                Ok(())
            })
            .unwrap();
            assert_eq!(c, ternary_tree_count(l));
            assert_eq!(seen.len() as u64, c);
        }
        assert_eq!(ternary_tree_count(8), 10395);
    }

    #[test]
    fn cliques_and_cycles() {
        let r = exact_width(&Graph::complete(4), WidthKind::Mim, false, 8, BUDGET).unwrap();
        assert_eq!(r.value, 1);
        let c5 = Graph::cycle(5);
        let lin = exact_width(&c5, WidthKind::Mim, true, 10, BUDGET).unwrap();
        // Brute force over all 120 orders.
        let mut perms = Vec::new();
        permutations(&mut (0..5).collect(), 0, &mut perms);
        let brute = perms
            .iter()
            .map(|p| layout_value(&c5, &TreeLayout::caterpillar(p).unwrap(), WidthKind::Mim, BUDGET).unwrap().value)
            .min()
            .unwrap();
        assert_eq!(lin.value, brute);
        assert_eq!(lin.value, 2);
        let w = TreeLayout::from_repr(&lin.witness).unwrap();
        assert_eq!(layout_value(&c5, &w, WidthKind::Mim, BUDGET).unwrap().value, lin.value);
    }

    #[test]
    fn cap_guard() {
        assert!(matches!(
            exact_width(&Graph::complete(4), WidthKind::Mim, false, 3, BUDGET),
            Err(Error::CapExceeded { size: 4, cap: 3 })
        ));
    }

    #[test]
    fn graph_census() {
        let counts: Vec<usize> = (1..=5).map(|n| nonisomorphic_graphs(n).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 2, 4, 11, 34]);
    }
}
