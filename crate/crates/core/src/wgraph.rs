//! Edge-weighted graphs and the linear / tree degree balancing problems.
//!
//! For an order `≺` the left weight of `v` is the total weight of edges to
//! earlier vertices and the right weight the total to later ones; `≺` is
//! `t`-balancing when both stay within `t` for every vertex. A balancing
//! tree places vertices on all nodes of a tree and bounds, for each vertex and
//! each tree edge at its node, the weight the vertex sends across that edge.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::Tree;

/// Largest vertex count accepted by the order solvers (prefix sets are `u128`).
pub const ORDER_SOLVER_CAP: usize = 128;
/// Largest vertex count accepted by [`count_balancing_orders`].
pub const COUNT_CAP: usize = 22;
/// Default largest vertex count accepted by [`solve_balancing_tree`].
pub const TREE_SOLVER_CAP: usize = 8;
/// Default node budget of the exhaustive searches.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Variable,
    VariableBar,
    T,
    F,
    TBar,
    FBar,
    Clause,
    SpineA,
    SpineB,
    Root,
    STerminal,
    PadX,
    PadY,
    Plain,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub label: String,
    pub role: Role,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeightedGraph {
    vertices: Vec<Vertex>,
    adj: Vec<Vec<(usize, u64)>>,
    edges: Vec<(usize, usize, u64)>,
}

impl WeightedGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// `n` unlabeled plain vertices.
    pub fn with_vertices(n: usize) -> Self {
        let mut g = Self::new();
        for i in 0..n {
            g.add_vertex(format!("v{i}"), Role::Plain);
        }
        g
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize, u64)]) -> Result<Self> {
        let mut g = Self::with_vertices(n);
        for &(u, v, w) in edges {
            g.add_edge(u, v, w)?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self, label: impl Into<String>, role: Role) -> usize {
        self.vertices.push(Vertex { label: label.into(), role });
        self.adj.push(Vec::new());
        self.vertices.len() - 1
    }

    pub fn add_edge(&mut self, u: usize, v: usize, weight: u64) -> Result<()> {
        let n = self.vertices.len();
        for x in [u, v] {
            if x >= n {
                return Err(Error::UnknownVertex(x));
            }
        }
        if u == v {
            return Err(Error::invalid(format!("self-loop at vertex {u}")));
        }
        if weight == 0 {
            return Err(Error::invalid(format!("edge ({u}, {v}) has weight 0")));
        }
        if self.weight(u, v).is_some() {
            return Err(Error::invalid(format!("duplicate edge ({u}, {v})")));
        }
        self.adj[u].push((v, weight));
        self.adj[v].push((u, weight));
        self.edges.push((u.min(v), u.max(v), weight));
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> &Vertex {
        &self.vertices[v]
    }

    pub fn role(&self, v: usize) -> Role {
        self.vertices[v].role
    }

    pub fn label(&self, v: usize) -> &str {
        &self.vertices[v].label
    }

    /// Edges as `(u, v, weight)` with `u < v`, in insertion order.
    pub fn edges(&self) -> &[(usize, usize, u64)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, u64)] {
        &self.adj[v]
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<u64> {
        self.adj.get(u)?.iter().find(|&&(x, _)| x == v).map(|&(_, w)| w)
    }

    pub fn vertex_weight(&self, v: usize) -> Result<u64> {
        self.adj.get(v).map(|list| list.iter().map(|&(_, w)| w).sum()).ok_or(Error::UnknownVertex(v))
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.iter().map(|&(_, _, w)| w).sum()
    }

    pub fn vertices_with_role(&self, role: Role) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| self.vertices[v].role == role).collect()
    }

    /// Subgraph induced by `keep`, with vertices renumbered in the given order.
    pub fn induced(&self, keep: &[usize]) -> Result<WeightedGraph> {
        let mut index = vec![usize::MAX; self.vertices.len()];
        let mut g = WeightedGraph::new();
        for (i, &v) in keep.iter().enumerate() {
            if v >= self.vertices.len() {
                return Err(Error::UnknownVertex(v));
            }
            index[v] = i;
            g.add_vertex(self.vertices[v].label.clone(), self.vertices[v].role);
        }
        for &(u, v, w) in &self.edges {
            if index[u] != usize::MAX && index[v] != usize::MAX {
                g.add_edge(index[u], index[v], w)?;
            }
        }
        Ok(g)
    }

    pub fn is_triangle_free(&self) -> bool {
        let n = self.vertices.len();
        let mut mark = vec![false; n];
        for u in 0..n {
            for &(v, _) in &self.adj[u] {
                mark[v] = true;
            }
            for &(v, _) in &self.adj[u] {
                if v > u && self.adj[v].iter().any(|&(w, _)| w > v && mark[w]) {
                    return false;
                }
            }
            for &(v, _) in &self.adj[u] {
                mark[v] = false;
            }
        }
        true
    }

    /// Multiplies every edge weight by `factor`.
    pub fn scale(&mut self, factor: u64) {
        for list in &mut self.adj {
            for e in list.iter_mut() {
                e.1 *= factor;
            }
        }
        for e in &mut self.edges {
            e.2 *= factor;
        }
    }
}

/// A permutation of the vertex ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LinearOrder(Vec<usize>);

impl LinearOrder {
    /// Validates that `seq` is a permutation of `0..n`.
    pub fn new(seq: Vec<usize>, n: usize) -> Result<Self> {
        if seq.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: seq.len() });
        }
        let mut seen = vec![false; n];
        for &v in &seq {
            if v >= n {
                return Err(Error::UnknownVertex(v));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::invalid(format!("vertex {v} appears twice in the order")));
            }
        }
        Ok(LinearOrder(seq))
    }

    pub fn identity(n: usize) -> Self {
        LinearOrder((0..n).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `positions()[v]` is the index of `v` in the order.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            pos[v] = i;
        }
        pos
    }

    pub fn reversed(&self) -> Self {
        LinearOrder(self.0.iter().rev().copied().collect())
    }
}

/// A vertex whose left or right weight exceeds the threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub vertex: usize,
    pub left: u64,
    pub right: u64,
}

/// A vertex sending too much weight across a tree edge at its node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeViolation {
    pub vertex: usize,
    pub edge: (usize, usize),
    pub weight: u64,
}

fn check_order_len(g: &WeightedGraph, ord: &LinearOrder) -> Result<()> {
    if ord.len() != g.vertex_count() {
        return Err(Error::LengthMismatch { expected: g.vertex_count(), got: ord.len() });
    }
    Ok(())
}

fn sides_at(g: &WeightedGraph, pos: &[usize], v: usize) -> (u64, u64) {
    let (mut left, mut right) = (0, 0);
    for &(u, w) in g.neighbors(v) {
        if pos[u] < pos[v] {
            left += w;
        } else {
            right += w;
        }
    }
    (left, right)
}

/// Left and right weight of `v` under `ord`.
pub fn side_weights(g: &WeightedGraph, ord: &LinearOrder, v: usize) -> Result<(u64, u64)> {
    check_order_len(g, ord)?;
    if v >= g.vertex_count() {
        return Err(Error::UnknownVertex(v));
    }
    Ok(sides_at(g, &ord.positions(), v))
}

/// Largest side weight over all vertices.
pub fn order_value(g: &WeightedGraph, ord: &LinearOrder) -> Result<u64> {
    check_order_len(g, ord)?;
    let pos = ord.positions();
    Ok((0..g.vertex_count()).map(|v| {
        let (l, r) = sides_at(g, &pos, v);
        l.max(r)
    }).max().unwrap_or(0))
}

/// Returns the first vertex along `ord` whose side weights exceed `t`, if any.
pub fn check_balancing_order(g: &WeightedGraph, ord: &LinearOrder, t: u64) -> Result<Option<Violation>> {
    check_order_len(g, ord)?;
    let pos = ord.positions();
    Ok(ord.as_slice().iter().find_map(|&v| {
        let (left, right) = sides_at(g, &pos, v);
        (left > t || right > t).then_some(Violation { vertex: v, left, right })
    }))
}

pub fn is_balancing_order(g: &WeightedGraph, ord: &LinearOrder, t: u64) -> bool {
    matches!(check_balancing_order(g, ord, t), Ok(None))
}

/// Neighborhood data in prefix-mask form for the order searches.
struct MaskGraph {
    n: usize,
    nbrs: Vec<Vec<(usize, u64)>>,
    total: Vec<u64>,
}

impl MaskGraph {
    fn new(g: &WeightedGraph, cap: usize) -> Result<Self> {
        let n = g.vertex_count();
        if n > cap {
            return Err(Error::CapExceeded { size: n, cap });
        }
        Ok(MaskGraph {
            n,
            nbrs: (0..n).map(|v| g.neighbors(v).to_vec()).collect(),
            total: (0..n).map(|v| g.vertex_weight(v).expect("in range")).collect(),
        })
    }

    fn weight_into(&self, v: usize, mask: u128) -> u64 {
        self.nbrs[v].iter().filter(|&&(u, _)| mask >> u & 1 == 1).map(|&(_, w)| w).sum()
    }

    /// Whether `v` may follow the prefix `mask` at threshold `t`.
    fn placeable(&self, v: usize, mask: u128, t: u64) -> bool {
        let left = self.weight_into(v, mask);
        left <= t && self.total[v] - left <= t
    }
}

struct OrderSearch<'a, F> {
    mg: MaskGraph,
    t: u64,
    budget: u64,
    nodes: u64,
    dead: HashSet<u128>,
    prefix: Vec<usize>,
    inc: Vec<u64>,
    visit: &'a mut F,
}

impl<F: FnMut(&[usize]) -> bool> OrderSearch<'_, F> {
    /// Returns `Ok(true)` when the visitor asked to stop; `found` counts completions.
    fn dfs(&mut self, mask: u128, found: &mut u64) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded { budget: self.budget });
        }
        if self.prefix.len() == self.mg.n {
            *found += 1;
            return Ok(!(self.visit)(&self.prefix));
        }
        if self.dead.contains(&mask) {
            return Ok(false);
        }
        let before = *found;
        for v in 0..self.mg.n {
            if mask >> v & 1 == 1 {
                continue;
            }
            let left = self.inc[v];
            if left > self.t || self.mg.total[v] - left > self.t {
                continue;
            }
            for &(u, w) in &self.mg.nbrs[v] {
                self.inc[u] += w;
            }
            let next = mask | 1 << v;
            let blocked = self.mg.nbrs[v].iter().any(|&(u, _)| next >> u & 1 == 0 && self.inc[u] > self.t);
            let stop = if blocked {
                false
            } else {
                self.prefix.push(v);
                let r = self.dfs(next, found);
                self.prefix.pop();
                r?
            };
            for &(u, w) in &self.mg.nbrs[v] {
                self.inc[u] -= w;
            }
            if stop {
                return Ok(true);
            }
        }
        if *found == before {
            self.dead.insert(mask);
        }
        Ok(false)
    }
}

/// Visits `t`-balancing orders in lexicographic order of their id sequences
/// until `visit` returns false. Returns the number of orders visited and the
/// search nodes spent.
pub fn enumerate_balancing_orders<F: FnMut(&[usize]) -> bool>(
    g: &WeightedGraph,
    t: u64,
    budget: u64,
    mut visit: F,
) -> Result<(u64, u64)> {
    let mg = MaskGraph::new(g, ORDER_SOLVER_CAP)?;
    let n = mg.n;
    let mut search = OrderSearch {
        mg,
        t,
        budget,
        nodes: 0,
        dead: HashSet::new(),
        prefix: Vec::with_capacity(n),
        inc: vec![0; n],
        visit: &mut visit,
    };
    let mut found = 0;
    search.dfs(0, &mut found)?;
    Ok((found, search.nodes))
}

/// The lexicographically least `t`-balancing order, if one exists.
pub fn solve_balancing_order(g: &WeightedGraph, t: u64, budget: u64) -> Result<Option<LinearOrder>> {
    let mut first = None;
    enumerate_balancing_orders(g, t, budget, |seq| {
        first = Some(seq.to_vec());
        false
    })?;
    Ok(first.map(LinearOrder))
}

/// Counts `t`-balancing orders in which every placement satisfies
/// `allowed(prefix_mask, v)`, by dynamic programming over prefix sets.
pub fn count_balancing_orders<P: Fn(u128, usize) -> bool>(g: &WeightedGraph, t: u64, allowed: P) -> Result<u128> {
    let mg = MaskGraph::new(g, COUNT_CAP)?;
    let n = mg.n;
    let mut count = vec![0u128; 1 << n];
    count[0] = 1;
    for mask in 0..(1usize << n) {
        let c = count[mask];
        if c == 0 {
            continue;
        }
        for v in 0..n {
            if mask >> v & 1 == 0 && allowed(mask as u128, v) && mg.placeable(v, mask as u128, t) {
                count[mask | 1 << v] += c;
            }
        }
    }
    Ok(count[(1 << n) - 1])
}

/// A tree whose nodes carry the vertices of a weighted graph bijectively.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalancingTree {
    pub tree: Tree,
    /// `placement[v]` is the node holding vertex `v`.
    pub placement: Vec<usize>,
}

impl BalancingTree {
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
        Ok(BalancingTree { tree, placement })
    }

    /// The path tree carrying `ord` from one end to the other.
    pub fn path(ord: &LinearOrder) -> Self {
        BalancingTree { tree: Tree::path(ord.len().max(1)), placement: ord.positions() }
    }
}

/// Returns the first (vertex, tree edge) pair breaking the bound `t`, scanning
/// vertices by id and the edges at each node by neighbor id.
pub fn check_balancing_tree(g: &WeightedGraph, bt: &BalancingTree, t: u64) -> Result<Option<TreeViolation>> {
    if bt.placement.len() != g.vertex_count() {
        return Err(Error::LengthMismatch { expected: g.vertex_count(), got: bt.placement.len() });
    }
    let rooted = bt.tree.rooted();
    for v in 0..g.vertex_count() {
        let p = bt.placement[v];
        for &q in bt.tree.neighbors(p) {
            let weight: u64 = g
                .neighbors(v)
                .iter()
                .filter(|&&(u, _)| rooted.on_side(bt.placement[u], p, q))
                .map(|&(_, w)| w)
                .sum();
            if weight > t {
                return Ok(Some(TreeViolation { vertex: v, edge: (p.min(q), p.max(q)), weight }));
            }
        }
    }
    Ok(None)
}

pub fn is_balancing_tree(g: &WeightedGraph, bt: &BalancingTree, t: u64) -> bool {
    matches!(check_balancing_tree(g, bt, t), Ok(None))
}

/// Searches labeled trees on the vertex set in Prüfer order (vertex `v` on
/// node `v`), returning the first `t`-balancing one.
pub fn solve_balancing_tree(g: &WeightedGraph, t: u64, budget: u64) -> Result<Option<BalancingTree>> {
    solve_balancing_tree_capped(g, t, budget, TREE_SOLVER_CAP)
}

pub fn solve_balancing_tree_capped(g: &WeightedGraph, t: u64, budget: u64, cap: usize) -> Result<Option<BalancingTree>> {
    let n = g.vertex_count();
    if n > cap {
        return Err(Error::CapExceeded { size: n, cap });
    }
    if n == 0 {
        return Err(Error::invalid("graph has no vertices"));
    }
    let identity: Vec<usize> = (0..n).collect();
    if n == 1 {
        return Ok(Some(BalancingTree { tree: Tree::single(), placement: identity }));
    }
    let mut seq = vec![0usize; n - 2];
    let mut spent = 0u64;
    loop {
        spent += 1;
        if spent > budget {
            return Err(Error::BudgetExceeded { budget });
        }
        let bt = BalancingTree { tree: Tree::from_prufer(&seq)?, placement: identity.clone() };
        if check_balancing_tree(g, &bt, t)?.is_none() {
            return Ok(Some(bt));
        }
        let Some(i) = (0..seq.len()).rev().find(|&i| seq[i] + 1 < n) else {
            return Ok(None);
        };
        seq[i] += 1;
        for x in &mut seq[i + 1..] {
            *x = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3(wab: u64, wbc: u64) -> WeightedGraph {
        WeightedGraph::from_edges(3, &[(0, 1, wab), (1, 2, wbc)]).unwrap()
    }

    #[test]
    fn vertex_weights() {
        let g = WeightedGraph::from_edges(3, &[(0, 1, 5), (0, 2, 7)]).unwrap();
        assert_eq!(g.vertex_weight(0).unwrap(), 12);
        let mut h = WeightedGraph::with_vertices(1);
        assert_eq!(h.vertex_weight(0).unwrap(), 0);
        assert_eq!(h.vertex_weight(3), Err(Error::UnknownVertex(3)));
        assert!(h.add_edge(0, 0, 1).is_err());
    }

    #[test]
    fn rejects_bad_edges() {
        let mut g = WeightedGraph::with_vertices(2);
        assert!(g.add_edge(0, 1, 0).is_err());
        g.add_edge(0, 1, 2).unwrap();
        assert!(g.add_edge(1, 0, 2).is_err());
    }

    #[test]
    fn side_weights_of_p3() {
        let g = p3(4, 4);
        let ord = LinearOrder::identity(3);
        assert_eq!(side_weights(&g, &ord, 0).unwrap(), (0, 4));
        assert_eq!(side_weights(&g, &ord, 1).unwrap(), (4, 4));
        assert_eq!(side_weights(&g, &ord, 2).unwrap(), (4, 0));
    }

    #[test]
    fn forced_violation() {
        let (tau, gamma) = (36, 3);
        let g = p3(tau, gamma + 1);
        let ord = LinearOrder::new(vec![1, 0, 2], 3).unwrap();
        let v = check_balancing_order(&g, &ord, tau + gamma).unwrap().unwrap();
        assert_eq!(v, Violation { vertex: 1, left: 0, right: tau + gamma + 1 });
    }

    #[test]
    fn single_edge_either_order() {
        let g = WeightedGraph::from_edges(2, &[(0, 1, 5)]).unwrap();
        assert!(is_balancing_order(&g, &LinearOrder::identity(2), 5));
        assert!(is_balancing_order(&g, &LinearOrder::new(vec![1, 0], 2).unwrap(), 5));
    }

    #[test]
    fn triangle_has_no_order_or_tree() {
        let g = WeightedGraph::from_edges(3, &[(0, 1, 2), (1, 2, 2), (0, 2, 2)]).unwrap();
        assert_eq!(solve_balancing_order(&g, 2, DEFAULT_BUDGET).unwrap(), None);
        assert_eq!(count_balancing_orders(&g, 2, |_, _| true).unwrap(), 0);
        assert_eq!(solve_balancing_tree(&g, 2, DEFAULT_BUDGET).unwrap(), None);
    }

    #[test]
    fn p3_solver_puts_middle_in_middle() {
        let g = p3(3, 3);
        let ord = solve_balancing_order(&g, 4, DEFAULT_BUDGET).unwrap().unwrap();
        assert_eq!(ord.as_slice(), &[0, 1, 2]);
        assert_eq!(count_balancing_orders(&g, 4, |_, _| true).unwrap(), 2);
    }

    #[test]
    fn claw_has_tree_but_no_order() {
        let w = 2;
        let g = WeightedGraph::from_edges(4, &[(0, 1, w), (0, 2, w), (0, 3, w)]).unwrap();
        assert_eq!(solve_balancing_order(&g, w, DEFAULT_BUDGET).unwrap(), None);
        let bt = solve_balancing_tree(&g, w, DEFAULT_BUDGET).unwrap().unwrap();
        assert!(is_balancing_tree(&g, &bt, w));
    }

    #[test]
    fn tree_checker_reports_heavy_edge() {
        let g = WeightedGraph::from_edges(2, &[(0, 1, 6)]).unwrap();
        let bt = BalancingTree::new(Tree::path(2), vec![0, 1]).unwrap();
        let v = check_balancing_tree(&g, &bt, 5).unwrap().unwrap();
        assert_eq!(v, TreeViolation { vertex: 0, edge: (0, 1), weight: 6 });
        assert!(is_balancing_tree(&g, &bt, 6));
    }

    #[test]
    fn budget_is_a_distinct_outcome() {
        let g = WeightedGraph::with_vertices(5);
        assert_eq!(solve_balancing_order(&g, 0, 2), Err(Error::BudgetExceeded { budget: 2 }));
        assert!(solve_balancing_order(&g, 0, 6).unwrap().is_some());
    }

    #[test]
    fn enumeration_matches_count() {
        let g = WeightedGraph::from_edges(5, &[(0, 1, 2), (1, 2, 2), (2, 3, 1), (3, 4, 3)]).unwrap();
        for t in 0..6 {
            let (found, _) = enumerate_balancing_orders(&g, t, DEFAULT_BUDGET, |_| true).unwrap();
            assert_eq!(found as u128, count_balancing_orders(&g, t, |_, _| true).unwrap());
        }
    }

    #[test]
    fn triangle_free_detection() {
        assert!(p3(1, 1).is_triangle_free());
        let g = WeightedGraph::from_edges(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]).unwrap();
        assert!(!g.is_triangle_free());
    }
}
