//! Unrooted trees shared by balancing trees, tree mappings, layouts and
//! hybrid trees.

use std::collections::VecDeque;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree {
    adj: Vec<Vec<usize>>,
}

impl Tree {
    pub fn single() -> Self {
        Tree { adj: vec![vec![]] }
    }

    pub fn path(n: usize) -> Self {
        assert!(n >= 1, "a tree has at least one node");
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Tree::from_edges(n, &edges).expect("a path is a tree")
    }

    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Tree::from_edges(leaves + 1, &edges).expect("a star is a tree")
    }

    /// Builds a tree on `n` nodes, checking connectivity and acyclicity.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("a tree needs at least one node"));
        }
        if edges.len() + 1 != n {
            return Err(Error::invalid(format!("{} edges cannot span a tree on {n} nodes", edges.len())));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n || u == v {
                return Err(Error::invalid(format!("bad tree edge ({u}, {v})")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let t = Tree { adj };
        if t.bfs_order(0).len() != n {
            return Err(Error::invalid("tree edges do not form a connected graph"));
        }
        Ok(t)
    }

    /// Parent-array form: exactly one entry is `None` (the root).
    pub fn from_parents(parents: &[Option<usize>]) -> Result<Self> {
        let edges: Vec<_> = parents
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.map(|p| (p, i)))
            .collect();
        if parents.iter().filter(|p| p.is_none()).count() != 1 {
            return Err(Error::invalid("parent array must have exactly one root"));
        }
        Tree::from_edges(parents.len(), &edges)
    }

    /// Decodes a Prüfer sequence over nodes `0..seq.len()+2`.
    pub fn from_prufer(seq: &[usize]) -> Result<Self> {
        let n = seq.len() + 2;
        if let Some(&bad) = seq.iter().find(|&&x| x >= n) {
            return Err(Error::invalid(format!("Prüfer entry {bad} out of range")));
        }
        let mut degree = vec![1usize; n];
        for &x in seq {
            degree[x] += 1;
        }
        let mut edges = Vec::with_capacity(n - 1);
        for &x in seq {
            let leaf = (0..n).find(|&i| degree[i] == 1).expect("a leaf always exists");
            edges.push((leaf, x));
            degree[leaf] -= 1;
            degree[x] -= 1;
        }
        let rest: Vec<usize> = (0..n).filter(|&i| degree[i] == 1).collect();
        edges.push((rest[0], rest[1]));
        Tree::from_edges(n, &edges)
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.adj.len() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, list) in self.adj.iter().enumerate() {
            out.extend(list.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.adj.len()).filter(|&u| self.adj[u].len() <= 1).collect()
    }

    pub fn is_path(&self) -> bool {
        self.max_degree() <= 2
    }

    /// Nodes in breadth-first order from `root`, neighbors ascending.
    pub fn bfs_order(&self, root: usize) -> Vec<usize> {
        let mut seen = vec![false; self.adj.len()];
        let mut order = Vec::with_capacity(self.adj.len());
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &v in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        order
    }

    /// Tree edges as `(parent, child)` in BFS discovery order from `root`.
    pub fn bfs_edges(&self, root: usize) -> Vec<(usize, usize)> {
        let mut seen = vec![false; self.adj.len()];
        let mut out = Vec::new();
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    out.push((u, v));
                    queue.push_back(v);
                }
            }
        }
        out
    }

    /// Membership of the component of `T - uv` that contains `u`.
    pub fn side(&self, u: usize, v: usize) -> Vec<bool> {
        let mut side = vec![false; self.adj.len()];
        let mut stack = vec![u];
        side[u] = true;
        while let Some(x) = stack.pop() {
            for &y in &self.adj[x] {
                if !side[y] && !(x == u && y == v) {
                    side[y] = true;
                    stack.push(y);
                }
            }
        }
        side
    }

    /// Replaces edge `uv` with a path `u - w - v`; returns the new node `w`.
    pub fn subdivide(&mut self, u: usize, v: usize) -> Result<usize> {
        if !self.has_edge(u, v) {
            return Err(Error::invalid(format!("({u}, {v}) is not a tree edge")));
        }
        let w = self.adj.len();
        for (a, b) in [(u, v), (v, u)] {
            let pos = self.adj[a].binary_search(&b).expect("edge present");
            self.adj[a].remove(pos);
            self.adj[a].push(w);
            self.adj[a].sort_unstable();
        }
        self.adj.push(vec![u.min(v), u.max(v)]);
        Ok(w)
    }

    /// Contracts edge `keep - gone` into `keep`. Node ids above `gone` shift
    /// down by one; the returned map sends old ids to new ids.
    pub fn contract(&mut self, keep: usize, gone: usize) -> Result<Vec<Option<usize>>> {
        if !self.has_edge(keep, gone) {
            return Err(Error::invalid(format!("({keep}, {gone}) is not a tree edge")));
        }
        let n = self.adj.len();
        let moved: Vec<usize> = self.adj[gone].iter().copied().filter(|&x| x != keep).collect();
        for &x in &moved {
            let list = &mut self.adj[x];
            let pos = list.binary_search(&gone).expect("edge present");
            list[pos] = keep;
        }
        self.adj[keep].retain(|&x| x != gone);
        self.adj[keep].extend(moved);
        let remap: Vec<Option<usize>> = (0..n)
            .map(|i| match i.cmp(&gone) {
                std::cmp::Ordering::Less => Some(i),
                std::cmp::Ordering::Equal => None,
                std::cmp::Ordering::Greater => Some(i - 1),
            })
            .collect();
        self.adj.remove(gone);
        for list in &mut self.adj {
            for x in list.iter_mut() {
                *x = remap[*x].expect("contracted node no longer referenced");
            }
            list.sort_unstable();
        }
        Ok(remap)
    }

    /// Parent array rooted at node 0.
    pub fn parents(&self) -> Vec<Option<usize>> {
        let mut parents = vec![None; self.adj.len()];
        for (p, c) in self.bfs_edges(0) {
            parents[c] = Some(p);
        }
        parents
    }

    pub fn rooted(&self) -> Rooted {
        Rooted::new(self)
    }
}

/// Subtree intervals of a tree rooted at node 0, for constant-time side tests.
#[derive(Clone, Debug)]
pub struct Rooted {
    tin: Vec<usize>,
    tout: Vec<usize>,
    parent: Vec<Option<usize>>,
}

impl Rooted {
    fn new(t: &Tree) -> Self {
        let n = t.node_count();
        let (mut tin, mut tout, mut parent) = (vec![0; n], vec![0; n], vec![None; n]);
        let mut clock = 1;
        let mut stack = vec![(0usize, 0usize)];
        while let Some(top) = stack.last_mut() {
            let (u, i) = *top;
            if let Some(&v) = t.neighbors(u).get(i) {
                top.1 += 1;
                if Some(v) != parent[u] {
                    parent[v] = Some(u);
                    tin[v] = clock;
                    clock += 1;
                    stack.push((v, 0));
                }
            } else {
                tout[u] = clock;
                stack.pop();
            }
        }
        Rooted { tin, tout, parent }
    }

    pub fn parent(&self, x: usize) -> Option<usize> {
        self.parent[x]
    }

    pub fn in_subtree(&self, x: usize, root: usize) -> bool {
        self.tin[root] <= self.tin[x] && self.tin[x] < self.tout[root]
    }

    /// Whether node `x` lies in the component of `T - pq` containing `q`.
    pub fn on_side(&self, x: usize, p: usize, q: usize) -> bool {
        if self.parent[q] == Some(p) {
            self.in_subtree(x, q)
        } else {
            !self.in_subtree(x, p)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prufer_round_trip_shapes() {
        // Sequence [3, 3, 3] on 5 nodes is the star centred at 3.
        let t = Tree::from_prufer(&[3, 3, 3]).unwrap();
        assert_eq!(t.degree(3), 4);
        let p = Tree::from_prufer(&[]).unwrap();
        assert_eq!(p.edges(), vec![(0, 1)]);
    }

    #[test]
    fn rejects_cycles_and_forests() {
        assert!(Tree::from_edges(3, &[(0, 1), (1, 0)]).is_err());
        assert!(Tree::from_edges(4, &[(0, 1), (1, 2), (2, 0)]).is_err());
    }

    #[test]
    fn subdivide_and_contract() {
        let mut t = Tree::path(3);
        let w = t.subdivide(1, 2).unwrap();
        assert_eq!(w, 3);
        assert!(t.has_edge(1, 3) && t.has_edge(3, 2) && !t.has_edge(1, 2));
        let remap = t.contract(3, 2).unwrap();
        assert_eq!(remap[3], Some(2));
        assert_eq!(t.edges(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn side_splits_tree() {
        let t = Tree::path(4);
        assert_eq!(t.side(1, 2), vec![true, true, false, false]);
        assert_eq!(t.side(2, 1), vec![false, false, true, true]);
    }

    #[test]
    fn rooted_sides_match_side() {
        let t = Tree::from_edges(6, &[(0, 2), (2, 1), (2, 3), (3, 4), (0, 5)]).unwrap();
        let r = t.rooted();
        for (p, q) in t.edges() {
            for (a, b) in [(p, q), (q, p)] {
                let side = t.side(b, a);
                for (x, &s) in side.iter().enumerate() {
                    assert_eq!(r.on_side(x, a, b), s);
                }
            }
        }
    }

    #[test]
    fn parents_round_trip() {
        let t = Tree::from_edges(5, &[(0, 2), (2, 1), (2, 3), (3, 4)]).unwrap();
        assert_eq!(Tree::from_parents(&t.parents()).unwrap(), t);
    }
}
