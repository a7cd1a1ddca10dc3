//! Plain undirected simple graphs with bitset adjacency.
//!
//! Every exact search in the crate (induced matchings, widths) runs on this
//! representation. The step-2 and step-3 graphs keep their adjacency implicit
//! and are only materialized into a [`Graph`] when they are small enough.

use crate::bits::BitSet;
use crate::error::{Error, Result};

/// Implicit adjacency, answered in constant time by the large constructions.
pub trait Adjacency {
    fn vertex_count(&self) -> usize;
    fn adjacent(&self, u: usize, v: usize) -> bool;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<BitSet>,
    edge_count: usize,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph { adj: (0..n).map(|_| BitSet::new(n)).collect(), edge_count: 0 }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v).expect("in range");
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Graph::new(n);
        for i in 0..n {
            let j = (i + 1) % n;
            if i != j && !g.has_edge(i, j) {
                g.add_edge(i, j).expect("in range");
            }
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = Graph::new(n);
        for i in 1..n {
            g.add_edge(i - 1, i).expect("in range");
        }
        g
    }

    /// Materializes an implicit graph, refusing anything above `cap` vertices.
    pub fn materialize<A: Adjacency + ?Sized>(src: &A, cap: usize) -> Result<Self> {
        let n = src.vertex_count();
        if n > cap {
            return Err(Error::CapExceeded { size: n, cap });
        }
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                if src.adjacent(u, v) {
                    g.add_edge(u, v)?;
                }
            }
        }
        Ok(g)
    }

    /// Adds `uv`; self-loops are rejected and repeated edges ignored.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        let n = self.adj.len();
        if u >= n {
            return Err(Error::UnknownVertex(u));
        }
        if v >= n {
            return Err(Error::UnknownVertex(v));
        }
        if u == v {
            return Err(Error::invalid(format!("self-loop at vertex {u}")));
        }
        if !self.adj[u].contains(v) {
            self.adj[u].insert(v);
            self.adj[v].insert(u);
            self.edge_count += 1;
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    pub fn neighbors(&self, u: usize) -> &BitSet {
        &self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].count()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for u in 0..self.adj.len() {
            out.extend(self.adj[u].iter().filter(|&v| v > u).map(|v| (u, v)));
        }
        out
    }

    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut g = Graph::new(vertices.len());
        for (i, &u) in vertices.iter().enumerate() {
            for (j, &v) in vertices.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    g.add_edge(i, j).expect("in range");
                }
            }
        }
        g
    }
}

impl Adjacency for Graph {
    fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    fn adjacent(&self, u: usize, v: usize) -> bool {
        self.has_edge(u, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_shapes() {
        assert_eq!(Graph::complete(5).edge_count(), 10);
        assert_eq!(Graph::cycle(5).edge_count(), 5);
        assert_eq!(Graph::path(4).edges(), vec![(0, 1), (1, 2), (2, 3)]);
    }

    #[test]
    fn rejects_loops_and_unknown_ids() {
        let mut g = Graph::new(3);
        assert!(g.add_edge(1, 1).is_err());
        assert_eq!(g.add_edge(0, 3), Err(Error::UnknownVertex(3)));
        g.add_edge(0, 1).unwrap();
        g.add_edge(1, 0).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn materialize_respects_cap() {
        let g = Graph::complete(4);
        assert!(matches!(Graph::materialize(&g, 3), Err(Error::CapExceeded { size: 4, cap: 3 })));
        assert_eq!(Graph::materialize(&g, 4).unwrap(), g);
    }
}
