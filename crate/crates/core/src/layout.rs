//! Tree layouts (branch decompositions): graph vertices sit bijectively on
//! the leaves of a tree, and every tree edge splits the vertex set in two.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::Tree;

/// A tree edge with the vertices on its first and second endpoint's side.
pub type Cut = ((usize, usize), Vec<usize>, Vec<usize>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeLayout {
    pub tree: Tree,
    /// `leaf_of[v]` is the leaf holding vertex `v`.
    pub leaf_of: Vec<usize>,
}

impl TreeLayout {
    /// Checks that `leaf_of` is a bijection onto the leaves of `tree`.
    pub fn new(tree: Tree, leaf_of: Vec<usize>) -> Result<Self> {
        let leaves = tree.leaves();
        if leaves.len() != leaf_of.len() {
            return Err(Error::invalid(format!(
                "{} vertices cannot sit bijectively on {} leaves",
                leaf_of.len(),
                leaves.len()
            )));
        }
        let mut used = vec![false; tree.node_count()];
        for &l in &leaf_of {
            if l >= tree.node_count() || tree.degree(l) > 1 || std::mem::replace(&mut used[l], true) {
                return Err(Error::invalid(format!("node {l} is not a free leaf")));
            }
        }
        Ok(TreeLayout { tree, leaf_of })
    }

    /// The left-aligned caterpillar on `order`: spine `p_1 … p_{N−1}` (nodes
    /// `0..N−1`), `p_j` carries `ℓ_j`, and `p_{N−1}` also carries `ℓ_N`; leaf
    /// `ℓ_j` is node `N−2+j` and holds `order[j−1]`.
    pub fn caterpillar(order: &[usize]) -> Result<Self> {
        let n = order.len();
        if n == 0 {
            return Err(Error::invalid("a layout needs at least one vertex"));
        }
        let mut leaf_of = vec![usize::MAX; n];
        if n == 1 {
            if order[0] != 0 {
                return Err(Error::UnknownVertex(order[0]));
            }
            return TreeLayout::new(Tree::single(), vec![0]);
        }
        let spine = n - 1;
        let mut edges: Vec<(usize, usize)> = (1..spine).map(|j| (j - 1, j)).collect();
        for j in 0..n {
            let p = j.min(spine - 1);
            edges.push((p, spine + j));
        }
        for (j, &v) in order.iter().enumerate() {
            if v >= n || leaf_of[v] != usize::MAX {
                return Err(Error::invalid("caterpillar order is not a permutation"));
            }
            leaf_of[v] = spine + j;
        }
        TreeLayout::new(Tree::from_edges(2 * n - 1, &edges)?, leaf_of)
    }

    pub fn vertex_count(&self) -> usize {
        self.leaf_of.len()
    }

    /// Every internal node has degree 3.
    pub fn is_ternary(&self) -> bool {
        (0..self.tree.node_count()).all(|t| self.tree.degree(t) <= 1 || self.tree.degree(t) == 3)
    }

    /// The internal nodes induce a path.
    pub fn is_linear(&self) -> bool {
        let internal: Vec<usize> = (0..self.tree.node_count()).filter(|&t| self.tree.degree(t) > 1).collect();
        internal.iter().all(|&t| self.tree.neighbors(t).iter().filter(|&&x| self.tree.degree(x) > 1).count() <= 2)
    }

    /// Vertex bipartition of every tree edge `(p, q)`: vertices on `p`'s side first.
    pub fn cuts(&self) -> Vec<Cut> {
        let rooted = self.tree.rooted();
        self.tree
            .edges()
            .into_iter()
            .map(|(p, q)| {
                let (a, b): (Vec<usize>, Vec<usize>) =
                    (0..self.leaf_of.len()).partition(|&v| rooted.on_side(self.leaf_of[v], q, p));
                ((p, q), a, b)
            })
            .collect()
    }

    pub fn to_repr(&self) -> LayoutRepr {
        LayoutRepr { nodes: self.tree.node_count(), parents: self.tree.parents(), leaf_of: self.leaf_of.clone() }
    }

    pub fn from_repr(r: &LayoutRepr) -> Result<Self> {
        if r.parents.len() != r.nodes {
            return Err(Error::LengthMismatch { expected: r.nodes, got: r.parents.len() });
        }
        TreeLayout::new(Tree::from_parents(&r.parents)?, r.leaf_of.clone())
    }
}

/// Parent array (rooted at node 0) plus the leaf of every vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutRepr {
    pub nodes: usize,
    pub parents: Vec<Option<usize>>,
    pub leaf_of: Vec<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn caterpillar_shape() {
        let l = TreeLayout::caterpillar(&[2, 0, 1, 3]).unwrap();
        assert_eq!(l.tree.node_count(), 7);
        assert!(l.is_ternary() || l.tree.degree(0) == 2);
        assert!(l.is_linear());
        assert_eq!(l.leaf_of, vec![4, 5, 3, 6]);
        // Spine edge p_1 p_2 separates ℓ_1 from the rest.
        let cuts = l.cuts();
        let (_, a, _) = cuts.iter().find(|(e, _, _)| *e == (0, 1)).unwrap();
        assert_eq!(a, &vec![2]);
        assert_eq!(cuts.len(), 6);
    }

    #[test]
    fn tiny_caterpillars() {
        let one = TreeLayout::caterpillar(&[0]).unwrap();
        assert!(one.cuts().is_empty());
        let two = TreeLayout::caterpillar(&[1, 0]).unwrap();
        assert_eq!(two.tree.node_count(), 3);
        assert_eq!(two.cuts().len(), 2);
    }

    #[test]
    fn repr_round_trip() {
        let l = TreeLayout::caterpillar(&[3, 1, 0, 2, 4]).unwrap();
        assert_eq!(TreeLayout::from_repr(&l.to_repr()).unwrap(), l);
    }

    #[test]
    fn rejects_internal_placement() {
        assert!(TreeLayout::new(Tree::star(3), vec![0, 1, 2]).is_err());
    }
}
