//! Neighborhood queries under the weighted distance.
//!
//! The query radius for a pair depends on both weights, so a single
//! Euclidean index cannot answer "everything within weighted distance `l`
//! of `u`". Nodes are split into classes `2^(i-1) <= w < 2^i`; inside a
//! class the partner weight is known up to a factor 2, so one ball query
//! with radius `l * (w_u 2^i)^(1/d)` per class finds every node within
//! weighted distance `l`, plus false positives no farther than
//! `2^(1/d) * l`.

use crate::rtree::{RTree, DEFAULT_LEAF_CAPACITY};
use crate::space::WeightedEmbedding;

/// Index `i` of the class `2^(i-1) <= w < 2^i`.
pub fn weight_class(w: f64) -> i32 {
    assert!(w.is_finite() && w > 0.0, "weight {w} must be positive");
    let mut i = w.log2().floor() as i32 + 1;
    while pow2(i - 1) > w {
        i -= 1;
    }
    while pow2(i) <= w {
        i += 1;
    }
    i
}

fn pow2(i: i32) -> f64 {
    2f64.powi(i)
}

#[derive(Debug, Clone)]
pub struct WeightClass {
    index: i32,
    members: Vec<usize>,
    tree: RTree,
}

impl WeightClass {
    pub fn index(&self) -> i32 {
        self.index
    }

    /// Members in increasing node order.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// Exclusive upper weight bound `2^i`.
    pub fn upper_weight(&self) -> f64 {
        pow2(self.index)
    }

    pub fn tree(&self) -> &RTree {
        &self.tree
    }
}

/// One R-tree per non-empty weight class, ordered by class index.
#[derive(Debug, Clone)]
pub struct WeightClassForest {
    dim: usize,
    classes: Vec<WeightClass>,
}

impl WeightClassForest {
    pub fn build(e: &WeightedEmbedding) -> Self {
        Self::with_leaf_capacity(e, DEFAULT_LEAF_CAPACITY)
    }

    pub fn with_leaf_capacity(e: &WeightedEmbedding, capacity: usize) -> Self {
        let dim = e.dim();
        let mut by_class: Vec<(i32, Vec<usize>)> = Vec::new();
        let mut node_classes: Vec<(i32, usize)> = (0..e.node_count()).map(|u| (weight_class(e.weight(u)), u)).collect();
        node_classes.sort_unstable();
        for (class, u) in node_classes {
            match by_class.last_mut() {
                Some((c, members)) if *c == class => members.push(u),
                _ => by_class.push((class, vec![u])),
            }
        }
        let classes = by_class
            .into_iter()
            .map(|(index, members)| {
                let mut points = Vec::with_capacity(members.len() * dim);
                for &u in &members {
                    points.extend_from_slice(e.position(u));
                }
                let tree = RTree::bulk_load(dim, &members, &points, capacity);
                WeightClass { index, members, tree }
            })
            .collect();
        WeightClassForest { dim, classes }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn classes(&self) -> &[WeightClass] {
        &self.classes
    }

    /// Euclidean query radius used for `u` in class `class`.
    pub fn query_radius(e: &WeightedEmbedding, u: usize, class: &WeightClass, threshold: f64) -> f64 {
        threshold * (e.weight(u) * class.upper_weight()).powf(1.0 / e.dim() as f64)
    }

    /// Calls `visit(v)` for every candidate `v != u`: a superset of the
    /// nodes within weighted distance `threshold` of `u`.
    pub fn for_each_candidate(&self, e: &WeightedEmbedding, u: usize, threshold: f64, mut visit: impl FnMut(usize)) {
        let center = e.position(u);
        for class in &self.classes {
            let radius = Self::query_radius(e, u, class, threshold);
            class.tree.for_each_within(center, radius, |v, _| {
                if v != u {
                    visit(v)
                }
            });
        }
    }

    /// Candidates of `u`, sorted by node id.
    pub fn query_candidates(&self, e: &WeightedEmbedding, u: usize, threshold: f64) -> Vec<usize> {
        let mut out = Vec::new();
        self.for_each_candidate(e, u, threshold, |v| out.push(v));
        out.sort_unstable();
        out
    }
}

pub fn build_index(e: &WeightedEmbedding) -> WeightClassForest {
    WeightClassForest::build(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_boundaries_are_half_open() {
        assert_eq!(weight_class(1.0), 1);
        assert_eq!(weight_class(1.999), 1);
        assert_eq!(weight_class(2.0), 2);
        assert_eq!(weight_class(3.0), 2);
        assert_eq!(weight_class(7.9), 3);
        assert_eq!(weight_class(8.0), 4);
        assert_eq!(weight_class(0.5), 0);
        assert_eq!(weight_class(0.3), -1);
        assert_eq!(weight_class(f64::from_bits(8f64.to_bits() - 1)), 3);
    }

    #[test]
    fn uniform_weights_form_one_class() {
        let e = WeightedEmbedding::new(2, vec![0.0; 10], vec![1.0; 5]).unwrap();
        let forest = build_index(&e);
        assert_eq!(forest.classes().len(), 1);
        assert_eq!(forest.classes()[0].index(), 1);
        assert_eq!(forest.classes()[0].members(), &[0, 1, 2, 3, 4]);
    }

    #[test]
    fn mixed_weights_split_into_classes() {
        let e = WeightedEmbedding::new(1, vec![0.0; 4], vec![1.0, 3.0, 7.9, 8.0]).unwrap();
        let forest = build_index(&e);
        let classes: Vec<(i32, Vec<usize>)> = forest
            .classes()
            .iter()
            .map(|c| (c.index(), c.members().to_vec()))
            .collect();
        assert_eq!(classes, vec![(1, vec![0]), (2, vec![1]), (3, vec![2]), (4, vec![3])]);
    }

    #[test]
    fn empty_classes_are_omitted() {
        let e = WeightedEmbedding::new(1, vec![0.0; 3], vec![1.0, 1.5, 40.0]).unwrap();
        let indices: Vec<i32> = build_index(&e).classes().iter().map(WeightClass::index).collect();
        assert_eq!(indices, vec![1, 6]);
    }

    #[test]
    fn unit_weight_radius_is_sqrt_two_in_the_plane() {
        // nodes at Euclidean distance 1.4 and 1.42 from node 0
        let e = WeightedEmbedding::new(2, vec![0.0, 0.0, 1.4, 0.0, 0.0, 1.42, 1.0, 0.0], vec![1.0; 4]).unwrap();
        let forest = build_index(&e);
        let class = &forest.classes()[0];
        assert!((WeightClassForest::query_radius(&e, 0, class, 1.0) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(forest.query_candidates(&e, 0, 1.0), vec![1, 3]);
    }

    #[test]
    fn exact_threshold_is_returned_and_far_nodes_are_not() {
        let e = WeightedEmbedding::new(2, vec![0.0, 0.0, 1.0, 0.0, 3.0, 0.0], vec![1.0; 3]).unwrap();
        assert_eq!(e.weighted_distance(0, 1), 1.0);
        assert_eq!(e.weighted_distance(0, 2), 3.0);
        assert_eq!(build_index(&e).query_candidates(&e, 0, 1.0), vec![1]);
    }
}
