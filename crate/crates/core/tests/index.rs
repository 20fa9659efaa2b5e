mod common;

use common::random_embedding;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wembed::index::weight_class;
use wembed::loss::all_pairs_gradient;
use wembed::{compute_gradient, WeightClassForest, WeightedEmbedding};

fn exact_neighborhood(e: &WeightedEmbedding, u: usize, threshold: f64) -> Vec<usize> {
    (0..e.node_count())
        .filter(|&v| v != u && e.weighted_distance(u, v) <= threshold)
        .collect()
}

#[test]
fn candidates_cover_neighborhood_with_bounded_margin() {
    for seed in 0..15u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = 1 + seed as usize % 4;
        let n = 50 + 30 * seed as usize;
        let e = random_embedding(n, dim, 4.0, 40.0, &mut rng);
        let threshold = 0.3 + 0.1 * seed as f64;
        let forest = WeightClassForest::build(&e);
        let bound = 2f64.powf(1.0 / dim as f64) * threshold;
        for u in 0..n {
            let candidates = forest.query_candidates(&e, u, threshold);
            for v in exact_neighborhood(&e, u, threshold) {
                assert!(candidates.binary_search(&v).is_ok(), "seed {seed}: missed {v} for {u}");
            }
            for &v in &candidates {
                assert_ne!(v, u);
                assert!(e.weighted_distance(u, v) <= bound, "seed {seed}: {v} too far from {u}");
            }
        }
    }
}

#[test]
fn classes_partition_nodes() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let e = random_embedding(300, 3, 1.0, 100.0, &mut rng);
    let forest = WeightClassForest::build(&e);
    let mut seen = vec![0; e.node_count()];
    for class in forest.classes() {
        assert!(!class.members().is_empty());
        assert_eq!(class.tree().len(), class.members().len());
        for &u in class.members() {
            seen[u] += 1;
            let w = e.weight(u);
            assert!(class.upper_weight() / 2.0 <= w && w < class.upper_weight());
            assert_eq!(weight_class(w), class.index());
        }
    }
    assert!(seen.iter().all(|&c| c == 1));
    let indices: Vec<i32> = forest.classes().iter().map(|c| c.index()).collect();
    assert!(indices.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn per_class_trees_answer_exact_balls() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let e = random_embedding(400, 2, 3.0, 20.0, &mut rng);
    let forest = WeightClassForest::build(&e);
    for class in forest.classes() {
        for u in (0..e.node_count()).step_by(7) {
            let radius = WeightClassForest::query_radius(&e, u, class, 0.7);
            let mut got = class.tree().within(e.position(u), radius);
            got.sort_unstable();
            let scan: Vec<usize> = class
                .members()
                .iter()
                .copied()
                .filter(|&v| e.euclidean_distance(u, v) <= radius)
                .collect();
            assert_eq!(got, scan);
        }
    }
}

#[test]
fn queries_are_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let e = random_embedding(200, 4, 2.0, 30.0, &mut rng);
    let a = WeightClassForest::build(&e);
    let b = WeightClassForest::build(&e.clone());
    for u in 0..e.node_count() {
        assert_eq!(a.query_candidates(&e, u, 1.0), b.query_candidates(&e, u, 1.0));
    }
}

#[test]
fn leaf_capacity_does_not_change_results() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let e = random_embedding(250, 3, 2.0, 16.0, &mut rng);
    let base = WeightClassForest::build(&e);
    for cap in [2, 3, 8, 64, 1000] {
        let other = WeightClassForest::with_leaf_capacity(&e, cap);
        for u in (0..e.node_count()).step_by(5) {
            assert_eq!(base.query_candidates(&e, u, 0.9), other.query_candidates(&e, u, 0.9));
        }
    }
}

#[test]
fn repulsion_counts_every_close_non_neighbor_once() {
    for seed in 0..10u64 {
        let inst = common::random_instance(40, 3, seed);
        let (g, e) = (&inst.graph, &inst.embedding);
        let forest = WeightClassForest::build(e);
        let (grad, stats) = compute_gradient(g, e, &forest, 1.0, seed, 1);
        let mut close_nonedges = 0;
        let mut long_edges = 0;
        for u in 0..g.node_count() {
            for v in 0..g.node_count() {
                if u == v {
                    continue;
                }
                let d = e.weighted_distance(u, v);
                if g.has_edge(u, v) {
                    long_edges += usize::from(d > 1.0);
                } else {
                    close_nonedges += usize::from(d < 1.0);
                }
            }
        }
        assert_eq!(stats.repulsive_terms, close_nonedges);
        assert_eq!(stats.attractive_terms, long_edges);
        assert!(stats.nonneighbor_candidates >= stats.repulsive_terms);
        assert!(grad.max_abs_diff(&all_pairs_gradient(g, e, 1.0, seed)) <= 1e-12);
    }
}
