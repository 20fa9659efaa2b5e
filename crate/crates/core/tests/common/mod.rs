#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wembed::loss::total_loss_oracle;
use wembed::{Graph, LossSpec, WeightedEmbedding};

pub struct Instance {
    pub graph: Graph,
    pub embedding: WeightedEmbedding,
}

/// Erdős–Rényi graph with edge probability `p`.
pub fn random_graph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_indexed_edges(n, edges)
}

/// Positions uniform in `[0, side)^dim`, weights uniform in `[1, max_weight)`.
pub fn random_embedding(n: usize, dim: usize, side: f64, max_weight: f64, rng: &mut ChaCha8Rng) -> WeightedEmbedding {
    let positions = (0..n * dim).map(|_| rng.random_range(0.0..side)).collect();
    let weights = (0..n)
        .map(|_| if max_weight > 1.0 { rng.random_range(1.0..max_weight) } else { 1.0 })
        .collect();
    WeightedEmbedding::new(dim, positions, weights).unwrap()
}

pub fn random_instance(n: usize, dim: usize, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let graph = random_graph(n, 0.2, &mut rng);
    let embedding = random_embedding(n, dim, 2.0, 6.0, &mut rng);
    Instance { graph, embedding }
}

/// Smallest `|dist(u, v) - threshold|` over all pairs.
pub fn kink_gap(e: &WeightedEmbedding, threshold: f64) -> f64 {
    let n = e.node_count();
    let mut gap = f64::INFINITY;
    for u in 0..n {
        for v in u + 1..n {
            gap = gap.min((e.weighted_distance(u, v) - threshold).abs());
        }
    }
    gap
}

/// Central finite differences of the all-pairs loss.
pub fn finite_difference_gradient(g: &Graph, e: &WeightedEmbedding, spec: &LossSpec, h: f64) -> Vec<f64> {
    let base = e.positions().to_vec();
    let at = |coords: Vec<f64>| {
        let moved = WeightedEmbedding::new(e.dim(), coords, e.weights().to_vec()).unwrap();
        total_loss_oracle(g, &moved, spec).unwrap()
    };
    (0..base.len())
        .map(|i| {
            let mut plus = base.clone();
            plus[i] += h;
            let mut minus = base.clone();
            minus[i] -= h;
            (at(plus) - at(minus)) / (2.0 * h)
        })
        .collect()
}

pub fn relative_error(approx: &[f64], exact: &[f64]) -> f64 {
    let diff = approx
        .iter()
        .zip(exact)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let norm = exact.iter().map(|x| x * x).sum::<f64>().sqrt();
    diff / norm.max(f64::MIN_POSITIVE)
}

/// Best F1 by trying every pair distance as threshold and counting the
/// prediction from scratch. Returns `(f1, threshold)`, preferring the
/// smaller threshold among equal scores.
pub fn brute_force_best_f1(g: &Graph, e: &WeightedEmbedding) -> (f64, f64) {
    let n = g.node_count();
    let m = g.edge_count() as f64;
    let mut thresholds: Vec<f64> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .map(|(u, v)| e.weighted_distance(u, v))
        .collect();
    thresholds.sort_by(f64::total_cmp);
    let mut best = (0.0, f64::NAN);
    for &t in &thresholds {
        let (mut tp, mut predicted) = (0.0, 0.0);
        for u in 0..n {
            for v in u + 1..n {
                if e.weighted_distance(u, v) <= t {
                    predicted += 1.0;
                    if g.has_edge(u, v) {
                        tp += 1.0;
                    }
                }
            }
        }
        let (p, r) = (tp / predicted, tp / m);
        let f1 = if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
        if f1 > best.0 {
            best = (f1, t);
        }
    }
    best
}

/// Brute-force check of the threshold property with ties counted as edges.
pub fn satisfies_threshold_property(g: &Graph, e: &WeightedEmbedding, t: f64) -> bool {
    let n = g.node_count();
    (0..n).all(|u| (u + 1..n).all(|v| (e.weighted_distance(u, v) <= t) == g.has_edge(u, v)))
}
