//! Graph reconstruction scores.
//!
//! A threshold `t` predicts every pair at weighted distance at most `t` to
//! be an edge. Precision, recall and F1 of that prediction are computed
//! against the true edge set, and F1 is maximized over `t`.

use std::collections::HashSet;
use std::fmt;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::space::WeightedEmbedding;

pub const DEFAULT_SAMPLE_FACTOR: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    Exact,
    Sampled { factor: usize, seed: u64 },
}

impl fmt::Display for EvalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalMode::Exact => f.write_str("exact"),
            EvalMode::Sampled { factor, seed } => write!(f, "sampled:{factor}:{seed}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionReport {
    pub f1: f64,
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
    pub mode: EvalMode,
}

impl ReconstructionReport {
    pub fn describe(&self) -> String {
        format!(
            "F1 {:.4} at threshold {:.6} (precision {:.4}, recall {:.4}, {})",
            self.f1,
            self.threshold,
            self.precision,
            self.recall,
            match self.mode {
                EvalMode::Exact => "all pairs".to_owned(),
                EvalMode::Sampled { factor, seed } => format!("{factor}x sampled non-edges, seed {seed}"),
            }
        )
    }
}

/// Machine-readable single-line form.
impl fmt::Display for ReconstructionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "f1={} t={} prec={} rec={} mode={}",
            self.f1, self.threshold, self.precision, self.recall, self.mode
        )
    }
}

pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

fn check(g: &Graph, e: &WeightedEmbedding) -> Result<()> {
    if g.edge_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    if g.node_count() != e.node_count() {
        return Err(Error::Config(format!(
            "graph has {} nodes but the embedding has {}",
            g.node_count(),
            e.node_count()
        )));
    }
    Ok(())
}

/// Precision and recall of the pairs within weighted distance `t`. An
/// empty prediction has precision 1.
pub fn precision_recall(g: &Graph, e: &WeightedEmbedding, t: f64) -> Result<(f64, f64)> {
    check(g, e)?;
    let n = g.node_count();
    let (mut hits, mut predicted) = (0usize, 0usize);
    for u in 0..n {
        for v in u + 1..n {
            if e.weighted_distance(u, v) <= t {
                predicted += 1;
                if g.has_edge(u, v) {
                    hits += 1;
                }
            }
        }
    }
    let precision = if predicted == 0 { 1.0 } else { hits as f64 / predicted as f64 };
    Ok((precision, hits as f64 / g.edge_count() as f64))
}

#[derive(Debug, Clone, Copy)]
struct Scored {
    distance: f64,
    is_edge: bool,
}

/// Sweeps thresholds over the distinct distances in `pairs`. Every
/// non-edge entry stands for `nonedge_weight` non-edges.
fn sweep(pairs: &mut [Scored], edge_count: usize, nonedge_weight: f64) -> (f64, f64, f64, f64) {
    pairs.sort_by(|a, b| a.distance.total_cmp(&b.distance));
    let m = edge_count as f64;
    let (mut hits, mut misses) = (0usize, 0usize);
    let mut best = (0.0, 0.0, 1.0, 0.0);
    let mut i = 0;
    while i < pairs.len() {
        let t = pairs[i].distance;
        while i < pairs.len() && pairs[i].distance == t {
            if pairs[i].is_edge {
                hits += 1;
            } else {
                misses += 1;
            }
            i += 1;
        }
        let precision = hits as f64 / (hits as f64 + misses as f64 * nonedge_weight);
        let recall = hits as f64 / m;
        let f1 = f1_score(precision, recall);
        if f1 > best.0 {
            best = (f1, t, precision, recall);
        }
    }
    best
}

/// Best F1 over all thresholds, enumerating every unordered pair.
pub fn best_f1_exact(g: &Graph, e: &WeightedEmbedding) -> Result<ReconstructionReport> {
    check(g, e)?;
    let n = g.node_count();
    let mut pairs = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for u in 0..n {
        let neighbors = g.neighbors(u);
        for v in u + 1..n {
            pairs.push(Scored {
                distance: e.weighted_distance(u, v),
                is_edge: neighbors.binary_search(&v).is_ok(),
            });
        }
    }
    let (f1, threshold, precision, recall) = sweep(&mut pairs, g.edge_count(), 1.0);
    Ok(ReconstructionReport {
        f1,
        threshold,
        precision,
        recall,
        mode: EvalMode::Exact,
    })
}

/// Number of unordered pairs that are not edges.
pub fn nonedge_count(g: &Graph) -> usize {
    let n = g.node_count();
    n * n.saturating_sub(1) / 2 - g.edge_count()
}

/// Best F1 using all edges and `factor * m` distinct non-edges drawn
/// uniformly; false positives are scaled up to the full non-edge count.
/// Falls back to the exact score when fewer non-edges exist.
pub fn best_f1_sampled(g: &Graph, e: &WeightedEmbedding, factor: usize, seed: u64) -> Result<ReconstructionReport> {
    check(g, e)?;
    if factor == 0 {
        return Err(Error::Config("sample factor must be at least 1".into()));
    }
    let m = g.edge_count();
    let available = nonedge_count(g);
    let wanted = factor.saturating_mul(m);
    if wanted > available {
        return best_f1_exact(g, e);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nonedges = if wanted * 2 <= available {
        sample_nonedges_rejection(g, wanted, &mut rng)
    } else {
        let all: Vec<(usize, usize)> = all_nonedges(g);
        sample(&mut rng, all.len(), wanted).into_iter().map(|i| all[i]).collect()
    };
    let mut pairs: Vec<Scored> = g
        .edges()
        .map(|(u, v)| Scored {
            distance: e.weighted_distance(u, v),
            is_edge: true,
        })
        .chain(nonedges.iter().map(|&(u, v)| Scored {
            distance: e.weighted_distance(u, v),
            is_edge: false,
        }))
        .collect();
    let weight = available as f64 / wanted as f64;
    let (f1, threshold, precision, recall) = sweep(&mut pairs, m, weight);
    Ok(ReconstructionReport {
        f1,
        threshold,
        precision,
        recall,
        mode: EvalMode::Sampled { factor, seed },
    })
}

fn sample_nonedges_rejection(g: &Graph, count: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let n = g.node_count();
    let mut seen = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u == v {
            continue;
        }
        let pair = (u.min(v), u.max(v));
        if g.has_edge(pair.0, pair.1) || !seen.insert(pair) {
            continue;
        }
        out.push(pair);
    }
    out
}

fn all_nonedges(g: &Graph) -> Vec<(usize, usize)> {
    let n = g.node_count();
    (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|&(u, v)| !g.has_edge(u, v))
        .collect()
}
