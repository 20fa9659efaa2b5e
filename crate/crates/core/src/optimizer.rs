//! Position optimization for weighted embeddings.
//!
//! Weights are fixed up front from the degrees. Positions start uniform in
//! the unit cube and follow full-batch Adam steps on the linear loss. The
//! repulsive part of each gradient is exact: every non-neighbor closer
//! than the threshold is found through the weight-class forest, nothing is
//! sampled.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::index::WeightClassForest;
use crate::loss::{add_edge_gradient, add_nonedge_gradient, GradientField};
use crate::rtree::DEFAULT_LEAF_CAPACITY;
use crate::space::{assign_weights, init_positions, WeightedEmbedding};

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub dim: usize,
    /// Assumed dimension of the graph's latent geometry; weights are
    /// `deg^(dim / latent_dim)`.
    pub latent_dim: f64,
    /// Give every node weight 1, i.e. a plain Euclidean embedding.
    pub uniform_weights: bool,
    pub threshold: f64,
    pub lr0: f64,
    /// Learning rate at step `t` is `lr0 * lr_decay^t`.
    pub lr_decay: f64,
    pub max_iters: usize,
    /// Stop once the mean per-node displacement of a step falls below this.
    pub stop_eps: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    pub seed: u64,
    pub leaf_capacity: usize,
    pub threads: usize,
}

impl OptimizerConfig {
    pub fn new(dim: usize) -> Self {
        OptimizerConfig {
            dim,
            latent_dim: 8.0,
            uniform_weights: false,
            threshold: 1.0,
            lr0: 1.0,
            lr_decay: 0.995,
            max_iters: 1000,
            stop_eps: 1e-4,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
            seed: 0,
            leaf_capacity: DEFAULT_LEAF_CAPACITY,
            threads: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.dim == 0 {
            return fail("dimension must be at least 1".into());
        }
        if !(self.latent_dim.is_finite() && self.latent_dim >= 1.0) {
            return fail(format!("latent dimension {} must be at least 1", self.latent_dim));
        }
        if !(self.threshold.is_finite() && self.threshold > 0.0) {
            return fail(format!("threshold {} must be positive", self.threshold));
        }
        if !(self.lr0.is_finite() && self.lr0 > 0.0) {
            return fail(format!("learning rate {} must be positive", self.lr0));
        }
        if !(self.lr_decay > 0.0 && self.lr_decay <= 1.0) {
            return fail(format!("learning rate decay {} must lie in (0, 1]", self.lr_decay));
        }
        if self.max_iters == 0 {
            return fail("max_iters must be at least 1".into());
        }
        if !(self.stop_eps.is_finite() && self.stop_eps > 0.0) {
            return fail(format!("stop tolerance {} must be positive", self.stop_eps));
        }
        if !(0.0..1.0).contains(&self.adam_beta1) || !(0.0..1.0).contains(&self.adam_beta2) {
            return fail("Adam betas must lie in [0, 1)".into());
        }
        if self.adam_eps <= 0.0 || self.adam_eps.is_nan() {
            return fail("Adam epsilon must be positive".into());
        }
        if self.leaf_capacity < 2 {
            return fail("leaf capacity must be at least 2".into());
        }
        if self.threads == 0 {
            return fail("thread count must be at least 1".into());
        }
        Ok(())
    }

    pub fn learning_rate(&self, step: u64) -> f64 {
        self.lr0 * self.lr_decay.powf(step as f64)
    }
}

/// Adam moment estimates for a flat parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    first: Vec<f64>,
    second: Vec<f64>,
    steps: u64,
}

impl AdamState {
    pub fn new(len: usize) -> Self {
        AdamState {
            first: vec![0.0; len],
            second: vec![0.0; len],
            steps: 0,
        }
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// One bias-corrected Adam update of `params` (grouped `dim` per node)
    /// against `grad`. Returns the mean Euclidean displacement per node.
    pub fn step(&mut self, cfg: &OptimizerConfig, params: &mut [f64], grad: &[f64], dim: usize) -> Result<f64> {
        assert_eq!(params.len(), grad.len());
        assert_eq!(params.len(), self.first.len());
        if let Some(i) = grad.iter().position(|g| !g.is_finite()) {
            return Err(Error::NonFinite { node: i / dim });
        }
        let lr = cfg.learning_rate(self.steps);
        self.steps += 1;
        let (b1, b2) = (cfg.adam_beta1, cfg.adam_beta2);
        let correction1 = 1.0 - b1.powf(self.steps as f64);
        let correction2 = 1.0 - b2.powf(self.steps as f64);
        let mut total = 0.0;
        for (node, chunk) in params.chunks_mut(dim).enumerate() {
            let mut moved2 = 0.0;
            for (k, x) in chunk.iter_mut().enumerate() {
                let i = node * dim + k;
                let g = grad[i];
                self.first[i] = b1 * self.first[i] + (1.0 - b1) * g;
                self.second[i] = b2 * self.second[i] + (1.0 - b2) * g * g;
                let m_hat = self.first[i] / correction1;
                let v_hat = self.second[i] / correction2;
                let delta = lr * m_hat / (v_hat.sqrt() + cfg.adam_eps);
                *x -= delta;
                moved2 += delta * delta;
            }
            total += moved2.sqrt();
        }
        Ok(total / (params.len() / dim).max(1) as f64)
    }
}

pub fn adam_step(state: &mut AdamState, cfg: &OptimizerConfig, e: &mut WeightedEmbedding, grad: &GradientField) -> Result<f64> {
    let dim = e.dim();
    state.step(cfg, e.positions_mut(), grad.values(), dim)
}

/// Work done while assembling one gradient.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GradientStats {
    /// Edges longer than the threshold.
    pub attractive_terms: usize,
    /// Candidate entries returned by the forest over all nodes.
    pub candidates: usize,
    /// Candidates that are not neighbors.
    pub nonneighbor_candidates: usize,
    /// Non-neighbor candidates closer than the threshold.
    pub repulsive_terms: usize,
}

impl GradientStats {
    fn merge(&mut self, other: GradientStats) {
        self.attractive_terms += other.attractive_terms;
        self.candidates += other.candidates;
        self.nonneighbor_candidates += other.nonneighbor_candidates;
        self.repulsive_terms += other.repulsive_terms;
    }
}

#[allow(clippy::too_many_arguments)]
fn node_gradient(
    g: &Graph,
    e: &WeightedEmbedding,
    forest: &WeightClassForest,
    threshold: f64,
    iteration: u64,
    u: usize,
    candidates: &mut Vec<usize>,
    grad_u: &mut [f64],
) -> GradientStats {
    let mut stats = GradientStats::default();
    let neighbors = g.neighbors(u);
    for &v in neighbors {
        if add_edge_gradient(e, threshold, u, v, grad_u) {
            stats.attractive_terms += 1;
        }
    }
    candidates.clear();
    forest.for_each_candidate(e, u, threshold, |v| candidates.push(v));
    candidates.sort_unstable();
    stats.candidates = candidates.len();
    for &v in candidates.iter() {
        if neighbors.binary_search(&v).is_ok() {
            continue;
        }
        stats.nonneighbor_candidates += 1;
        if add_nonedge_gradient(e, threshold, u, v, iteration, grad_u) {
            stats.repulsive_terms += 1;
        }
    }
    stats
}

/// Exact linear-loss gradient, with repulsion restricted to the forest's
/// candidates. `forest` must be built from `e`'s current positions.
pub fn compute_gradient(
    g: &Graph,
    e: &WeightedEmbedding,
    forest: &WeightClassForest,
    threshold: f64,
    iteration: u64,
    threads: usize,
) -> (GradientField, GradientStats) {
    let n = g.node_count();
    let dim = e.dim();
    let mut values = vec![0.0; n * dim];
    let mut stats = GradientStats::default();
    let threads = threads.clamp(1, n.max(1));
    if threads == 1 {
        let mut candidates = Vec::new();
        for (u, grad_u) in values.chunks_mut(dim).enumerate() {
            stats.merge(node_gradient(g, e, forest, threshold, iteration, u, &mut candidates, grad_u));
        }
    } else {
        let per_thread = n.div_ceil(threads);
        let partial: Vec<GradientStats> = std::thread::scope(|scope| {
            let handles: Vec<_> = values
                .chunks_mut(per_thread * dim)
                .enumerate()
                .map(|(chunk, block)| {
                    scope.spawn(move || {
                        let mut local = GradientStats::default();
                        let mut candidates = Vec::new();
                        for (offset, grad_u) in block.chunks_mut(dim).enumerate() {
                            let u = chunk * per_thread + offset;
                            local.merge(node_gradient(g, e, forest, threshold, iteration, u, &mut candidates, grad_u));
                        }
                        local
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("gradient worker panicked")).collect()
        });
        for s in partial {
            stats.merge(s);
        }
    }
    (GradientField::from_values(dim, values), stats)
}

/// Linear loss with the non-edge sum restricted to forest candidates;
/// equal to the all-pairs loss because farther pairs contribute 0.
pub fn indexed_loss(g: &Graph, e: &WeightedEmbedding, forest: &WeightClassForest, threshold: f64) -> f64 {
    let mut total = 0.0;
    for (u, v) in g.edges() {
        total += (e.weighted_distance(u, v) - threshold).max(0.0);
    }
    let mut candidates = Vec::new();
    for u in 0..g.node_count() {
        candidates.clear();
        forest.for_each_candidate(e, u, threshold, |v| {
            if v > u {
                candidates.push(v)
            }
        });
        candidates.sort_unstable();
        for &v in &candidates {
            if !g.has_edge(u, v) {
                total += (threshold - e.weighted_distance(u, v)).max(0.0);
            }
        }
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationReport {
    pub iteration: usize,
    pub learning_rate: f64,
    pub mean_displacement: f64,
    pub stats: GradientStats,
}

#[derive(Debug, Clone)]
pub struct EmbedOutcome {
    pub embedding: WeightedEmbedding,
    pub iterations: usize,
    pub converged: bool,
    pub final_loss: f64,
    pub elapsed_secs: f64,
}

pub fn initial_embedding(g: &Graph, cfg: &OptimizerConfig) -> Result<WeightedEmbedding> {
    cfg.validate()?;
    let n = g.node_count();
    let weights = if cfg.uniform_weights {
        vec![1.0; n]
    } else {
        assign_weights(g, cfg.dim, cfg.latent_dim)?
    };
    WeightedEmbedding::new(cfg.dim, init_positions(n, cfg.dim, cfg.seed), weights)
}

pub fn embed(g: &Graph, cfg: &OptimizerConfig) -> Result<EmbedOutcome> {
    embed_with(g, cfg, |_, _| {})
}

/// Runs the optimizer, calling `observe` after every step with the
/// updated embedding.
pub fn embed_with(
    g: &Graph,
    cfg: &OptimizerConfig,
    mut observe: impl FnMut(&IterationReport, &WeightedEmbedding),
) -> Result<EmbedOutcome> {
    let start = Instant::now();
    let mut embedding = initial_embedding(g, cfg)?;
    let mut adam = AdamState::new(embedding.positions().len());
    let mut iterations = 0;
    let mut converged = false;
    for iteration in 0..cfg.max_iters {
        let forest = WeightClassForest::with_leaf_capacity(&embedding, cfg.leaf_capacity);
        let (grad, stats) = compute_gradient(g, &embedding, &forest, cfg.threshold, iteration as u64, cfg.threads);
        let learning_rate = cfg.learning_rate(adam.steps());
        let mean_displacement = adam_step(&mut adam, cfg, &mut embedding, &grad)?;
        if let Some(u) = (0..embedding.node_count()).find(|&u| embedding.position(u).iter().any(|x| !x.is_finite())) {
            return Err(Error::NonFinite { node: u });
        }
        iterations = iteration + 1;
        observe(
            &IterationReport {
                iteration,
                learning_rate,
                mean_displacement,
                stats,
            },
            &embedding,
        );
        if mean_displacement < cfg.stop_eps {
            converged = true;
            break;
        }
    }
    let forest = WeightClassForest::with_leaf_capacity(&embedding, cfg.leaf_capacity);
    let final_loss = indexed_loss(g, &embedding, &forest, cfg.threshold);
    Ok(EmbedOutcome {
        embedding,
        iterations,
        converged,
        final_loss,
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}
