//! Threshold losses and the forces they induce.
//!
//! Every family splits into an attracting term applied to edges and a
//! repelling term applied to non-edges, both functions of the weighted
//! distance `x` of the pair. Only the linear family drives optimization;
//! the others are kept as evaluators.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::seed::mix;
use crate::space::WeightedEmbedding;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LossFamily {
    Linear,
    FruchtermanReingold,
    MaxentStress,
    SigmoidLogLikelihood,
}

impl LossFamily {
    pub const ALL: [LossFamily; 4] = [
        LossFamily::Linear,
        LossFamily::FruchtermanReingold,
        LossFamily::MaxentStress,
        LossFamily::SigmoidLogLikelihood,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LossFamily::Linear => "linear",
            LossFamily::FruchtermanReingold => "fruchterman-reingold",
            LossFamily::MaxentStress => "maxent-stress",
            LossFamily::SigmoidLogLikelihood => "sigmoid-log-likelihood",
        }
    }

    fn uses_log_distance(self) -> bool {
        matches!(self, LossFamily::FruchtermanReingold | LossFamily::MaxentStress)
    }
}

impl fmt::Display for LossFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LossFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LossFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown loss family {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossSpec {
    family: LossFamily,
    threshold: f64,
}

impl LossSpec {
    pub fn new(family: LossFamily, threshold: f64) -> Result<Self> {
        if !(threshold.is_finite() && threshold > 0.0) {
            return Err(Error::Config(format!("threshold {threshold} must be positive")));
        }
        Ok(LossSpec { family, threshold })
    }

    pub fn linear(threshold: f64) -> Result<Self> {
        Self::new(LossFamily::Linear, threshold)
    }

    pub fn family(&self) -> LossFamily {
        self.family
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// `(L_attr(x), L_rep(x))`.
    pub fn terms(&self, x: f64) -> Result<(f64, f64)> {
        let l = self.threshold;
        self.check_domain(x)?;
        Ok(match self.family {
            LossFamily::Linear => ((x - l).max(0.0), (l - x).max(0.0)),
            LossFamily::FruchtermanReingold => (x * x * x / (3.0 * l), -l * l * x.ln()),
            LossFamily::MaxentStress => ((x - l) * (x - l) / (l * l), -x.ln()),
            LossFamily::SigmoidLogLikelihood => (neg_log_sigmoid(l - x), neg_log_sigmoid(x - l)),
        })
    }

    /// `(dL_attr/dx, dL_rep/dx)`: the force magnitudes before the chain
    /// rule through the distance. At the linear kinks the derivative is 0.
    pub fn derivatives(&self, x: f64) -> Result<(f64, f64)> {
        let l = self.threshold;
        self.check_domain(x)?;
        Ok(match self.family {
            LossFamily::Linear => (
                if x > l { 1.0 } else { 0.0 },
                if x < l { -1.0 } else { 0.0 },
            ),
            LossFamily::FruchtermanReingold => (x * x / l, -l * l / x),
            LossFamily::MaxentStress => (2.0 * (x - l) / (l * l), -1.0 / x),
            LossFamily::SigmoidLogLikelihood => (sigmoid(x - l), -sigmoid(l - x)),
        })
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        if x < 0.0 || x.is_nan() {
            return Err(Error::Config(format!("distance {x} is negative")));
        }
        if x == 0.0 && self.family.uses_log_distance() {
            return Err(Error::Singular {
                family: self.family.name(),
            });
        }
        Ok(())
    }
}

pub fn loss_terms(spec: &LossSpec, x: f64) -> Result<(f64, f64)> {
    spec.terms(x)
}

pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// `-ln(sigmoid(z))`, stable for large `|z|`.
fn neg_log_sigmoid(z: f64) -> f64 {
    if z > 0.0 {
        (-z).exp().ln_1p()
    } else {
        -z + z.exp().ln_1p()
    }
}

/// Per-node gradient of the total loss with respect to the positions.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    dim: usize,
    values: Vec<f64>,
}

impl GradientField {
    pub fn zeros(n: usize, dim: usize) -> Self {
        GradientField {
            dim,
            values: vec![0.0; n * dim],
        }
    }

    pub(crate) fn from_values(dim: usize, values: Vec<f64>) -> Self {
        GradientField { dim, values }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn node_count(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn node(&self, u: usize) -> &[f64] {
        &self.values[u * self.dim..(u + 1) * self.dim]
    }

    pub fn node_mut(&mut self, u: usize) -> &mut [f64] {
        &mut self.values[u * self.dim..(u + 1) * self.dim]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_abs_diff(&self, other: &GradientField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Adds the linear-loss gradient contribution of edge `uv` to `grad_u`.
/// Returns whether the pair was active (distance above the threshold).
#[inline]
pub(crate) fn add_edge_gradient(e: &WeightedEmbedding, threshold: f64, u: usize, v: usize, grad_u: &mut [f64]) -> bool {
    let pu = e.position(u);
    let pv = e.position(v);
    let norm = crate::space::euclidean(pu, pv);
    let scale = e.pair_scale(u, v);
    if norm / scale <= threshold {
        return false;
    }
    let factor = 1.0 / (norm * scale);
    for ((g, a), b) in grad_u.iter_mut().zip(pu).zip(pv) {
        *g += (a - b) * factor;
    }
    true
}

/// Adds the linear-loss gradient contribution of non-edge `uv` to
/// `grad_u`. Returns whether the pair was active (distance below the
/// threshold).
#[inline]
pub(crate) fn add_nonedge_gradient(
    e: &WeightedEmbedding,
    threshold: f64,
    u: usize,
    v: usize,
    iteration: u64,
    grad_u: &mut [f64],
) -> bool {
    let pu = e.position(u);
    let pv = e.position(v);
    let norm = crate::space::euclidean(pu, pv);
    let scale = e.pair_scale(u, v);
    if norm / scale >= threshold {
        return false;
    }
    if norm == 0.0 {
        let dir = coincident_direction(e.dim(), u, v, iteration);
        for (g, r) in grad_u.iter_mut().zip(dir) {
            *g -= r / scale;
        }
        return true;
    }
    let factor = 1.0 / (norm * scale);
    for ((g, a), b) in grad_u.iter_mut().zip(pu).zip(pv) {
        *g -= (a - b) * factor;
    }
    true
}

/// Unit direction along which `u` is pushed away from a coincident `v`.
/// Depends only on the unordered pair and the iteration; the two
/// endpoints get opposite directions.
pub fn coincident_direction(dim: usize, u: usize, v: usize, iteration: u64) -> Vec<f64> {
    let (lo, hi) = if u < v { (u, v) } else { (v, u) };
    let mut rng = ChaCha8Rng::seed_from_u64(mix(&[lo as u64, hi as u64, iteration]));
    let mut dir: Vec<f64> = loop {
        let sample: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = sample.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            break sample.into_iter().map(|x| x / norm).collect();
        }
    };
    if u > v {
        dir.iter_mut().for_each(|x| *x = -*x);
    }
    dir
}

/// Attractive force on `u` from edge `uv` under the linear loss.
pub fn edge_force(e: &WeightedEmbedding, threshold: f64, u: usize, v: usize) -> Vec<f64> {
    let mut grad = vec![0.0; e.dim()];
    add_edge_gradient(e, threshold, u, v, &mut grad);
    grad.iter_mut().for_each(|g| *g = -*g);
    grad
}

/// Repulsive force on `u` from non-edge `uv` under the linear loss.
pub fn nonedge_force(e: &WeightedEmbedding, threshold: f64, u: usize, v: usize, iteration: u64) -> Vec<f64> {
    let mut grad = vec![0.0; e.dim()];
    add_nonedge_gradient(e, threshold, u, v, iteration, &mut grad);
    grad.iter_mut().for_each(|g| *g = -*g);
    grad
}

/// Total loss by enumerating every unordered pair. Quadratic; meant as a
/// reference for small graphs.
pub fn total_loss_oracle(g: &Graph, e: &WeightedEmbedding, spec: &LossSpec) -> Result<f64> {
    let n = g.node_count();
    let mut total = 0.0;
    for u in 0..n {
        for v in u + 1..n {
            let (attr, rep) = spec.terms(e.weighted_distance(u, v))?;
            total += if g.has_edge(u, v) { attr } else { rep };
        }
    }
    Ok(total)
}

/// Linear-loss gradient by enumerating every pair. Quadratic.
pub fn all_pairs_gradient(g: &Graph, e: &WeightedEmbedding, threshold: f64, iteration: u64) -> GradientField {
    let n = g.node_count();
    let mut grad = GradientField::zeros(n, e.dim());
    for u in 0..n {
        let grad_u = grad.node_mut(u);
        for v in 0..n {
            if v == u {
                continue;
            }
            if g.has_edge(u, v) {
                add_edge_gradient(e, threshold, u, v, grad_u);
            } else {
                add_nonedge_gradient(e, threshold, u, v, iteration, grad_u);
            }
        }
    }
    grad
}
