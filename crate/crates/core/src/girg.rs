//! Geometric inhomogeneous random graphs on the unit torus.
//!
//! Nodes get Pareto weights with tail exponent `beta - 1` (so degrees
//! follow a power law with exponent `beta`) and uniform positions in
//! `[0, 1)^d`. A pair connects with probability
//! `min(1, c * (w_u w_v / W)^(1/T) / |x_u - x_v|^(d/T))`, where `W` is the
//! total weight and the constant `c` is calibrated so the expected
//! average degree hits the target. Temperature 0 turns this into the
//! threshold rule `|x_u - x_v| <= (c w_u w_v / W)^(1/d)`.
//!
//! Every pair is examined, so this is meant for a few thousand nodes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::seed::{mix, unit_f64};

const CALIBRATION_STEPS: usize = 40;
const CALIBRATION_TOLERANCE: f64 = 0.05;
/// Bracket for `ln c`.
const LOG_C_RANGE: (f64, f64) = (-2000.0, 2000.0);

#[derive(Debug, Clone, PartialEq)]
pub struct GirgConfig {
    pub n: usize,
    pub target_avg_deg: f64,
    pub beta: f64,
    pub dim: usize,
    pub temperature: f64,
    pub seed: u64,
}

impl GirgConfig {
    pub fn new(n: usize, target_avg_deg: f64, beta: f64, dim: usize, seed: u64) -> Self {
        GirgConfig {
            n,
            target_avg_deg,
            beta,
            dim,
            temperature: 0.1,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.n < 2 {
            return fail(format!("need at least 2 nodes, got {}", self.n));
        }
        if self.beta <= 2.0 || !self.beta.is_finite() {
            return fail(format!("power-law exponent {} must exceed 2", self.beta));
        }
        if !(0.0..1.0).contains(&self.temperature) {
            return fail(format!("temperature {} must lie in [0, 1)", self.temperature));
        }
        if self.dim == 0 {
            return fail("dimension must be at least 1".into());
        }
        if !(self.target_avg_deg > 0.0 && self.target_avg_deg < (self.n - 1) as f64) {
            return fail(format!(
                "average degree {} must lie strictly between 0 and n - 1 = {}",
                self.target_avg_deg,
                self.n - 1
            ));
        }
        Ok(())
    }
}

/// Distance on the unit torus `[0, 1)^d` (Euclidean, wrapping each axis).
pub fn torus_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let gap = (x - y).abs();
            let gap = gap.min(1.0 - gap);
            gap * gap
        })
        .sum::<f64>()
        .sqrt()
}

struct Latent {
    dim: usize,
    log_weights: Vec<f64>,
    log_total: f64,
    positions: Vec<f64>,
}

impl Latent {
    fn sample(cfg: &GirgConfig) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let exponent = -1.0 / (cfg.beta - 1.0);
        let weights: Vec<f64> = (0..cfg.n).map(|_| (1.0 - rng.random::<f64>()).powf(exponent)).collect();
        let positions = (0..cfg.n * cfg.dim).map(|_| rng.random::<f64>()).collect();
        Latent {
            dim: cfg.dim,
            log_total: weights.iter().sum::<f64>().ln(),
            log_weights: weights.iter().map(|w| w.ln()).collect(),
            positions,
        }
    }

    fn position(&self, u: usize) -> &[f64] {
        &self.positions[u * self.dim..(u + 1) * self.dim]
    }

    /// `ln p_uv - ln c` before capping at 1; `+inf` for coincident points.
    fn log_affinity(&self, u: usize, v: usize, temperature: f64) -> f64 {
        let log_dist = torus_distance(self.position(u), self.position(v)).ln();
        let log_ratio = self.log_weights[u] + self.log_weights[v] - self.log_total;
        let d = self.dim as f64;
        if temperature == 0.0 {
            // threshold rule: connect iff d ln(dist) <= ln c + log_ratio
            log_ratio - d * log_dist
        } else {
            (log_ratio - d * log_dist) / temperature
        }
    }

    /// Affinities of all pairs `u < v`, row by row.
    fn pair_affinities(&self, temperature: f64) -> Vec<f64> {
        let n = self.log_weights.len();
        let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for u in 0..n {
            out.extend((u + 1..n).map(|v| self.log_affinity(u, v, temperature)));
        }
        out
    }
}

/// Expected average degree over `n` nodes for `ln c = log_c`.
fn expected_avg_degree(affinities: &[f64], n: usize, log_c: f64, temperature: f64) -> f64 {
    let total: f64 = affinities.iter().map(|&a| connection_probability(log_c, a, temperature)).sum();
    2.0 * total / n as f64
}

fn connection_probability(log_c: f64, affinity: f64, temperature: f64) -> f64 {
    if temperature == 0.0 {
        if affinity + log_c >= 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        (log_c + affinity).min(0.0).exp()
    }
}

/// Result of calibrating and sampling a GIRG.
#[derive(Debug, Clone)]
pub struct GirgSample {
    pub graph: Graph,
    /// Calibrated `ln c`.
    pub log_c: f64,
    pub expected_avg_deg: f64,
}

pub fn sample_girg(cfg: &GirgConfig) -> Result<Graph> {
    sample_girg_detailed(cfg).map(|s| s.graph)
}

pub fn sample_girg_detailed(cfg: &GirgConfig) -> Result<GirgSample> {
    cfg.validate()?;
    let latent = Latent::sample(cfg);
    let t = cfg.temperature;
    let target = cfg.target_avg_deg;
    let n = cfg.n;
    let affinities = latent.pair_affinities(t);
    let expected_at = |log_c: f64| expected_avg_degree(&affinities, n, log_c, t);

    let (mut lo, mut hi) = LOG_C_RANGE;
    if expected_at(lo) > target || expected_at(hi) < target {
        return Err(Error::Calibration(format!(
            "cannot bracket average degree {target}; try a different degree or node count"
        )));
    }
    for _ in 0..CALIBRATION_STEPS {
        let mid = 0.5 * (lo + hi);
        if expected_at(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (log_c, expected) = [lo, hi]
        .into_iter()
        .map(|c| (c, expected_at(c)))
        .min_by(|a, b| (a.1 - target).abs().total_cmp(&(b.1 - target).abs()))
        .unwrap();
    if (expected - target).abs() > CALIBRATION_TOLERANCE * target {
        return Err(Error::Calibration(format!(
            "expected average degree {expected:.3} is not within 5% of {target}; try a larger n or nonzero temperature"
        )));
    }

    let mut edges = Vec::new();
    let mut pair = affinities.iter();
    for u in 0..n {
        for v in u + 1..n {
            let p = connection_probability(log_c, *pair.next().unwrap(), t);
            if p >= 1.0 || (p > 0.0 && unit_f64(mix(&[cfg.seed, u as u64, v as u64])) < p) {
                edges.push((u, v));
            }
        }
    }
    Ok(GirgSample {
        graph: Graph::from_indexed_edges(n, edges),
        log_c,
        expected_avg_deg: expected,
    })
}
