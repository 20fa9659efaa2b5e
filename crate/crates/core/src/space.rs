//! Weighted embeddings: a position in `R^d` plus a positive weight per node.
//!
//! The similarity between two nodes is the weighted distance
//! `|p_u - p_v| / (w_u w_v)^(1/d)`. It is not a metric; heavy nodes are
//! close to many nodes that are themselves far apart.

use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedEmbedding {
    dim: usize,
    positions: Vec<f64>,
    weights: Vec<f64>,
}

impl WeightedEmbedding {
    /// `positions` is row-major, `dim` coordinates per node.
    pub fn new(dim: usize, positions: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("dimension must be at least 1".into()));
        }
        if positions.len() != weights.len() * dim {
            return Err(Error::Config(format!(
                "{} coordinates do not fit {} nodes in {dim} dimensions",
                positions.len(),
                weights.len()
            )));
        }
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::Config(format!("weight of node {i} is not positive")));
        }
        if let Some(i) = positions.iter().position(|x| !x.is_finite()) {
            return Err(Error::Config(format!("coordinate of node {} is not finite", i / dim)));
        }
        Ok(WeightedEmbedding {
            dim,
            positions,
            weights,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn node_count(&self) -> usize {
        self.weights.len()
    }

    pub fn position(&self, u: usize) -> &[f64] {
        &self.positions[u * self.dim..(u + 1) * self.dim]
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub(crate) fn positions_mut(&mut self) -> &mut [f64] {
        &mut self.positions
    }

    pub fn weight(&self, u: usize) -> f64 {
        self.weights[u]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Copy with every coordinate multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        WeightedEmbedding {
            dim: self.dim,
            positions: self.positions.iter().map(|x| x * s).collect(),
            weights: self.weights.clone(),
        }
    }

    /// `(w_u w_v)^(1/d)`, the divisor of the weighted distance.
    pub fn pair_scale(&self, u: usize, v: usize) -> f64 {
        pair_scale(self.weights[u], self.weights[v], self.dim)
    }

    pub fn euclidean_distance(&self, u: usize, v: usize) -> f64 {
        euclidean(self.position(u), self.position(v))
    }

    pub fn weighted_distance(&self, u: usize, v: usize) -> f64 {
        self.euclidean_distance(u, v) / self.pair_scale(u, v)
    }
}

pub fn pair_scale(wu: f64, wv: f64, dim: usize) -> f64 {
    (wu * wv).powf(1.0 / dim as f64)
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    squared_euclidean(a, b).sqrt()
}

pub fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let diff = x - y;
            diff * diff
        })
        .sum()
}

/// Degree-based weights `deg(v)^(dim / latent_dim)`.
pub fn assign_weights(graph: &Graph, dim: usize, latent_dim: f64) -> Result<Vec<f64>> {
    if dim == 0 {
        return Err(Error::Config("dimension must be at least 1".into()));
    }
    if !(latent_dim.is_finite() && latent_dim >= 1.0) {
        return Err(Error::Config(format!("latent dimension {latent_dim} must be at least 1")));
    }
    let exponent = dim as f64 / latent_dim;
    (0..graph.node_count())
        .map(|u| match graph.degree(u) {
            0 => Err(Error::ZeroDegree {
                label: graph.label(u).to_owned(),
            }),
            k => Ok((k as f64).powf(exponent)),
        })
        .collect()
}

/// Row-major coordinates drawn uniformly from `[0, 1)`.
pub fn init_positions(n: usize, dim: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n * dim).map(|_| rng.random::<f64>()).collect()
}

/// An embedding together with the node labels and the threshold it was
/// optimized for.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingFile {
    pub labels: Vec<String>,
    pub threshold: f64,
    pub embedding: WeightedEmbedding,
}

impl EmbeddingFile {
    pub fn write<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let e = &self.embedding;
        writeln!(out, "# wembed d={} l={:.16e}", e.dim(), self.threshold)?;
        for (u, label) in self.labels.iter().enumerate() {
            write!(out, "{label} {:.16e}", e.weight(u))?;
            for x in e.position(u) {
                write!(out, " {x:.16e}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines().enumerate();
        let (dim, threshold) = loop {
            let Some((index, line)) = lines.next() else {
                return Err(parse_error(1, "missing `# wembed` header"));
            };
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            break parse_header(&line).ok_or_else(|| parse_error(index + 1, "malformed `# wembed d=<dim> l=<threshold>` header"))?;
        };
        let mut labels = Vec::new();
        let mut weights = Vec::new();
        let mut positions = Vec::new();
        for (index, line) in lines {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = trimmed.split_whitespace().collect();
            if tokens.len() != dim + 2 {
                return Err(parse_error(
                    index + 1,
                    &format!("expected label, weight and {dim} coordinates, found {} tokens", tokens.len()),
                ));
            }
            let number = |t: &str| {
                t.parse::<f64>()
                    .map_err(|_| parse_error(index + 1, &format!("invalid number {t:?}")))
            };
            labels.push(tokens[0].to_owned());
            weights.push(number(tokens[1])?);
            for t in &tokens[2..] {
                positions.push(number(t)?);
            }
        }
        let embedding = WeightedEmbedding::new(dim, positions, weights)?;
        Ok(EmbeddingFile {
            labels,
            threshold,
            embedding,
        })
    }
}

fn parse_header(line: &str) -> Option<(usize, f64)> {
    let mut tokens = line.split_whitespace();
    if tokens.next()? != "#" || tokens.next()? != "wembed" {
        return None;
    }
    let dim = tokens.next()?.strip_prefix("d=")?.parse::<usize>().ok()?;
    let threshold = tokens.next()?.strip_prefix("l=")?.parse::<f64>().ok()?;
    (dim > 0 && threshold > 0.0).then_some((dim, threshold))
}

fn parse_error(line: usize, message: &str) -> Error {
    Error::Parse {
        line,
        message: message.to_owned(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn pair(dim: usize, pu: &[f64], pv: &[f64], wu: f64, wv: f64) -> WeightedEmbedding {
        let mut positions = pu.to_vec();
        positions.extend_from_slice(pv);
        WeightedEmbedding::new(dim, positions, vec![wu, wv]).unwrap()
    }

    #[test]
    fn unit_weights_give_euclidean_distance() {
        let e = pair(2, &[0.0, 0.0], &[3.0, 4.0], 1.0, 1.0);
        assert_eq!(e.weighted_distance(0, 1), 5.0);
    }

    #[test]
    fn heavy_nodes_are_closer() {
        let e = pair(2, &[0.0, 0.0], &[3.0, 4.0], 16.0, 16.0);
        assert!((e.weighted_distance(0, 1) - 0.3125).abs() < 1e-15);
    }

    #[test]
    fn coincident_points_are_at_distance_zero() {
        let e = pair(3, &[0.5, 0.1, 2.0], &[0.5, 0.1, 2.0], 3.0, 7.0);
        assert_eq!(e.weighted_distance(0, 1), 0.0);
    }

    #[test]
    fn rejects_invalid_embeddings() {
        assert!(WeightedEmbedding::new(0, vec![], vec![]).is_err());
        assert!(WeightedEmbedding::new(2, vec![0.0; 3], vec![1.0, 1.0]).is_err());
        assert!(WeightedEmbedding::new(1, vec![0.0, 1.0], vec![1.0, 0.0]).is_err());
        assert!(WeightedEmbedding::new(1, vec![0.0, f64::NAN], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn weights_follow_degree_power() {
        let star = Graph::from_indexed_edges(17, (1..17).map(|i| (0, i)));
        let w = assign_weights(&star, 8, 8.0).unwrap();
        assert_eq!(w[0], 16.0);
        assert_eq!(w[1], 1.0);
        let w = assign_weights(&star, 4, 8.0).unwrap();
        assert_eq!(w[0], 4.0);
        assert!(assign_weights(&star, 5, 3.0).unwrap()[3..].iter().all(|&x| x == 1.0));
    }

    #[test]
    fn isolated_node_has_no_weight() {
        let g = Graph::from_indexed_edges(3, [(0, 1)]);
        assert!(matches!(
            assign_weights(&g, 2, 8.0),
            Err(Error::ZeroDegree { label }) if label == "2"
        ));
    }

    #[test]
    fn init_is_seeded_and_in_unit_cube() {
        let a = init_positions(1000, 8, 7);
        assert_eq!(a, init_positions(1000, 8, 7));
        assert!(a.iter().all(|&x| (0.0..1.0).contains(&x)));
        assert_ne!(a, init_positions(1000, 8, 8));
    }

    #[test]
    fn file_round_trip_is_exact() {
        let e = WeightedEmbedding::new(
            3,
            vec![0.1, -2.5e-7, 3.0, 1.0 / 3.0, 12345.678, -0.0],
            vec![1.0, 2.0f64.sqrt()],
        )
        .unwrap();
        let file = EmbeddingFile {
            labels: vec!["a".into(), "node-7".into()],
            threshold: 1.0,
            embedding: e,
        };
        let mut buf = Vec::new();
        file.write(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# wembed d=3 l="));
        let back = EmbeddingFile::read(buf.as_slice()).unwrap();
        assert_eq!(back, file);
    }

    #[test]
    fn malformed_files_are_rejected() {
        assert!(EmbeddingFile::read("a 1 0 0\n".as_bytes()).is_err());
        assert!(EmbeddingFile::read("# wembed d=2 l=1\na 1 0\n".as_bytes()).is_err());
        assert!(EmbeddingFile::read("# wembed d=2 l=1\na 1 0 x\n".as_bytes()).is_err());
        assert!(EmbeddingFile::read("# wembed d=2 l=1\na -1 0 0\n".as_bytes()).is_err());
    }
}
