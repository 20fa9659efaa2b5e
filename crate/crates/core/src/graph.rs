//! Undirected simple graphs loaded from edge lists.
//!
//! Nodes carry contiguous internal ids `0..n`; the original text label of
//! every node is kept so results can be written back in the caller's
//! namespace.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};
use std::io::{self, BufRead, Write};

use crate::error::{Error, Result};

/// Immutable adjacency structure with sorted neighbor lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    labels: Vec<String>,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph over `labels.len()` nodes. Self-loops are dropped and
    /// parallel edges merged.
    pub fn from_edges(labels: Vec<String>, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let n = labels.len();
        let mut adjacency = vec![Vec::new(); n];
        for (u, v) in edges {
            assert!(u < n && v < n, "edge ({u}, {v}) out of range for {n} nodes");
            if u == v {
                continue;
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        let mut twice_m = 0;
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            twice_m += list.len();
        }
        Graph {
            adjacency,
            labels,
            edge_count: twice_m / 2,
        }
    }

    /// Graph with labels `"0".."n-1"`.
    pub fn from_indexed_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        Self::from_edges((0..n).map(|i| i.to_string()).collect(), edges)
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adjacency[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adjacency[u].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn label(&self, u: usize) -> &str {
        &self.labels[u]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Every edge once, as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Component id per node plus the size of each component. Components
    /// are numbered in order of their smallest node id.
    pub fn components(&self) -> (Vec<usize>, Vec<usize>) {
        let n = self.node_count();
        let mut comp = vec![usize::MAX; n];
        let mut sizes = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = sizes.len();
            let mut size = 0;
            comp[start] = id;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                size += 1;
                for &v in &self.adjacency[u] {
                    if comp[v] == usize::MAX {
                        comp[v] = id;
                        queue.push_back(v);
                    }
                }
            }
            sizes.push(size);
        }
        (comp, sizes)
    }

    pub fn is_connected(&self) -> bool {
        self.components().1.len() <= 1
    }

    /// Induced subgraph on the largest connected component. Among equally
    /// large components the one holding the smallest node id wins. Kept
    /// nodes retain their relative order.
    pub fn largest_connected_component(&self) -> Graph {
        let (comp, sizes) = self.components();
        let Some(best) = sizes
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .map(|(id, _)| id)
        else {
            return self.clone();
        };
        if sizes.len() == 1 {
            return self.clone();
        }
        let mut remap = vec![usize::MAX; self.node_count()];
        let mut labels = Vec::with_capacity(sizes[best]);
        for u in 0..self.node_count() {
            if comp[u] == best {
                remap[u] = labels.len();
                labels.push(self.labels[u].clone());
            }
        }
        let edges = self
            .edges()
            .filter(|&(u, _)| comp[u] == best)
            .map(|(u, v)| (remap[u], remap[v]))
            .collect::<Vec<_>>();
        Graph::from_edges(labels, edges)
    }

    pub fn degree_summary(&self) -> DegreeSummary {
        let degrees = self.degrees();
        let n = degrees.len();
        let min = degrees.iter().copied().min().unwrap_or(0);
        let max = degrees.iter().copied().max().unwrap_or(0);
        let mean = if n == 0 {
            0.0
        } else {
            degrees.iter().sum::<usize>() as f64 / n as f64
        };
        DegreeSummary { min, mean, max }
    }

    /// `log10` of the coefficient of variation of the degree sequence,
    /// using the population standard deviation. `None` for regular graphs
    /// (and for graphs without edges), where the coefficient is zero or
    /// undefined.
    pub fn heterogeneity(&self) -> Option<f64> {
        let degrees = self.degrees();
        if degrees.is_empty() {
            return None;
        }
        let n = degrees.len() as f64;
        let mean = degrees.iter().sum::<usize>() as f64 / n;
        if mean == 0.0 {
            return None;
        }
        let var = degrees
            .iter()
            .map(|&k| {
                let diff = k as f64 - mean;
                diff * diff
            })
            .sum::<f64>()
            / n;
        let sd = var.sqrt();
        if sd == 0.0 {
            None
        } else {
            Some((sd / mean).log10())
        }
    }

    /// Writes one `label label` line per edge.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (u, v) in self.edges() {
            writeln!(out, "{} {}", self.labels[u], self.labels[v])?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeSummary {
    pub min: usize,
    pub mean: f64,
    pub max: usize,
}

/// Parses a whitespace-separated edge list. Blank lines and lines starting
/// with `#` or `%` are skipped; labels are numbered in order of first
/// appearance.
pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut labels = Vec::new();
    let mut edges = Vec::new();
    let mut intern = |token: &str| match ids.entry(token.to_owned()) {
        Entry::Occupied(slot) => *slot.get(),
        Entry::Vacant(slot) => {
            let id = labels.len();
            labels.push(token.to_owned());
            *slot.insert(id)
        }
    };
    for (index, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line: index + 1,
                message: format!("expected two node tokens, found {}", tokens.len()),
            });
        }
        let u = intern(tokens[0]);
        let v = intern(tokens[1]);
        edges.push((u, v));
    }
    let graph = Graph::from_edges(labels, edges);
    if graph.edge_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    Ok(graph)
}

pub fn parse_edge_list_str(text: &str) -> Result<Graph> {
    parse_edge_list(text.as_bytes())
}
