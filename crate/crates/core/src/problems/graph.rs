use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::RngStream;

/// Undirected weighted graph with edges stored as (i, j, w), i < j.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl WeightedGraph {
    /// Validates edges; (j, i) is normalized to (i, j). Self-loops,
    /// duplicates, out-of-range endpoints and non-finite weights are errors.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (k, (a, b, w)) in edges.into_iter().enumerate() {
            if a >= n || b >= n {
                return Err(Error::invalid(format!("edge {k} ({a}, {b}) out of range for n = {n}")));
            }
            if a == b {
                return Err(Error::invalid(format!("edge {k} is a self-loop on {a}")));
            }
            if !w.is_finite() {
                return Err(Error::invalid(format!("edge {k} has non-finite weight")));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if !seen.insert((i, j)) {
                return Err(Error::invalid(format!("duplicate edge ({i}, {j})")));
            }
            out.push((i, j, w));
        }
        Ok(WeightedGraph { n, edges: out })
    }

    pub fn unweighted(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::new(n, edges.into_iter().map(|(i, j)| (i, j, 1.0)))
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.2).sum()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(i, j, _) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &(i, j, _) in &self.edges {
            d[i] += 1;
            d[j] += 1;
        }
        d
    }

    /// Erdős–Rényi G(n, p) with unit weights.
    pub fn random(n: usize, p: f64, rng: &mut RngStream) -> Self {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.bernoulli(p) {
                    edges.push((i, j, 1.0));
                }
            }
        }
        WeightedGraph { n, edges }
    }

    /// G(n, p) with weights drawn uniformly from {−1, +1}.
    pub fn random_signed(n: usize, p: f64, rng: &mut RngStream) -> Self {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.bernoulli(p) {
                    let w = if rng.bernoulli(0.5) { 1.0 } else { -1.0 };
                    edges.push((i, j, w));
                }
            }
        }
        WeightedGraph { n, edges }
    }

    /// `n · mean_degree / 2` distinct uniformly random edges with ±1 weights,
    /// for sparse instances whose size grows linearly in n.
    pub fn random_sparse(n: usize, mean_degree: f64, rng: &mut RngStream) -> Self {
        assert!(n >= 2);
        let target = ((n as f64 * mean_degree / 2.0).round() as usize).min(n * (n - 1) / 2);
        let mut seen = HashSet::with_capacity(target);
        let mut edges = Vec::with_capacity(target);
        while edges.len() < target {
            let a = rng.index(n);
            let b = rng.index(n);
            if a == b {
                continue;
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if seen.insert((i, j)) {
                let w = if rng.bernoulli(0.5) { 1.0 } else { -1.0 };
                edges.push((i, j, w));
            }
        }
        WeightedGraph { n, edges }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_and_validates() {
        let g = WeightedGraph::new(3, [(1, 0, 2.0)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1, 2.0)]);
        assert!(WeightedGraph::new(3, [(0, 0, 1.0)]).is_err());
        assert!(WeightedGraph::new(3, [(0, 3, 1.0)]).is_err());
        assert!(WeightedGraph::new(3, [(0, 1, 1.0), (1, 0, 1.0)]).is_err());
        assert!(WeightedGraph::new(3, [(0, 1, f64::NAN)]).is_err());
    }

    #[test]
    fn sparse_generator_hits_edge_count() {
        let g = WeightedGraph::random_sparse(1000, 6.0, &mut RngStream::new(1));
        assert_eq!(g.edge_count(), 3000);
        assert!(WeightedGraph::new(g.vertex_count(), g.edges().iter().copied()).is_ok());
    }
}
