use super::graph::WeightedGraph;
use crate::error::{Error, Result};
use crate::numeric::SpinVector;
use crate::poly::{Monomial, MultilinearPolynomial};
use crate::solvers::{Problem, Step, Workspace};

/// Max-cut as the quadratic form f(s) = Σ_{(i,j,w)} w s_i s_j, i.e. sᵀJs
/// with J_ij = w/2. Minimizing f maximizes the cut.
#[derive(Debug, Clone)]
pub struct MaxCut {
    graph: WeightedGraph,
    poly: MultilinearPolynomial,
}

pub fn maxcut_problem(graph: &WeightedGraph) -> MaxCut {
    let poly = MultilinearPolynomial::normalize(
        graph.vertex_count(),
        graph.edges().iter().map(|&(i, j, w)| Monomial::new(w, [i, j])),
    )
    .expect("graph edges are valid monomials");
    MaxCut {
        graph: graph.clone(),
        poly,
    }
}

impl MaxCut {
    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn polynomial(&self) -> &MultilinearPolynomial {
        &self.poly
    }

    pub fn cut_value(&self, spins: &SpinVector) -> f64 {
        cut_value(&self.graph, spins)
    }
}

/// Σ_{(i,j,w)} w (1 − s_i s_j)/2.
pub fn cut_value(graph: &WeightedGraph, spins: &SpinVector) -> f64 {
    let s = spins.as_slice();
    graph
        .edges()
        .iter()
        .filter(|&&(i, j, _)| s[i] != s[j])
        .map(|e| e.2)
        .sum()
}

/// |C_alg − C_min| / |C_min| for each algorithm's best value, C_min the
/// minimum over algorithms. Non-finite entries get an infinite loss.
pub fn relative_loss(energies: &[f64]) -> Result<Vec<f64>> {
    let best = energies
        .iter()
        .copied()
        .filter(|e| e.is_finite())
        .fold(f64::INFINITY, f64::min);
    if !best.is_finite() {
        return Err(Error::invalid("relative loss needs at least one finite value"));
    }
    Ok(energies
        .iter()
        .map(|&e| {
            if !e.is_finite() {
                f64::INFINITY
            } else if e == best {
                0.0
            } else {
                (e - best).abs() / best.abs()
            }
        })
        .collect())
}

impl Problem for MaxCut {
    fn dimension(&self) -> usize {
        self.graph.vertex_count()
    }

    fn spin_energy(&self, spins: &SpinVector) -> f64 {
        self.poly.evaluate_spins(spins)
    }

    fn surrogate_value(&self, step: &Step, theta: &[f64], x: &[f64], aux: &[f64]) -> f64 {
        Problem::surrogate_value(&self.poly, step, theta, x, aux)
    }

    fn surrogate_grad(&self, step: &Step, theta: &[f64], x: &[f64], aux: &[f64], ws: &mut Workspace, grad: &mut [f64]) {
        Problem::surrogate_grad(&self.poly, step, theta, x, aux, ws, grad)
    }

    fn flip_delta(&self, spins: &SpinVector, i: usize) -> f64 {
        self.poly.flip_delta(spins, i)
    }
}
