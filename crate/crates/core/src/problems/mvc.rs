use super::graph::WeightedGraph;
use crate::error::{Error, Result};
use crate::numeric::SpinVector;
use crate::poly::{Monomial, MultilinearPolynomial};
use crate::solvers::{Problem, Step, Workspace};

/// Minimum vertex cover through a penalty: spin +1 selects a vertex,
/// f(s) = Σ (s_i + 1)/2 counts the selection and each edge contributes
/// λ (1 − (s_i+1)/2)(1 − (s_j+1)/2), which is 1·λ exactly when the edge is
/// uncovered.
///
/// λ grows linearly from 0 at t = 0 towards `lambda_max` over the run.
/// Energies of spin vectors use `lambda_max`. Post-processing repairs any
/// uncovered edge and then greedily drops redundant vertices, so returned
/// configurations are always valid covers.
#[derive(Debug, Clone)]
pub struct Mvc {
    graph: WeightedGraph,
    lambda_max: f64,
    size_poly: MultilinearPolynomial,
    penalty_poly: MultilinearPolynomial,
}

pub fn mvc_problem(graph: &WeightedGraph, lambda_max: f64) -> Result<Mvc> {
    if !(lambda_max.is_finite() && lambda_max >= 0.0) {
        return Err(Error::invalid(format!(
            "lambda_max must be nonnegative, got {lambda_max}"
        )));
    }
    let n = graph.vertex_count();
    let size_poly = MultilinearPolynomial::normalize(
        n,
        std::iter::once(Monomial::constant(n as f64 / 2.0)).chain((0..n).map(|i| Monomial::new(0.5, [i]))),
    )?;
    let mut penalty = Vec::with_capacity(graph.edge_count() * 4);
    for &(i, j, _) in graph.edges() {
        // (1 − s_i)(1 − s_j)/4
        penalty.push(Monomial::constant(0.25));
        penalty.push(Monomial::new(-0.25, [i]));
        penalty.push(Monomial::new(-0.25, [j]));
        penalty.push(Monomial::new(0.25, [i, j]));
    }
    let penalty_poly = MultilinearPolynomial::normalize(n, penalty)?;
    Ok(Mvc {
        graph: graph.clone(),
        lambda_max,
        size_poly,
        penalty_poly,
    })
}

impl Mvc {
    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    pub fn lambda_at(&self, step: &Step) -> f64 {
        self.lambda_max * step.progress()
    }
}

impl Problem for Mvc {
    fn dimension(&self) -> usize {
        self.graph.vertex_count()
    }

    fn spin_energy(&self, spins: &SpinVector) -> f64 {
        self.size_poly.evaluate_spins(spins) + self.lambda_max * self.penalty_poly.evaluate_spins(spins)
    }

    fn surrogate_value(&self, step: &Step, theta: &[f64], x: &[f64], aux: &[f64]) -> f64 {
        Problem::surrogate_value(&self.size_poly, step, theta, x, aux)
            + self.lambda_at(step) * Problem::surrogate_value(&self.penalty_poly, step, theta, x, aux)
    }

    fn surrogate_grad(
        &self,
        step: &Step,
        theta: &[f64],
        x: &[f64],
        _aux: &[f64],
        ws: &mut Workspace,
        grad: &mut [f64],
    ) {
        let n = theta.len();
        ws.y.resize(n, 0.0);
        crate::poly::surrogate_point_into(theta, x, step.sigma, &mut ws.y);
        ws.scratch.resize(n, 0.0);
        self.size_poly.gradient_into(&ws.y, grad);
        self.penalty_poly.gradient_into(&ws.y, &mut ws.scratch);
        let lambda = self.lambda_at(step);
        for (g, p) in grad.iter_mut().zip(&ws.scratch) {
            *g += lambda * p;
        }
        crate::poly::chain_erf(theta, x, step.sigma, grad);
    }

    fn flip_delta(&self, spins: &SpinVector, i: usize) -> f64 {
        self.size_poly.flip_delta(spins, i) + self.lambda_max * self.penalty_poly.flip_delta(spins, i)
    }

    fn post_process(&self, spins: SpinVector) -> SpinVector {
        let repaired = repair_cover(&self.graph, spins);
        refine_cover(&self.graph, &repaired).expect("repaired selection is a cover")
    }
}

pub fn uncovered_edges(graph: &WeightedGraph, spins: &SpinVector) -> usize {
    graph
        .edges()
        .iter()
        .filter(|&&(i, j, _)| spins.get(i) < 0 && spins.get(j) < 0)
        .count()
}

pub fn is_vertex_cover(graph: &WeightedGraph, spins: &SpinVector) -> bool {
    uncovered_edges(graph, spins) == 0
}

pub fn cover_size(spins: &SpinVector) -> usize {
    spins.count_positive()
}

/// Selects an endpoint of every uncovered edge, in edge order, preferring
/// the endpoint of higher degree (lower index on ties).
pub fn repair_cover(graph: &WeightedGraph, mut spins: SpinVector) -> SpinVector {
    let degrees = graph.degrees();
    for &(i, j, _) in graph.edges() {
        if spins.get(i) < 0 && spins.get(j) < 0 {
            let pick = if degrees[j] > degrees[i] { j } else { i };
            spins.set(pick, 1);
        }
    }
    spins
}

/// Visits selected vertices in ascending index order and deselects each one
/// whose neighbours are all selected. The result is a minimal cover and a
/// subset of the input. Input that is not a cover is an error.
pub fn refine_cover(graph: &WeightedGraph, spins: &SpinVector) -> Result<SpinVector> {
    let uncovered = uncovered_edges(graph, spins);
    if uncovered > 0 {
        return Err(Error::NotACover { uncovered });
    }
    let adjacency = graph.adjacency();
    let mut out = spins.clone();
    for (v, neighbours) in adjacency.iter().enumerate() {
        if out.get(v) > 0 && neighbours.iter().all(|&u| out.get(u) > 0) {
            out.set(v, -1);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::RngStream;
    use crate::oracle::finite_difference_gradient;

    fn triangle() -> WeightedGraph {
        WeightedGraph::unweighted(3, [(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    fn star5() -> WeightedGraph {
        WeightedGraph::unweighted(6, (1..6).map(|k| (0, k))).unwrap()
    }

    #[test]
    fn refine_triangle_all_selected() {
        let out = refine_cover(&triangle(), &SpinVector::filled(3, 1)).unwrap();
        assert_eq!(cover_size(&out), 2);
        assert_eq!(out.as_slice(), &[-1, 1, 1]);
    }

    #[test]
    fn refine_keeps_minimal_cover() {
        let s = SpinVector::new(vec![1, -1, -1, -1, -1, -1]).unwrap();
        assert_eq!(refine_cover(&star5(), &s).unwrap(), s);
    }

    #[test]
    fn refine_rejects_non_cover() {
        let s = SpinVector::filled(3, -1);
        assert_eq!(refine_cover(&triangle(), &s), Err(Error::NotACover { uncovered: 3 }));
    }

    #[test]
    fn refine_on_random_graphs_is_valid_subset_and_minimal() {
        let mut rng = RngStream::new(6);
        for _ in 0..50 {
            let g = WeightedGraph::random(20, 0.2, &mut rng);
            let s = repair_cover(&g, SpinVector::from_bits(rng.next_u64(), 20));
            assert!(is_vertex_cover(&g, &s));
            let r = refine_cover(&g, &s).unwrap();
            assert!(is_vertex_cover(&g, &r));
            assert!(cover_size(&r) <= cover_size(&s));
            for v in 0..20 {
                assert!(r.get(v) < 0 || s.get(v) > 0);
                if r.get(v) > 0 {
                    let mut t = r.clone();
                    t.set(v, -1);
                    assert!(!is_vertex_cover(&g, &t));
                }
            }
        }
    }

    #[test]
    fn energy_is_size_plus_penalty() {
        let p = mvc_problem(&triangle(), 2.5).unwrap();
        assert_eq!(p.spin_energy(&SpinVector::new(vec![1, 1, -1]).unwrap()), 2.0);
        // nothing selected: 3 uncovered edges
        assert_eq!(p.spin_energy(&SpinVector::filled(3, -1)), 7.5);
    }

    #[test]
    fn post_process_always_valid() {
        let g = star5();
        let p = mvc_problem(&g, 2.5).unwrap();
        let out = p.post_process(SpinVector::filled(6, -1));
        assert!(is_vertex_cover(&g, &out));
        assert_eq!(cover_size(&out), 1);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = RngStream::new(1);
        let g = WeightedGraph::random(10, 0.4, &mut rng);
        let p = mvc_problem(&g, 2.5).unwrap();
        let theta: Vec<f64> = (0..10).map(|_| rng.uniform()).collect();
        let x: Vec<f64> = (0..10).map(|_| rng.uniform()).collect();
        let step = Step {
            t: 30,
            iterations: 100,
            sigma: 0.8,
            step_size: 1.0,
            momentum: 0.0,
        };
        let mut grad = vec![0.0; 10];
        p.surrogate_grad(&step, &theta, &x, &[], &mut Workspace::new(10), &mut grad);
        let fd = finite_difference_gradient(|th| p.surrogate_value(&step, th, &x, &[]), &theta, 1e-5).unwrap();
        for i in 0..10 {
            assert!((grad[i] - fd[i]).abs() < 1e-6 * (1.0 + fd[i].abs()));
        }
    }
}
