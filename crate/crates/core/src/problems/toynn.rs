use crate::error::{Error, Result};
use crate::numeric::{RngStream, SpinVector};
use crate::poly::{chain_erf, surrogate_point_into};
use crate::solvers::{Problem, Step, Workspace};

/// f(s) = a₂ᵀ sigmoid(W s + a₁) with W ∈ R^{m×n} and a₁, a₂ ∈ R^m.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyNetwork {
    n: usize,
    m: usize,
    w: Vec<f64>,
    a1: Vec<f64>,
    a2: Vec<f64>,
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Samples every parameter once from U[−1, 1].
pub fn toynn_problem(n: usize, m: usize, seed: u64) -> Result<ToyNetwork> {
    if n == 0 || m == 0 {
        return Err(Error::invalid("toy network needs n, m >= 1"));
    }
    let mut rng = RngStream::new(seed);
    let mut draw = |k: usize| -> Vec<f64> { (0..k).map(|_| rng.uniform_range(-1.0, 1.0)).collect() };
    let w = draw(m * n);
    let a1 = draw(m);
    let a2 = draw(m);
    ToyNetwork::with_params(n, m, w, a1, a2)
}

impl ToyNetwork {
    /// `w` is row-major m × n.
    pub fn with_params(n: usize, m: usize, w: Vec<f64>, a1: Vec<f64>, a2: Vec<f64>) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::invalid("toy network needs n, m >= 1"));
        }
        if w.len() != m * n || a1.len() != m || a2.len() != m {
            return Err(Error::invalid("toy network parameter shapes do not match n and m"));
        }
        if w.iter().chain(&a1).chain(&a2).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("toy network parameter".into()));
        }
        Ok(ToyNetwork { n, m, w, a1, a2 })
    }

    pub fn hidden_size(&self) -> usize {
        self.m
    }

    pub fn evaluate(&self, y: &[f64]) -> f64 {
        (0..self.m)
            .map(|i| self.a2[i] * sigmoid(self.preactivation(y, i)))
            .sum()
    }

    fn preactivation(&self, y: &[f64], i: usize) -> f64 {
        self.a1[i]
            + self.w[i * self.n..(i + 1) * self.n]
                .iter()
                .zip(y)
                .map(|(w, v)| w * v)
                .sum::<f64>()
    }
}

impl Problem for ToyNetwork {
    fn dimension(&self) -> usize {
        self.n
    }

    fn spin_energy(&self, spins: &SpinVector) -> f64 {
        self.evaluate(&spins.to_f64())
    }

    fn surrogate_value(&self, step: &Step, theta: &[f64], x: &[f64], _aux: &[f64]) -> f64 {
        let mut y = vec![0.0; theta.len()];
        surrogate_point_into(theta, x, step.sigma, &mut y);
        self.evaluate(&y)
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
        ws.y.resize(self.n, 0.0);
        surrogate_point_into(theta, x, step.sigma, &mut ws.y);
        grad.iter_mut().for_each(|g| *g = 0.0);
        for i in 0..self.m {
            let s = sigmoid(self.preactivation(&ws.y, i));
            let c = self.a2[i] * s * (1.0 - s);
            for (g, w) in grad.iter_mut().zip(&self.w[i * self.n..(i + 1) * self.n]) {
                *g += c * w;
            }
        }
        chain_erf(theta, x, step.sigma, grad);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::finite_difference_gradient;

    #[test]
    fn zero_readout_is_constant() {
        let p = ToyNetwork::with_params(3, 1, vec![0.3, -0.2, 0.9], vec![0.1], vec![0.0]).unwrap();
        for bits in 0..8 {
            assert_eq!(p.spin_energy(&SpinVector::from_bits(bits, 3)), 0.0);
        }
    }

    #[test]
    fn hand_computed_value() {
        let p = ToyNetwork::with_params(2, 1, vec![1.0, -1.0], vec![0.5], vec![2.0]).unwrap();
        let s = SpinVector::new(vec![1, -1]).unwrap();
        let expect = 2.0 / (1.0 + (-2.5f64).exp());
        assert!((p.spin_energy(&s) - expect).abs() < 1e-15);
    }

    #[test]
    fn seeded_instances_are_reproducible() {
        assert_eq!(toynn_problem(10, 4, 3).unwrap(), toynn_problem(10, 4, 3).unwrap());
        assert_ne!(toynn_problem(10, 4, 3).unwrap(), toynn_problem(10, 4, 4).unwrap());
        assert!(toynn_problem(0, 4, 3).is_err());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = RngStream::new(5);
        for seed in 0..10 {
            let p = toynn_problem(20, 6, seed).unwrap();
            let theta: Vec<f64> = (0..20).map(|_| rng.uniform()).collect();
            let x: Vec<f64> = (0..20).map(|_| rng.uniform()).collect();
            let step = Step {
                t: 0,
                iterations: 1,
                sigma: 0.6,
                step_size: 1.0,
                momentum: 0.0,
            };
            let mut g = vec![0.0; 20];
            p.surrogate_grad(&step, &theta, &x, &[], &mut Workspace::new(20), &mut g);
            let fd = finite_difference_gradient(|th| p.surrogate_value(&step, th, &x, &[]), &theta, 1e-5).unwrap();
            let num: f64 = g.iter().zip(&fd).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let den: f64 = fd.iter().map(|b| b * b).sum::<f64>().sqrt();
            assert!(num / den < 1e-5, "relative error {}", num / den);
        }
    }
}
