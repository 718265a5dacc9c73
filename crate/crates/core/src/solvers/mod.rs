//! Optimization loops over a common [`Problem`] interface.

mod anneal;
mod heo;
mod mcge;
mod restart;

pub use anneal::{sa_solve, AnnealSchedule};
pub use heo::{heo_momentum_solve, heo_solve, heo_solve_with_hook};
pub use mcge::{mcge_solve, mcge_solve_with_hook, SCORE_EPSILON};
pub use restart::{restart_best, solve, Solver};

use crate::numeric::SpinVector;
use crate::poly::MultilinearPolynomial;

/// Callback receiving the iteration index and the updated θ.
pub type IterationHook<'a> = dyn FnMut(usize, &[f64]) + 'a;

/// Per-iteration context handed to a problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub t: usize,
    pub iterations: usize,
    pub sigma: f64,
    pub step_size: f64,
    pub momentum: f64,
}

impl Step {
    /// t / T in [0, 1).
    pub fn progress(&self) -> f64 {
        self.t as f64 / self.iterations as f64
    }
}

/// Reusable buffers owned by one run.
#[derive(Debug, Clone, Default)]
pub struct Workspace {
    pub y: Vec<f64>,
    pub scratch: Vec<f64>,
}

impl Workspace {
    pub fn new(n: usize) -> Self {
        Workspace {
            y: vec![0.0; n],
            scratch: Vec::new(),
        }
    }
}

/// Continuous parameters optimized jointly with θ, plus their velocity.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Auxiliary {
    pub values: Vec<f64>,
    pub velocity: Vec<f64>,
}

/// A binary minimization target as seen by the solvers.
///
/// `surrogate_grad` returns ∇_θ of `surrogate_value`, the target evaluated
/// at the erf point erf((θ − x)/σ). Implementations are read-only after
/// construction; anything that changes during a run lives in [`Auxiliary`]
/// or is derived from [`Step`].
pub trait Problem: Send + Sync {
    fn dimension(&self) -> usize;

    /// Energy of a spin configuration. Deterministic.
    fn spin_energy(&self, spins: &SpinVector) -> f64;

    fn surrogate_value(&self, step: &Step, theta: &[f64], x: &[f64], aux: &[f64]) -> f64;

    fn surrogate_grad(&self, step: &Step, theta: &[f64], x: &[f64], aux: &[f64], ws: &mut Workspace, grad: &mut [f64]);

    /// Starting value for every θ_i in the heat-diffusion solvers.
    fn initial_theta(&self) -> f64 {
        0.5
    }

    fn auxiliary_init(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Updates coupled continuous parameters before the θ gradient is taken.
    fn auxiliary_step(&self, _step: &Step, _theta: &[f64], _x: &[f64], _aux: &mut Auxiliary) {}

    /// Energy recorded in per-iteration traces. Defaults to `spin_energy`.
    fn trace_energy(&self, spins: &SpinVector, _aux: &[f64]) -> f64 {
        self.spin_energy(spins)
    }

    /// f(s with s_i flipped) − f(s).
    fn flip_delta(&self, spins: &SpinVector, i: usize) -> f64 {
        let mut flipped = spins.clone();
        flipped.flip(i);
        self.spin_energy(&flipped) - self.spin_energy(spins)
    }

    fn post_process(&self, spins: SpinVector) -> SpinVector {
        spins
    }
}

impl Problem for MultilinearPolynomial {
    fn dimension(&self) -> usize {
        MultilinearPolynomial::dimension(self)
    }

    fn spin_energy(&self, spins: &SpinVector) -> f64 {
        self.evaluate_spins(spins)
    }

    fn surrogate_value(&self, step: &Step, theta: &[f64], x: &[f64], _aux: &[f64]) -> f64 {
        let mut y = vec![0.0; theta.len()];
        crate::poly::surrogate_point_into(theta, x, step.sigma, &mut y);
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
        ws.y.resize(theta.len(), 0.0);
        self.surrogate_gradient_into(theta, x, step.sigma, &mut ws.y, grad);
    }

    fn flip_delta(&self, spins: &SpinVector, i: usize) -> f64 {
        MultilinearPolynomial::flip_delta(self, spins, i)
    }
}
