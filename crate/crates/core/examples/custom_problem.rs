//! Plugging a user-defined objective into the solvers by implementing
//! `Problem`. The target counts disagreements with a hidden pattern, so the
//! optimum is known.
//!
//! cargo run --release --example custom_problem

use heo::numeric::{erf_derivative, RngStream, SigmaSchedule, SolverConfig, SpinVector};
use heo::poly::surrogate_point;
use heo::solvers::{heo_solve, Problem, Step, Workspace};

/// f(s) = Σ (1 − p_i s_i)/2 for a fixed pattern p.
struct Hamming {
    pattern: Vec<f64>,
}

impl Problem for Hamming {
    fn dimension(&self) -> usize {
        self.pattern.len()
    }

    fn spin_energy(&self, spins: &SpinVector) -> f64 {
        spins
            .iter()
            .zip(&self.pattern)
            .map(|(s, p)| (1.0 - p * s as f64) / 2.0)
            .sum()
    }

    fn surrogate_value(&self, step: &Step, theta: &[f64], x: &[f64], _aux: &[f64]) -> f64 {
        let y = surrogate_point(theta, x, step.sigma).unwrap();
        y.iter().zip(&self.pattern).map(|(y, p)| (1.0 - p * y) / 2.0).sum()
    }

    fn surrogate_grad(
        &self,
        step: &Step,
        theta: &[f64],
        x: &[f64],
        _aux: &[f64],
        _ws: &mut Workspace,
        grad: &mut [f64],
    ) {
        for i in 0..theta.len() {
            let dy = erf_derivative((theta[i] - x[i]) / step.sigma) / step.sigma;
            grad[i] = -self.pattern[i] / 2.0 * dy;
        }
    }
}

fn main() -> heo::Result<()> {
    let mut rng = RngStream::new(8);
    let pattern: Vec<f64> = (0..24).map(|_| if rng.bernoulli(0.5) { 1.0 } else { -1.0 }).collect();
    let problem = Hamming { pattern };
    let config = SolverConfig::new(300, 1.0, SigmaSchedule::linear(1.0, 0.0));
    let report = heo_solve(&problem, &config, &mut RngStream::new(0))?;
    println!(
        "disagreements after {} iterations: {}",
        report.iterations(),
        report.best_energy
    );
    Ok(())
}
