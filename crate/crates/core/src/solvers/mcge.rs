use std::time::Instant;

use super::{IterationHook, Problem};
use crate::error::{Error, Result};
use crate::numeric::{binarize, total_variance, RngStream, SolveReport, SolverConfig, SpinVector};

/// θ is clamped into [ε, 1 − ε] inside the score function only.
pub const SCORE_EPSILON: f64 = 1e-6;

/// Score-function (log-derivative) gradient descent on h(θ) = E[f(s)]:
/// g = (1/M) Σ f(s^(m)) ∇ log p(s^(m)|θ), v ← κ v − γ g, θ ← clamp(θ + v, 0, 1).
///
/// Starts from θ = 0.5 regardless of the problem's preferred start. The
/// sigma trace is all zeros since no smoothing is involved.
pub fn mcge_solve(
    problem: &dyn Problem,
    config: &SolverConfig,
    samples: usize,
    rng: &mut RngStream,
) -> Result<SolveReport> {
    run(problem, config, samples, rng, None)
}

pub fn mcge_solve_with_hook(
    problem: &dyn Problem,
    config: &SolverConfig,
    samples: usize,
    rng: &mut RngStream,
    hook: &mut dyn FnMut(usize, &[f64]),
) -> Result<SolveReport> {
    run(problem, config, samples, rng, Some(hook))
}

/// One draw of the score-function estimator at θ.
pub(crate) fn score_gradient(
    problem: &dyn Problem,
    theta: &[f64],
    samples: usize,
    rng: &mut RngStream,
    spins: &mut SpinVector,
    grad: &mut [f64],
) {
    grad.iter_mut().for_each(|g| *g = 0.0);
    let inv_m = 1.0 / samples as f64;
    for _ in 0..samples {
        for (i, &t) in theta.iter().enumerate() {
            spins.set(i, if rng.bernoulli(t) { 1 } else { -1 });
        }
        let f = problem.spin_energy(spins) * inv_m;
        for ((g, &t), s) in grad.iter_mut().zip(theta).zip(spins.iter()) {
            let tc = t.clamp(SCORE_EPSILON, 1.0 - SCORE_EPSILON);
            *g += if s > 0 { f / tc } else { -f / (1.0 - tc) };
        }
    }
}

fn run(
    problem: &dyn Problem,
    config: &SolverConfig,
    samples: usize,
    rng: &mut RngStream,
    mut hook: Option<&mut IterationHook>,
) -> Result<SolveReport> {
    config.validate()?;
    if samples == 0 {
        return Err(Error::Config("sample count must be at least 1".into()));
    }
    let n = problem.dimension();
    if n == 0 {
        return Err(Error::invalid("problem dimension must be at least 1"));
    }
    let iterations = config.iterations;
    let (gamma, kappa) = (config.step_size, config.momentum);

    let mut theta = vec![0.5; n];
    let mut velocity = vec![0.0; n];
    let mut grad = vec![0.0; n];
    let mut spins = SpinVector::filled(n, 1);

    let mut energy_trace = Vec::with_capacity(iterations);
    let mut variance_trace = Vec::with_capacity(iterations);
    let mut grad_norm_trace = Vec::with_capacity(iterations);

    let started = Instant::now();
    for t in 0..iterations {
        score_gradient(problem, &theta, samples, rng, &mut spins, &mut grad);
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFiniteGradient { iteration: t });
        }
        for ((th, v), g) in theta.iter_mut().zip(&mut velocity).zip(&grad) {
            *v = kappa * *v - gamma * g;
            *th = (*th + *v).clamp(0.0, 1.0);
        }
        debug_assert!(theta.iter().all(|t| (0.0..=1.0).contains(t)));
        if let Some(h) = hook.as_mut() {
            h(t, &theta);
        }
        energy_trace.push(problem.spin_energy(&binarize(&theta)));
        variance_trace.push(total_variance(&theta));
        grad_norm_trace.push(grad.iter().map(|g| g * g).sum::<f64>().sqrt());
    }
    let elapsed_ms = started.elapsed().as_secs_f64() * 1e3;

    let best_spins = problem.post_process(binarize(&theta));
    let best_energy = problem.spin_energy(&best_spins);
    Ok(SolveReport {
        best_spins,
        best_energy,
        energy_trace,
        variance_trace,
        sigma_trace: vec![0.0; iterations],
        grad_norm_trace,
        wall_time_per_iteration_ms: elapsed_ms / iterations as f64,
        seed_used: rng.seed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::SigmaSchedule;
    use crate::poly::{random_polynomial, Monomial, MultilinearPolynomial};

    #[test]
    fn score_at_half_is_two() {
        // f = 1 constant, one sample: score entries are ±1/0.5.
        let f = MultilinearPolynomial::normalize(3, [Monomial::constant(1.0)]).unwrap();
        let mut spins = SpinVector::filled(3, 1);
        let mut g = vec![0.0; 3];
        score_gradient(&f, &[0.5; 3], 1, &mut RngStream::new(0), &mut spins, &mut g);
        for (gi, s) in g.iter().zip(spins.iter()) {
            assert_eq!(*gi, 2.0 * f64::from(s));
        }
    }

    #[test]
    fn estimator_is_unbiased_for_closed_form_gradient() {
        let mut rng = RngStream::new(31);
        let f = random_polynomial(6, 20, 3, &mut rng);
        let theta: Vec<f64> = (0..6).map(|_| rng.uniform_range(0.2, 0.8)).collect();
        // analytic ∇ of f(2θ − 1)
        let y: Vec<f64> = theta.iter().map(|t| 2.0 * t - 1.0).collect();
        let mut analytic = vec![0.0; 6];
        f.gradient_into(&y, &mut analytic);
        analytic.iter_mut().for_each(|g| *g *= 2.0);

        let draws = 1_000_000;
        let mut spins = SpinVector::filled(6, 1);
        let mut g = vec![0.0; 6];
        let mut sum = [0.0; 6];
        let mut sq = [0.0; 6];
        for _ in 0..draws {
            score_gradient(&f, &theta, 1, &mut rng, &mut spins, &mut g);
            for i in 0..6 {
                sum[i] += g[i];
                sq[i] += g[i] * g[i];
            }
        }
        for i in 0..6 {
            let mean = sum[i] / draws as f64;
            let se = ((sq[i] / draws as f64 - mean * mean) / (draws as f64 - 1.0)).sqrt();
            assert!(
                (mean - analytic[i]).abs() <= 3.0 * se,
                "coordinate {i}: {mean} vs {}",
                analytic[i]
            );
        }
    }

    #[test]
    fn constant_target_drifts_little() {
        let f = MultilinearPolynomial::normalize(8, [Monomial::constant(3.0)]).unwrap();
        let cfg = SolverConfig::new(1000, 1e-6, SigmaSchedule::linear(1.0, 0.0));
        let r = mcge_solve_with_hook(&f, &cfg, 10, &mut RngStream::new(6), &mut |_, th| {
            assert!(th.iter().all(|t| (t - 0.5).abs() <= 0.05));
        })
        .unwrap();
        assert_eq!(r.energy_trace.len(), 1000);
    }

    #[test]
    fn zero_samples_rejected() {
        let f = MultilinearPolynomial::normalize(1, [Monomial::new(1.0, [0])]).unwrap();
        let cfg = SolverConfig::new(10, 1e-3, SigmaSchedule::linear(1.0, 0.0));
        assert!(mcge_solve(&f, &cfg, 0, &mut RngStream::new(0)).is_err());
    }

    #[test]
    fn descends_on_linear_target() {
        let f = MultilinearPolynomial::normalize(
            3,
            [
                Monomial::new(1.0, [0]),
                Monomial::new(-1.0, [1]),
                Monomial::new(0.5, [2]),
            ],
        )
        .unwrap();
        let cfg = SolverConfig::new(2000, 1e-3, SigmaSchedule::linear(1.0, 0.0)).with_momentum(0.9);
        let r = mcge_solve(&f, &cfg, 10, &mut RngStream::new(2)).unwrap();
        assert_eq!(r.best_spins.as_slice(), &[-1, 1, -1]);
    }
}
