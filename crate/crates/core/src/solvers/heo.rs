use std::time::Instant;

use super::{Auxiliary, IterationHook, Problem, Step, Workspace};
use crate::error::{Error, Result};
use crate::numeric::{binarize, total_variance, RngStream, SolveReport, SolverConfig};

/// Heat-diffusion optimization without momentum: θ ← Proj(θ − γ g).
/// `config.momentum` is ignored.
pub fn heo_solve(problem: &dyn Problem, config: &SolverConfig, rng: &mut RngStream) -> Result<SolveReport> {
    run(problem, config, rng, false, None)
}

/// Heat-diffusion optimization with a velocity accumulator:
/// v ← κ v − γ g, θ ← Proj(θ + v). κ = 0 reproduces [`heo_solve`] exactly.
pub fn heo_momentum_solve(problem: &dyn Problem, config: &SolverConfig, rng: &mut RngStream) -> Result<SolveReport> {
    run(problem, config, rng, true, None)
}

/// Either loop, calling `hook(t, θ_{t+1})` after every update.
pub fn heo_solve_with_hook(
    problem: &dyn Problem,
    config: &SolverConfig,
    rng: &mut RngStream,
    momentum: bool,
    hook: &mut dyn FnMut(usize, &[f64]),
) -> Result<SolveReport> {
    run(problem, config, rng, momentum, Some(hook))
}

fn run(
    problem: &dyn Problem,
    config: &SolverConfig,
    rng: &mut RngStream,
    use_momentum: bool,
    mut hook: Option<&mut IterationHook>,
) -> Result<SolveReport> {
    config.validate()?;
    let n = problem.dimension();
    if n == 0 {
        return Err(Error::invalid("problem dimension must be at least 1"));
    }
    let iterations = config.iterations;
    let gamma = config.step_size;
    let kappa = if use_momentum { config.momentum } else { 0.0 };

    let mut theta = vec![problem.initial_theta(); n];
    let mut velocity = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut grad = vec![0.0; n];
    let mut ws = Workspace::new(n);
    let aux_init = problem.auxiliary_init();
    let mut aux = Auxiliary {
        velocity: vec![0.0; aux_init.len()],
        values: aux_init,
    };

    let mut energy_trace = Vec::with_capacity(iterations);
    let mut variance_trace = Vec::with_capacity(iterations);
    let mut sigma_trace = Vec::with_capacity(iterations);
    let mut grad_norm_trace = Vec::with_capacity(iterations);

    let started = Instant::now();
    for t in 0..iterations {
        let sigma = config.schedule.sigma_at(t, iterations, rng);
        rng.fill_uniform(&mut x);
        let step = Step {
            t,
            iterations,
            sigma,
            step_size: gamma,
            momentum: kappa,
        };
        problem.auxiliary_step(&step, &theta, &x, &mut aux);
        problem.surrogate_grad(&step, &theta, &x, &aux.values, &mut ws, &mut grad);
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFiniteGradient { iteration: t });
        }

        if use_momentum {
            for ((th, v), g) in theta.iter_mut().zip(&mut velocity).zip(&grad) {
                *v = kappa * *v - gamma * g;
                *th = (*th + *v).clamp(0.0, 1.0);
            }
        } else {
            for (th, g) in theta.iter_mut().zip(&grad) {
                *th = (*th - gamma * g).clamp(0.0, 1.0);
            }
        }
        debug_assert!(theta.iter().all(|t| (0.0..=1.0).contains(t)));
        if let Some(h) = hook.as_mut() {
            h(t, &theta);
        }

        let spins = binarize(&theta);
        energy_trace.push(problem.trace_energy(&spins, &aux.values));
        variance_trace.push(total_variance(&theta));
        sigma_trace.push(sigma);
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
        sigma_trace,
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

    fn linear_s0() -> MultilinearPolynomial {
        MultilinearPolynomial::normalize(1, [Monomial::new(1.0, [0])]).unwrap()
    }

    #[test]
    fn single_linear_term_descends_to_minus_one() {
        let f = linear_s0();
        let cfg = SolverConfig::new(100, 2.0, SigmaSchedule::linear(2.0, 0.0));
        let mut thetas = Vec::new();
        let r = heo_solve_with_hook(&f, &cfg, &mut RngStream::new(1), false, &mut |_, th| thetas.push(th[0])).unwrap();
        assert_eq!(r.best_spins.as_slice(), &[-1]);
        assert_eq!(r.best_energy, -1.0);
        // gradient of erf is strictly positive, so θ never increases
        assert!(thetas.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(*thetas.last().unwrap(), 0.0);
    }

    #[test]
    fn constant_target_keeps_theta_at_half() {
        let f = MultilinearPolynomial::normalize(3, [Monomial::constant(4.0)]).unwrap();
        let cfg = SolverConfig::new(50, 2.0, SigmaSchedule::linear(2.0, 0.0));
        let mut all_half = true;
        let r = heo_solve_with_hook(&f, &cfg, &mut RngStream::new(2), false, &mut |_, th| {
            all_half &= th.iter().all(|&t| t == 0.5)
        })
        .unwrap();
        assert!(all_half);
        assert_eq!(r.best_spins.as_slice(), &[1, 1, 1]);
        assert_eq!(r.best_energy, 4.0);
        assert!(r.variance_trace.iter().all(|&v| v == 0.75));
    }

    #[test]
    fn zero_momentum_is_bitwise_plain_heo() {
        let mut rng = RngStream::new(9);
        let f = random_polynomial(12, 40, 3, &mut rng);
        let cfg =
            SolverConfig::new(300, 0.5, SigmaSchedule::linear(2.0, 0.0).with_perturbation(0.3)).with_momentum(0.0);
        let mut a = Vec::new();
        let mut b = Vec::new();
        let ra = heo_solve_with_hook(&f, &cfg, &mut RngStream::new(5), false, &mut |_, th| {
            a.extend_from_slice(th)
        })
        .unwrap();
        let rb = heo_solve_with_hook(&f, &cfg, &mut RngStream::new(5), true, &mut |_, th| {
            b.extend_from_slice(th)
        })
        .unwrap();
        assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
        assert_eq!(ra.energy_trace, rb.energy_trace);
        assert_eq!(ra.best_spins, rb.best_spins);
    }

    #[test]
    fn momentum_single_term_reaches_zero() {
        // With g = +c > 0 each step, θ_t = 0.5 − γ Σ velocities, which is
        // strictly decreasing; the clamp pins it at 0 once it crosses.
        let f = linear_s0();
        let cfg = SolverConfig::new(100, 2.0, SigmaSchedule::linear(2.0, 0.0)).with_momentum(0.5);
        let mut last = 1.0;
        let r = heo_solve_with_hook(&f, &cfg, &mut RngStream::new(3), true, &mut |_, th| {
            assert!(th[0] <= last);
            last = th[0];
        })
        .unwrap();
        assert_eq!(last, 0.0);
        assert_eq!(r.best_spins.as_slice(), &[-1]);
    }

    #[test]
    fn theta_stays_in_cube_and_traces_have_length_t() {
        let mut rng = RngStream::new(21);
        let f = random_polynomial(15, 60, 4, &mut rng);
        let cfg = SolverConfig::new(200, 5.0, SigmaSchedule::linear(2.0, 0.0)).with_momentum(0.9);
        let r = heo_solve_with_hook(&f, &cfg, &mut RngStream::new(4), true, &mut |_, th| {
            assert!(th.iter().all(|t| (0.0..=1.0).contains(t)));
        })
        .unwrap();
        assert_eq!(r.energy_trace.len(), 200);
        assert_eq!(r.variance_trace.len(), 200);
        assert_eq!(r.sigma_trace.len(), 200);
        assert_eq!(r.best_energy, f.evaluate_spins(&r.best_spins));
    }

    #[test]
    fn deterministic_under_seed() {
        let mut rng = RngStream::new(8);
        let f = random_polynomial(10, 30, 3, &mut rng);
        let cfg = SolverConfig::new(100, 1.0, SigmaSchedule::linear(2.0, 0.0));
        let mut a = heo_solve(&f, &cfg, &mut RngStream::new(1)).unwrap();
        let mut b = heo_solve(&f, &cfg, &mut RngStream::new(1)).unwrap();
        a.wall_time_per_iteration_ms = 0.0;
        b.wall_time_per_iteration_ms = 0.0;
        assert_eq!(a, b);
    }

    struct Exploding;
    impl Problem for Exploding {
        fn dimension(&self) -> usize {
            2
        }
        fn spin_energy(&self, _: &crate::numeric::SpinVector) -> f64 {
            0.0
        }
        fn surrogate_value(&self, _: &Step, _: &[f64], _: &[f64], _: &[f64]) -> f64 {
            0.0
        }
        fn surrogate_grad(&self, step: &Step, _: &[f64], _: &[f64], _: &[f64], _: &mut Workspace, g: &mut [f64]) {
            g[0] = if step.t == 7 { f64::NAN } else { 0.0 };
            g[1] = 0.0;
        }
    }

    #[test]
    fn non_finite_gradient_reports_iteration() {
        let cfg = SolverConfig::new(20, 1.0, SigmaSchedule::linear(1.0, 0.0));
        let err = heo_solve(&Exploding, &cfg, &mut RngStream::new(0)).unwrap_err();
        assert_eq!(err, Error::NonFiniteGradient { iteration: 7 });
        assert!(err.to_string().contains('7'));
    }

    #[test]
    fn invalid_config_rejected() {
        let f = linear_s0();
        let cfg = SolverConfig::new(0, 1.0, SigmaSchedule::linear(1.0, 0.0));
        assert!(heo_solve(&f, &cfg, &mut RngStream::new(0)).is_err());
    }
}
