use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::Problem;
use crate::error::{Error, Result};
use crate::numeric::{RngStream, SolveReport, SolverConfig, SpinVector};

/// Geometric cooling from `initial` to `final_temperature` over the sweeps of
/// a run. `initial = None` picks 2·median|Δf| over random single flips.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    pub initial: Option<f64>,
    pub final_temperature: f64,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        AnnealSchedule {
            initial: None,
            final_temperature: 1e-3,
        }
    }
}

/// Single-spin-flip Metropolis annealing. One iteration is one sweep of n
/// proposals. Returns the best configuration seen; the sigma trace holds the
/// temperature of each sweep and the variance trace is zero.
pub fn sa_solve(
    problem: &dyn Problem,
    config: &SolverConfig,
    schedule: &AnnealSchedule,
    rng: &mut RngStream,
) -> Result<SolveReport> {
    if config.iterations == 0 {
        return Err(Error::Config("iterations must be at least 1".into()));
    }
    let n = problem.dimension();
    if n == 0 {
        return Err(Error::invalid("problem dimension must be at least 1"));
    }
    let mut spins = SpinVector::from_bits(0, n);
    for i in 0..n {
        if rng.bernoulli(0.5) {
            spins.flip(i);
        }
    }
    let t_final = schedule.final_temperature;
    let t_initial = match schedule.initial {
        Some(t) => t,
        None => (2.0 * median_flip_magnitude(problem, &spins, rng)).max(t_final * 10.0),
    };
    if !(t_final > 0.0 && t_initial > t_final && t_initial.is_finite()) {
        return Err(Error::Config(format!(
            "annealing needs initial > final > 0, got {t_initial} and {t_final}"
        )));
    }

    let sweeps = config.iterations;
    let ratio = t_final / t_initial;
    let mut energy = problem.spin_energy(&spins);
    let mut best_energy = energy;
    let mut best = spins.clone();
    let mut energy_trace = Vec::with_capacity(sweeps);
    let mut temperature_trace = Vec::with_capacity(sweeps);

    let started = Instant::now();
    for sweep in 0..sweeps {
        let frac = if sweeps > 1 {
            sweep as f64 / (sweeps - 1) as f64
        } else {
            1.0
        };
        let temperature = t_initial * ratio.powf(frac);
        for _ in 0..n {
            let i = rng.index(n);
            let delta = problem.flip_delta(&spins, i);
            if delta <= 0.0 || rng.uniform() < (-delta / temperature).exp() {
                spins.flip(i);
                energy += delta;
                if energy < best_energy {
                    best_energy = energy;
                    best.clone_from(&spins);
                }
            }
        }
        energy_trace.push(energy);
        temperature_trace.push(temperature);
    }
    let elapsed_ms = started.elapsed().as_secs_f64() * 1e3;

    let best_spins = problem.post_process(best);
    let best_energy = problem.spin_energy(&best_spins);
    Ok(SolveReport {
        best_spins,
        best_energy,
        energy_trace,
        variance_trace: vec![0.0; sweeps],
        sigma_trace: temperature_trace,
        grad_norm_trace: vec![0.0; sweeps],
        wall_time_per_iteration_ms: elapsed_ms / sweeps as f64,
        seed_used: rng.seed(),
    })
}

fn median_flip_magnitude(problem: &dyn Problem, spins: &SpinVector, rng: &mut RngStream) -> f64 {
    let n = problem.dimension();
    let mut mags: Vec<f64> = (0..n.min(200))
        .map(|_| problem.flip_delta(spins, rng.index(n)).abs())
        .filter(|m| *m > 0.0)
        .collect();
    if mags.is_empty() {
        return 1.0;
    }
    mags.sort_by(f64::total_cmp);
    mags[mags.len() / 2]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::SigmaSchedule;
    use crate::poly::{random_polynomial, Monomial, MultilinearPolynomial};

    fn cfg(sweeps: usize) -> SolverConfig {
        SolverConfig::new(sweeps, 1.0, SigmaSchedule::linear(1.0, 0.0))
    }

    #[test]
    fn zero_temperature_is_greedy() {
        let mut rng = RngStream::new(12);
        let f = random_polynomial(12, 40, 2, &mut rng);
        let sched = AnnealSchedule {
            initial: Some(1e-12),
            final_temperature: 1e-13,
        };
        let r = sa_solve(&f, &cfg(200), &sched, &mut RngStream::new(3)).unwrap();
        assert!(r.energy_trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn downhill_moves_always_accepted() {
        // f = Σ s_i: every downhill flip is taken even at vanishing temperature.
        let f = MultilinearPolynomial::normalize(5, (0..5).map(|i| Monomial::new(1.0, [i]))).unwrap();
        let sched = AnnealSchedule {
            initial: Some(1e-12),
            final_temperature: 1e-13,
        };
        let r = sa_solve(&f, &cfg(50), &sched, &mut RngStream::new(1)).unwrap();
        assert_eq!(r.best_energy, -5.0);
    }

    #[test]
    fn best_energy_matches_spins() {
        let mut rng = RngStream::new(5);
        let f = random_polynomial(10, 30, 3, &mut rng);
        let r = sa_solve(&f, &cfg(100), &AnnealSchedule::default(), &mut RngStream::new(2)).unwrap();
        assert_eq!(r.best_energy, f.evaluate_spins(&r.best_spins));
        assert!(r.best_energy <= r.energy_trace.iter().cloned().fold(f64::INFINITY, f64::min) + 1e-9);
    }

    #[test]
    fn bad_temperatures_rejected() {
        let f = MultilinearPolynomial::normalize(1, [Monomial::new(1.0, [0])]).unwrap();
        let sched = AnnealSchedule {
            initial: Some(0.1),
            final_temperature: 1.0,
        };
        assert!(sa_solve(&f, &cfg(10), &sched, &mut RngStream::new(0)).is_err());
    }
}
