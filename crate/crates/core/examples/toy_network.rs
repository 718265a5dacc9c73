//! Minimizing the output of a small random sigmoid network over binary
//! inputs, compared with exhaustive enumeration.
//!
//! cargo run --release --example toy_network

use heo::numeric::{RngStream, SigmaSchedule, SolverConfig};
use heo::oracle::brute_force_min;
use heo::problems::toynn_problem;
use heo::solvers::{restart_best, Solver};

fn main() -> heo::Result<()> {
    let config = SolverConfig::new(5000, 2.0, SigmaSchedule::linear(2.0, 0.0)).with_momentum(0.9999);
    for seed in 0..5 {
        let network = toynn_problem(14, 6, seed)?;
        let exact = brute_force_min(&network, 14)?;
        let report = restart_best(&Solver::HeoMomentum, &network, &config, 10, &RngStream::new(seed))?;
        println!(
            "network {seed}: HeO {:.6}, minimum {:.6}, gap {:.2e}",
            report.best_energy,
            exact.optimum,
            report.best_energy - exact.optimum
        );
    }
    Ok(())
}
