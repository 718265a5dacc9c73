//! Effect of a randomly perturbed σ schedule on a dense quadratic objective:
//! the same runs with δ = 0 and δ = 0.5.
//!
//! cargo run --release --example sigma_perturbation

use heo::numeric::{median, RngStream, SigmaSchedule, SolverConfig};
use heo::poly::random_qubo;
use heo::solvers::heo_solve;

fn main() -> heo::Result<()> {
    let qubo = random_qubo(100, 1.0, &mut RngStream::new(2));
    for delta in [0.0, 0.5] {
        let schedule = SigmaSchedule::linear(1.0, 0.0).with_perturbation(delta);
        let config = SolverConfig::new(1000, 2.0, schedule);
        let energies = (0..8)
            .map(|r| heo_solve(&qubo, &config, &mut RngStream::new(r)).map(|rep| rep.best_energy))
            .collect::<heo::Result<Vec<_>>>()?;
        println!("delta {delta}: median best energy {:.3}", median(&energies));
    }
    Ok(())
}
