//! Recovering ternary weights of a one-layer ReLU network from input/output
//! pairs, with the score-function estimator as a baseline.
//!
//! cargo run --release --example ternary_network

use heo::numeric::{RngStream, SigmaSchedule, SolverConfig};
use heo::problems::{ternary_problem, TernaryDataset};
use heo::solvers::{heo_momentum_solve, mcge_solve};

fn main() -> heo::Result<()> {
    let data = TernaryDataset::generate(10, 2, 300, 21)?;
    let problem = ternary_problem(&data)?;
    let schedule = SigmaSchedule::linear(std::f64::consts::SQRT_2, 0.0);

    let heo = heo_momentum_solve(
        &problem,
        &SolverConfig::new(5000, 0.5, schedule).with_momentum(0.999),
        &mut RngStream::new(0),
    )?;
    let mcge = mcge_solve(
        &problem,
        &SolverConfig::new(5000, 1e-7, schedule).with_momentum(0.9999),
        10,
        &mut RngStream::new(0),
    )?;

    println!("true weights:  {:?}", data.weights_gt());
    println!("HeO estimate:  {:?}", problem.decode(&heo.best_spins));
    println!(
        "HeO accuracy {:.3}, MCGE accuracy {:.3}",
        problem.accuracy(&heo.best_spins),
        problem.accuracy(&mcge.best_spins)
    );
    Ok(())
}
