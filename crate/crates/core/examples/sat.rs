//! Random 3-SAT near the satisfiability threshold, solved with momentum HeO
//! and restarts.
//!
//! cargo run --release --example sat

use heo::numeric::{RngStream, SigmaSchedule, SolverConfig};
use heo::problems::{sat3_problem, violated_clauses, CnfFormula};
use heo::solvers::{restart_best, Solver};

fn main() -> heo::Result<()> {
    let config =
        SolverConfig::new(3000, 2.0, SigmaSchedule::linear(std::f64::consts::SQRT_2, 0.0)).with_momentum(0.9999);
    for seed in 0..5 {
        let formula = CnfFormula::random(40, 160, &mut RngStream::new(seed));
        let problem = sat3_problem(&formula);
        let report = restart_best(&Solver::HeoMomentum, &problem, &config, 4, &RngStream::new(seed))?;
        println!(
            "formula {seed}: {} of {} clauses violated ({:.1}% satisfied)",
            violated_clauses(&formula, &report.best_spins),
            formula.clauses().len(),
            100.0 * problem.satisfied_fraction(&report.best_spins)
        );
    }
    Ok(())
}
