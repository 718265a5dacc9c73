//! Max-cut on a random graph: plain HeO against simulated annealing, each
//! with a few restarts.
//!
//! cargo run --release --example maxcut

use heo::numeric::{RngStream, SigmaSchedule, SolverConfig};
use heo::problems::{maxcut_problem, WeightedGraph};
use heo::solvers::{restart_best, AnnealSchedule, Solver};

fn main() -> heo::Result<()> {
    let mut rng = RngStream::new(11);
    let graph = WeightedGraph::random(120, 0.1, &mut rng);
    let problem = maxcut_problem(&graph);
    println!("graph: {} vertices, {} edges", graph.vertex_count(), graph.edge_count());

    let config = SolverConfig::new(2000, 2.0, SigmaSchedule::linear(1.0, 0.0));
    let solvers = [
        Solver::Heo,
        Solver::Sa {
            schedule: AnnealSchedule::default(),
        },
    ];
    for solver in &solvers {
        let report = restart_best(solver, &problem, &config, 4, &RngStream::new(1))?;
        println!(
            "{:>5}: cut {:.0}, energy {:.1}",
            solver.name(),
            problem.cut_value(&report.best_spins),
            report.best_energy
        );
    }
    Ok(())
}
