//! Minimum vertex cover with a penalty that ramps up during the run,
//! checked against exhaustive search on a small graph.
//!
//! cargo run --release --example vertex_cover

use heo::numeric::{RngStream, SigmaSchedule, SolverConfig};
use heo::oracle::brute_force_mvc;
use heo::problems::{cover_size, is_vertex_cover, mvc_problem, WeightedGraph};
use heo::solvers::{restart_best, Problem, Solver};

fn main() -> heo::Result<()> {
    let graph = WeightedGraph::random(18, 0.25, &mut RngStream::new(4));
    let problem = mvc_problem(&graph, 2.0)?;
    let config = SolverConfig::new(200, 2.5, SigmaSchedule::linear(std::f64::consts::SQRT_2, 0.0));
    let report = restart_best(&Solver::Heo, &problem, &config, 10, &RngStream::new(0))?;
    let cover = problem.post_process(report.best_spins);
    assert!(is_vertex_cover(&graph, &cover));

    let exact = brute_force_mvc(&graph)?;
    println!(
        "{} edges: HeO cover of size {}, minimum {}",
        graph.edge_count(),
        cover_size(&cover),
        exact.optimum
    );
    Ok(())
}
