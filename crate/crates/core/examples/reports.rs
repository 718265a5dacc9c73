//! Loading an instance file, solving it, and writing the result as a JSON
//! report or a CSV trace.
//!
//! cargo run --release --example reports

use heo::io::{parse_report, write_report, Instance, InstanceFormat, ReportDocument, ReportFormat};
use heo::numeric::{RngStream, SigmaSchedule, SolverConfig};
use heo::problems::maxcut_problem;
use heo::solvers::heo_solve;

const PETERSEN: &str = "10 15\n1 2 1\n2 3 1\n3 4 1\n4 5 1\n1 5 1\n1 6 1\n2 7 1\n3 8 1\n4 9 1\n5 10 1\n6 8 1\n8 10 1\n7 10 1\n7 9 1\n6 9 1\n";

fn main() -> heo::Result<()> {
    let format = InstanceFormat::detect(PETERSEN);
    let Instance::Graph(graph) = format.parse(PETERSEN)? else {
        unreachable!("the text is a graph")
    };
    let problem = maxcut_problem(&graph);
    let config = SolverConfig::new(200, 2.0, SigmaSchedule::linear(1.0, 0.0));
    let report = heo_solve(&problem, &config, &mut RngStream::new(3))?;

    let doc = ReportDocument::new("maxcut", "heo", serde_json::to_value(config).unwrap(), &report, false)
        .with_metric("cut_value", problem.cut_value(&report.best_spins));
    let json = write_report(&doc, ReportFormat::Json)?;
    assert_eq!(parse_report(&json)?, doc);
    println!("{}", json.lines().take(8).collect::<Vec<_>>().join("\n"));

    let csv = write_report(&doc, ReportFormat::Csv)?;
    println!("...\n{}", csv.lines().take(4).collect::<Vec<_>>().join("\n"));
    Ok(())
}
