//! Parsing of the bundled instance files and report round trips.

use std::path::Path;

use heo::io::{
    parse_dimacs_cnf, parse_edge_list, parse_maxcut, parse_report, write_report, EncodedSpins, Instance, InstanceFile,
    InstanceFormat, ReportDocument, ReportFormat,
};
use heo::numeric::{RngStream, SigmaSchedule, SolverConfig, SpinVector};
use heo::problems::{maxcut_problem, WeightedGraph};
use heo::solvers::heo_solve;

fn read(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)).unwrap()
}

#[test]
fn petersen_graph() {
    let text = read("petersen.mc");
    assert_eq!(InstanceFormat::detect(&text), InstanceFormat::MaxcutEdge);
    let g = parse_maxcut(&text).unwrap();
    assert_eq!((g.vertex_count(), g.edge_count()), (10, 15));
    assert_eq!(g.total_weight(), 15.0);
    assert!(g.degrees().iter().all(|&d| d == 3));
}

#[test]
fn small_formula() {
    let text = read("small.cnf");
    assert_eq!(InstanceFormat::detect(&text), InstanceFormat::DimacsCnf);
    let f = parse_dimacs_cnf(&text).unwrap();
    assert_eq!((f.variable_count(), f.clauses().len()), (8, 12));
}

#[test]
fn small_edge_list_is_one_based() {
    let text = read("small.edges");
    assert_eq!(InstanceFormat::detect(&text), InstanceFormat::EdgeList);
    let g = parse_edge_list(&text).unwrap();
    assert_eq!(g.vertex_count(), 12);
    assert_eq!(g.edges()[0], (0, 1, 1.0));
}

#[test]
fn load_dispatches_on_content() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    assert!(matches!(
        InstanceFile::load(dir.join("petersen.mc")).unwrap().1,
        Instance::Graph(_)
    ));
    assert!(matches!(
        InstanceFile::load(dir.join("small.cnf")).unwrap().1,
        Instance::Cnf(_)
    ));
    assert!(InstanceFile::load(dir.join("missing.mc")).is_err());
}

#[test]
fn malformed_inputs_report_their_line() {
    let cases = [
        ("2 1\n1 2 1\n1 2 1\n", "line 3"),
        ("3 1\n1 4 1\n", "line 2"),
        ("p cnf 3 1\n1 2 0\n", "line 2"),
    ];
    for (text, needle) in cases {
        let err = match InstanceFormat::detect(text) {
            InstanceFormat::DimacsCnf => parse_dimacs_cnf(text).map(|_| ()),
            _ => parse_maxcut(text).map(|_| ()),
        }
        .unwrap_err();
        assert!(err.to_string().contains(needle), "{text:?}: {err}");
    }
}

#[test]
fn json_reports_round_trip_exactly() {
    let g = WeightedGraph::random(30, 0.3, &mut RngStream::new(1));
    let config = SolverConfig::new(50, 2.0, SigmaSchedule::linear(1.0, 0.0));
    let report = heo_solve(&maxcut_problem(&g), &config, &mut RngStream::new(2)).unwrap();
    let doc = ReportDocument::new("maxcut", "heo", serde_json::to_value(config).unwrap(), &report, true)
        .with_metric("third", 1.0 / 3.0);
    let text = write_report(&doc, ReportFormat::Json).unwrap();
    let back = parse_report(&text).unwrap();
    assert_eq!(back, doc);
    assert_eq!(back.spins().unwrap(), report.best_spins);
    assert_eq!(write_report(&back, ReportFormat::Json).unwrap(), text);
}

#[test]
fn long_spin_vectors_are_run_length_encoded() {
    let mut spins = SpinVector::filled(25_000, 1);
    for i in 10_000..10_010 {
        spins.flip(i);
    }
    let encoded = EncodedSpins::encode(&spins);
    assert!(matches!(encoded, EncodedSpins::RunLength { .. }));
    assert_eq!(encoded.decode().unwrap(), spins);
    let json = serde_json::to_string(&encoded).unwrap();
    assert!(json.len() < 200);
    let small = EncodedSpins::encode(&SpinVector::filled(5, -1));
    assert!(matches!(small, EncodedSpins::Plain(_)));
}
