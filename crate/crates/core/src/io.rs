//! Instance parsers, dataset generators and report serialization.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{SolveReport, SpinVector};
use crate::problems::{CnfFormula, Literal, RegressionDataset, TernaryDataset, WeightedGraph};

/// Spin vectors longer than this are run-length encoded in JSON reports.
pub const RLE_THRESHOLD: usize = 10_000;

fn content_lines<'a>(text: &'a str, comment: &'a [char]) -> impl Iterator<Item = (usize, &'a str)> + 'a {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(move |(_, l)| !l.is_empty() && !comment.iter().any(|c| l.starts_with(*c)))
}

fn field<T: FromStr>(token: Option<&str>, line: usize, what: &str) -> Result<T> {
    let token = token.ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
    token
        .parse()
        .map_err(|_| Error::parse(line, format!("cannot read {what} from {token:?}")))
}

fn finish_edges(n: usize, edges: Vec<(usize, usize, f64, usize)>) -> Result<WeightedGraph> {
    let mut seen = std::collections::HashMap::new();
    for &(i, j, _, line) in &edges {
        if let Some(first) = seen.insert((i.min(j), i.max(j)), line) {
            return Err(Error::parse(
                line,
                format!("duplicate edge {} {} (first on line {first})", i + 1, j + 1),
            ));
        }
    }
    WeightedGraph::new(n, edges.into_iter().map(|(i, j, w, _)| (i, j, w)))
}

/// Reads the "n m" header followed by m lines "i j w" with 1-based vertices.
/// Edges given as i > j are normalized.
pub fn parse_maxcut(text: &str) -> Result<WeightedGraph> {
    parse_maxcut_with(text, false)
}

/// As [`parse_maxcut`] but rejects edges with i >= j.
pub fn parse_maxcut_strict(text: &str) -> Result<WeightedGraph> {
    parse_maxcut_with(text, true)
}

fn parse_maxcut_with(text: &str, strict: bool) -> Result<WeightedGraph> {
    let mut lines = content_lines(text, &['#', '%', 'c']);
    let (hline, header) = lines.next().ok_or_else(|| Error::parse(1, "missing \"n m\" header"))?;
    let mut tok = header.split_whitespace();
    let n: usize = field(tok.next(), hline, "vertex count")?;
    let m: usize = field(tok.next(), hline, "edge count")?;
    if tok.next().is_some() {
        return Err(Error::parse(hline, "header must be \"n m\""));
    }
    let mut edges = Vec::with_capacity(m);
    let mut last = hline;
    for (line, body) in lines {
        last = line;
        let mut tok = body.split_whitespace();
        let i: usize = field(tok.next(), line, "first vertex")?;
        let j: usize = field(tok.next(), line, "second vertex")?;
        let w: f64 = field(tok.next(), line, "weight")?;
        if tok.next().is_some() {
            return Err(Error::parse(line, "expected \"i j w\""));
        }
        if i == 0 || j == 0 || i > n || j > n {
            return Err(Error::parse(line, format!("vertex out of range 1..={n}")));
        }
        if i == j {
            return Err(Error::parse(line, "self-loop"));
        }
        if strict && i > j {
            return Err(Error::parse(line, "strict mode requires i < j"));
        }
        if !w.is_finite() {
            return Err(Error::parse(line, "weight is not finite"));
        }
        edges.push((i - 1, j - 1, w, line));
    }
    if edges.len() != m {
        return Err(Error::parse(
            last,
            format!("header declares {m} edges, found {}", edges.len()),
        ));
    }
    finish_edges(n, edges)
}

/// DIMACS CNF restricted to clauses of exactly three literals.
pub fn parse_dimacs_cnf(text: &str) -> Result<CnfFormula> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut pending: Vec<(i64, usize)> = Vec::new();
    let mut last = 0;
    for (line, body) in content_lines(text, &['c']) {
        last = line;
        if body.starts_with('%') {
            // SATLIB files end with "%" followed by a stray "0".
            break;
        }
        if body.starts_with('p') {
            if header.is_some() {
                return Err(Error::parse(line, "second problem line"));
            }
            let mut tok = body.split_whitespace().skip(1);
            if tok.next() != Some("cnf") {
                return Err(Error::parse(line, "expected \"p cnf n m\""));
            }
            let n = field(tok.next(), line, "variable count")?;
            let m = field(tok.next(), line, "clause count")?;
            header = Some((n, m, line));
            continue;
        }
        let (n, _, _) = header.ok_or_else(|| Error::parse(line, "clause before \"p cnf\" header"))?;
        for token in body.split_whitespace() {
            let lit: i64 = field(Some(token), line, "literal")?;
            if lit == 0 {
                if pending.len() != 3 {
                    return Err(Error::Unsupported(format!(
                        "line {line}: clause has {} literals, only 3-SAT is supported",
                        pending.len()
                    )));
                }
                let mut clause = [Literal::new(0, true); 3];
                for (slot, &(l, _)) in clause.iter_mut().zip(&pending) {
                    *slot = Literal::new(l.unsigned_abs() as usize - 1, l > 0);
                }
                clauses.push((clause, line));
                pending.clear();
            } else {
                if lit.unsigned_abs() as usize > n {
                    return Err(Error::parse(line, format!("literal {lit} exceeds {n} variables")));
                }
                pending.push((lit, line));
            }
        }
    }
    let (n, m, hline) = header.ok_or_else(|| Error::parse(last.max(1), "missing \"p cnf\" header"))?;
    if let Some(&(_, line)) = pending.first() {
        return Err(Error::parse(line, "clause not terminated by 0"));
    }
    if clauses.len() != m {
        return Err(Error::parse(
            hline,
            format!("header declares {m} clauses, found {}", clauses.len()),
        ));
    }
    for (clause, line) in &clauses {
        let v = clause.map(|l| l.var);
        if v[0] == v[1] || v[0] == v[2] || v[1] == v[2] {
            return Err(Error::parse(*line, "clause repeats a variable"));
        }
    }
    CnfFormula::new(n, clauses.into_iter().map(|(c, _)| c).collect())
}

/// Whitespace-separated "u v [w]" lines with 1-based vertices, weight 1 when
/// omitted. The vertex count is the largest index seen.
pub fn parse_edge_list(text: &str) -> Result<WeightedGraph> {
    let mut edges = Vec::new();
    let mut n = 0;
    for (line, body) in content_lines(text, &['#', '%']) {
        let mut tok = body
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty());
        let i: usize = field(tok.next(), line, "first vertex")?;
        let j: usize = field(tok.next(), line, "second vertex")?;
        let w: f64 = match tok.next() {
            Some(t) => field(Some(t), line, "weight")?,
            None => 1.0,
        };
        if tok.next().is_some() {
            return Err(Error::parse(line, "expected \"u v [w]\""));
        }
        if i == 0 || j == 0 {
            return Err(Error::parse(line, "vertices are 1-based"));
        }
        if i == j {
            return Err(Error::parse(line, "self-loop"));
        }
        if !w.is_finite() {
            return Err(Error::parse(line, "weight is not finite"));
        }
        n = n.max(i).max(j);
        edges.push((i - 1, j - 1, w, line));
    }
    finish_edges(n, edges)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceFormat {
    MaxcutEdge,
    DimacsCnf,
    EdgeList,
}

/// A parsed instance of either kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Graph(WeightedGraph),
    Cnf(CnfFormula),
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceFile {
    pub path: PathBuf,
    pub format: InstanceFormat,
}

impl InstanceFormat {
    /// Decides from content alone: a "p cnf" line means DIMACS; a two-field
    /// header followed only by three-field lines means the max-cut format;
    /// anything else is an edge list.
    pub fn detect(text: &str) -> InstanceFormat {
        let mut lines = content_lines(text, &['#', '%'])
            .map(|(_, l)| l)
            .filter(|l| !l.starts_with('c'));
        if text.lines().any(|l| l.trim_start().starts_with("p cnf")) {
            return InstanceFormat::DimacsCnf;
        }
        match lines.next() {
            Some(first) if first.split_whitespace().count() == 2 => {
                if lines.all(|l| l.split_whitespace().count() == 3) {
                    InstanceFormat::MaxcutEdge
                } else {
                    InstanceFormat::EdgeList
                }
            }
            _ => InstanceFormat::EdgeList,
        }
    }

    pub fn parse(self, text: &str) -> Result<Instance> {
        match self {
            InstanceFormat::MaxcutEdge => parse_maxcut(text).map(Instance::Graph),
            InstanceFormat::DimacsCnf => parse_dimacs_cnf(text).map(Instance::Cnf),
            InstanceFormat::EdgeList => parse_edge_list(text).map(Instance::Graph),
        }
    }
}

impl InstanceFile {
    /// Reads and parses `path`, detecting its format.
    pub fn load(path: impl AsRef<Path>) -> Result<(InstanceFile, Instance)> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
        let format = InstanceFormat::detect(&text);
        let instance = format.parse(&text)?;
        Ok((
            InstanceFile {
                path: path.to_path_buf(),
                format,
            },
            instance,
        ))
    }
}

pub fn generate_regression_dataset(
    n: usize,
    samples: usize,
    q: f64,
    noise: f64,
    seed: u64,
) -> Result<RegressionDataset> {
    RegressionDataset::generate(n, samples, q, noise, seed)
}

pub fn generate_ternary_dataset(n: usize, m: usize, samples: usize, seed: u64) -> Result<TernaryDataset> {
    TernaryDataset::generate(n, m, samples, seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::Config(format!("unknown report format {other:?}"))),
        }
    }
}

/// Spins as written in a report: a plain array, or runs of equal values for
/// long vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EncodedSpins {
    Plain(Vec<i8>),
    RunLength { length: usize, runs: Vec<(i8, usize)> },
}

impl EncodedSpins {
    pub fn encode(spins: &SpinVector) -> EncodedSpins {
        if spins.len() <= RLE_THRESHOLD {
            return EncodedSpins::Plain(spins.as_slice().to_vec());
        }
        let mut runs: Vec<(i8, usize)> = Vec::new();
        for s in spins.iter() {
            match runs.last_mut() {
                Some((v, count)) if *v == s => *count += 1,
                _ => runs.push((s, 1)),
            }
        }
        EncodedSpins::RunLength {
            length: spins.len(),
            runs,
        }
    }

    pub fn decode(&self) -> Result<SpinVector> {
        match self {
            EncodedSpins::Plain(v) => SpinVector::new(v.clone()),
            EncodedSpins::RunLength { length, runs } => {
                let mut out = Vec::with_capacity(*length);
                for &(v, count) in runs {
                    out.extend(std::iter::repeat_n(v, count));
                }
                if out.len() != *length {
                    return Err(Error::invalid("run lengths do not add up to the declared length"));
                }
                SpinVector::new(out)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Traces {
    pub energy: Vec<f64>,
    pub variance: Vec<f64>,
    pub sigma: Vec<f64>,
    pub grad_norm: Vec<f64>,
}

/// Self-describing result of one command: what ran, with which settings,
/// and what came out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub problem: String,
    pub solver: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub best_energy: f64,
    pub best_spins: EncodedSpins,
    pub metrics: BTreeMap<String, f64>,
    pub traces: Traces,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_per_iteration_ms: Option<f64>,
}

impl ReportDocument {
    /// Wall time is only kept when `timing` is set, so that reports of
    /// repeated runs compare equal byte for byte.
    pub fn new(
        problem: impl Into<String>,
        solver: impl Into<String>,
        config: serde_json::Value,
        report: &SolveReport,
        timing: bool,
    ) -> Self {
        ReportDocument {
            problem: problem.into(),
            solver: solver.into(),
            config,
            seed: report.seed_used,
            best_energy: report.best_energy,
            best_spins: EncodedSpins::encode(&report.best_spins),
            metrics: BTreeMap::new(),
            traces: Traces {
                energy: report.energy_trace.clone(),
                variance: report.variance_trace.clone(),
                sigma: report.sigma_trace.clone(),
                grad_norm: report.grad_norm_trace.clone(),
            },
            wall_time_per_iteration_ms: timing.then_some(report.wall_time_per_iteration_ms),
        }
    }

    pub fn with_metric(mut self, name: &str, value: f64) -> Self {
        self.metrics.insert(name.to_string(), value);
        self
    }

    pub fn spins(&self) -> Result<SpinVector> {
        self.best_spins.decode()
    }
}

/// JSON numbers use the shortest representation that parses back to the
/// same double, so values round-trip exactly.
pub fn write_report(doc: &ReportDocument, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => {
            let mut text = serde_json::to_string_pretty(doc).map_err(|e| Error::invalid(e.to_string()))?;
            text.push('\n');
            Ok(text)
        }
        ReportFormat::Csv => {
            let t = &doc.traces;
            let mut out = String::from("iteration,energy,variance,sigma\n");
            for k in 0..t.energy.len() {
                writeln!(out, "{},{},{},{}", k, t.energy[k], t.variance[k], t.sigma[k]).expect("string write");
            }
            Ok(out)
        }
    }
}

pub fn parse_report(text: &str) -> Result<ReportDocument> {
    serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::RngStream;

    #[test]
    fn maxcut_example() {
        let g = parse_maxcut("3 2\n1 2 1\n2 3 -1\n").unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edges(), &[(0, 1, 1.0), (1, 2, -1.0)]);
    }

    #[test]
    fn maxcut_edge_cases() {
        assert_eq!(parse_maxcut("4 0\n").unwrap().edge_count(), 0);
        let dup = parse_maxcut("3 2\n1 2 1\n1 2 1\n").unwrap_err();
        assert!(matches!(dup, Error::Parse { line: 3, .. }), "{dup:?}");
        let reversed = parse_maxcut("3 2\n1 2 1\n2 1 1\n").unwrap_err();
        assert!(matches!(reversed, Error::Parse { line: 3, .. }));
        assert!(matches!(
            parse_maxcut("3 1\n1 4 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_maxcut("3 1\n1 x 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(parse_maxcut("3 2\n1 2 1\n"), Err(Error::Parse { .. })));
        assert_eq!(parse_maxcut("3 1\n3 1 2.5\n").unwrap().edges(), &[(0, 2, 2.5)]);
        assert!(matches!(
            parse_maxcut_strict("3 1\n3 1 2.5\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn dimacs_example() {
        let f = parse_dimacs_cnf("c a comment\np cnf 3 1\n1 -2 3 0\n").unwrap();
        assert_eq!(f.clauses().len(), 1);
        let pol: Vec<f64> = f.clauses()[0].iter().map(Literal::polarity).collect();
        assert_eq!(pol, vec![1.0, -1.0, 1.0]);
        assert_eq!(f.clauses()[0][1].var, 1);
    }

    #[test]
    fn dimacs_errors() {
        assert!(matches!(
            parse_dimacs_cnf("p cnf 4 1\n1 2 3 4 0\n"),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(
            parse_dimacs_cnf("p cnf 3 2\n1 2 3 0\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(parse_dimacs_cnf("1 2 3 0\n"), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_dimacs_cnf("p cnf 3 1\n1 2 5 0\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        // clauses may span lines; a trailing "%" section is ignored
        let f = parse_dimacs_cnf("p cnf 3 1\n1 -2\n 3 0\n%\n0\n").unwrap();
        assert_eq!(f.clauses().len(), 1);
    }

    #[test]
    fn edge_list() {
        let g = parse_edge_list("% header\n1 2\n2 3 0.5\n").unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edges(), &[(0, 1, 1.0), (1, 2, 0.5)]);
        assert!(parse_edge_list("1 2\n2 1\n").is_err());
    }

    #[test]
    fn format_detection() {
        assert_eq!(
            InstanceFormat::detect("c x\np cnf 3 1\n1 2 3 0\n"),
            InstanceFormat::DimacsCnf
        );
        assert_eq!(
            InstanceFormat::detect("3 2\n1 2 1\n2 3 1\n"),
            InstanceFormat::MaxcutEdge
        );
        assert_eq!(InstanceFormat::detect("3 0\n"), InstanceFormat::MaxcutEdge);
        assert_eq!(InstanceFormat::detect("1 2\n2 3\n"), InstanceFormat::EdgeList);
        assert_eq!(InstanceFormat::detect("1 2 1.0\n"), InstanceFormat::EdgeList);
    }

    fn sample_report(n: usize, iterations: usize) -> SolveReport {
        let mut rng = RngStream::new(1);
        SolveReport {
            best_spins: SpinVector::new((0..n).map(|i| if i % 7 < 3 { 1 } else { -1 }).collect()).unwrap(),
            best_energy: -12.345678901234567,
            energy_trace: (0..iterations).map(|_| rng.uniform() - 0.5).collect(),
            variance_trace: (0..iterations).map(|_| rng.uniform()).collect(),
            sigma_trace: (0..iterations).map(|t| 1.0 / (t + 1) as f64).collect(),
            grad_norm_trace: vec![0.1; iterations],
            wall_time_per_iteration_ms: 0.25,
            seed_used: 42,
        }
    }

    #[test]
    fn json_round_trip_is_exact() {
        for n in [5, RLE_THRESHOLD + 1] {
            let r = sample_report(n, 20);
            let doc = ReportDocument::new("maxcut", "heo", serde_json::json!({"gamma": 2.0}), &r, false)
                .with_metric("cut", 1.0 / 3.0);
            let text = write_report(&doc, ReportFormat::Json).unwrap();
            let back = parse_report(&text).unwrap();
            assert_eq!(back, doc);
            assert_eq!(back.best_energy.to_bits(), r.best_energy.to_bits());
            assert_eq!(back.spins().unwrap(), r.best_spins);
            assert_eq!(
                n > RLE_THRESHOLD,
                matches!(back.best_spins, EncodedSpins::RunLength { .. })
            );
            assert!(!text.contains("wall_time"));
        }
    }

    #[test]
    fn csv_has_one_row_per_iteration() {
        let doc = ReportDocument::new("maxcut", "heo", serde_json::Value::Null, &sample_report(4, 37), true);
        let csv = write_report(&doc, ReportFormat::Csv).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 38);
        assert_eq!(lines[0], "iteration,energy,variance,sigma");
        let sigma: f64 = lines[3].split(',').nth(3).unwrap().parse().unwrap();
        assert_eq!(sigma, 1.0 / 3.0);
    }
}
