//! The `heo` command line.
//!
//! Every subcommand resolves its settings from a per-problem preset and then
//! applies any flags given, and the fully resolved settings are echoed in
//! the report. Exit codes: 0 success, 2 usage, parse or config error, 3 the
//! solve itself failed.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::io::{write_report, Instance, InstanceFile, ReportDocument, ReportFormat};
use crate::numeric::{
    derive_seed, linear_fit, mean_std, median, RngStream, SigmaSchedule, SolveReport, SolverConfig, SpinVector,
};
use crate::oracle::{brute_force_min, brute_force_mvc, OracleResult};
use crate::problems::{
    cover_size, is_vertex_cover, maxcut_problem, mvc_problem, relative_loss, sat3_problem, ternary_problem,
    toynn_problem, varselect_pipeline, violated_clauses, CnfFormula, RegressionDataset, TernaryDataset, WeightedGraph,
};
use crate::solvers::{restart_best, AnnealSchedule, Problem, Solver};

/// Environment variable naming the directory reports go to when no
/// `--output` is given.
pub const OUTPUT_DIR_ENV: &str = "HEO_OUTPUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "heo",
    version,
    about = "Heat-diffusion optimization for binary and mixed problems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Max-cut on a weighted graph file.
    Maxcut(GraphCmd),
    /// 3-SAT on a DIMACS CNF file.
    Sat(GraphCmd),
    /// Minimum vertex cover on a graph file.
    Mvc(MvcCmd),
    /// Train a ternary single-layer perceptron on a generated dataset.
    Ternary(TernaryCmd),
    /// Sparse linear regression variable selection on a generated dataset.
    Varselect(VarselectCmd),
    /// Minimize a random sigmoid network over binary inputs.
    Toynn(ToynnCmd),
    /// Exhaustive ground truth for small instances.
    Oracle(OracleCmd),
    /// Repeated seeded runs aggregated into a comparison table.
    Bench(BenchCmd),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum SolverName {
    Heo,
    #[value(name = "heo-m")]
    #[serde(rename = "heo-m")]
    HeoM,
    Mcge,
    Sa,
}

impl SolverName {
    fn label(self) -> &'static str {
        match self {
            SolverName::Heo => "heo",
            SolverName::HeoM => "heo-m",
            SolverName::Mcge => "mcge",
            SolverName::Sa => "sa",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Table,
    Json,
    Csv,
}

/// Numeric settings shared by all solving subcommands. Unset values come
/// from the subcommand's preset.
#[derive(Debug, Clone, Args)]
pub struct Tuning {
    /// Iteration count T.
    #[arg(short = 'T', long)]
    pub iterations: Option<usize>,
    /// Step size γ.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Momentum κ.
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub sigma_start: Option<f64>,
    #[arg(long)]
    pub sigma_end: Option<f64>,
    /// Multiply each σ_t by a factor drawn from [1 − δ, 1 + δ].
    #[arg(long)]
    pub perturb_delta: Option<f64>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Samples per iteration M for the score-function estimator.
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    /// Report path; defaults to stdout, or to $HEO_OUTPUT_DIR when set.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: FormatArg,
    /// Include wall-clock time per iteration (makes reports run-dependent).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct GraphCmd {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub solver: Option<SolverName>,
    #[command(flatten)]
    pub tuning: Tuning,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct MvcCmd {
    #[command(flatten)]
    pub graph: GraphCmd,
    /// Final penalty weight; the weight rises linearly from 0.
    #[arg(long, default_value_t = 2.5)]
    pub lambda_max: f64,
}

#[derive(Debug, Clone, Args)]
pub struct TernaryCmd {
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    /// Number of input/output pairs.
    #[arg(long, default_value_t = 200)]
    pub data_size: usize,
    #[arg(long, default_value_t = 0)]
    pub data_seed: u64,
    #[arg(long, value_enum)]
    pub solver: Option<SolverName>,
    #[command(flatten)]
    pub tuning: Tuning,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct VarselectCmd {
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    /// Training samples.
    #[arg(long, default_value_t = 1000)]
    pub data_size: usize,
    /// Held-out samples used only for the reported test error.
    #[arg(long, default_value_t = 1000)]
    pub test_size: usize,
    /// Probability that a coefficient is nonzero.
    #[arg(long, default_value_t = 0.1)]
    pub q: f64,
    /// Noise standard deviation.
    #[arg(long, default_value_t = 0.1)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub data_seed: u64,
    #[arg(long, default_value_t = 100)]
    pub ensemble: usize,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[command(flatten)]
    pub tuning: Tuning,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct ToynnCmd {
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 20)]
    pub m: usize,
    /// Seed for the network weights (the solver uses --seed).
    #[arg(long, default_value_t = 0)]
    pub instance_seed: u64,
    #[arg(long, value_enum)]
    pub solver: Option<SolverName>,
    #[command(flatten)]
    pub tuning: Tuning,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleTarget {
    Maxcut,
    Mvc,
    Sat,
}

#[derive(Debug, Clone, Args)]
pub struct OracleCmd {
    #[arg(short, long)]
    pub input: PathBuf,
    /// What to minimize; inferred from the file format when omitted.
    #[arg(long, value_enum)]
    pub problem: Option<OracleTarget>,
    /// Number of minimizers listed in the output.
    #[arg(long, default_value_t = 16)]
    pub list: usize,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchProblem {
    Maxcut,
    Sat,
    Toynn,
}

#[derive(Debug, Clone, Args)]
pub struct BenchCmd {
    #[arg(long, value_enum, default_value = "maxcut")]
    pub problem: BenchProblem,
    /// Problem sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "200")]
    pub n: Vec<usize>,
    /// Edge probability of the random ±1 graphs.
    #[arg(long, default_value_t = 0.5)]
    pub density: f64,
    /// Hidden width of toy networks.
    #[arg(long, default_value_t = 20)]
    pub m: usize,
    /// Clause-to-variable ratio of random 3-SAT instances.
    #[arg(long, default_value_t = 4.26)]
    pub ratio: f64,
    /// Seeded instances per size.
    #[arg(long, default_value_t = 1)]
    pub instances: usize,
    /// Seeded runs per instance and solver.
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    /// Solvers to compare, comma separated; defaults to the problem's own.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub solvers: Vec<SolverName>,
    #[command(flatten)]
    pub tuning: Tuning,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    pub format: TableFormat,
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Maxcut,
    Sat,
    Mvc,
    Ternary,
    Varselect,
    Toynn,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Maxcut => "maxcut",
            ProblemKind::Sat => "sat",
            ProblemKind::Mvc => "mvc",
            ProblemKind::Ternary => "ternary",
            ProblemKind::Varselect => "varselect",
            ProblemKind::Toynn => "toynn",
        }
    }

    pub fn default_solver(self) -> SolverName {
        match self {
            ProblemKind::Maxcut | ProblemKind::Mvc => SolverName::Heo,
            _ => SolverName::HeoM,
        }
    }
}

/// Fully resolved settings of one solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Settings {
    pub solver: SolverName,
    pub iterations: usize,
    pub gamma: f64,
    pub kappa: f64,
    pub sigma_start: f64,
    pub sigma_end: f64,
    pub perturb_delta: f64,
    pub restarts: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

impl Settings {
    /// Published settings for each application, or conservative choices where
    /// none are given.
    pub fn preset(problem: ProblemKind, solver: SolverName) -> Settings {
        use ProblemKind as P;
        let sqrt2 = std::f64::consts::SQRT_2;
        let (iterations, gamma, kappa, sigma_start, restarts) = match problem {
            P::Maxcut => (5000, 2.0, 0.0, 1.0, 10),
            P::Sat => (5000, 2.0, 0.9999, sqrt2, 1),
            P::Mvc => (200, 2.5, 0.0, sqrt2, 1),
            P::Ternary => (10000, 0.5, 0.999, sqrt2, 1),
            P::Varselect => (2000, 1.0, 0.999, 2.0, 1),
            P::Toynn => (5000, 2.0, 0.9999, 2.0, 1),
        };
        let base = Settings {
            solver,
            iterations,
            gamma,
            kappa,
            sigma_start,
            sigma_end: 0.0,
            perturb_delta: 0.0,
            restarts,
            seed: 0,
            samples: None,
        };
        match solver {
            SolverName::Heo => Settings { kappa: 0.0, ..base },
            SolverName::HeoM | SolverName::Sa => base,
            SolverName::Mcge => {
                let (iterations, gamma, kappa) = match problem {
                    P::Toynn => (50000, 1e-6, 0.9),
                    P::Ternary => (10000, 1e-7, 0.9999),
                    _ => (iterations, 1e-3, 0.0),
                };
                Settings {
                    iterations,
                    gamma,
                    kappa,
                    samples: Some(10),
                    ..base
                }
            }
        }
    }

    fn apply(mut self, t: &Tuning) -> Settings {
        self.iterations = t.iterations.unwrap_or(self.iterations);
        self.gamma = t.gamma.unwrap_or(self.gamma);
        self.kappa = t.kappa.unwrap_or(self.kappa);
        self.sigma_start = t.sigma_start.unwrap_or(self.sigma_start);
        self.sigma_end = t.sigma_end.unwrap_or(self.sigma_end);
        self.perturb_delta = t.perturb_delta.unwrap_or(self.perturb_delta);
        self.restarts = t.restarts.unwrap_or(self.restarts);
        self.seed = t.seed;
        if self.solver == SolverName::Mcge {
            self.samples = Some(t.samples.or(self.samples).unwrap_or(10));
        }
        self
    }

    pub fn resolve(problem: ProblemKind, solver: Option<SolverName>, tuning: &Tuning) -> Settings {
        Settings::preset(problem, solver.unwrap_or(problem.default_solver())).apply(tuning)
    }

    pub fn config(&self) -> SolverConfig {
        SolverConfig::new(
            self.iterations,
            self.gamma,
            SigmaSchedule::linear(self.sigma_start, self.sigma_end).with_perturbation(self.perturb_delta),
        )
        .with_momentum(self.kappa)
        .with_seed(self.seed)
        .with_restarts(self.restarts)
    }

    pub fn solver(&self) -> Solver {
        match self.solver {
            SolverName::Heo => Solver::Heo,
            SolverName::HeoM => Solver::HeoMomentum,
            SolverName::Mcge => Solver::Mcge {
                samples: self.samples.unwrap_or(10),
            },
            SolverName::Sa => Solver::Sa {
                schedule: AnnealSchedule::default(),
            },
        }
    }

    fn validate(&self) -> Result<()> {
        let cfg = self.config();
        if self.solver == SolverName::Sa {
            // annealing ignores γ and σ
            if cfg.iterations == 0 || cfg.restarts == 0 {
                return Err(Error::Config("iterations and restarts must be at least 1".into()));
            }
            return Ok(());
        }
        if self.samples == Some(0) {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        cfg.validate()
    }

    /// Runs the configured solver with restarts from `--seed`.
    pub fn run(&self, problem: &dyn Problem) -> Result<SolveReport> {
        self.validate()?;
        restart_best(
            &self.solver(),
            problem,
            &self.config(),
            self.restarts,
            &RngStream::new(self.seed),
        )
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NonFiniteGradient { .. } | Error::NonFinite(_) | Error::LeastSquares(_) | Error::NotACover { .. } => 3,
        _ => 2,
    }
}

/// Parses `args` (including the program name) and executes the command,
/// writing reports to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match execute(&cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Executes a parsed command.
pub fn execute(command: &Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Maxcut(c) => cmd_maxcut(c, out),
        Command::Sat(c) => cmd_sat(c, out),
        Command::Mvc(c) => cmd_mvc(c, out),
        Command::Ternary(c) => cmd_ternary(c, out),
        Command::Varselect(c) => cmd_varselect(c, out),
        Command::Toynn(c) => cmd_toynn(c, out),
        Command::Oracle(c) => cmd_oracle(c, out),
        Command::Bench(c) => cmd_bench(c, out),
    }
}

fn load_graph(path: &Path) -> Result<WeightedGraph> {
    match InstanceFile::load(path)?.1 {
        Instance::Graph(g) => Ok(g),
        Instance::Cnf(_) => Err(Error::invalid(format!(
            "{} is a CNF formula, expected a graph",
            path.display()
        ))),
    }
}

fn load_cnf(path: &Path) -> Result<CnfFormula> {
    match InstanceFile::load(path)?.1 {
        Instance::Cnf(f) => Ok(f),
        Instance::Graph(_) => Err(Error::invalid(format!(
            "{} is a graph, expected a DIMACS CNF file",
            path.display()
        ))),
    }
}

fn config_echo(settings: &Settings, extra: Value) -> Value {
    let mut v = serde_json::to_value(settings).expect("settings serialize");
    if let (Value::Object(map), Value::Object(more)) = (&mut v, extra) {
        map.extend(more);
    }
    v
}

fn emit_text(text: &str, output: Option<&Path>, default_name: &str, out: &mut dyn Write) -> Result<()> {
    let target = match output {
        Some(p) => Some(p.to_path_buf()),
        None => std::env::var_os(OUTPUT_DIR_ENV).map(|dir| PathBuf::from(dir).join(default_name)),
    };
    match target {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)
                    .map_err(|e| Error::invalid(format!("cannot create {}: {e}", parent.display())))?;
            }
            std::fs::write(&path, text).map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display())))
        }
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Error::invalid(format!("cannot write report: {e}"))),
    }
}

fn emit(doc: &ReportDocument, output: &Output, out: &mut dyn Write) -> Result<()> {
    let (format, ext) = match output.format {
        FormatArg::Json => (ReportFormat::Json, "json"),
        FormatArg::Csv => (ReportFormat::Csv, "csv"),
    };
    let text = write_report(doc, format)?;
    let name = format!("{}-{}-{}.{ext}", doc.problem, doc.solver, doc.seed);
    emit_text(&text, output.output.as_deref(), &name, out)
}

fn cmd_maxcut(c: &GraphCmd, out: &mut dyn Write) -> Result<()> {
    let graph = load_graph(&c.input)?;
    let settings = Settings::resolve(ProblemKind::Maxcut, c.solver, &c.tuning);
    let problem = maxcut_problem(&graph);
    let report = settings.run(&problem)?;
    let config = config_echo(&settings, json!({ "input": c.input.display().to_string() }));
    let doc = ReportDocument::new("maxcut", settings.solver.label(), config, &report, c.output.timing)
        .with_metric("cut_value", problem.cut_value(&report.best_spins))
        .with_metric("total_weight", graph.total_weight())
        .with_metric("vertices", graph.vertex_count() as f64)
        .with_metric("edges", graph.edge_count() as f64);
    emit(&doc, &c.output, out)
}

fn cmd_sat(c: &GraphCmd, out: &mut dyn Write) -> Result<()> {
    let formula = load_cnf(&c.input)?;
    let settings = Settings::resolve(ProblemKind::Sat, c.solver, &c.tuning);
    let problem = sat3_problem(&formula);
    let report = settings.run(&problem)?;
    let violated = violated_clauses(&formula, &report.best_spins);
    let config = config_echo(&settings, json!({ "input": c.input.display().to_string() }));
    let doc = ReportDocument::new("sat", settings.solver.label(), config, &report, c.output.timing)
        .with_metric("satisfied_fraction", problem.satisfied_fraction(&report.best_spins))
        .with_metric("violated_clauses", violated as f64)
        .with_metric("clauses", formula.clauses().len() as f64);
    emit(&doc, &c.output, out)
}

fn cmd_mvc(c: &MvcCmd, out: &mut dyn Write) -> Result<()> {
    let g = &c.graph;
    let graph = load_graph(&g.input)?;
    let settings = Settings::resolve(ProblemKind::Mvc, g.solver, &g.tuning);
    let problem = mvc_problem(&graph, c.lambda_max)?;
    let mut report = settings.run(&problem)?;
    // annealing and score-function runs skip post-processing; repair here so
    // every reported selection is a cover
    report.best_spins = problem.post_process(report.best_spins.clone());
    report.best_energy = problem.spin_energy(&report.best_spins);
    if !is_vertex_cover(&graph, &report.best_spins) {
        return Err(Error::NotACover {
            uncovered: crate::problems::uncovered_edges(&graph, &report.best_spins),
        });
    }
    let config = config_echo(
        &settings,
        json!({ "input": g.input.display().to_string(), "lambda_max": c.lambda_max }),
    );
    let doc = ReportDocument::new("mvc", settings.solver.label(), config, &report, g.output.timing)
        .with_metric("cover_size", cover_size(&report.best_spins) as f64)
        .with_metric("vertices", graph.vertex_count() as f64)
        .with_metric("edges", graph.edge_count() as f64);
    emit(&doc, &g.output, out)
}

fn cmd_ternary(c: &TernaryCmd, out: &mut dyn Write) -> Result<()> {
    let data = TernaryDataset::generate(c.n, c.m, c.data_size, c.data_seed)?;
    let settings = Settings::resolve(ProblemKind::Ternary, c.solver, &c.tuning);
    let problem = ternary_problem(&data)?;
    let report = settings.run(&problem)?;
    let config = config_echo(
        &settings,
        json!({ "n": c.n, "m": c.m, "data_size": c.data_size, "data_seed": c.data_seed }),
    );
    let doc = ReportDocument::new("ternary", settings.solver.label(), config, &report, c.output.timing)
        .with_metric("weight_accuracy", problem.accuracy(&report.best_spins))
        .with_metric("mse", report.best_energy);
    emit(&doc, &c.output, out)
}

fn cmd_varselect(c: &VarselectCmd, out: &mut dyn Write) -> Result<()> {
    let all = RegressionDataset::generate(c.n, c.data_size + c.test_size, c.q, c.noise, c.data_seed)?;
    let (train, test) = all.split(c.data_size);
    let settings = Settings::resolve(ProblemKind::Varselect, Some(SolverName::HeoM), &c.tuning);
    settings.validate()?;
    let started = std::time::Instant::now();
    let model = varselect_pipeline(&train, c.ensemble, c.folds, &settings.config(), settings.seed)?;
    let elapsed = started.elapsed().as_secs_f64() * 1e3;
    let spins = SpinVector::new(model.indicator.iter().map(|&b| if b { 1 } else { -1 }).collect())?;
    let report = SolveReport {
        best_spins: spins,
        best_energy: model.validation_mse,
        energy_trace: Vec::new(),
        variance_trace: Vec::new(),
        sigma_trace: Vec::new(),
        grad_norm_trace: Vec::new(),
        wall_time_per_iteration_ms: elapsed / (settings.iterations * c.ensemble) as f64,
        seed_used: settings.seed,
    };
    let config = config_echo(
        &settings,
        json!({
            "n": c.n, "data_size": c.data_size, "test_size": c.test_size, "q": c.q, "noise": c.noise,
            "data_seed": c.data_seed, "ensemble": c.ensemble, "folds": c.folds,
        }),
    );
    let mut doc = ReportDocument::new("varselect", "heo-m", config, &report, c.output.timing)
        .with_metric(
            "indicator_accuracy",
            crate::problems::indicator_accuracy(&model.indicator, &train.beta_star)?,
        )
        .with_metric("validation_mse", model.validation_mse)
        .with_metric("candidates", model.candidates as f64)
        .with_metric("noise_floor", c.noise * c.noise);
    if !test.is_empty() {
        doc = doc.with_metric("test_mse", model.test_mse(&test));
    }
    emit(&doc, &c.output, out)
}

fn cmd_toynn(c: &ToynnCmd, out: &mut dyn Write) -> Result<()> {
    let problem = toynn_problem(c.n, c.m, c.instance_seed)?;
    let settings = Settings::resolve(ProblemKind::Toynn, c.solver, &c.tuning);
    let report = settings.run(&problem)?;
    let config = config_echo(
        &settings,
        json!({ "n": c.n, "m": c.m, "instance_seed": c.instance_seed }),
    );
    let doc = ReportDocument::new("toynn", settings.solver.label(), config, &report, c.output.timing)
        .with_metric("final_variance", report.final_variance());
    emit(&doc, &c.output, out)
}

#[derive(Serialize)]
struct OracleSummary<'a> {
    problem: &'a str,
    input: String,
    optimum: f64,
    minimizer_count: u64,
    enumerated: u64,
    minimizers: Vec<Vec<i8>>,
}

fn cmd_oracle(c: &OracleCmd, out: &mut dyn Write) -> Result<()> {
    let (_, instance) = InstanceFile::load(&c.input)?;
    let target = match (c.problem, &instance) {
        (Some(t), _) => t,
        (None, Instance::Cnf(_)) => OracleTarget::Sat,
        (None, Instance::Graph(_)) => OracleTarget::Maxcut,
    };
    let result: OracleResult = match (target, &instance) {
        (OracleTarget::Sat, Instance::Cnf(f)) => brute_force_min(&sat3_problem(f), f.variable_count())?,
        (OracleTarget::Maxcut, Instance::Graph(g)) => brute_force_min(&maxcut_problem(g), g.vertex_count())?,
        (OracleTarget::Mvc, Instance::Graph(g)) => brute_force_mvc(g)?,
        _ => return Err(Error::invalid("input file does not match the requested problem")),
    };
    let name = match target {
        OracleTarget::Maxcut => "maxcut",
        OracleTarget::Mvc => "mvc",
        OracleTarget::Sat => "sat",
    };
    let summary = OracleSummary {
        problem: name,
        input: c.input.display().to_string(),
        optimum: result.optimum,
        minimizer_count: result.minimizer_count,
        enumerated: result.enumerated,
        minimizers: result
            .minimizers
            .iter()
            .take(c.list)
            .map(|s| s.as_slice().to_vec())
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&summary).map_err(|e| Error::invalid(e.to_string()))?;
    text.push('\n');
    emit_text(&text, c.output.as_deref(), &format!("oracle-{name}.json"), out)
}

/// One (size, instance, solver variant) cell of a benchmark.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub instance: usize,
    pub solver: String,
    pub perturb_delta: f64,
    pub best: f64,
    pub median: f64,
    pub mean: f64,
    pub std: f64,
    pub relative_loss: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ms_per_iteration: Option<f64>,
}

enum BenchInstance {
    Graph(crate::problems::MaxCut),
    Sat(crate::problems::Sat3),
    Toy(crate::problems::ToyNetwork),
}

impl BenchInstance {
    fn problem(&self) -> &dyn Problem {
        match self {
            BenchInstance::Graph(p) => p,
            BenchInstance::Sat(p) => p,
            BenchInstance::Toy(p) => p,
        }
    }
}

fn bench_instance(c: &BenchCmd, n: usize, seed: u64) -> Result<BenchInstance> {
    let mut rng = RngStream::new(seed);
    Ok(match c.problem {
        BenchProblem::Maxcut => {
            if !(c.density > 0.0 && c.density <= 1.0) {
                return Err(Error::Config(format!("density must lie in (0, 1], got {}", c.density)));
            }
            BenchInstance::Graph(maxcut_problem(&WeightedGraph::random_signed(n, c.density, &mut rng)))
        }
        BenchProblem::Sat => {
            let clauses = (c.ratio * n as f64).round() as usize;
            if n < 3 {
                return Err(Error::Config("random 3-SAT needs at least 3 variables".into()));
            }
            BenchInstance::Sat(sat3_problem(&CnfFormula::random(n, clauses, &mut rng)))
        }
        BenchProblem::Toynn => BenchInstance::Toy(toynn_problem(n, c.m, seed)?),
    })
}

/// Runs the benchmark grid. Every run's seed is derived from (`--seed`,
/// size, instance, trial), so variants are compared on identical streams.
pub fn bench_rows(c: &BenchCmd) -> Result<Vec<BenchRow>> {
    if c.trials == 0 || c.instances == 0 || c.n.is_empty() {
        return Err(Error::Config(
            "bench needs at least one size, instance and trial".into(),
        ));
    }
    let kind = match c.problem {
        BenchProblem::Maxcut => ProblemKind::Maxcut,
        BenchProblem::Sat => ProblemKind::Sat,
        BenchProblem::Toynn => ProblemKind::Toynn,
    };
    let solvers = if c.solvers.is_empty() {
        vec![kind.default_solver()]
    } else {
        c.solvers.clone()
    };
    let delta = c.tuning.perturb_delta.unwrap_or(0.0);
    let mut variants = Vec::new();
    for &s in &solvers {
        let base = Settings::resolve(
            kind,
            Some(s),
            &Tuning {
                perturb_delta: Some(0.0),
                ..c.tuning.clone()
            },
        );
        base.validate()?;
        variants.push(base);
        if delta > 0.0 && matches!(s, SolverName::Heo | SolverName::HeoM) {
            let perturbed = Settings {
                perturb_delta: delta,
                ..base
            };
            perturbed.validate()?;
            variants.push(perturbed);
        }
    }

    let mut rows = Vec::new();
    for &n in &c.n {
        for k in 0..c.instances {
            let instance_seed = derive_seed(derive_seed(c.tuning.seed, n as u64), k as u64);
            let instance = bench_instance(c, n, instance_seed)?;
            let mut cells = Vec::new();
            for v in &variants {
                let mut energies = Vec::with_capacity(c.trials);
                let mut times = Vec::with_capacity(c.trials);
                for trial in 0..c.trials {
                    let run = Settings {
                        seed: derive_seed(instance_seed, 1000 + trial as u64),
                        ..*v
                    };
                    // a failed run is recorded as +inf and the grid continues
                    match run.run(instance.problem()) {
                        Ok(r) => {
                            energies.push(r.best_energy);
                            times.push(r.wall_time_per_iteration_ms);
                        }
                        Err(_) => energies.push(f64::INFINITY),
                    }
                }
                let finite: Vec<f64> = energies.iter().copied().filter(|e| e.is_finite()).collect();
                let (mean, std) = mean_std(&finite);
                cells.push(BenchRow {
                    n,
                    instance: k,
                    solver: v.solver.label().to_string(),
                    perturb_delta: v.perturb_delta,
                    best: energies.iter().copied().fold(f64::INFINITY, f64::min),
                    median: median(&energies),
                    mean,
                    std,
                    relative_loss: f64::NAN,
                    ms_per_iteration: c.timing.then(|| mean_std(&times).0),
                });
            }
            let bests: Vec<f64> = cells.iter().map(|r| r.best).collect();
            if let Ok(losses) = relative_loss(&bests) {
                for (row, loss) in cells.iter_mut().zip(losses) {
                    row.relative_loss = loss;
                }
            }
            rows.extend(cells);
        }
    }
    Ok(rows)
}

fn render_table(rows: &[BenchRow], timing: bool) -> String {
    use std::fmt::Write as _;
    let mut s = String::new();
    let _ = write!(
        s,
        "{:>8} {:>4} {:>6} {:>6} {:>14} {:>14} {:>14} {:>12} {:>10}",
        "n", "inst", "solver", "delta", "best", "median", "mean", "std", "rel_loss"
    );
    if timing {
        let _ = write!(s, " {:>10}", "ms/iter");
    }
    s.push('\n');
    for r in rows {
        let _ = write!(
            s,
            "{:>8} {:>4} {:>6} {:>6} {:>14.6} {:>14.6} {:>14.6} {:>12.6} {:>10.6}",
            r.n, r.instance, r.solver, r.perturb_delta, r.best, r.median, r.mean, r.std, r.relative_loss
        );
        if let Some(ms) = r.ms_per_iteration {
            let _ = write!(s, " {ms:>10.4}");
        }
        s.push('\n');
    }
    if timing {
        let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
        let ys: Vec<f64> = rows.iter().filter_map(|r| r.ms_per_iteration).collect();
        if let Some(fit) = linear_fit(&xs, &ys) {
            let _ = writeln!(
                s,
                "ms/iter ~ {:.3e}*n + {:.3e}  (R^2 = {:.4})",
                fit.slope, fit.intercept, fit.r_squared
            );
        }
    }
    s
}

fn cmd_bench(c: &BenchCmd, out: &mut dyn Write) -> Result<()> {
    let rows = bench_rows(c)?;
    let (text, ext) = match c.format {
        TableFormat::Table => (render_table(&rows, c.timing), "txt"),
        TableFormat::Json => {
            let mut t = serde_json::to_string_pretty(&rows).map_err(|e| Error::invalid(e.to_string()))?;
            t.push('\n');
            (t, "json")
        }
        TableFormat::Csv => {
            use std::fmt::Write as _;
            let mut t = String::from("n,instance,solver,perturb_delta,best,median,mean,std,relative_loss");
            t.push_str(if c.timing { ",ms_per_iteration\n" } else { "\n" });
            for r in &rows {
                let _ = write!(
                    t,
                    "{},{},{},{},{},{},{},{},{}",
                    r.n, r.instance, r.solver, r.perturb_delta, r.best, r.median, r.mean, r.std, r.relative_loss
                );
                if let Some(ms) = r.ms_per_iteration {
                    let _ = write!(t, ",{ms}");
                }
                t.push('\n');
            }
            (t, "csv")
        }
    };
    emit_text(&text, c.output.as_deref(), &format!("bench.{ext}"), out)
}
