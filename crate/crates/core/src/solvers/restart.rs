use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{heo_momentum_solve, heo_solve, mcge_solve, sa_solve, AnnealSchedule, Problem};
use crate::error::{Error, Result};
use crate::numeric::{RngStream, SolveReport, SolverConfig};

/// A solver choice with its solver-specific settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Solver {
    Heo,
    HeoMomentum,
    Mcge { samples: usize },
    Sa { schedule: AnnealSchedule },
}

impl Solver {
    pub fn name(&self) -> &'static str {
        match self {
            Solver::Heo => "heo",
            Solver::HeoMomentum => "heo-m",
            Solver::Mcge { .. } => "mcge",
            Solver::Sa { .. } => "sa",
        }
    }
}

pub fn solve(
    solver: &Solver,
    problem: &dyn Problem,
    config: &SolverConfig,
    rng: &mut RngStream,
) -> Result<SolveReport> {
    match solver {
        Solver::Heo => heo_solve(problem, config, rng),
        Solver::HeoMomentum => heo_momentum_solve(problem, config, rng),
        Solver::Mcge { samples } => mcge_solve(problem, config, *samples, rng),
        Solver::Sa { schedule } => sa_solve(problem, config, schedule, rng),
    }
}

/// Runs `count` independent solves and keeps the lowest `best_energy`
/// (earliest run on ties). Run 0 continues `rng` as given, so `count = 1`
/// is the same as a single [`solve`]; run r > 0 uses `rng.child(r)`.
/// Runs execute in parallel; the result does not depend on scheduling.
pub fn restart_best(
    solver: &Solver,
    problem: &dyn Problem,
    config: &SolverConfig,
    count: usize,
    rng: &RngStream,
) -> Result<SolveReport> {
    if count == 0 {
        return Err(Error::Config("restart count must be at least 1".into()));
    }
    let reports = (0..count)
        .into_par_iter()
        .map(|r| {
            let mut child = if r == 0 { rng.clone() } else { rng.child(r as u64) };
            solve(solver, problem, config, &mut child)
        })
        .collect::<Result<Vec<_>>>()?;
    let best = reports
        .into_iter()
        .reduce(|best, r| if r.best_energy < best.best_energy { r } else { best })
        .expect("count >= 1");
    Ok(best)
}
