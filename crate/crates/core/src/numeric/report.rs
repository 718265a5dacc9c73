use serde::{Deserialize, Serialize};

use super::schedule::SigmaSchedule;
use super::vectors::SpinVector;
use crate::error::{Error, Result};

/// Settings shared by every solver loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub iterations: usize,
    pub step_size: f64,
    pub momentum: f64,
    pub schedule: SigmaSchedule,
    pub seed: u64,
    pub restarts: usize,
}

impl SolverConfig {
    pub fn new(iterations: usize, step_size: f64, schedule: SigmaSchedule) -> Self {
        SolverConfig {
            iterations,
            step_size,
            momentum: 0.0,
            schedule,
            seed: 0,
            restarts: 1,
        }
    }

    pub fn with_momentum(mut self, momentum: f64) -> Self {
        self.momentum = momentum;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be at least 1".into()));
        }
        if !(self.step_size.is_finite() && self.step_size > 0.0) {
            return Err(Error::Config(format!(
                "step size must be positive, got {}",
                self.step_size
            )));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::Config(format!(
                "momentum must lie in [0, 1), got {}",
                self.momentum
            )));
        }
        if self.restarts == 0 {
            return Err(Error::Config("restarts must be at least 1".into()));
        }
        self.schedule.validate().map_err(Error::Config)
    }
}

/// Outcome of one solver run.
///
/// Traces hold one entry per iteration. `energy_trace[t]` is the energy of
/// the binarized parameters after update t; `variance_trace[t]` is V(θ) at
/// the same point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub best_spins: SpinVector,
    pub best_energy: f64,
    pub energy_trace: Vec<f64>,
    pub variance_trace: Vec<f64>,
    pub sigma_trace: Vec<f64>,
    pub grad_norm_trace: Vec<f64>,
    pub wall_time_per_iteration_ms: f64,
    pub seed_used: u64,
}

impl SolveReport {
    pub fn iterations(&self) -> usize {
        self.energy_trace.len()
    }

    pub fn final_variance(&self) -> f64 {
        self.variance_trace.last().copied().unwrap_or(f64::NAN)
    }

    pub fn final_energy(&self) -> f64 {
        self.energy_trace.last().copied().unwrap_or(self.best_energy)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        let base = SolverConfig::new(10, 1.0, SigmaSchedule::linear(1.0, 0.0));
        assert!(base.validate().is_ok());
        assert!(SolverConfig { iterations: 0, ..base }.validate().is_err());
        assert!(SolverConfig { step_size: 0.0, ..base }.validate().is_err());
        assert!(base.with_momentum(1.0).validate().is_err());
        assert!(base.with_momentum(-0.1).validate().is_err());
        assert!(base.with_restarts(0).validate().is_err());
    }
}
