use serde::{Deserialize, Serialize};

use super::rng::RngStream;

/// Smallest smoothing width ever returned by a schedule.
pub const SIGMA_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleShape {
    Linear,
}

/// Per-iteration smoothing width σ_t = √τ_t.
///
/// The base value interpolates linearly from `start` at t = 0 towards `end`
/// at t = T. With `perturb_delta = δ > 0` each value is multiplied by a
/// factor drawn uniformly from [1 − δ, 1 + δ], which makes the schedule
/// non-monotone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaSchedule {
    pub start: f64,
    pub end: f64,
    pub shape: ScheduleShape,
    pub perturb_delta: f64,
}

impl SigmaSchedule {
    pub fn linear(start: f64, end: f64) -> Self {
        SigmaSchedule {
            start,
            end,
            shape: ScheduleShape::Linear,
            perturb_delta: 0.0,
        }
    }

    pub fn with_perturbation(mut self, delta: f64) -> Self {
        self.perturb_delta = delta;
        self
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.start.is_finite() && self.start > 0.0) {
            return Err(format!("sigma start must be positive, got {}", self.start));
        }
        if !(self.end.is_finite() && self.end >= 0.0) {
            return Err(format!("sigma end must be nonnegative, got {}", self.end));
        }
        if !(0.0..1.0).contains(&self.perturb_delta) {
            return Err(format!(
                "perturbation level must lie in [0, 1), got {}",
                self.perturb_delta
            ));
        }
        Ok(())
    }

    /// Deterministic part of σ_t.
    pub fn base_at(&self, t: usize, iterations: usize) -> f64 {
        assert!(t < iterations, "schedule index {t} out of range for T = {iterations}");
        match self.shape {
            ScheduleShape::Linear => {
                let frac = t as f64 / iterations as f64;
                self.start + (self.end - self.start) * frac
            }
        }
    }

    /// σ_t, drawing the perturbation factor from `rng` only when δ > 0.
    pub fn sigma_at(&self, t: usize, iterations: usize, rng: &mut RngStream) -> f64 {
        let mut sigma = self.base_at(t, iterations);
        if self.perturb_delta > 0.0 {
            let d = self.perturb_delta;
            sigma *= rng.uniform_range(1.0 - d, 1.0 + d);
        }
        sigma.max(SIGMA_FLOOR)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_examples() {
        let mut rng = RngStream::new(0);
        let s = SigmaSchedule::linear(2.0, 0.0);
        assert_eq!(s.sigma_at(0, 1000, &mut rng), 2.0);
        assert_eq!(s.sigma_at(500, 1000, &mut rng), 1.0);
        let s = SigmaSchedule::linear(std::f64::consts::SQRT_2, 0.0);
        let last = s.sigma_at(4999, 5000, &mut rng);
        assert!((last - std::f64::consts::SQRT_2 / 5000.0).abs() < 1e-15);
        assert!((last - 2.828e-4).abs() < 1e-7);
    }

    #[test]
    #[should_panic]
    fn index_past_end_panics() {
        SigmaSchedule::linear(1.0, 0.0).sigma_at(10, 10, &mut RngStream::new(0));
    }

    #[test]
    fn floor_applies() {
        let s = SigmaSchedule::linear(1e-9, 0.0);
        assert_eq!(s.sigma_at(0, 3, &mut RngStream::new(0)), SIGMA_FLOOR);
    }

    #[test]
    fn unperturbed_is_monotone_and_reproducible() {
        let s = SigmaSchedule::linear(2.0, 0.0);
        let a: Vec<f64> = {
            let mut r = RngStream::new(1);
            (0..100).map(|t| s.sigma_at(t, 100, &mut r)).collect()
        };
        let b: Vec<f64> = {
            let mut r = RngStream::new(99);
            (0..100).map(|t| s.sigma_at(t, 100, &mut r)).collect()
        };
        assert_eq!(a, b);
        assert!(a.windows(2).all(|w| w[1] < w[0]));
        assert!(a.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn perturbed_stays_within_band() {
        let s = SigmaSchedule::linear(2.0, 0.0).with_perturbation(0.5);
        let mut r = RngStream::new(5);
        let mut non_monotone = false;
        let mut prev = f64::INFINITY;
        for t in 0..200 {
            let base = s.base_at(t, 200);
            let v = s.sigma_at(t, 200, &mut r);
            assert!(v >= 0.5 * base - 1e-12 && v <= 1.5 * base + 1e-12);
            non_monotone |= v > prev;
            prev = v;
        }
        assert!(non_monotone);
    }

    #[test]
    fn validation() {
        assert!(SigmaSchedule::linear(0.0, 0.0).validate().is_err());
        assert!(SigmaSchedule::linear(1.0, -1.0).validate().is_err());
        assert!(SigmaSchedule::linear(1.0, 0.0)
            .with_perturbation(1.0)
            .validate()
            .is_err());
        assert!(SigmaSchedule::linear(1.0, 0.0).validate().is_ok());
    }
}
