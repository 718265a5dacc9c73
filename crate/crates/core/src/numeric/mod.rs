//! Numeric primitives shared by every solver: relaxed parameter vectors,
//! spin vectors, the error function, smoothing schedules, seeded random
//! streams and run reports.

mod erf;
mod report;
mod rng;
mod schedule;
mod stats;
mod vectors;

pub use erf::{erf, erf_derivative, FRAC_2_SQRT_PI};
pub use report::{SolveReport, SolverConfig};
pub use rng::{derive_seed, RngStream};
pub use schedule::{ScheduleShape, SigmaSchedule, SIGMA_FLOOR};
pub use stats::{linear_fit, mean_std, median, LinearFit};
pub use vectors::{binarize, project_unit_cube, total_variance, ParamVector, SpinVector};
