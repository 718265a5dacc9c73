//! Binary and mixed-variable combinatorial optimization by gradient descent
//! on a heat-smoothed Bernoulli relaxation.
//!
//! A target f over spins s ∈ {−1, 1}^n is relaxed to θ ∈ [0, 1]^n. Each
//! iteration draws x ~ U[0, 1]^n and descends the gradient of
//! f(erf((θ − x)/σ)) while σ shrinks to zero; the answer is the rounded θ.
//!
//! ```
//! use heo::numeric::{RngStream, SigmaSchedule, SolverConfig};
//! use heo::problems::{maxcut_problem, WeightedGraph};
//! use heo::solvers::heo_solve;
//!
//! let ring = WeightedGraph::unweighted(6, (0..6).map(|i| (i, (i + 1) % 6))).unwrap();
//! let problem = maxcut_problem(&ring);
//! let config = SolverConfig::new(500, 2.0, SigmaSchedule::linear(1.0, 0.0));
//! let report = heo_solve(&problem, &config, &mut RngStream::new(7)).unwrap();
//! assert_eq!(problem.cut_value(&report.best_spins), 6.0);
//! ```

pub mod cli;
pub mod error;
pub mod io;
pub mod numeric;
pub mod oracle;
pub mod poly;
pub mod problems;
pub mod solvers;

pub use error::{Error, Result};
