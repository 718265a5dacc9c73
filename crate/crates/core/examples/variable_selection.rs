//! Sparse linear regression: an ensemble of momentum HeO runs proposes
//! supports, cross-validation picks one, and OLS refits it.
//!
//! cargo run --release --example variable_selection

use heo::numeric::{SigmaSchedule, SolverConfig};
use heo::problems::{indicator_accuracy, varselect_pipeline, RegressionDataset};

fn main() -> heo::Result<()> {
    let all = RegressionDataset::generate(30, 1600, 0.15, 0.1, 3)?;
    let (train, test) = all.split(600);
    let config = SolverConfig::new(2000, 1.0, SigmaSchedule::linear(2.0, 0.0)).with_momentum(0.999);
    let model = varselect_pipeline(&train, 100, 5, &config, 9)?;

    let chosen: Vec<usize> = (0..model.indicator.len()).filter(|&i| model.indicator[i]).collect();
    let truth: Vec<usize> = (0..train.beta_star.len())
        .filter(|&i| train.beta_star[i] != 0.0)
        .collect();
    println!("true support:     {truth:?}");
    println!(
        "selected support: {chosen:?} ({} distinct candidates)",
        model.candidates
    );
    println!(
        "indicator accuracy {:.3}, test MSE {:.5} against noise variance {:.5}",
        indicator_accuracy(&model.indicator, &train.beta_star)?,
        model.test_mse(&test),
        train.noise * train.noise
    );
    Ok(())
}
