//! Cross-checks of the relaxation machinery: the analytic surrogate gradient
//! against central differences, and the closed-form smoothed expectation
//! against a Monte Carlo estimate.
//!
//! cargo run --release --example oracle_check

use heo::numeric::RngStream;
use heo::oracle::{finite_difference_gradient, mc_expectation};
use heo::poly::random_polynomial;

fn main() -> heo::Result<()> {
    let mut rng = RngStream::new(5);
    let poly = random_polynomial(8, 20, 3, &mut rng);
    let sigma = 0.7;
    let theta = rng.sample_uniform_cube(8)?;
    let x = rng.sample_uniform_cube(8)?;

    let analytic = poly.surrogate_gradient(&theta, &x, sigma)?;
    let numeric = finite_difference_gradient(|t| poly.surrogate_value(t, &x, sigma).unwrap(), &theta, 1e-6)?;
    let worst = analytic
        .iter()
        .zip(&numeric)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("largest gradient discrepancy: {worst:.2e}");

    let exact = poly.exact_smoothed_expectation(&theta, sigma)?;
    let (mean, se) = mc_expectation(
        |x| poly.surrogate_value(&theta, x, sigma).unwrap(),
        8,
        200_000,
        &mut rng,
    )?;
    println!("smoothed expectation: exact {exact:.6}, sampled {mean:.6} ± {se:.6}");
    Ok(())
}
