use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::{RngStream, SolverConfig, SpinVector};
use crate::poly::{chain_erf, surrogate_point_into};
use crate::solvers::{heo_momentum_solve, Auxiliary, Problem, Step, Workspace};

/// Linear-regression samples y = β*·v + ε, with the generating coefficients
/// kept for scoring.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionDataset {
    pub inputs: Vec<Vec<f64>>,
    pub responses: Vec<f64>,
    pub beta_star: Vec<f64>,
    pub sparsity: f64,
    pub noise: f64,
}

impl RegressionDataset {
    /// Standard-normal inputs; each coefficient is nonzero with probability
    /// `q` and then uniform on [−2, −1] ∪ [1, 2]; Gaussian noise of standard
    /// deviation `noise`.
    pub fn generate(n: usize, samples: usize, q: f64, noise: f64, seed: u64) -> Result<Self> {
        if n == 0 || samples == 0 {
            return Err(Error::invalid("n and samples must be at least 1"));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::invalid(format!("sparsity q must lie in (0, 1), got {q}")));
        }
        if !(noise.is_finite() && noise >= 0.0) {
            return Err(Error::invalid(format!("noise must be nonnegative, got {noise}")));
        }
        let mut rng = RngStream::new(seed);
        let beta_star: Vec<f64> = (0..n)
            .map(|_| {
                let magnitude = rng.uniform_range(1.0, 2.0);
                let sign = if rng.bernoulli(0.5) { 1.0 } else { -1.0 };
                if rng.bernoulli(q) {
                    sign * magnitude
                } else {
                    0.0
                }
            })
            .collect();
        let mut inputs = Vec::with_capacity(samples);
        let mut responses = Vec::with_capacity(samples);
        for _ in 0..samples {
            let v: Vec<f64> = (0..n).map(|_| rng.standard_normal()).collect();
            let clean: f64 = v.iter().zip(&beta_star).map(|(a, b)| a * b).sum();
            responses.push(clean + noise * rng.standard_normal());
            inputs.push(v);
        }
        Ok(RegressionDataset {
            inputs,
            responses,
            beta_star,
            sparsity: q,
            noise,
        })
    }

    pub fn dimension(&self) -> usize {
        self.beta_star.len()
    }

    pub fn len(&self) -> usize {
        self.responses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.responses.is_empty()
    }

    pub fn support(&self) -> Vec<bool> {
        self.beta_star.iter().map(|b| *b != 0.0).collect()
    }

    /// First `train` samples and the rest.
    pub fn split(&self, train: usize) -> (RegressionDataset, RegressionDataset) {
        let train = train.min(self.len());
        let part = |range: std::ops::Range<usize>| RegressionDataset {
            inputs: self.inputs[range.clone()].to_vec(),
            responses: self.responses[range].to_vec(),
            ..self.clone()
        };
        (part(0..train), part(train..self.len()))
    }

    pub fn mse(&self, beta: &[f64]) -> f64 {
        self.rows_mse(0..self.len(), beta)
    }

    fn rows_mse(&self, rows: impl Iterator<Item = usize>, beta: &[f64]) -> f64 {
        let mut total = 0.0;
        let mut count = 0usize;
        for k in rows {
            let p: f64 = self.inputs[k].iter().zip(beta).map(|(a, b)| a * b).sum();
            total += (p - self.responses[k]).powi(2);
            count += 1;
        }
        if count == 0 {
            0.0
        } else {
            total / count as f64
        }
    }
}

/// Least squares on the selected columns over the given rows. Returns a
/// full-length coefficient vector with zeros off the support.
fn ols_rows(data: &RegressionDataset, rows: &[usize], support: &[bool]) -> Result<Vec<f64>> {
    let n = data.dimension();
    if support.len() != n {
        return Err(Error::invalid("support length differs from dataset dimension"));
    }
    let cols: Vec<usize> = (0..n).filter(|&i| support[i]).collect();
    let mut beta = vec![0.0; n];
    if cols.is_empty() {
        return Ok(beta);
    }
    if cols.len() > rows.len() {
        return Err(Error::LeastSquares(format!(
            "{} selected variables but only {} samples",
            cols.len(),
            rows.len()
        )));
    }
    let a = DMatrix::from_fn(rows.len(), cols.len(), |r, c| data.inputs[rows[r]][cols[c]]);
    let b = DVector::from_iterator(rows.len(), rows.iter().map(|&r| data.responses[r]));
    let solution = a
        .svd(true, true)
        .solve(&b, 1e-12)
        .map_err(|e| Error::LeastSquares(e.to_string()))?;
    for (c, &i) in cols.iter().enumerate() {
        beta[i] = solution[c];
    }
    Ok(beta)
}

/// Ordinary least squares restricted to `support`, fitted on all samples.
pub fn ols_fit(data: &RegressionDataset, support: &[bool]) -> Result<Vec<f64>> {
    let rows: Vec<usize> = (0..data.len()).collect();
    ols_rows(data, &rows, support)
}

/// Fraction of coordinates where the selection agrees with β* ≠ 0.
pub fn indicator_accuracy(selected: &[bool], beta_star: &[f64]) -> Result<f64> {
    if selected.len() != beta_star.len() || selected.is_empty() {
        return Err(Error::invalid("indicator and coefficients differ in length"));
    }
    let hits = selected
        .iter()
        .zip(beta_star)
        .filter(|(s, b)| **s == (**b != 0.0))
        .count();
    Ok(hits as f64 / selected.len() as f64)
}

/// Joint target f(s, β) = mean over samples of ((β ⊙ (s+1)/2)·v − y)².
///
/// The spins select variables. β is carried as an auxiliary parameter with
/// its own momentum and a step of γ/T. Internally the loss is expressed via
/// the Gram matrix VᵀV/|D| so each iteration costs O(n²).
#[derive(Debug, Clone)]
pub struct VariableSelection {
    data: RegressionDataset,
    gram: Vec<f64>,
    cross: Vec<f64>,
    response_power: f64,
}

pub fn varselect_problem(dataset: &RegressionDataset) -> Result<VariableSelection> {
    if dataset.is_empty() {
        return Err(Error::invalid("regression dataset has no samples"));
    }
    let n = dataset.dimension();
    let scale = 1.0 / dataset.len() as f64;
    let mut gram = vec![0.0; n * n];
    let mut cross = vec![0.0; n];
    for (v, y) in dataset.inputs.iter().zip(&dataset.responses) {
        for i in 0..n {
            cross[i] += scale * v[i] * y;
            let row = &mut gram[i * n..(i + 1) * n];
            for j in i..n {
                row[j] += scale * v[i] * v[j];
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            gram[i * n + j] = gram[j * n + i];
        }
    }
    let response_power = scale * dataset.responses.iter().map(|y| y * y).sum::<f64>();
    Ok(VariableSelection {
        data: dataset.clone(),
        gram,
        cross,
        response_power,
    })
}

impl VariableSelection {
    pub fn dataset(&self) -> &RegressionDataset {
        &self.data
    }

    /// f at relaxed indicators `u` ∈ [−1, 1]^n and coefficients β.
    pub fn relaxed_loss(&self, u: &[f64], beta: &[f64]) -> f64 {
        let n = u.len();
        let b: Vec<f64> = (0..n).map(|i| beta[i] * 0.5 * (u[i] + 1.0)).collect();
        let mut quad = 0.0;
        for i in 0..n {
            let gi: f64 = self.gram[i * n..(i + 1) * n].iter().zip(&b).map(|(g, v)| g * v).sum();
            quad += b[i] * gi;
        }
        let lin: f64 = self.cross.iter().zip(&b).map(|(c, v)| c * v).sum();
        quad - 2.0 * lin + self.response_power
    }

    /// Writes c_i = 2 (G b − Vᵀy/|D|)_i with b = β ⊙ (u+1)/2, the common factor
    /// of both partial derivatives.
    fn residual_correlation(&self, u: &[f64], beta: &[f64], out: &mut [f64]) {
        let n = u.len();
        let b: Vec<f64> = (0..n).map(|i| beta[i] * 0.5 * (u[i] + 1.0)).collect();
        for ((o, row), c) in out.iter_mut().zip(self.gram.chunks_exact(n)).zip(&self.cross) {
            let gi: f64 = row.iter().zip(&b).map(|(g, v)| g * v).sum();
            *o = 2.0 * (gi - c);
        }
    }

    /// ∂f/∂β at relaxed indicators `u`.
    pub fn beta_gradient(&self, u: &[f64], beta: &[f64]) -> Vec<f64> {
        let mut c = vec![0.0; u.len()];
        self.residual_correlation(u, beta, &mut c);
        c.iter().zip(u).map(|(c, u)| c * 0.5 * (u + 1.0)).collect()
    }

    fn support(spins: &SpinVector) -> Vec<bool> {
        spins.iter().map(|s| s > 0).collect()
    }
}

impl Problem for VariableSelection {
    fn dimension(&self) -> usize {
        self.data.dimension()
    }

    /// Training MSE of the least-squares fit on the selected variables, or
    /// +∞ when the fit is impossible.
    fn spin_energy(&self, spins: &SpinVector) -> f64 {
        match ols_fit(&self.data, &Self::support(spins)) {
            Ok(beta) => self.data.mse(&beta),
            Err(_) => f64::INFINITY,
        }
    }

    fn surrogate_value(&self, step: &Step, theta: &[f64], x: &[f64], aux: &[f64]) -> f64 {
        let mut u = vec![0.0; theta.len()];
        surrogate_point_into(theta, x, step.sigma, &mut u);
        self.relaxed_loss(&u, aux)
    }

    fn surrogate_grad(&self, step: &Step, theta: &[f64], x: &[f64], aux: &[f64], ws: &mut Workspace, grad: &mut [f64]) {
        let n = theta.len();
        ws.y.resize(n, 0.0);
        surrogate_point_into(theta, x, step.sigma, &mut ws.y);
        self.residual_correlation(&ws.y, aux, grad);
        for (g, b) in grad.iter_mut().zip(aux) {
            *g *= 0.5 * b;
        }
        chain_erf(theta, x, step.sigma, grad);
    }

    fn initial_theta(&self) -> f64 {
        1.0
    }

    fn auxiliary_init(&self) -> Vec<f64> {
        vec![0.0; self.dimension()]
    }

    fn auxiliary_step(&self, step: &Step, theta: &[f64], x: &[f64], aux: &mut Auxiliary) {
        let mut u = vec![0.0; theta.len()];
        surrogate_point_into(theta, x, step.sigma, &mut u);
        let g = self.beta_gradient(&u, &aux.values);
        let rate = step.step_size / step.iterations as f64;
        for ((b, v), g) in aux.values.iter_mut().zip(&mut aux.velocity).zip(&g) {
            *v = step.momentum * *v + rate * g;
            *b -= *v;
        }
    }

    /// f(s, β) with the current coefficients, cheaper than a refit.
    fn trace_energy(&self, spins: &SpinVector, aux: &[f64]) -> f64 {
        self.relaxed_loss(&spins.to_f64(), aux)
    }
}

/// Outcome of the ensemble and cross-validation pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectedModel {
    pub indicator: Vec<bool>,
    pub coefficients: Vec<f64>,
    pub validation_mse: f64,
    pub candidates: usize,
}

impl SelectedModel {
    pub fn predict(&self, v: &[f64]) -> f64 {
        v.iter().zip(&self.coefficients).map(|(a, b)| a * b).sum()
    }

    pub fn test_mse(&self, data: &RegressionDataset) -> f64 {
        data.mse(&self.coefficients)
    }
}

/// Mean validation MSE of an OLS refit over contiguous folds.
fn cross_validate(data: &RegressionDataset, support: &[bool], folds: usize) -> Result<f64> {
    let len = data.len();
    let mut total = 0.0;
    for f in 0..folds {
        let (lo, hi) = (f * len / folds, (f + 1) * len / folds);
        let train: Vec<usize> = (0..lo).chain(hi..len).collect();
        let beta = ols_rows(data, &train, support)?;
        total += data.rows_mse(lo..hi, &beta);
    }
    Ok(total / folds as f64)
}

/// Runs momentum HeO `ensemble` times from child seeds of `seed`, refits each
/// distinct indicator by OLS, and keeps the one with the lowest mean
/// validation error over `folds` folds (first on ties).
pub fn varselect_pipeline(
    dataset: &RegressionDataset,
    ensemble: usize,
    folds: usize,
    config: &SolverConfig,
    seed: u64,
) -> Result<SelectedModel> {
    if ensemble == 0 {
        return Err(Error::invalid("ensemble size must be at least 1"));
    }
    if folds < 2 || folds > dataset.len() {
        return Err(Error::invalid(format!(
            "fold count must lie in [2, {}], got {folds}",
            dataset.len()
        )));
    }
    let problem = varselect_problem(dataset)?;
    let root = RngStream::new(seed);
    let indicators: Vec<Vec<bool>> = (0..ensemble as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = root.child(r);
            heo_momentum_solve(&problem, config, &mut rng).map(|rep| VariableSelection::support(&rep.best_spins))
        })
        .collect::<Result<_>>()?;

    let mut distinct: Vec<Vec<bool>> = Vec::new();
    for s in indicators {
        if !distinct.contains(&s) {
            distinct.push(s);
        }
    }
    let scores: Vec<f64> = distinct
        .par_iter()
        .map(|s| cross_validate(dataset, s, folds))
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (k, score) in scores.iter().enumerate() {
        if *score < scores[best] {
            best = k;
        }
    }
    let indicator = distinct.swap_remove(best);
    let coefficients = ols_fit(dataset, &indicator)?;
    Ok(SelectedModel {
        indicator,
        coefficients,
        validation_mse: scores[best],
        candidates: scores.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::SigmaSchedule;
    use crate::oracle::finite_difference_gradient;

    fn small() -> RegressionDataset {
        RegressionDataset::generate(12, 200, 0.3, 0.1, 2).unwrap()
    }

    #[test]
    fn generator_properties() {
        let d = RegressionDataset::generate(50, 100, 0.1, 0.0, 7).unwrap();
        assert_eq!(d, RegressionDataset::generate(50, 100, 0.1, 0.0, 7).unwrap());
        assert!(d.beta_star.iter().all(|b| *b == 0.0 || (1.0..=2.0).contains(&b.abs())));
        // noiseless: y is exactly linear in the selected coordinates
        assert!(d.mse(&d.beta_star) < 1e-25);
        assert!(RegressionDataset::generate(5, 10, 1.0, 0.1, 1).is_err());
    }

    #[test]
    fn empty_selection_predicts_zero() {
        let d = small();
        let p = varselect_problem(&d).unwrap();
        let mean_sq = d.responses.iter().map(|y| y * y).sum::<f64>() / d.len() as f64;
        let none = SpinVector::filled(12, -1);
        assert!((p.spin_energy(&none) - mean_sq).abs() < 1e-12);
        assert!((p.relaxed_loss(&none.to_f64(), &[1.5; 12]) - mean_sq).abs() < 1e-12);
    }

    #[test]
    fn true_support_reaches_noise_floor() {
        let d = RegressionDataset::generate(20, 2000, 0.3, 0.1, 3).unwrap();
        let p = varselect_problem(&d).unwrap();
        let s = SpinVector::new(d.support().iter().map(|&b| if b { 1 } else { -1 }).collect()).unwrap();
        let f = p.relaxed_loss(&s.to_f64(), &d.beta_star);
        assert!((f - 0.01).abs() < 0.002, "f = {f}");
        assert!((f - d.mse(&d.beta_star)).abs() < 1e-10);
    }

    #[test]
    fn ols_recovers_noiseless_coefficients() {
        let d = RegressionDataset::generate(10, 40, 0.5, 0.0, 11).unwrap();
        let beta = ols_fit(&d, &d.support()).unwrap();
        for (a, b) in beta.iter().zip(&d.beta_star) {
            assert!((a - b).abs() < 1e-10);
        }
        let narrow = RegressionDataset::generate(10, 5, 0.5, 0.0, 11).unwrap();
        assert!(matches!(ols_fit(&narrow, &[true; 10]), Err(Error::LeastSquares(_))));
    }

    #[test]
    fn gradients_match_finite_differences() {
        let d = small();
        let p = varselect_problem(&d).unwrap();
        let mut rng = RngStream::new(4);
        let theta: Vec<f64> = (0..12).map(|_| rng.uniform()).collect();
        let x: Vec<f64> = (0..12).map(|_| rng.uniform()).collect();
        let beta: Vec<f64> = (0..12).map(|_| rng.uniform_range(-2.0, 2.0)).collect();
        let step = Step {
            t: 0,
            iterations: 1,
            sigma: 0.8,
            step_size: 1.0,
            momentum: 0.0,
        };

        let mut g = vec![0.0; 12];
        p.surrogate_grad(&step, &theta, &x, &beta, &mut Workspace::new(12), &mut g);
        let fd = finite_difference_gradient(|th| p.surrogate_value(&step, th, &x, &beta), &theta, 1e-5).unwrap();
        let rel = |a: &[f64], b: &[f64]| {
            let num: f64 = a.iter().zip(b).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            num / b.iter().map(|v| v * v).sum::<f64>().sqrt()
        };
        assert!(rel(&g, &fd) < 1e-5);

        let u: Vec<f64> = theta.iter().map(|t| 2.0 * t - 1.0).collect();
        let gb = p.beta_gradient(&u, &beta);
        let fdb = finite_difference_gradient(|b| p.relaxed_loss(&u, b), &beta, 1e-5).unwrap();
        assert!(rel(&gb, &fdb) < 1e-5);
    }

    #[test]
    fn single_member_ensemble_is_selected() {
        let d = small();
        let cfg = SolverConfig::new(200, 1.0, SigmaSchedule::linear(2.0, 0.0)).with_momentum(0.999);
        let model = varselect_pipeline(&d, 1, 5, &cfg, 9).unwrap();
        assert_eq!(model.candidates, 1);
        let p = varselect_problem(&d).unwrap();
        let mut rng = RngStream::new(9).child(0);
        let rep = heo_momentum_solve(&p, &cfg, &mut rng).unwrap();
        assert_eq!(model.indicator, VariableSelection::support(&rep.best_spins));
    }

    #[test]
    fn cross_validation_prefers_true_support_without_noise() {
        let d = RegressionDataset::generate(8, 60, 0.4, 0.0, 5).unwrap();
        let truth = d.support();
        assert!(cross_validate(&d, &truth, 5).unwrap() < 1e-20);
        let mut wrong = truth.clone();
        let k = wrong.iter().position(|b| *b).unwrap();
        wrong[k] = false;
        assert!(cross_validate(&d, &wrong, 5).unwrap() > 0.1);
    }

    #[test]
    fn accuracy_examples() {
        assert_eq!(indicator_accuracy(&[true, false], &[1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(indicator_accuracy(&[false, true], &[1.0, 0.0]).unwrap(), 0.0);
        assert!(indicator_accuracy(&[true], &[1.0, 0.0]).is_err());
    }
}
