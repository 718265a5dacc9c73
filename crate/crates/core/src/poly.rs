//! Sparse multilinear polynomials over spins and their heat-smoothed
//! surrogates.
//!
//! A polynomial f(s) = Σ_m a_m ∏_{i∈m} s_i is stored as flat monomial
//! arrays plus a per-variable incidence index. Because f is multilinear and
//! the coordinates of x ~ Unif[0,1]^n are independent, the heat-smoothed
//! expectation factorizes coordinate by coordinate: replacing s_i by
//! erf((θ_i − x_i)/σ) gives an unbiased single-sample estimate, and
//! integrating x_i out gives the exact value used as a test oracle.

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{erf, erf_derivative, RngStream, SpinVector};

/// One term a · ∏ s_i. Degree 0 is the constant term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coefficient: f64,
    pub variables: Vec<usize>,
}

impl Monomial {
    pub fn new(coefficient: f64, variables: impl Into<Vec<usize>>) -> Self {
        Monomial {
            coefficient,
            variables: variables.into(),
        }
    }

    pub fn constant(coefficient: f64) -> Self {
        Monomial::new(coefficient, Vec::new())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultilinearPolynomial {
    n: usize,
    coefs: Vec<f64>,
    offsets: Vec<usize>,
    vars: Vec<u32>,
    incidence_offsets: Vec<usize>,
    incidence: Vec<u32>,
    max_degree: usize,
}

impl MultilinearPolynomial {
    /// Builds a normalized polynomial: variable lists are sorted, monomials
    /// with equal variable sets merged, and zero coefficients dropped.
    pub fn normalize(n: usize, monomials: impl IntoIterator<Item = Monomial>) -> Result<Self> {
        let mut merged: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (k, m) in monomials.into_iter().enumerate() {
            if !m.coefficient.is_finite() {
                return Err(Error::invalid(format!("monomial {k} has non-finite coefficient")));
            }
            let mut vs = Vec::with_capacity(m.variables.len());
            for &v in &m.variables {
                if v >= n {
                    return Err(Error::invalid(format!(
                        "monomial {k} references variable {v} but n = {n}"
                    )));
                }
                vs.push(v as u32);
            }
            vs.sort_unstable();
            if vs.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid(format!("monomial {k} repeats a variable")));
            }
            *merged.entry(vs).or_insert(0.0) += m.coefficient;
        }
        Ok(Self::from_sorted(n, merged.into_iter().filter(|(_, c)| *c != 0.0)))
    }

    fn from_sorted(n: usize, terms: impl Iterator<Item = (Vec<u32>, f64)>) -> Self {
        let mut coefs = Vec::new();
        let mut offsets = vec![0];
        let mut vars = Vec::new();
        let mut counts = vec![0usize; n];
        let mut max_degree = 0;
        for (vs, c) in terms {
            for &v in &vs {
                counts[v as usize] += 1;
            }
            max_degree = max_degree.max(vs.len());
            vars.extend_from_slice(&vs);
            offsets.push(vars.len());
            coefs.push(c);
        }
        let mut incidence_offsets = Vec::with_capacity(n + 1);
        incidence_offsets.push(0);
        for c in &counts {
            incidence_offsets.push(incidence_offsets.last().unwrap() + c);
        }
        let mut fill = incidence_offsets[..n].to_vec();
        let mut incidence = vec![0u32; vars.len()];
        for m in 0..coefs.len() {
            for &v in &vars[offsets[m]..offsets[m + 1]] {
                incidence[fill[v as usize]] = m as u32;
                fill[v as usize] += 1;
            }
        }
        MultilinearPolynomial {
            n,
            coefs,
            offsets,
            vars,
            incidence_offsets,
            incidence,
            max_degree,
        }
    }

    pub fn zero(n: usize) -> Self {
        Self::from_sorted(n, std::iter::empty())
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn num_monomials(&self) -> usize {
        self.coefs.len()
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn is_empty(&self) -> bool {
        self.coefs.is_empty()
    }

    pub fn constant_term(&self) -> f64 {
        match self.offsets.get(1) {
            Some(&0) => self.coefs[0],
            _ => 0.0,
        }
    }

    /// (coefficient, variables) pairs in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (f64, &[u32])> + '_ {
        (0..self.coefs.len()).map(move |m| (self.coefs[m], self.monomial_vars(m)))
    }

    pub fn monomials(&self) -> Vec<Monomial> {
        self.terms()
            .map(|(c, vs)| Monomial::new(c, vs.iter().map(|&v| v as usize).collect::<Vec<_>>()))
            .collect()
    }

    /// Monomial indices containing variable `i`.
    pub fn incident(&self, i: usize) -> &[u32] {
        &self.incidence[self.incidence_offsets[i]..self.incidence_offsets[i + 1]]
    }

    #[inline]
    fn monomial_vars(&self, m: usize) -> &[u32] {
        &self.vars[self.offsets[m]..self.offsets[m + 1]]
    }

    /// Σ_m a_m ∏ y_i for any real point y (spins, relaxed spins, erf points).
    pub fn evaluate(&self, y: &[f64]) -> f64 {
        debug_assert_eq!(y.len(), self.n);
        let mut total = 0.0;
        for m in 0..self.coefs.len() {
            let mut p = self.coefs[m];
            for &v in self.monomial_vars(m) {
                p *= y[v as usize];
            }
            total += p;
        }
        total
    }

    pub fn evaluate_spins(&self, s: &SpinVector) -> f64 {
        let s = s.as_slice();
        debug_assert_eq!(s.len(), self.n);
        let mut total = 0.0;
        for m in 0..self.coefs.len() {
            let neg = self.monomial_vars(m).iter().filter(|&&v| s[v as usize] < 0).count();
            total += if neg % 2 == 0 { self.coefs[m] } else { -self.coefs[m] };
        }
        total
    }

    /// f(s with s_i flipped) − f(s), using only monomials that contain i.
    pub fn flip_delta(&self, s: &SpinVector, i: usize) -> f64 {
        let s = s.as_slice();
        let mut contrib = 0.0;
        for &m in self.incident(i) {
            let m = m as usize;
            let neg = self.monomial_vars(m).iter().filter(|&&v| s[v as usize] < 0).count();
            contrib += if neg % 2 == 0 { self.coefs[m] } else { -self.coefs[m] };
        }
        -2.0 * contrib
    }

    /// ∂f/∂y_i at y, via the incidence index.
    pub fn partial(&self, i: usize, y: &[f64]) -> f64 {
        let mut total = 0.0;
        for &m in self.incident(i) {
            let m = m as usize;
            let mut p = self.coefs[m];
            for &v in self.monomial_vars(m) {
                if v as usize != i {
                    p *= y[v as usize];
                }
            }
            total += p;
        }
        total
    }

    /// Accumulates ∇_y f(y) into `out` (which is overwritten).
    ///
    /// Each monomial scatters ∏_{j≠i} y_j to its variables through prefix and
    /// suffix products, so a zero y_j never causes a 0/0.
    pub fn gradient_into(&self, y: &[f64], out: &mut [f64]) {
        debug_assert_eq!(y.len(), self.n);
        debug_assert_eq!(out.len(), self.n);
        out.iter_mut().for_each(|g| *g = 0.0);
        let mut suffix = vec![1.0; self.max_degree + 1];
        for m in 0..self.coefs.len() {
            let c = self.coefs[m];
            let vs = self.monomial_vars(m);
            match vs.len() {
                0 => {}
                1 => out[vs[0] as usize] += c,
                2 => {
                    let (a, b) = (vs[0] as usize, vs[1] as usize);
                    out[a] += c * y[b];
                    out[b] += c * y[a];
                }
                d => {
                    suffix[d] = 1.0;
                    for k in (0..d).rev() {
                        suffix[k] = suffix[k + 1] * y[vs[k] as usize];
                    }
                    let mut prefix = c;
                    for k in 0..d {
                        let v = vs[k] as usize;
                        out[v] += prefix * suffix[k + 1];
                        prefix *= y[v];
                    }
                }
            }
        }
    }

    /// ∇_θ f(erf((θ − x)/σ)), writing the erf point into `y` as a by-product.
    pub fn surrogate_gradient_into(&self, theta: &[f64], x: &[f64], sigma: f64, y: &mut [f64], out: &mut [f64]) {
        surrogate_point_into(theta, x, sigma, y);
        self.gradient_into(y, out);
        chain_erf(theta, x, sigma, out);
    }

    pub fn surrogate_gradient(&self, theta: &[f64], x: &[f64], sigma: f64) -> Result<Vec<f64>> {
        check_sigma(sigma)?;
        check_lengths(self.n, theta, x)?;
        let mut y = vec![0.0; self.n];
        let mut g = vec![0.0; self.n];
        self.surrogate_gradient_into(theta, x, sigma, &mut y, &mut g);
        Ok(g)
    }

    /// f(erf((θ − x)/σ)), the single-sample surrogate value.
    pub fn surrogate_value(&self, theta: &[f64], x: &[f64], sigma: f64) -> Result<f64> {
        Ok(self.evaluate(&surrogate_point(theta, x, sigma)?))
    }

    /// h(θ) = E_{s∼p(·|θ)}[f(s)] = f(2θ − 1).
    pub fn closed_form_h(&self, theta: &[f64]) -> f64 {
        let y: Vec<f64> = theta.iter().map(|t| 2.0 * t - 1.0).collect();
        self.evaluate(&y)
    }

    /// u(σ², θ) = E_x[f(erf((θ − x)/σ))] computed exactly by integrating each
    /// coordinate of x over [0, 1]. Accepts θ outside the unit cube.
    pub fn exact_smoothed_expectation(&self, theta: &[f64], sigma: f64) -> Result<f64> {
        check_sigma(sigma)?;
        if theta.len() != self.n {
            return Err(Error::invalid("theta length does not match dimension"));
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("theta must be finite"));
        }
        let y: Vec<f64> = theta.iter().map(|&t| smoothed_coordinate(t, sigma)).collect();
        Ok(self.evaluate(&y))
    }

    /// Stable hash of the canonical representation, for oracle caching.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.n.hash(&mut h);
        for (c, vs) in self.terms() {
            c.to_bits().hash(&mut h);
            vs.hash(&mut h);
        }
        h.finish()
    }

    /// c · f.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.coefs.iter_mut().for_each(|c| *c *= factor);
        out
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma.is_finite() && sigma > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("sigma must be positive, got {sigma}")))
    }
}

fn check_lengths(n: usize, theta: &[f64], x: &[f64]) -> Result<()> {
    if theta.len() != n || x.len() != n {
        return Err(Error::invalid(format!(
            "expected vectors of length {n}, got {} and {}",
            theta.len(),
            x.len()
        )));
    }
    Ok(())
}

/// y_i = erf((θ_i − x_i)/σ).
pub fn surrogate_point(theta: &[f64], x: &[f64], sigma: f64) -> Result<Vec<f64>> {
    check_sigma(sigma)?;
    check_lengths(theta.len(), theta, x)?;
    let mut y = vec![0.0; theta.len()];
    surrogate_point_into(theta, x, sigma, &mut y);
    Ok(y)
}

#[inline]
pub fn surrogate_point_into(theta: &[f64], x: &[f64], sigma: f64, y: &mut [f64]) {
    let inv = 1.0 / sigma;
    for ((yi, t), xi) in y.iter_mut().zip(theta).zip(x) {
        *yi = erf((t - xi) * inv);
    }
}

/// Multiplies ∂/∂y_i by dy_i/dθ_i = erf'((θ_i − x_i)/σ)/σ in place.
#[inline]
pub fn chain_erf(theta: &[f64], x: &[f64], sigma: f64, grad: &mut [f64]) {
    let inv = 1.0 / sigma;
    for ((g, t), xi) in grad.iter_mut().zip(theta).zip(x) {
        if *g != 0.0 {
            *g *= erf_derivative((t - xi) * inv) * inv;
        }
    }
}

/// φ(θ, σ) = ∫₀¹ erf((θ − x)/σ) dx = σ[G(θ/σ) − G((θ − 1)/σ)],
/// with G(t) = t·erf(t) + exp(−t²)/√π.
pub fn smoothed_coordinate(theta: f64, sigma: f64) -> f64 {
    fn antiderivative(t: f64) -> f64 {
        t * erf(t) + (-t * t).exp() / std::f64::consts::PI.sqrt()
    }
    sigma * (antiderivative(theta / sigma) - antiderivative((theta - 1.0) / sigma))
}

/// Random polynomial with `terms` monomials of degree 1..=max_degree (plus a
/// constant), coefficients uniform on [−1, 1].
pub fn random_polynomial(n: usize, terms: usize, max_degree: usize, rng: &mut RngStream) -> MultilinearPolynomial {
    let max_degree = max_degree.min(n).max(1);
    let mut monomials = vec![Monomial::constant(rng.uniform_range(-1.0, 1.0))];
    for _ in 0..terms {
        let degree = 1 + rng.index(max_degree);
        let mut vars: Vec<usize> = Vec::with_capacity(degree);
        while vars.len() < degree {
            let v = rng.index(n);
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
        monomials.push(Monomial::new(rng.uniform_range(-1.0, 1.0), vars));
    }
    MultilinearPolynomial::normalize(n, monomials).expect("generated indices are valid")
}

/// Quadratic unconstrained binary objective: every pair (i, j) is coupled
/// with probability `density` and every spin has a field, all coefficients
/// uniform on [−1, 1].
pub fn random_qubo(n: usize, density: f64, rng: &mut RngStream) -> MultilinearPolynomial {
    let mut monomials = Vec::new();
    for i in 0..n {
        monomials.push(Monomial::new(rng.uniform_range(-1.0, 1.0), [i]));
        for j in i + 1..n {
            if rng.bernoulli(density) {
                monomials.push(Monomial::new(rng.uniform_range(-1.0, 1.0), [i, j]));
            }
        }
    }
    MultilinearPolynomial::normalize(n, monomials).expect("generated indices are valid")
}
