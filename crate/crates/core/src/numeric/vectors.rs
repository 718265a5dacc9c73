use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of {−1, +1}^n.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct SpinVector(Vec<i8>);

impl SpinVector {
    pub fn new(values: Vec<i8>) -> Result<Self> {
        if let Some(pos) = values.iter().position(|&v| v != 1 && v != -1) {
            return Err(Error::invalid(format!(
                "spin entry {pos} is {}, expected -1 or +1",
                values[pos]
            )));
        }
        Ok(SpinVector(values))
    }

    pub fn filled(n: usize, value: i8) -> Self {
        assert!(value == 1 || value == -1);
        SpinVector(vec![value; n])
    }

    /// Spin vector whose bit `i` of `bits` selects +1.
    pub fn from_bits(bits: u64, n: usize) -> Self {
        SpinVector((0..n).map(|i| if bits >> i & 1 == 1 { 1 } else { -1 }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn get(&self, i: usize) -> i8 {
        self.0[i]
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = -self.0[i];
    }

    pub fn set(&mut self, i: usize, value: i8) {
        assert!(value == 1 || value == -1);
        self.0[i] = value;
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&s| f64::from(s)).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = i8> + '_ {
        self.0.iter().copied()
    }

    pub fn count_positive(&self) -> usize {
        self.0.iter().filter(|&&s| s > 0).count()
    }
}

impl TryFrom<Vec<i8>> for SpinVector {
    type Error = Error;
    fn try_from(v: Vec<i8>) -> Result<Self> {
        SpinVector::new(v)
    }
}

impl From<SpinVector> for Vec<i8> {
    fn from(s: SpinVector) -> Vec<i8> {
        s.0
    }
}

/// Bernoulli parameters θ ∈ [0,1]^n; θ_i is the probability that spin i is +1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamVector(Vec<f64>);

impl ParamVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(pos) = values.iter().position(|v| !v.is_finite() || *v < 0.0 || *v > 1.0) {
            return Err(Error::invalid(format!(
                "parameter entry {pos} = {} outside [0, 1]",
                values[pos]
            )));
        }
        Ok(ParamVector(values))
    }

    pub fn filled(n: usize, value: f64) -> Self {
        assert!((0.0..=1.0).contains(&value));
        ParamVector(vec![value; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Adds `delta` and projects back onto the cube in one pass.
    pub fn step_projected(&mut self, delta: &[f64]) {
        debug_assert_eq!(delta.len(), self.0.len());
        for (t, d) in self.0.iter_mut().zip(delta) {
            *t = (*t + d).clamp(0.0, 1.0);
        }
    }
}

/// Clamps every coordinate into [0, 1].
pub fn project_unit_cube(v: &[f64]) -> Result<ParamVector> {
    if let Some(pos) = v.iter().position(|x| !x.is_finite()) {
        return Err(Error::invalid(format!("entry {pos} is not finite")));
    }
    Ok(ParamVector(v.iter().map(|x| x.clamp(0.0, 1.0)).collect()))
}

/// sgn(θ − 0.5) with the tie θ_i = 0.5 mapped to +1.
pub fn binarize(theta: &[f64]) -> SpinVector {
    SpinVector(theta.iter().map(|&t| if t < 0.5 { -1 } else { 1 }).collect())
}

/// V(θ) = Σ θ_i (1 − θ_i).
pub fn total_variance(theta: &[f64]) -> f64 {
    theta.iter().map(|t| t * (1.0 - t)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn projection_examples() {
        assert_eq!(
            project_unit_cube(&[1.2, -0.3, 0.5]).unwrap().as_slice(),
            &[1.0, 0.0, 0.5]
        );
        assert_eq!(project_unit_cube(&[0.0, 1.0]).unwrap().as_slice(), &[0.0, 1.0]);
        assert_eq!(project_unit_cube(&[-7.0]).unwrap().as_slice(), &[0.0]);
        assert!(project_unit_cube(&[f64::NAN]).is_err());
        assert!(project_unit_cube(&[f64::INFINITY]).is_err());
    }

    #[test]
    fn binarize_examples() {
        assert_eq!(binarize(&[0.7, 0.2]).as_slice(), &[1, -1]);
        assert_eq!(binarize(&[0.5]).as_slice(), &[1]);
        assert_eq!(binarize(&[1.0, 0.0, 0.5001]).as_slice(), &[1, -1, 1]);
    }

    #[test]
    fn variance_examples() {
        assert_eq!(total_variance(&[0.5; 4]), 1.0);
        assert_eq!(total_variance(&[1.0, 0.0, 1.0]), 0.0);
        assert_eq!(total_variance(&[0.25, 0.75]), 0.375);
    }

    #[test]
    fn spin_vector_rejects_zero() {
        assert!(SpinVector::new(vec![1, 0]).is_err());
        assert!(serde_json::from_str::<SpinVector>("[1,-1,2]").is_err());
    }

    fn log_prob(theta: &[f64], s: &SpinVector) -> f64 {
        theta
            .iter()
            .zip(s.iter())
            .map(|(t, si)| if si > 0 { t.ln() } else { (1.0 - t).ln() })
            .sum()
    }

    proptest! {
        #[test]
        fn projection_idempotent(v in prop::collection::vec(-5.0f64..5.0, 1..20)) {
            let once = project_unit_cube(&v).unwrap();
            let twice = project_unit_cube(once.as_slice()).unwrap();
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn binarize_is_mode(theta in prop::collection::vec(0.01f64..0.99, 1..=12)) {
            prop_assume!(theta.iter().all(|t| (t - 0.5).abs() > 1e-9));
            let n = theta.len();
            let mut best = (f64::NEG_INFINITY, 0u64);
            for bits in 0..(1u64 << n) {
                let lp = log_prob(&theta, &SpinVector::from_bits(bits, n));
                if lp > best.0 {
                    best = (lp, bits);
                }
            }
            prop_assert_eq!(binarize(&theta), SpinVector::from_bits(best.1, n));
        }

        #[test]
        fn variance_symmetric_and_positive(theta in prop::collection::vec(0.0f64..=1.0, 1..20)) {
            let flipped: Vec<f64> = theta.iter().map(|t| 1.0 - t).collect();
            let v = total_variance(&theta);
            prop_assert!((v - total_variance(&flipped)).abs() < 1e-12);
            let vertex = theta.iter().all(|&t| t == 0.0 || t == 1.0);
            prop_assert_eq!(v == 0.0, vertex);
        }
    }
}
