//! Exhaustive and statistical ground truth for checking the solvers.

use std::collections::HashMap;
use std::sync::Mutex;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::{RngStream, SpinVector};
use crate::problems::WeightedGraph;
use crate::solvers::Problem;

/// Largest dimension the enumerators accept.
pub const ORACLE_CAP: usize = 26;

/// At most this many minimizers are kept; `minimizer_count` is always exact.
pub const MINIMIZER_LIMIT: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub optimum: f64,
    /// Ordered by their integer code, where bit i set means s_i = +1.
    pub minimizers: Vec<SpinVector>,
    pub minimizer_count: u64,
    pub enumerated: u64,
}

const SHARD_BITS: usize = 8;

struct Shard {
    best: f64,
    codes: Vec<u64>,
    count: u64,
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

/// Walks one shard in Gray-code order using flip deltas, then re-evaluates
/// every candidate exactly so accumulated rounding cannot change the answer.
fn enumerate_shard(problem: &dyn Problem, n: usize, low_bits: usize, prefix: u64) -> Shard {
    let base = prefix << low_bits;
    let mut spins = SpinVector::from_bits(base, n);
    let mut energy = problem.spin_energy(&spins);
    let mut candidates: Vec<(u64, f64)> = vec![(base, energy)];
    let mut running_best = energy;
    let mut code = base;
    for k in 1u64..(1u64 << low_bits) {
        let bit = k.trailing_zeros() as usize;
        energy += problem.flip_delta(&spins, bit);
        spins.flip(bit);
        code ^= 1 << bit;
        if energy < running_best && !near(energy, running_best) {
            running_best = energy;
            candidates.retain(|(_, e)| near(*e, running_best) || *e < running_best);
        }
        if energy <= running_best || near(energy, running_best) {
            candidates.push((code, energy));
        }
    }
    let mut exact: Vec<(u64, f64)> = candidates
        .into_iter()
        .map(|(c, _)| (c, problem.spin_energy(&SpinVector::from_bits(c, n))))
        .collect();
    let best = exact.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
    exact.retain(|e| e.1 == best);
    let mut codes: Vec<u64> = exact.into_iter().map(|e| e.0).collect();
    codes.sort_unstable();
    Shard {
        best,
        count: codes.len() as u64,
        codes,
    }
}

/// Exact minimum of `problem` over all 2^n spin vectors, with every minimizer.
///
/// Shards on the high bits run in parallel and are merged in shard order, so
/// the result does not depend on the thread count.
pub fn brute_force_min(problem: &dyn Problem, n: usize) -> Result<OracleResult> {
    if n > ORACLE_CAP {
        return Err(Error::OracleCap { n, cap: ORACLE_CAP });
    }
    if n != problem.dimension() {
        return Err(Error::invalid(format!(
            "oracle dimension {n} differs from problem dimension {}",
            problem.dimension()
        )));
    }
    if n == 0 {
        return Err(Error::invalid("cannot enumerate a zero-dimensional problem"));
    }
    let high = n.saturating_sub(12).min(SHARD_BITS);
    let low = n - high;
    let shards: Vec<Shard> = (0..1u64 << high)
        .into_par_iter()
        .map(|p| enumerate_shard(problem, n, low, p))
        .collect();
    let optimum = shards.iter().map(|s| s.best).fold(f64::INFINITY, f64::min);
    let mut minimizers = Vec::new();
    let mut minimizer_count = 0;
    for s in shards.iter().filter(|s| s.best == optimum) {
        minimizer_count += s.count;
        for &c in &s.codes {
            if minimizers.len() < MINIMIZER_LIMIT {
                minimizers.push(SpinVector::from_bits(c, n));
            }
        }
    }
    Ok(OracleResult {
        optimum,
        minimizers,
        minimizer_count,
        enumerated: 1u64 << n,
    })
}

/// Next integer with the same number of set bits (Gosper's hack).
fn next_combination(x: u64) -> u64 {
    let c = x & x.wrapping_neg();
    let r = x + c;
    (((r ^ x) >> 2) / c) | r
}

/// Minimum vertex covers by increasing cardinality. `optimum` is the cover
/// size and `minimizers` are all covers of that size.
pub fn brute_force_mvc(graph: &WeightedGraph) -> Result<OracleResult> {
    let n = graph.vertex_count();
    if n > ORACLE_CAP {
        return Err(Error::OracleCap { n, cap: ORACLE_CAP });
    }
    let edges: Vec<u64> = graph
        .edges()
        .iter()
        .map(|&(i, j, _)| (1u64 << i) | (1u64 << j))
        .collect();
    let covers = |mask: u64| edges.iter().all(|e| e & mask != 0);
    let mut enumerated = 0u64;
    for k in 0..=n {
        let mut found = Vec::new();
        let mut mask: u64 = (1u64 << k) - 1;
        let end = 1u64 << n;
        while mask < end {
            enumerated += 1;
            if covers(mask) {
                found.push(mask);
            }
            if k == 0 {
                break;
            }
            mask = next_combination(mask);
        }
        if !found.is_empty() {
            found.sort_unstable();
            return Ok(OracleResult {
                optimum: k as f64,
                minimizer_count: found.len() as u64,
                minimizers: found
                    .into_iter()
                    .take(MINIMIZER_LIMIT)
                    .map(|m| SpinVector::from_bits(m, n))
                    .collect(),
                enumerated,
            });
        }
    }
    unreachable!("selecting every vertex always covers the graph")
}

/// Central differences (f(x + h e_i) − f(x − h e_i)) / 2h.
pub fn finite_difference_gradient<F>(mut f: F, point: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> f64,
{
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::invalid(format!("step h must be positive, got {h}")));
    }
    let mut x = point.to_vec();
    let mut grad = Vec::with_capacity(point.len());
    for i in 0..point.len() {
        x[i] = point[i] + h;
        let up = f(&x);
        x[i] = point[i] - h;
        let down = f(&x);
        x[i] = point[i];
        if !(up.is_finite() && down.is_finite()) {
            return Err(Error::NonFinite(format!("function value near coordinate {i}")));
        }
        grad.push((up - down) / (2.0 * h));
    }
    Ok(grad)
}

/// Sample mean and standard error of `f` over uniform draws from [0, 1)^n.
pub fn mc_expectation<F>(mut f: F, n: usize, samples: usize, rng: &mut RngStream) -> Result<(f64, f64)>
where
    F: FnMut(&[f64]) -> f64,
{
    if samples < 2 {
        return Err(Error::invalid("need at least two samples"));
    }
    let mut x = vec![0.0; n];
    // Welford
    let (mut mean, mut m2) = (0.0, 0.0);
    for k in 1..=samples {
        rng.fill_uniform(&mut x);
        let v = f(&x);
        let d = v - mean;
        mean += d / k as f64;
        m2 += d * (v - mean);
    }
    let var = m2 / (samples - 1) as f64;
    Ok((mean, (var / samples as f64).sqrt()))
}

/// Memoizes enumeration results by a caller-chosen problem hash and dimension.
#[derive(Debug, Default)]
pub struct OracleCache {
    entries: Mutex<HashMap<(u64, usize), OracleResult>>,
}

impl OracleCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn brute_force_min(&self, key: u64, problem: &dyn Problem, n: usize) -> Result<OracleResult> {
        if let Some(hit) = self.entries.lock().expect("cache lock").get(&(key, n)) {
            return Ok(hit.clone());
        }
        let result = brute_force_min(problem, n)?;
        self.entries
            .lock()
            .expect("cache lock")
            .insert((key, n), result.clone());
        Ok(result)
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
