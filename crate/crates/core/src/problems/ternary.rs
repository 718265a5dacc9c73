use crate::error::{Error, Result};
use crate::numeric::{RngStream, SpinVector};
use crate::poly::{chain_erf, surrogate_point_into};
use crate::solvers::{Problem, Step, Workspace};

/// Input/output pairs produced by a single-layer ternary perceptron
/// y = Relu(W v).
#[derive(Debug, Clone, PartialEq)]
pub struct TernaryDataset {
    n: usize,
    m: usize,
    inputs: Vec<Vec<f64>>,
    outputs: Vec<Vec<f64>>,
    weights_gt: Vec<Vec<i8>>,
}

fn relu(z: f64) -> f64 {
    z.max(0.0)
}

fn forward(weights: &[f64], n: usize, v: &[f64], i: usize) -> f64 {
    weights[i * n..(i + 1) * n].iter().zip(v).map(|(w, x)| w * x).sum()
}

impl TernaryDataset {
    /// Builds a dataset, checking every output against the ground truth.
    pub fn new(inputs: Vec<Vec<f64>>, outputs: Vec<Vec<f64>>, weights_gt: Vec<Vec<i8>>) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::invalid("ternary dataset has no samples"));
        }
        if inputs.len() != outputs.len() {
            return Err(Error::invalid("inputs and outputs differ in length"));
        }
        let m = weights_gt.len();
        let n = inputs[0].len();
        if m == 0 || n == 0 {
            return Err(Error::invalid("ternary weights must be at least 1x1"));
        }
        if weights_gt
            .iter()
            .any(|row| row.len() != n || row.iter().any(|w| !(-1..=1).contains(w)))
        {
            return Err(Error::invalid(
                "ground-truth weights must be an m x n matrix over {-1,0,1}",
            ));
        }
        let flat: Vec<f64> = weights_gt.iter().flatten().map(|&w| f64::from(w)).collect();
        for (k, (v, y)) in inputs.iter().zip(&outputs).enumerate() {
            if v.len() != n || y.len() != m {
                return Err(Error::invalid(format!("sample {k} has the wrong shape")));
            }
            for (i, &yi) in y.iter().enumerate() {
                if (relu(forward(&flat, n, v, i)) - yi).abs() > 1e-9 {
                    return Err(Error::invalid(format!(
                        "sample {k} is not produced by the ground truth"
                    )));
                }
            }
        }
        Ok(TernaryDataset {
            n,
            m,
            inputs,
            outputs,
            weights_gt,
        })
    }

    /// Inputs uniform on {−1,0,1}^n and weights uniform on {−1,0,1}^{m×n}.
    pub fn generate(n: usize, m: usize, samples: usize, seed: u64) -> Result<Self> {
        if n == 0 || m == 0 || samples == 0 {
            return Err(Error::invalid("n, m and samples must all be at least 1"));
        }
        let mut rng = RngStream::new(seed);
        let ternary = |rng: &mut RngStream| rng.index(3) as i8 - 1;
        let weights_gt: Vec<Vec<i8>> = (0..m).map(|_| (0..n).map(|_| ternary(&mut rng)).collect()).collect();
        let flat: Vec<f64> = weights_gt.iter().flatten().map(|&w| f64::from(w)).collect();
        let mut inputs = Vec::with_capacity(samples);
        let mut outputs = Vec::with_capacity(samples);
        for _ in 0..samples {
            let v: Vec<f64> = (0..n).map(|_| f64::from(ternary(&mut rng))).collect();
            outputs.push((0..m).map(|i| relu(forward(&flat, n, &v, i))).collect());
            inputs.push(v);
        }
        Ok(TernaryDataset {
            n,
            m,
            inputs,
            outputs,
            weights_gt,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.n
    }

    pub fn output_dim(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Vec<f64>] {
        &self.outputs
    }

    pub fn weights_gt(&self) -> &[Vec<i8>] {
        &self.weights_gt
    }

    /// Mean squared error of row-major weights `w` (length m·n).
    pub fn mse(&self, w: &[f64]) -> f64 {
        let total: f64 = self
            .inputs
            .iter()
            .zip(&self.outputs)
            .map(|(v, y)| {
                (0..self.m)
                    .map(|i| (relu(forward(w, self.n, v, i)) - y[i]).powi(2))
                    .sum::<f64>()
            })
            .sum();
        total / self.len() as f64
    }
}

/// Ternary weights encoded with two spins each: W_ij = (s_ij1 + s_ij2)/2 where
/// spin (i·n + j)·2 + b holds bit b of entry (i, j).
#[derive(Debug, Clone)]
pub struct TernaryNetwork {
    data: TernaryDataset,
}

pub fn ternary_problem(dataset: &TernaryDataset) -> Result<TernaryNetwork> {
    if dataset.is_empty() {
        return Err(Error::invalid("ternary dataset has no samples"));
    }
    Ok(TernaryNetwork { data: dataset.clone() })
}

/// Hard ternary weights, row-major m × n.
pub fn decode_weights(spins: &SpinVector, m: usize, n: usize) -> Result<Vec<Vec<i8>>> {
    if spins.len() != 2 * m * n {
        return Err(Error::invalid(format!(
            "expected {} spins for a {m}x{n} ternary matrix, got {}",
            2 * m * n,
            spins.len()
        )));
    }
    let s = spins.as_slice();
    Ok((0..m)
        .map(|i| {
            (0..n)
                .map(|j| (s[(i * n + j) * 2] + s[(i * n + j) * 2 + 1]) / 2)
                .collect()
        })
        .collect())
}

/// Fraction of entries that agree exactly.
pub fn weight_accuracy(estimate: &[Vec<i8>], truth: &[Vec<i8>]) -> Result<f64> {
    if estimate.len() != truth.len() || estimate.iter().zip(truth).any(|(a, b)| a.len() != b.len()) {
        return Err(Error::invalid("weight matrices differ in shape"));
    }
    let total: usize = truth.iter().map(Vec::len).sum();
    if total == 0 {
        return Err(Error::invalid("weight matrices are empty"));
    }
    let equal = estimate
        .iter()
        .zip(truth)
        .flat_map(|(a, b)| a.iter().zip(b))
        .filter(|(a, b)| a == b)
        .count();
    Ok(equal as f64 / total as f64)
}

impl TernaryNetwork {
    pub fn dataset(&self) -> &TernaryDataset {
        &self.data
    }

    pub fn decode(&self, spins: &SpinVector) -> Vec<Vec<i8>> {
        decode_weights(spins, self.data.m, self.data.n).expect("spin count matches the network")
    }

    pub fn accuracy(&self, spins: &SpinVector) -> f64 {
        weight_accuracy(&self.decode(spins), &self.data.weights_gt).expect("shapes match")
    }

    fn relaxed_weights(y: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(y.chunks_exact(2).map(|p| 0.5 * (p[0] + p[1])));
    }
}

impl Problem for TernaryNetwork {
    fn dimension(&self) -> usize {
        2 * self.data.m * self.data.n
    }

    fn spin_energy(&self, spins: &SpinVector) -> f64 {
        let w: Vec<f64> = spins
            .as_slice()
            .chunks_exact(2)
            .map(|p| 0.5 * f64::from(p[0] + p[1]))
            .collect();
        self.data.mse(&w)
    }

    fn surrogate_value(&self, step: &Step, theta: &[f64], x: &[f64], _aux: &[f64]) -> f64 {
        let mut y = vec![0.0; theta.len()];
        surrogate_point_into(theta, x, step.sigma, &mut y);
        let mut w = Vec::new();
        Self::relaxed_weights(&y, &mut w);
        self.data.mse(&w)
    }

    fn surrogate_grad(
        &self,
        step: &Step,
        theta: &[f64],
        x: &[f64],
        _aux: &[f64],
        ws: &mut Workspace,
        grad: &mut [f64],
    ) {
        let (n, m) = (self.data.n, self.data.m);
        ws.y.resize(theta.len(), 0.0);
        surrogate_point_into(theta, x, step.sigma, &mut ws.y);
        Self::relaxed_weights(&ws.y, &mut ws.scratch);
        let w = &ws.scratch;

        // ∂MSE/∂W_ij accumulated in the even slots, then split over both bits.
        grad.iter_mut().for_each(|g| *g = 0.0);
        let scale = 2.0 / self.data.len() as f64;
        for (v, y) in self.data.inputs.iter().zip(&self.data.outputs) {
            for i in 0..m {
                let z = forward(w, n, v, i);
                if z <= 0.0 {
                    continue;
                }
                let r = scale * (z - y[i]);
                for j in 0..n {
                    grad[(i * n + j) * 2] += r * v[j];
                }
            }
        }
        for pair in grad.chunks_exact_mut(2) {
            pair[0] *= 0.5;
            pair[1] = pair[0];
        }
        chain_erf(theta, x, step.sigma, grad);
    }

    fn initial_theta(&self) -> f64 {
        1.0
    }
}
