use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{erf_derivative, RngStream, SpinVector};
use crate::poly::{surrogate_point_into, Monomial, MultilinearPolynomial};
use crate::solvers::{Problem, Step, Workspace};

/// A literal over variable `var`; `positive = false` is a negation (c = −1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn new(var: usize, positive: bool) -> Self {
        Literal { var, positive }
    }

    /// c ∈ {−1, +1}.
    pub fn polarity(&self) -> f64 {
        if self.positive {
            1.0
        } else {
            -1.0
        }
    }

    pub fn is_true(&self, spins: &SpinVector) -> bool {
        (spins.get(self.var) > 0) == self.positive
    }
}

/// Conjunction of exactly-3-literal clauses over distinct variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CnfFormula {
    n: usize,
    clauses: Vec<[Literal; 3]>,
}

impl CnfFormula {
    pub fn new(n: usize, clauses: Vec<[Literal; 3]>) -> Result<Self> {
        for (k, c) in clauses.iter().enumerate() {
            if c.iter().any(|l| l.var >= n) {
                return Err(Error::invalid(format!("clause {k} references a variable >= {n}")));
            }
            if c[0].var == c[1].var || c[0].var == c[2].var || c[1].var == c[2].var {
                return Err(Error::invalid(format!("clause {k} repeats a variable")));
            }
        }
        Ok(CnfFormula { n, clauses })
    }

    pub fn variable_count(&self) -> usize {
        self.n
    }

    pub fn clauses(&self) -> &[[Literal; 3]] {
        &self.clauses
    }

    /// Uniform random 3-SAT: each clause picks 3 distinct variables and
    /// independent signs.
    pub fn random(n: usize, clause_count: usize, rng: &mut RngStream) -> Self {
        assert!(n >= 3);
        let clauses = (0..clause_count)
            .map(|_| {
                let mut vars = [0usize; 3];
                let mut k = 0;
                while k < 3 {
                    let v = rng.index(n);
                    if !vars[..k].contains(&v) {
                        vars[k] = v;
                        k += 1;
                    }
                }
                vars.map(|v| Literal::new(v, rng.bernoulli(0.5)))
            })
            .collect();
        CnfFormula { n, clauses }
    }
}

/// Number of clauses with all three literals false.
pub fn violated_clauses(formula: &CnfFormula, spins: &SpinVector) -> usize {
    formula
        .clauses()
        .iter()
        .filter(|c| c.iter().all(|l| !l.is_true(spins)))
        .count()
}

/// 3-SAT target f(s) = Σ_h ∏_i (1 − c_{h_i} s_{h_i})/2, the number of
/// violated clauses. The solver gradient instead differentiates
/// Σ_h ∏_i ((1 − c y)/2)^p with p = `exponent` (4 by default), which has the
/// same values on spins but a sharper landscape in between.
#[derive(Debug, Clone)]
pub struct Sat3 {
    formula: CnfFormula,
    poly: MultilinearPolynomial,
    exponent: i32,
}

pub fn sat3_problem(formula: &CnfFormula) -> Sat3 {
    let mut monomials = Vec::with_capacity(formula.clauses().len() * 8);
    for clause in formula.clauses() {
        // expand ∏ (1 − c_k s_k)/2 over subsets of the clause
        for mask in 0u8..8 {
            let mut coef = 0.125;
            let mut vars = Vec::with_capacity(3);
            for (k, lit) in clause.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    coef *= -lit.polarity();
                    vars.push(lit.var);
                }
            }
            monomials.push(Monomial::new(coef, vars));
        }
    }
    let poly =
        MultilinearPolynomial::normalize(formula.variable_count(), monomials).expect("clause variables validated");
    Sat3 {
        formula: formula.clone(),
        poly,
        exponent: 4,
    }
}

impl Sat3 {
    pub fn with_exponent(mut self, exponent: i32) -> Self {
        assert!(exponent >= 1);
        self.exponent = exponent;
        self
    }

    pub fn formula(&self) -> &CnfFormula {
        &self.formula
    }

    pub fn polynomial(&self) -> &MultilinearPolynomial {
        &self.poly
    }

    pub fn satisfied_fraction(&self, spins: &SpinVector) -> f64 {
        let total = self.formula.clauses().len();
        if total == 0 {
            return 1.0;
        }
        1.0 - violated_clauses(&self.formula, spins) as f64 / total as f64
    }

    fn clause_terms(&self, clause: &[Literal; 3], y: &[f64]) -> [f64; 3] {
        clause.map(|l| 0.5 * (1.0 - l.polarity() * y[l.var]))
    }
}

impl Problem for Sat3 {
    fn dimension(&self) -> usize {
        self.formula.variable_count()
    }

    fn spin_energy(&self, spins: &SpinVector) -> f64 {
        self.poly.evaluate_spins(spins)
    }

    fn surrogate_value(&self, step: &Step, theta: &[f64], x: &[f64], _aux: &[f64]) -> f64 {
        let mut y = vec![0.0; theta.len()];
        surrogate_point_into(theta, x, step.sigma, &mut y);
        self.formula
            .clauses()
            .iter()
            .map(|c| {
                self.clause_terms(c, &y)
                    .iter()
                    .map(|q| q.powi(self.exponent))
                    .product::<f64>()
            })
            .sum()
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
        let n = theta.len();
        ws.y.resize(n, 0.0);
        surrogate_point_into(theta, x, step.sigma, &mut ws.y);
        grad.iter_mut().for_each(|g| *g = 0.0);
        let p = self.exponent;
        for clause in self.formula.clauses() {
            let q = self.clause_terms(clause, &ws.y);
            let qp = q.map(|v| v.powi(p));
            for k in 0..3 {
                let others = qp[(k + 1) % 3] * qp[(k + 2) % 3];
                if others == 0.0 {
                    continue;
                }
                // d/dy (q_k^p) = p q_k^(p−1) · (−c_k/2)
                let dq = f64::from(p) * q[k].powi(p - 1) * (-0.5 * clause[k].polarity());
                grad[clause[k].var] += dq * others;
            }
        }
        let inv = 1.0 / step.sigma;
        for i in 0..n {
            if grad[i] != 0.0 {
                grad[i] *= erf_derivative((theta[i] - x[i]) * inv) * inv;
            }
        }
    }

    fn flip_delta(&self, spins: &SpinVector, i: usize) -> f64 {
        self.poly.flip_delta(spins, i)
    }
}
