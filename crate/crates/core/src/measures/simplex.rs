use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::algebra::{dot, Rational, RationalMatrix};
use crate::error::{Error, Result};

/// Feasibility of A x = b with x ≥ 0.
#[derive(Clone, Debug)]
pub struct FarkasProblem {
    pub a: RationalMatrix,
    pub b: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", content = "vector", rename_all = "snake_case")]
pub enum FarkasOutcome {
    /// x ≥ 0 with A x = b.
    Feasible(#[serde(with = "crate::json::rational_vec")] Vec<Rational>),
    /// y with yᵀA ≥ 0 and yᵀb < 0.
    Infeasible(#[serde(with = "crate::json::rational_vec")] Vec<Rational>),
}

impl FarkasOutcome {
    pub fn solution(&self) -> Option<&[Rational]> {
        match self {
            Self::Feasible(x) => Some(x),
            Self::Infeasible(_) => None,
        }
    }
}

impl FarkasProblem {
    pub fn new(a: RationalMatrix, b: Vec<Rational>) -> Result<Self> {
        if a.rows() != b.len() {
            return Err(Error::DimensionMismatch(format!("A has {} rows, b has {}", a.rows(), b.len())));
        }
        Ok(Self { a, b })
    }

    pub fn check_solution(&self, x: &[Rational]) -> bool {
        x.len() == self.a.cols()
            && x.iter().all(|v| !v.is_negative())
            && self.a.mul_vec(x).map(|ax| ax == self.b).unwrap_or(false)
    }

    pub fn check_certificate(&self, y: &[Rational]) -> bool {
        y.len() == self.a.rows()
            && (0..self.a.cols()).all(|j| !dot(y, &self.a.column(j)).is_negative())
            && dot(y, &self.b).is_negative()
    }
}

/// Phase-one simplex over Q with Bland's rule; every returned vector is re-verified exactly.
pub fn farkas_solve(p: &FarkasProblem) -> Result<FarkasOutcome> {
    let (m, n) = p.a.shape();
    // Rows with negative rhs are negated so the artificial basis starts feasible.
    let flip: Vec<bool> = p.b.iter().map(Signed::is_negative).collect();
    let w = n + m + 1;
    let rhs = n + m;
    let mut t = vec![Rational::zero(); m * w];
    for i in 0..m {
        let s = if flip[i] { -Rational::one() } else { Rational::one() };
        for j in 0..n {
            t[i * w + j] = p.a.get(i, j) * &s;
        }
        t[i * w + n + i] = Rational::one();
        t[i * w + rhs] = &p.b[i] * &s;
    }
    // Reduced costs of min Σ artificials; the rhs slot holds minus the objective.
    let mut r = vec![Rational::zero(); w];
    for i in 0..m {
        for j in 0..n {
            r[j] -= &t[i * w + j];
        }
        r[rhs] -= &t[i * w + rhs];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    loop {
        let Some(e) = (0..n + m).find(|&j| r[j].is_negative()) else { break };
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            let a = &t[i * w + e];
            if a.is_positive() {
                let ratio = &t[i * w + rhs] / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((l, _)) = leave else {
            return Err(Error::Verification("phase-one objective unbounded".into()));
        };
        let piv = t[l * w + e].clone();
        for j in 0..w {
            t[l * w + j] = &t[l * w + j] / &piv;
        }
        for i in 0..m {
            if i != l && !t[i * w + e].is_zero() {
                let f = t[i * w + e].clone();
                for j in 0..w {
                    if !t[l * w + j].is_zero() {
                        let v = &f * &t[l * w + j];
                        t[i * w + j] -= v;
                    }
                }
            }
        }
        let f = r[e].clone();
        for j in 0..w {
            if !t[l * w + j].is_zero() {
                r[j] -= &f * &t[l * w + j];
            }
        }
        basis[l] = e;
    }
    if r[rhs].is_zero() {
        let mut x = vec![Rational::zero(); n];
        for (i, &bv) in basis.iter().enumerate() {
            if bv < n {
                x[bv] = t[i * w + rhs].clone();
            }
        }
        if !p.check_solution(&x) {
            return Err(Error::Verification("simplex solution failed exact re-check".into()));
        }
        return Ok(FarkasOutcome::Feasible(x));
    }
    // Phase-one duals π_i = 1 − r_{n+i}; y = −π mapped back through the row flips.
    let y: Vec<Rational> = (0..m)
        .map(|i| {
            let pi = Rational::one() - &r[n + i];
            if flip[i] {
                pi
            } else {
                -pi
            }
        })
        .collect();
    if !p.check_certificate(&y) {
        return Err(Error::Verification("Farkas certificate failed exact re-check".into()));
    }
    Ok(FarkasOutcome::Infeasible(y))
}
