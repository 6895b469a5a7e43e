use std::collections::HashSet;

use nalgebra::DMatrix;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{enumerate_minors, max_abs, MinorIndex, MinorOrder, Rational, RationalMatrix};
use crate::error::{Error, Result};

/// Finite atomic probability measure on m×n matrices (points of Q^d are stored as d×1 columns).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscreteMeasure {
    shape: (usize, usize),
    atoms: Vec<RationalMatrix>,
    weights: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct MeasureJson {
    shape: [usize; 2],
    atoms: Vec<RationalMatrix>,
    #[serde(with = "crate::json::rational_vec")]
    weights: Vec<Rational>,
}

impl Serialize for DiscreteMeasure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MeasureJson { shape: [self.shape.0, self.shape.1], atoms: self.atoms.clone(), weights: self.weights.clone() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DiscreteMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MeasureJson::deserialize(d)?;
        DiscreteMeasure::new((j.shape[0], j.shape[1]), j.atoms, j.weights).map_err(serde::de::Error::custom)
    }
}

impl DiscreteMeasure {
    /// Validates shapes, non-negative weights summing to one, and pairwise distinct atoms.
    pub fn new(shape: (usize, usize), atoms: Vec<RationalMatrix>, weights: Vec<Rational>) -> Result<Self> {
        if atoms.is_empty() || atoms.len() != weights.len() {
            return Err(Error::DimensionMismatch(format!("{} atoms, {} weights", atoms.len(), weights.len())));
        }
        if let Some(a) = atoms.iter().find(|a| a.shape() != shape) {
            return Err(Error::DimensionMismatch(format!("atom is {}x{}, expected {}x{}", a.rows(), a.cols(), shape.0, shape.1)));
        }
        if weights.iter().any(Signed::is_negative) {
            return Err(Error::Precondition("negative weight".into()));
        }
        if weights.iter().sum::<Rational>() != Rational::one() {
            return Err(Error::Precondition("weights do not sum to 1".into()));
        }
        let mut seen = HashSet::new();
        if !atoms.iter().all(|a| seen.insert(a)) {
            return Err(Error::Precondition("atoms are not pairwise distinct".into()));
        }
        Ok(Self { shape, atoms, weights })
    }

    pub fn dirac(a: RationalMatrix) -> Self {
        Self { shape: a.shape(), atoms: vec![a], weights: vec![Rational::one()] }
    }

    /// ½δ_A + ½δ_{−A}.
    pub fn symmetric_pair(a: RationalMatrix) -> Result<Self> {
        let half = Rational::new(1.into(), 2.into());
        let neg = a.neg();
        Self::new(a.shape(), vec![a, neg], vec![half.clone(), half])
    }

    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    pub fn atoms(&self) -> &[RationalMatrix] {
        &self.atoms
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// A measure is trivial when it is a single Dirac mass.
    pub fn is_trivial(&self) -> bool {
        self.weights.iter().filter(|w| !w.is_zero()).count() <= 1
    }

    pub fn barycenter(&self) -> RationalMatrix {
        let mut acc = RationalMatrix::zeros(self.shape.0, self.shape.1);
        for (a, w) in self.atoms.iter().zip(&self.weights) {
            acc = acc.add(&a.scale(w)).expect("shapes checked");
        }
        acc
    }

    /// Push-forward by X ↦ X + c.
    pub fn translate(&self, c: &RationalMatrix) -> Result<Self> {
        let atoms = self.atoms.iter().map(|a| a.add(c)).collect::<Result<Vec<_>>>()?;
        Self::new(self.shape, atoms, self.weights.clone())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NullLagrangianReport {
    pub verdict: bool,
    pub checked: usize,
    /// Minors with a non-zero residual ∫M dμ − M(μ̄).
    pub nonzero: Vec<(MinorIndex, String)>,
    #[serde(with = "crate::json::rational")]
    pub max_abs_residual: Rational,
}

fn support(a: &RationalMatrix) -> (Vec<bool>, Vec<bool>) {
    let rows = (0..a.rows()).map(|i| a.row(i).iter().any(|x| !x.is_zero())).collect();
    let cols = (0..a.cols()).map(|j| (0..a.rows()).any(|i| !a.get(i, j).is_zero())).collect();
    (rows, cols)
}

fn minor_skipping_zeros(a: &RationalMatrix, sup: &(Vec<bool>, Vec<bool>), idx: &MinorIndex) -> Rational {
    if idx.rows.iter().any(|&i| !sup.0[i]) || idx.cols.iter().any(|&j| !sup.1[j]) {
        return Rational::zero();
    }
    a.submatrix(&idx.rows, &idx.cols).and_then(|s| s.det()).expect("indices from enumeration")
}

/// Exact check of ∫M dμ = M(μ̄) for every minor of the requested orders.
pub fn is_null_lagrangian(mu: &DiscreteMeasure, shape: (usize, usize), orders: MinorOrder) -> Result<NullLagrangianReport> {
    if mu.shape != shape {
        return Err(Error::DimensionMismatch(format!("measure on {:?}, requested {:?}", mu.shape, shape)));
    }
    let minors = if shape.0.min(shape.1) < 2 { Vec::new() } else { enumerate_minors(shape.0, shape.1, orders)? };
    let bary = mu.barycenter();
    let sups: Vec<_> = mu.atoms.iter().map(support).collect();
    let bsup = support(&bary);
    let mut nonzero = Vec::new();
    let mut residuals = Vec::new();
    for idx in &minors {
        let mut r = -minor_skipping_zeros(&bary, &bsup, idx);
        for ((a, s), w) in mu.atoms.iter().zip(&sups).zip(&mu.weights) {
            if !w.is_zero() {
                let v = minor_skipping_zeros(a, s, idx);
                if !v.is_zero() {
                    r += w * v;
                }
            }
        }
        if !r.is_zero() {
            nonzero.push((idx.clone(), crate::algebra::format_rational(&r)));
            residuals.push(r);
        }
    }
    Ok(NullLagrangianReport {
        verdict: nonzero.is_empty(),
        checked: minors.len(),
        nonzero,
        max_abs_residual: max_abs(&residuals),
    })
}

/// Floating-point atomic measure, used for the conservation-law construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FloatMeasure {
    pub shape: [usize; 2],
    pub atoms: Vec<Vec<Vec<f64>>>,
    pub weights: Vec<f64>,
}

impl FloatMeasure {
    pub fn from_matrices(atoms: &[DMatrix<f64>], weights: Vec<f64>) -> Self {
        let shape = atoms.first().map_or([0, 0], |a| [a.nrows(), a.ncols()]);
        let atoms = atoms.iter().map(|a| (0..a.nrows()).map(|i| a.row(i).iter().copied().collect()).collect()).collect();
        Self { shape, atoms, weights }
    }

    pub fn matrices(&self) -> Vec<DMatrix<f64>> {
        self.atoms
            .iter()
            .map(|a| DMatrix::from_fn(self.shape[0], self.shape[1], |i, j| a[i][j]))
            .collect()
    }

    pub fn barycenter(&self) -> DMatrix<f64> {
        let mut acc = DMatrix::zeros(self.shape[0], self.shape[1]);
        for (a, w) in self.matrices().iter().zip(&self.weights) {
            acc += a * *w;
        }
        acc
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FloatNullLagrangianReport {
    pub verdict: bool,
    pub tolerance: f64,
    pub max_abs_residual: f64,
    pub residuals: Vec<f64>,
}

/// Tolerance-based analogue of [`is_null_lagrangian`]; also checks weights are a probability vector.
pub fn is_null_lagrangian_f64(mu: &FloatMeasure, orders: MinorOrder, tol: f64) -> Result<FloatNullLagrangianReport> {
    let [m, n] = mu.shape;
    let minors = if m.min(n) < 2 { Vec::new() } else { enumerate_minors(m, n, orders)? };
    let mats = mu.matrices();
    let bary = mu.barycenter();
    let det = |a: &DMatrix<f64>, idx: &MinorIndex| {
        DMatrix::from_fn(idx.order(), idx.order(), |i, j| a[(idx.rows[i], idx.cols[j])]).determinant()
    };
    let residuals: Vec<f64> = minors
        .iter()
        .map(|idx| mats.iter().zip(&mu.weights).map(|(a, w)| w * det(a, idx)).sum::<f64>() - det(&bary, idx))
        .collect();
    let max_abs_residual = residuals.iter().fold(0.0f64, |acc, r| acc.max(r.abs()));
    let weights_ok = mu.weights.iter().all(|w| *w >= -tol) && (mu.weights.iter().sum::<f64>() - 1.0).abs() <= tol;
    Ok(FloatNullLagrangianReport { verdict: weights_ok && max_abs_residual <= tol, tolerance: tol, max_abs_residual, residuals })
}
