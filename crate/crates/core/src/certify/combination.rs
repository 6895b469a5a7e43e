use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::algebra::{QuadraticForm, Rational, RationalMatrix};
use crate::error::{Error, Result};
use crate::subspace::Subspace;

/// β over the order-2 minors (fixed lexicographic order) together with the quadratic form
/// z ↦ Σ β_k M_k(P(z)) it induces on the subspace it was built for.
#[derive(Clone, Debug, PartialEq)]
pub struct MinorCombination {
    beta: Vec<Rational>,
    /// Coefficients on the coordinate projections; the search never fills these in.
    projections: Option<Vec<Rational>>,
    form: QuadraticForm,
}

#[derive(Serialize)]
struct CombinationJson<'a> {
    #[serde(with = "crate::json::rational_vec")]
    beta: &'a Vec<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    projections: Option<Vec<String>>,
    form: &'a RationalMatrix,
}

impl Serialize for MinorCombination {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CombinationJson {
            beta: &self.beta,
            projections: self.projections.as_ref().map(|p| p.iter().map(crate::algebra::format_rational).collect()),
            form: self.form.matrix(),
        }
        .serialize(s)
    }
}

impl MinorCombination {
    pub fn new(k: &Subspace, beta: Vec<Rational>) -> Result<Self> {
        let forms = k.minor_forms();
        if beta.len() != forms.len() {
            return Err(Error::DimensionMismatch(format!("β has {} entries, there are {} order-2 minors", beta.len(), forms.len())));
        }
        if beta.iter().all(Zero::is_zero) {
            return Err(Error::Precondition("β is identically zero".into()));
        }
        let form = QuadraticForm::linear_combination(k.d(), &forms, &beta)?;
        Ok(Self { beta, projections: None, form })
    }

    pub fn beta(&self) -> &[Rational] {
        &self.beta
    }

    pub fn projections(&self) -> Option<&[Rational]> {
        self.projections.as_deref()
    }

    pub fn form(&self) -> &QuadraticForm {
        &self.form
    }

    /// Indices of the minors with non-zero coefficient.
    pub fn support(&self) -> Vec<usize> {
        (0..self.beta.len()).filter(|&i| !self.beta[i].is_zero()).collect()
    }
}

/// Where a combination must be non-negative.
#[derive(Clone, Debug)]
pub enum Cone {
    /// Column span of a d×k matrix in parameter space.
    Subspace(RationalMatrix),
    /// Points known to lie on a cone that has no finite linear description.
    Sampled(Vec<Vec<f64>>),
}

impl Cone {
    pub fn whole(d: usize) -> Self {
        Cone::Subspace(RationalMatrix::identity(d))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CombinationVerdict {
    /// Positive semidefinite and not identically zero on the cone.
    Certified { rank: usize },
    /// The form vanishes identically on the cone.
    Vanishes,
    /// A point where the form is negative, plus one where it is positive if the form changes sign.
    Negative {
        #[serde(with = "crate::json::rational_vec")]
        witness: Vec<Rational>,
        #[serde(with = "crate::json::rational")]
        value: Rational,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        positive: Option<Vec<String>>,
    },
    /// Sampling only; never a proof.
    Sampled { min: f64, max: f64, points: usize, tolerance: f64 },
}

impl CombinationVerdict {
    pub fn is_certified(&self) -> bool {
        matches!(self, Self::Certified { .. })
    }
}

/// Exact on subspace cones: restrict, diagonalize, read off the signs.
pub fn verify_combination(k: &Subspace, combo: &MinorCombination, cone: &Cone) -> Result<CombinationVerdict> {
    if combo.form.dim() != k.d() {
        return Err(Error::DimensionMismatch(format!("form on R^{}, subspace has d = {}", combo.form.dim(), k.d())));
    }
    let direct = MinorCombination::new(k, combo.beta.clone())?;
    if direct.form != combo.form {
        return Err(Error::Verification("stored form disagrees with Σ β_k M_k on this subspace".into()));
    }
    match cone {
        Cone::Subspace(c) => {
            let restricted = combo.form.restrict(c)?;
            if restricted.is_zero() {
                return Ok(CombinationVerdict::Vanishes);
            }
            let diag = restricted.diagonalize();
            if let Some(w) = diag.negative_witness() {
                let z = c.mul_vec(&w)?;
                let value = combo.form.eval(&z)?;
                let positive = diag
                    .positive_witness()
                    .map(|p| c.mul_vec(&p).map(|v| v.iter().map(crate::algebra::format_rational).collect()))
                    .transpose()?;
                return Ok(CombinationVerdict::Negative { witness: z, value, positive });
            }
            Ok(CombinationVerdict::Certified { rank: diag.rank() })
        }
        Cone::Sampled(points) => {
            let m = combo.form.to_f64();
            let tolerance = 1e-9;
            let vals: Vec<f64> = points
                .iter()
                .map(|p| {
                    let v = nalgebra::DVector::from_column_slice(p);
                    v.dot(&(&m * &v))
                })
                .collect();
            let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
            let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            Ok(CombinationVerdict::Sampled { min, max, points: points.len(), tolerance })
        }
    }
}
