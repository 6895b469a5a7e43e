//! Linear subspaces of m×n matrices viewed as pencils P(z) = Σ z_l B_l.

mod ops;
mod rank_one;
mod span;

pub use ops::{apply_ops, PencilOp};
pub use rank_one::{
    find_rank_one, surd_minors_vanish, ExactDirection, RankOneOptions, RankOneSearch, RankOneWitness, SearchMode,
};
pub use span::{minor_span, same_polynomial_span, MinorSpan};

use nalgebra::DMatrix;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    enumerate_minors, format_rational, q0, MinorIndex, MinorOrder, MultiPoly, QuadraticForm, Rational, RationalMatrix,
};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    m: usize,
    n: usize,
    basis: Vec<RationalMatrix>,
}

/// JSON layout: `{ "m", "n", "d", "basis": [matrix, …] }`.
#[derive(Serialize, Deserialize)]
struct SubspaceJson {
    m: usize,
    n: usize,
    d: usize,
    basis: Vec<RationalMatrix>,
}

impl Serialize for Subspace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SubspaceJson { m: self.m, n: self.n, d: self.d(), basis: self.basis.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Subspace {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = SubspaceJson::deserialize(d)?;
        if j.basis.len() != j.d {
            return Err(serde::de::Error::custom(format!("d = {} but {} basis matrices", j.d, j.basis.len())));
        }
        Subspace::new(j.m, j.n, j.basis).map_err(serde::de::Error::custom)
    }
}

impl Subspace {
    /// Validates shapes and linear independence of the basis.
    pub fn new(m: usize, n: usize, basis: Vec<RationalMatrix>) -> Result<Self> {
        if m == 0 || n == 0 || basis.is_empty() {
            return Err(Error::DimensionMismatch("empty shape or basis".into()));
        }
        if basis.len() > m * n {
            return Err(Error::DimensionMismatch(format!("d = {} exceeds m·n = {}", basis.len(), m * n)));
        }
        if let Some(b) = basis.iter().find(|b| b.shape() != (m, n)) {
            return Err(Error::DimensionMismatch(format!("basis matrix is {}x{}, expected {m}x{n}", b.rows(), b.cols())));
        }
        let flat: Vec<Vec<Rational>> = basis.iter().map(|b| b.entries().to_vec()).collect();
        let rows = RationalMatrix::from_rows(&flat)?;
        if let Some(dep) = rows.transpose().nullspace().first() {
            let terms: Vec<String> = dep
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(l, c)| format!("({})·B{}", format_rational(c), l + 1))
                .collect();
            return Err(Error::DependentBasis(format!("{} = 0", terms.join(" + "))));
        }
        Ok(Self { m, n, basis })
    }

    /// Builds from the entry vectors a_ij ∈ Q^d (row-major over (i, j)).
    pub fn from_entry_vectors(m: usize, n: usize, d: usize, entries: &[Vec<Rational>]) -> Result<Self> {
        if entries.len() != m * n || entries.iter().any(|e| e.len() != d) {
            return Err(Error::DimensionMismatch("entry vectors".into()));
        }
        let basis = (0..d)
            .map(|l| RationalMatrix::new(m, n, entries.iter().map(|e| e[l].clone()).collect()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(m, n, basis)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[RationalMatrix] {
        &self.basis
    }

    /// The vector a_ij with P(z)_ij = a_ij · z.
    pub fn entry_vector(&self, i: usize, j: usize) -> Vec<Rational> {
        self.basis.iter().map(|b| b.get(i, j).clone()).collect()
    }

    pub fn entry_vectors(&self) -> Vec<Vec<Rational>> {
        (0..self.m).flat_map(|i| (0..self.n).map(move |j| (i, j))).map(|(i, j)| self.entry_vector(i, j)).collect()
    }

    /// P(z) = Σ z_l B_l.
    pub fn eval(&self, z: &[Rational]) -> Result<RationalMatrix> {
        if z.len() != self.d() {
            return Err(Error::DimensionMismatch(format!("{} coordinates for d = {}", z.len(), self.d())));
        }
        let mut acc = RationalMatrix::zeros(self.m, self.n);
        for (b, c) in self.basis.iter().zip(z) {
            if !c.is_zero() {
                acc = acc.add(&b.scale(c))?;
            }
        }
        Ok(acc)
    }

    pub fn eval_f64(&self, z: &[f64]) -> DMatrix<f64> {
        let mut acc = DMatrix::zeros(self.m, self.n);
        for (b, &c) in self.basis.iter().zip(z) {
            acc += b.to_f64() * c;
        }
        acc
    }

    /// Coordinates of `x` in the basis, if `x` lies in the subspace.
    pub fn coordinates(&self, x: &RationalMatrix) -> Option<Vec<Rational>> {
        let cols: Vec<Vec<Rational>> = self.basis.iter().map(|b| b.entries().to_vec()).collect();
        crate::algebra::express_in(&cols, x.entries())
    }

    /// The subspace spanned by P(c_k) for the columns c_k of `cone` (d × k, full column rank).
    pub fn restrict(&self, cone: &RationalMatrix) -> Result<Self> {
        if cone.rows() != self.d() {
            return Err(Error::DimensionMismatch("cone basis height".into()));
        }
        let basis = (0..cone.cols()).map(|k| self.eval(&cone.column(k))).collect::<Result<Vec<_>>>()?;
        Self::new(self.m, self.n, basis)
    }

    pub fn transpose(&self) -> Self {
        Self { m: self.n, n: self.m, basis: self.basis.iter().map(RationalMatrix::transpose).collect() }
    }

    /// Frobenius Gram matrix of the basis, so that ‖P(z)‖² = zᵀ G z.
    pub fn gram(&self) -> RationalMatrix {
        let d = self.d();
        let mut g = RationalMatrix::zeros(d, d);
        for i in 0..d {
            for j in i..d {
                let v = self.basis[i].frobenius_dot(&self.basis[j]);
                g.set(i, j, v.clone());
                g.set(j, i, v);
            }
        }
        g
    }

    /// Quadratic forms z ↦ M_k(P(z)) for every order-2 minor, in the fixed lexicographic order.
    pub fn minor_forms(&self) -> Vec<QuadraticForm> {
        let d = self.d();
        let a: Vec<Vec<Vec<Rational>>> =
            (0..self.m).map(|i| (0..self.n).map(|j| self.entry_vector(i, j)).collect()).collect();
        let nonzero: Vec<Vec<bool>> = a.iter().map(|r| r.iter().map(|v| v.iter().any(|x| !x.is_zero())).collect()).collect();
        let mut out = Vec::with_capacity(q0(self.m, self.n));
        for idx in self.order2_minors() {
            let (r1, r2, c1, c2) = (idx.rows[0], idx.rows[1], idx.cols[0], idx.cols[1]);
            let mut mat = RationalMatrix::zeros(d, d);
            let mut add_sym = |u: &[Rational], v: &[Rational], sign: bool| {
                let half = Rational::new(1.into(), 2.into());
                for i in 0..d {
                    for j in 0..d {
                        let t = (&u[i] * &v[j] + &u[j] * &v[i]) * &half;
                        if !t.is_zero() {
                            let cur = mat.get(i, j).clone();
                            mat.set(i, j, if sign { cur + t } else { cur - t });
                        }
                    }
                }
            };
            if nonzero[r1][c1] && nonzero[r2][c2] {
                add_sym(&a[r1][c1], &a[r2][c2], true);
            }
            if nonzero[r1][c2] && nonzero[r2][c1] {
                add_sym(&a[r1][c2], &a[r2][c1], false);
            }
            out.push(QuadraticForm::new(mat).expect("symmetric by construction"));
        }
        out
    }

    pub fn order2_minors(&self) -> Vec<MinorIndex> {
        if self.m < 2 || self.n < 2 {
            return Vec::new();
        }
        enumerate_minors(self.m, self.n, MinorOrder::Order(2)).expect("order 2 is valid")
    }
}

/// Pencil of degree-1 polynomials: entry (i, j) is a_ij · z.
pub fn parametrize(k: &Subspace) -> Vec<Vec<MultiPoly>> {
    (0..k.m()).map(|i| (0..k.n()).map(|j| MultiPoly::linear(&k.entry_vector(i, j))).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{int, minor_at};

    #[test]
    fn rejects_dependent_basis() {
        let a = RationalMatrix::from_i64(&[&[1, 0], &[0, 1]]);
        let b = a.scale(&int(2));
        let err = Subspace::new(2, 2, vec![a, b]).unwrap_err();
        assert!(matches!(err, Error::DependentBasis(_)));
    }

    #[test]
    fn pencil_evaluation_matches_basis_sum() {
        let k = Subspace::new(
            2,
            2,
            vec![RationalMatrix::from_i64(&[&[1, 0], &[0, 1]]), RationalMatrix::from_i64(&[&[0, 1], &[-1, 0]])],
        )
        .unwrap();
        let p = parametrize(&k);
        let z = vec![int(3), int(-2)];
        let x = k.eval(&z).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(&p[i][j].eval(&z).unwrap(), x.get(i, j));
            }
        }
        let forms = k.minor_forms();
        assert_eq!(forms.len(), 1);
        assert_eq!(forms[0].eval(&z).unwrap(), minor_at(&x, &k.order2_minors()[0]).unwrap());
        assert_eq!(forms[0], QuadraticForm::identity(2));
    }

    #[test]
    fn json_round_trip() {
        let k = Subspace::new(1, 2, vec![RationalMatrix::from_i64(&[&[1, 2]])]).unwrap();
        let s = serde_json::to_string(&k).unwrap();
        assert_eq!(s, r#"{"m":1,"n":2,"d":1,"basis":[[["1","2"]]]}"#);
        assert_eq!(serde_json::from_str::<Subspace>(&s).unwrap(), k);
        assert!(serde_json::from_str::<Subspace>(r#"{"m":1,"n":2,"d":2,"basis":[[["1","2"]]]}"#).is_err());
    }
}
