use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::matrix::{dot, RationalMatrix};
use super::poly::MultiPoly;
use super::rational::{int, Rational};
use crate::error::{Error, Result};

/// Quadratic form zᵀ X z with X exactly symmetric.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticForm {
    matrix: RationalMatrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Definiteness {
    Zero,
    PositiveDefinite,
    PositiveSemidefinite,
    NegativeDefinite,
    NegativeSemidefinite,
    Indefinite,
}

impl Definiteness {
    pub fn is_psd(self) -> bool {
        matches!(self, Self::Zero | Self::PositiveDefinite | Self::PositiveSemidefinite)
    }
}

/// Congruence diagonalization Tᵀ X T = diag(D).
#[derive(Clone, Debug)]
pub struct Diagonalization {
    pub transform: RationalMatrix,
    pub diagonal: Vec<Rational>,
    /// Set when elimination met a zero pivot with a non-zero residual row.
    pub zero_pivot_with_residual: bool,
}

impl Diagonalization {
    pub fn definiteness(&self) -> Definiteness {
        let pos = self.diagonal.iter().filter(|x| x.is_positive()).count();
        let neg = self.diagonal.iter().filter(|x| x.is_negative()).count();
        let n = self.diagonal.len();
        match (pos, neg) {
            (0, 0) => Definiteness::Zero,
            (p, 0) if p == n => Definiteness::PositiveDefinite,
            (_, 0) => Definiteness::PositiveSemidefinite,
            (0, q) if q == n => Definiteness::NegativeDefinite,
            (0, _) => Definiteness::NegativeSemidefinite,
            _ => Definiteness::Indefinite,
        }
    }

    pub fn rank(&self) -> usize {
        self.diagonal.iter().filter(|x| !x.is_zero()).count()
    }

    fn column(&self, k: usize) -> Vec<Rational> {
        self.transform.column(k)
    }

    /// A vector with strictly negative value, if any.
    pub fn negative_witness(&self) -> Option<Vec<Rational>> {
        self.diagonal.iter().position(|x| x.is_negative()).map(|k| self.column(k))
    }

    pub fn positive_witness(&self) -> Option<Vec<Rational>> {
        self.diagonal.iter().position(|x| x.is_positive()).map(|k| self.column(k))
    }

    /// Null directions of the form; for a semidefinite form these span its zero set.
    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        (0..self.diagonal.len()).filter(|&k| self.diagonal[k].is_zero()).map(|k| self.column(k)).collect()
    }
}

impl QuadraticForm {
    pub fn new(matrix: RationalMatrix) -> Result<Self> {
        if !matrix.is_symmetric() {
            return Err(Error::DimensionMismatch("quadratic form matrix must be square and symmetric".into()));
        }
        Ok(Self { matrix })
    }

    pub fn zero(dim: usize) -> Self {
        Self { matrix: RationalMatrix::zeros(dim, dim) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: RationalMatrix::identity(dim) }
    }

    /// (ψ·z)².
    pub fn square_of_linear(psi: &[Rational]) -> Self {
        let d = psi.len();
        let mut m = RationalMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                m.set(i, j, &psi[i] * &psi[j]);
            }
        }
        Self { matrix: m }
    }

    /// From a homogeneous quadratic polynomial (or zero).
    pub fn from_poly(p: &MultiPoly) -> Result<Self> {
        let d = p.nvars();
        let mut m = RationalMatrix::zeros(d, d);
        let half = Rational::new(1.into(), 2.into());
        for (e, c) in p.terms() {
            let idx: Vec<usize> = e.iter().enumerate().flat_map(|(i, &k)| std::iter::repeat_n(i, k as usize)).collect();
            match idx.as_slice() {
                [i, j] if i == j => m.set(*i, *i, c.clone()),
                [i, j] => {
                    m.set(*i, *j, c * &half);
                    m.set(*j, *i, c * &half);
                }
                _ => return Err(Error::DimensionMismatch("polynomial is not a quadratic form".into())),
            }
        }
        Ok(Self { matrix: m })
    }

    pub fn to_poly(&self) -> MultiPoly {
        let d = self.dim();
        let mut p = MultiPoly::zero(d);
        for i in 0..d {
            for j in i..d {
                let mut e = vec![0; d];
                e[i] += 1;
                e[j] += 1;
                let c = if i == j { self.matrix.get(i, i).clone() } else { self.matrix.get(i, j) * int(2) };
                p.add_term(e, c);
            }
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.matrix
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    pub fn eval(&self, z: &[Rational]) -> Result<Rational> {
        Ok(dot(z, &self.matrix.mul_vec(z)?))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self { matrix: self.matrix.add(&other.matrix)? })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self { matrix: self.matrix.scale(c) }
    }

    pub fn linear_combination(dim: usize, forms: &[Self], coeffs: &[Rational]) -> Result<Self> {
        if forms.len() != coeffs.len() {
            return Err(Error::DimensionMismatch("forms vs coefficients".into()));
        }
        let mut acc = Self::zero(dim);
        for (f, c) in forms.iter().zip(coeffs) {
            if !c.is_zero() {
                acc = acc.add(&f.scale(c))?;
            }
        }
        Ok(acc)
    }

    /// Cᵀ X C: the form pulled back along the columns of `c`.
    pub fn restrict(&self, c: &RationalMatrix) -> Result<Self> {
        Ok(Self { matrix: c.transpose().mul(&self.matrix)?.mul(c)? })
    }

    /// Upper-triangle entries (i ≤ j), row by row.
    pub fn upper_vector(&self) -> Vec<Rational> {
        let d = self.dim();
        (0..d).flat_map(|i| (i..d).map(move |j| (i, j))).map(|(i, j)| self.matrix.get(i, j).clone()).collect()
    }

    /// Exact symmetric elimination with diagonal pivoting (largest |pivot| first).
    /// A zero pivot with a non-zero residual entry is resolved by the congruence e_i ← e_i + e_j.
    pub fn diagonalize(&self) -> Diagonalization {
        let n = self.dim();
        let mut s = self.matrix.clone();
        let mut t = RationalMatrix::identity(n);
        let mut done = vec![false; n];
        let mut diagonal = vec![Rational::zero(); n];
        let mut flagged = false;
        for _ in 0..n {
            let pick = (0..n)
                .filter(|&i| !done[i] && !s.get(i, i).is_zero())
                .max_by(|&a, &b| s.get(a, a).abs().cmp(&s.get(b, b).abs()).then(b.cmp(&a)));
            let p = match pick {
                Some(p) => p,
                None => {
                    let pair = (0..n).filter(|&i| !done[i]).find_map(|i| {
                        (0..n).find(|&j| j != i && !done[j] && !s.get(i, j).is_zero()).map(|j| (i, j))
                    });
                    let Some((i, j)) = pair else { break };
                    flagged = true;
                    add_congruence(&mut s, &mut t, i, j, &Rational::one());
                    i
                }
            };
            let piv = s.get(p, p).clone();
            for i in 0..n {
                if i != p && !done[i] && !s.get(i, p).is_zero() {
                    let f = -(s.get(i, p) / &piv);
                    add_congruence(&mut s, &mut t, i, p, &f);
                }
            }
            done[p] = true;
            diagonal[p] = piv;
        }
        Diagonalization { transform: t, diagonal, zero_pivot_with_residual: flagged }
    }

    pub fn definiteness(&self) -> Definiteness {
        self.diagonalize().definiteness()
    }

    pub fn to_f64(&self) -> nalgebra::DMatrix<f64> {
        self.matrix.to_f64()
    }
}

/// Replace basis vector e_i by e_i + f·e_j: column and row i of `s` gain f times column/row j.
fn add_congruence(s: &mut RationalMatrix, t: &mut RationalMatrix, i: usize, j: usize, f: &Rational) {
    let n = s.rows();
    for r in 0..n {
        let v = s.get(r, i) + f * s.get(r, j);
        s.set(r, i, v);
    }
    for c in 0..n {
        let v = s.get(i, c) + f * s.get(j, c);
        s.set(i, c, v);
    }
    for r in 0..n {
        let v = t.get(r, i) + f * t.get(r, j);
        t.set(r, i, v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(rows: &[&[i64]]) -> QuadraticForm {
        QuadraticForm::new(RationalMatrix::from_i64(rows)).unwrap()
    }

    fn check(q: &QuadraticForm) {
        let dg = q.diagonalize();
        let t = &dg.transform;
        let prod = t.transpose().mul(q.matrix()).unwrap().mul(t).unwrap();
        for i in 0..q.dim() {
            for j in 0..q.dim() {
                let expect = if i == j { dg.diagonal[i].clone() } else { Rational::zero() };
                assert_eq!(prod.get(i, j), &expect);
            }
        }
        assert!(!t.det().unwrap().is_zero());
    }

    #[test]
    fn classification() {
        assert_eq!(form(&[&[1, 0], &[0, 1]]).definiteness(), Definiteness::PositiveDefinite);
        assert_eq!(form(&[&[1, 1], &[1, 1]]).definiteness(), Definiteness::PositiveSemidefinite);
        assert_eq!(form(&[&[0, 1], &[1, 0]]).definiteness(), Definiteness::Indefinite);
        assert_eq!(form(&[&[0, 0], &[0, 0]]).definiteness(), Definiteness::Zero);
        assert_eq!(form(&[&[-2, 1], &[1, -1]]).definiteness(), Definiteness::NegativeDefinite);
        assert_eq!(form(&[&[1, 2, 0], &[2, 1, 0], &[0, 0, 3]]).definiteness(), Definiteness::Indefinite);
    }

    #[test]
    fn zero_pivot_flags_indefinite() {
        let q = form(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 0]]);
        let dg = q.diagonalize();
        assert!(dg.zero_pivot_with_residual);
        assert_eq!(dg.definiteness(), Definiteness::Indefinite);
        let neg = dg.negative_witness().unwrap();
        assert!(q.eval(&neg).unwrap().is_negative());
        let pos = dg.positive_witness().unwrap();
        assert!(q.eval(&pos).unwrap().is_positive());
        check(&q);
    }

    #[test]
    fn kernel_of_semidefinite() {
        let q = form(&[&[1, 1, 0], &[1, 1, 0], &[0, 0, 2]]);
        let dg = q.diagonalize();
        let ker = dg.kernel();
        assert_eq!(ker.len(), 1);
        assert!(q.matrix().mul_vec(&ker[0]).unwrap().iter().all(Zero::is_zero));
        check(&q);
    }

    #[test]
    fn poly_round_trip() {
        let q = form(&[&[3, -1], &[-1, 2]]);
        assert_eq!(QuadraticForm::from_poly(&q.to_poly()).unwrap(), q);
        let z = vec![int(2), int(-5)];
        assert_eq!(q.eval(&z).unwrap(), q.to_poly().eval(&z).unwrap());
    }
}
