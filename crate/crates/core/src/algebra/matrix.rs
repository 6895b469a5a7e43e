use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::rational::{denominator_lcm, format_rational, int, to_f64, Rational};
use crate::error::{Error, Result};

/// Dense row-major matrix over the rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Rational>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Self { rows: r, cols: c, data: rows.iter().flatten().cloned().collect() })
    }

    /// Integer matrix from literal rows; panics on ragged input, intended for fixtures and tests.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let rows: Vec<Vec<Rational>> = rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
        Self::from_rows(&rows).expect("ragged literal")
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<Rational>], height: usize) -> Result<Self> {
        let mut m = Self::zeros(height, cols.len());
        for (j, c) in cols.iter().enumerate() {
            if c.len() != height {
                return Err(Error::DimensionMismatch("column length".into()));
            }
            for (i, x) in c.iter().enumerate() {
                m.data[i * cols.len() + j] = x.clone();
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn entries(&self) -> &[Rational] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch("matrix-vector".into()));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).filter(|(a, _)| !a.is_zero()).map(|(a, b)| a * b).sum())
            .collect())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&Rational, &Rational) -> Rational) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch("elementwise op".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * c).collect() }
    }

    pub fn neg(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| -x).collect() }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        if rows.iter().any(|&r| r >= self.rows) || cols.iter().any(|&c| c >= self.cols) {
            return Err(Error::IndexOutOfRange(format!("submatrix of {}x{}", self.rows, self.cols)));
        }
        let data = rows.iter().flat_map(|&r| cols.iter().map(move |&c| (r, c))).map(|(r, c)| self.get(r, c).clone()).collect();
        Ok(Self { rows: rows.len(), cols: cols.len(), data })
    }

    pub fn to_f64(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.rows, self.cols, |i, j| to_f64(self.get(i, j)))
    }

    /// Frobenius inner product.
    pub fn frobenius_dot(&self, other: &Self) -> Rational {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    /// Exact determinant: cofactor expansion up to 3x3, fraction-free elimination beyond.
    pub fn det(&self) -> Result<Rational> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!("det of {}x{}", self.rows, self.cols)));
        }
        let g = |i, j| self.get(i, j);
        Ok(match self.rows {
            0 => Rational::one(),
            1 => g(0, 0).clone(),
            2 => g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0),
            3 => {
                g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1)) - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
                    + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0))
            }
            _ => self.det_bareiss(),
        })
    }

    /// Bareiss elimination after clearing denominators row by row.
    pub fn det_bareiss(&self) -> Rational {
        let n = self.rows;
        let mut scale = BigInt::one();
        let mut a: Vec<Vec<BigInt>> = (0..n)
            .map(|i| {
                let l = denominator_lcm(self.row(i));
                scale *= &l;
                self.row(i).iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect()
            })
            .collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return Rational::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        Rational::new(sign * &a[n - 1][n - 1], scale)
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else { continue };
            m.swap_rows(r, p);
            let inv = m.get(r, c).recip();
            for j in c..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i != r && !m.get(i, c).is_zero() {
                    let f = m.get(i, c).clone();
                    for j in c..m.cols {
                        let v = m.get(i, j) - &f * m.get(r, j);
                        m.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right null space, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(i, f).clone();
                }
                v
            })
            .collect()
    }

    /// A particular solution of `self * x = b` with free variables set to zero.
    pub fn solve(&self, b: &[Rational]) -> Result<Option<Vec<Rational>>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch("right-hand side length".into()));
        }
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = r.get(i, self.cols).clone();
        }
        Ok(Some(x))
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Rational::one());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let cols: Vec<usize> = (n..2 * n).collect();
        let rows: Vec<usize> = (0..n).collect();
        r.submatrix(&rows, &cols).ok()
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(format_rational).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Rank of a list of equal-length vectors.
pub fn vectors_rank(vs: &[Vec<Rational>]) -> usize {
    if vs.is_empty() {
        return 0;
    }
    RationalMatrix::from_rows(vs).map(|m| m.rank()).unwrap_or(0)
}

/// Indices of a maximal independent subset, chosen greedily from the front.
pub fn independent_subset(vs: &[Vec<Rational>]) -> Vec<usize> {
    if vs.is_empty() {
        return Vec::new();
    }
    let m = RationalMatrix::from_rows(vs).expect("equal lengths").transpose();
    m.rref().1
}

/// Coefficients expressing `v` in the span of `basis`, if it lies there.
pub fn express_in(basis: &[Vec<Rational>], v: &[Rational]) -> Option<Vec<Rational>> {
    if basis.is_empty() {
        return v.iter().all(Zero::is_zero).then(Vec::new);
    }
    let m = RationalMatrix::from_columns(basis, v.len()).ok()?;
    m.solve(v).ok().flatten()
}

/// Basis of the orthogonal complement of span(vs) in Q^dim.
pub fn orthogonal_complement(vs: &[Vec<Rational>], dim: usize) -> Vec<Vec<Rational>> {
    if vs.is_empty() {
        return RationalMatrix::identity(dim).row_vecs();
    }
    RationalMatrix::from_rows(vs).expect("equal lengths").nullspace()
}

/// Basis of span(a) ∩ span(b).
pub fn span_intersection(a: &[Vec<Rational>], b: &[Vec<Rational>], dim: usize) -> Vec<Vec<Rational>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let cols: Vec<Vec<Rational>> = a.iter().cloned().chain(b.iter().map(|v| v.iter().map(|x| -x).collect())).collect();
    let m = RationalMatrix::from_columns(&cols, dim).expect("lengths");
    let mut out: Vec<Vec<Rational>> = Vec::new();
    for coeffs in m.nullspace() {
        let v: Vec<Rational> = (0..dim).map(|i| a.iter().zip(&coeffs).map(|(ai, c)| &ai[i] * c).sum()).collect();
        if v.iter().any(|x| !x.is_zero()) {
            out.push(v);
        }
    }
    let keep = independent_subset(&out);
    keep.into_iter().map(|i| out[i].clone()).collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).filter(|(x, _)| !x.is_zero()).map(|(x, y)| x * y).sum()
}

pub fn max_abs(vs: &[Rational]) -> Rational {
    vs.iter().map(|x| x.abs()).max().unwrap_or_else(Rational::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::rat;

    fn cofactor_det(m: &RationalMatrix) -> Rational {
        let n = m.rows();
        if n == 1 {
            return m.get(0, 0).clone();
        }
        let mut acc = Rational::zero();
        for j in 0..n {
            let rows: Vec<usize> = (1..n).collect();
            let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
            let t = m.get(0, j) * cofactor_det(&m.submatrix(&rows, &cols).unwrap());
            if j % 2 == 0 {
                acc += t;
            } else {
                acc -= t;
            }
        }
        acc
    }

    #[test]
    fn small_determinants() {
        assert_eq!(RationalMatrix::from_i64(&[&[1, 2], &[3, 4]]).det().unwrap(), int(-2));
        assert_eq!(RationalMatrix::identity(5).det().unwrap(), int(1));
        let m = RationalMatrix::from_i64(&[&[2, 0, 1, 3], &[1, 1, 0, 0], &[0, 4, 1, 1], &[5, 0, 0, 2]]);
        assert_eq!(m.det().unwrap(), cofactor_det(&m));
    }

    #[test]
    fn bareiss_matches_cofactor_with_fractions() {
        let vals = [rat(1, 2), rat(-3, 7), int(0), rat(5, 3), int(2), rat(-1, 4)];
        for n in 1..=5 {
            let data: Vec<Rational> = (0..n * n).map(|k| vals[(k * 7 + n) % vals.len()].clone() + int((k % 3) as i64)).collect();
            let m = RationalMatrix::new(n, n, data).unwrap();
            assert_eq!(m.det_bareiss(), cofactor_det(&m), "n = {n}");
        }
        let singular = RationalMatrix::from_i64(&[&[0, 1, 2, 3], &[0, 2, 4, 6], &[1, 1, 1, 1], &[3, 0, 0, 1]]);
        assert_eq!(singular.det_bareiss(), int(0));
    }

    #[test]
    fn solve_inverse_nullspace() {
        let m = RationalMatrix::from_i64(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(m.rank(), 2);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 1);
        assert!(m.mul_vec(&ns[0]).unwrap().iter().all(Zero::is_zero));
        let b = vec![int(6), int(12), int(2)];
        let x = m.solve(&b).unwrap().unwrap();
        assert_eq!(m.mul_vec(&x).unwrap(), b);
        assert!(m.solve(&[int(1), int(0), int(0)]).unwrap().is_none());
        assert!(m.inverse().is_none());
        let a = RationalMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        assert_eq!(a.mul(&a.inverse().unwrap()).unwrap(), RationalMatrix::identity(2));
    }

    #[test]
    fn intersections() {
        let e = |i: usize| (0..3).map(|k| if k == i { int(1) } else { int(0) }).collect::<Vec<_>>();
        let a = vec![e(0), e(1)];
        let b = vec![e(1), e(2)];
        let i = span_intersection(&a, &b, 3);
        assert_eq!(i.len(), 1);
        assert!(i[0][0].is_zero() && i[0][2].is_zero() && !i[0][1].is_zero());
        assert_eq!(orthogonal_complement(&a, 3).len(), 1);
        assert_eq!(express_in(&a, &[int(2), int(-1), int(0)]), Some(vec![int(2), int(-1)]));
        assert_eq!(express_in(&a, &e(2)), None);
    }
}
