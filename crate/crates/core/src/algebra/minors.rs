use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::matrix::RationalMatrix;
use super::rational::Rational;
use crate::error::{Error, Result};

/// A square minor selected by strictly increasing 0-based row and column indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MinorIndex {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl MinorIndex {
    pub fn order(&self) -> usize {
        self.rows.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MinorOrder {
    Order(usize),
    /// Every order from 2 up to min(m, n).
    All,
}

/// All k-subsets of 0..n in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] != i + n - k) else { break };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
    out
}

fn minors_of_order(m: usize, n: usize, p: usize) -> Vec<MinorIndex> {
    let rows = combinations(m, p);
    let cols = combinations(n, p);
    rows.iter()
        .flat_map(|r| cols.iter().map(move |c| MinorIndex { rows: r.clone(), cols: c.clone() }))
        .collect()
}

/// Lexicographic minor enumeration: row set first, then column set; `All` concatenates orders ascending.
pub fn enumerate_minors(m: usize, n: usize, order: MinorOrder) -> Result<Vec<MinorIndex>> {
    match order {
        MinorOrder::Order(p) => {
            if p < 2 || p > m.min(n) {
                return Err(Error::OrderOutOfRange { order: p, m, n });
            }
            Ok(minors_of_order(m, n, p))
        }
        MinorOrder::All => Ok((2..=m.min(n)).flat_map(|p| minors_of_order(m, n, p)).collect()),
    }
}

/// Number of order-2 minors of an m×n matrix.
pub fn q0(m: usize, n: usize) -> usize {
    m * m.saturating_sub(1) / 2 * (n * n.saturating_sub(1) / 2)
}

pub fn minor(a: &RationalMatrix, rows: &[usize], cols: &[usize]) -> Result<Rational> {
    if rows.len() != cols.len() || rows.is_empty() {
        return Err(Error::DimensionMismatch(format!("{} rows vs {} cols", rows.len(), cols.len())));
    }
    let increasing = |s: &[usize]| s.windows(2).all(|w| w[0] < w[1]);
    if !increasing(rows) || !increasing(cols) {
        return Err(Error::IndexOutOfRange("minor indices must be strictly increasing".into()));
    }
    a.submatrix(rows, cols)?.det()
}

pub fn minor_at(a: &RationalMatrix, idx: &MinorIndex) -> Result<Rational> {
    minor(a, &idx.rows, &idx.cols)
}

fn complement(set: &[usize], n: usize) -> Vec<usize> {
    (0..n).filter(|i| !set.contains(i)).collect()
}

/// Coefficients P_k(A) such that det(A+X) = det A + det X + Σ_k P_k(A)·M_k(X),
/// where M_k ranges over minors of X of orders 1..n-1.
pub fn det_sum_coefficients(a: &RationalMatrix) -> Result<Vec<(MinorIndex, Rational)>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("square matrix required".into()));
    }
    let n = a.rows();
    let mut out = Vec::new();
    for p in 1..n {
        for idx in minors_of_order(n, n, p) {
            let rc = complement(&idx.rows, n);
            let cc = complement(&idx.cols, n);
            let parity: usize = idx.rows.iter().chain(&idx.cols).sum();
            let mut c = a.submatrix(&rc, &cc)?.det()?;
            if parity % 2 == 1 {
                c = -c;
            }
            out.push((idx, c));
        }
    }
    Ok(out)
}

pub fn det_sum_expansion(a: &RationalMatrix, x: &RationalMatrix) -> Result<Rational> {
    if a.shape() != x.shape() || !a.is_square() {
        return Err(Error::DimensionMismatch("det_sum_expansion needs equal square matrices".into()));
    }
    let mut total = a.det()? + x.det()?;
    for (idx, c) in det_sum_coefficients(a)? {
        if !c.is_zero() {
            total += c * minor_at(x, &idx)?;
        }
    }
    Ok(total)
}

/// det(A) − A:Cof(B) + det(B) for 2×2 matrices.
pub fn cofactor_identity_2x2(a: &RationalMatrix, b: &RationalMatrix) -> Result<Rational> {
    if a.shape() != (2, 2) || b.shape() != (2, 2) {
        return Err(Error::DimensionMismatch("cofactor identity needs 2x2 matrices".into()));
    }
    let cof = RationalMatrix::new(
        2,
        2,
        vec![b.get(1, 1).clone(), -b.get(1, 0).clone(), -b.get(0, 1).clone(), b.get(0, 0).clone()],
    )?;
    Ok(a.det()? - a.frobenius_dot(&cof) + b.det()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;

    #[test]
    fn enumeration_counts_and_order() {
        assert_eq!(enumerate_minors(3, 2, MinorOrder::Order(2)).unwrap().len(), 3);
        assert_eq!(enumerate_minors(2, 2, MinorOrder::Order(2)).unwrap().len(), 1);
        let all = enumerate_minors(3, 3, MinorOrder::All).unwrap();
        assert_eq!(all.len(), 10);
        assert_eq!(all.iter().filter(|m| m.order() == 3).count(), 1);
        assert_eq!(all[0], MinorIndex { rows: vec![0, 1], cols: vec![0, 1] });
        assert_eq!(all[1], MinorIndex { rows: vec![0, 1], cols: vec![0, 2] });
        assert_eq!(all[3], MinorIndex { rows: vec![0, 2], cols: vec![0, 1] });
        assert!(enumerate_minors(3, 3, MinorOrder::Order(1)).is_err());
        assert!(enumerate_minors(3, 3, MinorOrder::Order(4)).is_err());
        assert_eq!(q0(4, 4), 36);
        assert_eq!(combinations(4, 2), vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
    }

    #[test]
    fn minor_examples() {
        let a = RationalMatrix::from_i64(&[&[1, 2], &[3, 4]]);
        assert_eq!(minor(&a, &[0, 1], &[0, 1]).unwrap(), int(-2));
        let i3 = RationalMatrix::identity(3);
        assert_eq!(minor(&i3, &[0, 2], &[0, 2]).unwrap(), int(1));
        assert!(minor(&a, &[0, 1], &[0]).is_err());
        assert!(minor(&a, &[1, 0], &[0, 1]).is_err());
        assert!(minor(&a, &[0, 2], &[0, 1]).is_err());
    }

    #[test]
    fn cofactor_example() {
        let a = RationalMatrix::from_i64(&[&[1, 2], &[3, 4]]);
        let b = RationalMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        assert_eq!(cofactor_identity_2x2(&a, &b).unwrap(), int(2));
        assert_eq!(cofactor_identity_2x2(&a, &a).unwrap(), int(0));
        assert_eq!(cofactor_identity_2x2(&a, &RationalMatrix::zeros(2, 2)).unwrap(), int(-2));
    }

    #[test]
    fn det_sum_degenerate_cases() {
        let x = RationalMatrix::from_i64(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let z = RationalMatrix::zeros(3, 3);
        assert_eq!(det_sum_expansion(&z, &x).unwrap(), x.det().unwrap());
        assert_eq!(det_sum_expansion(&x, &z).unwrap(), x.det().unwrap());
    }
}
