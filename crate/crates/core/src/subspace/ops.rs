use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::Subspace;
use crate::algebra::{Rational, RationalMatrix};
use crate::error::{Error, Result};

/// Elementary row or column operation applied simultaneously to every basis matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PencilOp {
    RowSwap { a: usize, b: usize },
    RowScale { row: usize, #[serde(with = "crate::json::rational")] factor: Rational },
    /// row[target] += factor · row[source]
    RowAdd { target: usize, source: usize, #[serde(with = "crate::json::rational")] factor: Rational },
    ColSwap { a: usize, b: usize },
    ColScale { col: usize, #[serde(with = "crate::json::rational")] factor: Rational },
    /// col[target] += factor · col[source]
    ColAdd { target: usize, source: usize, #[serde(with = "crate::json::rational")] factor: Rational },
}

impl PencilOp {
    fn check(&self, m: usize, n: usize) -> Result<()> {
        let in_range = |i: usize, lim: usize| {
            if i < lim {
                Ok(())
            } else {
                Err(Error::IndexOutOfRange(format!("{self:?} on a {m}x{n} pencil")))
            }
        };
        match self {
            Self::RowSwap { a, b } => in_range(*a, m).and(in_range(*b, m)),
            Self::ColSwap { a, b } => in_range(*a, n).and(in_range(*b, n)),
            Self::RowScale { row, factor } => {
                if factor.is_zero() {
                    return Err(Error::ZeroScale);
                }
                in_range(*row, m)
            }
            Self::ColScale { col, factor } => {
                if factor.is_zero() {
                    return Err(Error::ZeroScale);
                }
                in_range(*col, n)
            }
            Self::RowAdd { target, source, .. } | Self::ColAdd { target, source, .. } => {
                let lim = if matches!(self, Self::RowAdd { .. }) { m } else { n };
                if target == source {
                    return Err(Error::IndexOutOfRange("row/column add needs distinct indices".into()));
                }
                in_range(*target, lim).and(in_range(*source, lim))
            }
        }
    }

    /// Applies the operation to a single matrix.
    pub fn apply_to(&self, x: &RationalMatrix) -> Result<RationalMatrix> {
        self.check(x.rows(), x.cols())?;
        let mut y = x.clone();
        match self {
            Self::RowSwap { a, b } => y.swap_rows(*a, *b),
            Self::ColSwap { a, b } => {
                for i in 0..y.rows() {
                    let (p, q) = (x.get(i, *a).clone(), x.get(i, *b).clone());
                    y.set(i, *a, q);
                    y.set(i, *b, p);
                }
            }
            Self::RowScale { row, factor } => {
                for j in 0..y.cols() {
                    y.set(*row, j, x.get(*row, j) * factor);
                }
            }
            Self::ColScale { col, factor } => {
                for i in 0..y.rows() {
                    y.set(i, *col, x.get(i, *col) * factor);
                }
            }
            Self::RowAdd { target, source, factor } => {
                for j in 0..y.cols() {
                    y.set(*target, j, x.get(*target, j) + factor * x.get(*source, j));
                }
            }
            Self::ColAdd { target, source, factor } => {
                for i in 0..y.rows() {
                    y.set(i, *target, x.get(i, *target) + factor * x.get(i, *source));
                }
            }
        }
        Ok(y)
    }
}

/// Applies the operations in order to every basis matrix; the result is an equivalent pencil.
pub fn apply_ops(k: &Subspace, ops: &[PencilOp]) -> Result<Subspace> {
    let mut basis = k.basis().to_vec();
    for op in ops {
        op.check(k.m(), k.n())?;
        basis = basis.iter().map(|b| op.apply_to(b)).collect::<Result<Vec<_>>>()?;
    }
    Subspace::new(k.m(), k.n(), basis)
}
