use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{enumerate_minors, int, vectors_rank, MinorOrder, Rational, RationalMatrix};
use crate::error::{Error, Result};

/// Affine chart of the Grassmannian of k-planes in m×n matrices: a k-dimensional W₀ and a
/// complementary W₁ of dimension mn − k. The plane for a coefficient matrix A is spanned by
/// v_l = w0_l + Σ_i A_il w1_i.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Chart {
    m: usize,
    n: usize,
    w0: Vec<RationalMatrix>,
    w1: Vec<RationalMatrix>,
}

fn unit(m: usize, n: usize, idx: usize) -> RationalMatrix {
    let mut e = RationalMatrix::zeros(m, n);
    e.set(idx / n, idx % n, int(1));
    e
}

impl Chart {
    pub fn new(m: usize, n: usize, w0: Vec<RationalMatrix>, w1: Vec<RationalMatrix>) -> Result<Self> {
        let mn = m * n;
        if w0.is_empty() || w0.len() > mn {
            return Err(Error::Precondition(format!("need 1 ≤ k ≤ mn, got k = {}", w0.len())));
        }
        if w0.len() + w1.len() != mn {
            return Err(Error::DimensionMismatch(format!("dim W0 + dim W1 = {} ≠ mn = {mn}", w0.len() + w1.len())));
        }
        if w0.iter().chain(&w1).any(|x| x.shape() != (m, n)) {
            return Err(Error::DimensionMismatch(format!("chart matrices must be {m}×{n}")));
        }
        let all: Vec<Vec<Rational>> = w0.iter().chain(&w1).map(|x| x.entries().to_vec()).collect();
        if vectors_rank(&all) != mn {
            return Err(Error::NonTransversal("W0 and W1 do not span all m×n matrices".into()));
        }
        Ok(Self { m, n, w0, w1 })
    }

    /// W₀ = span of the first k coordinate matrices, W₁ = the rest.
    pub fn standard(k: usize, m: usize, n: usize) -> Result<Self> {
        let all: Vec<RationalMatrix> = (0..m * n).map(|i| unit(m, n, i)).collect();
        if k == 0 || k > m * n {
            return Err(Error::Precondition(format!("need 1 ≤ k ≤ mn, got k = {k}")));
        }
        let (w0, w1) = all.split_at(k);
        Self::new(m, n, w0.to_vec(), w1.to_vec())
    }

    /// Chart whose origin (A = 0) is the span of `basis`, completed greedily by coordinate matrices.
    pub fn through(basis: &[RationalMatrix]) -> Result<Self> {
        let (m, n) = basis.first().map(RationalMatrix::shape).ok_or_else(|| Error::Precondition("empty basis".into()))?;
        let mut vecs: Vec<Vec<Rational>> = basis.iter().map(|x| x.entries().to_vec()).collect();
        if vectors_rank(&vecs) != basis.len() {
            return Err(Error::DependentBasis("chart origin basis is dependent".into()));
        }
        let mut w1 = Vec::new();
        for i in 0..m * n {
            let e = unit(m, n, i);
            vecs.push(e.entries().to_vec());
            if vectors_rank(&vecs) == vecs.len() {
                w1.push(e);
            } else {
                vecs.pop();
            }
        }
        Self::new(m, n, basis.to_vec(), w1)
    }

    pub fn k(&self) -> usize {
        self.w0.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn w0(&self) -> &[RationalMatrix] {
        &self.w0
    }

    pub fn w1(&self) -> &[RationalMatrix] {
        &self.w1
    }

    /// Basis v_l of the plane at chart coordinates A ((mn − k) × k).
    pub fn plane(&self, a: &DMatrix<f64>) -> Result<Vec<DMatrix<f64>>> {
        self.check_coords(a.nrows(), a.ncols())?;
        let w1: Vec<DMatrix<f64>> = self.w1.iter().map(RationalMatrix::to_f64).collect();
        Ok((0..self.k())
            .map(|l| {
                let mut v = self.w0[l].to_f64();
                for (i, w) in w1.iter().enumerate() {
                    if a[(i, l)] != 0.0 {
                        v += w * a[(i, l)];
                    }
                }
                v
            })
            .collect())
    }

    pub fn plane_exact(&self, a: &RationalMatrix) -> Result<Vec<RationalMatrix>> {
        self.check_coords(a.rows(), a.cols())?;
        (0..self.k())
            .map(|l| {
                let mut v = self.w0[l].clone();
                for (i, w) in self.w1.iter().enumerate() {
                    let c = a.get(i, l);
                    if !c.is_zero() {
                        v = v.add(&w.scale(c))?;
                    }
                }
                Ok(v)
            })
            .collect()
    }

    fn check_coords(&self, rows: usize, cols: usize) -> Result<()> {
        if (rows, cols) != (self.w1.len(), self.k()) {
            return Err(Error::DimensionMismatch(format!(
                "chart coordinates must be {}×{}, got {rows}×{cols}",
                self.w1.len(),
                self.k()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GenericityReport {
    pub k: usize,
    /// det(ΠΠᵀ) for the vectorized minor forms Π.
    pub lambda: f64,
    pub span_dim: usize,
    /// span_dim == k(k+1)/2.
    pub full_span: bool,
    /// Coefficients over the order-2 minors, when a positive definite combination was found.
    pub beta: Option<Vec<f64>>,
    pub min_eigenvalue: Option<f64>,
    pub positive_definite: bool,
}

/// Threshold below which Λ counts as zero.
pub const LAMBDA_TOL: f64 = 1e-12;

/// Π: one row per upper-triangle slot (l ≤ l'), one column per order-2 minor; column j is the
/// symmetric coefficient matrix of y ↦ M_j(Σ y_l v_l).
fn pi_matrix_f64(plane: &[DMatrix<f64>], m: usize, n: usize) -> Result<DMatrix<f64>> {
    let k = plane.len();
    let minors = enumerate_minors(m, n, MinorOrder::Order(2))?;
    let rows = k * (k + 1) / 2;
    let mut pi = DMatrix::zeros(rows, minors.len());
    for (j, idx) in minors.iter().enumerate() {
        let (r1, r2, c1, c2) = (idx.rows[0], idx.rows[1], idx.cols[0], idx.cols[1]);
        let mut row = 0;
        for l in 0..k {
            for l2 in l..k {
                let (a, b) = (&plane[l], &plane[l2]);
                let x = 0.5
                    * (a[(r1, c1)] * b[(r2, c2)] + b[(r1, c1)] * a[(r2, c2)]
                        - a[(r1, c2)] * b[(r2, c1)]
                        - b[(r1, c2)] * a[(r2, c1)]);
                pi[(row, j)] = x;
                row += 1;
            }
        }
    }
    Ok(pi)
}

fn pi_matrix_exact(plane: &[RationalMatrix], m: usize, n: usize) -> Result<RationalMatrix> {
    let k = plane.len();
    let minors = enumerate_minors(m, n, MinorOrder::Order(2))?;
    let rows = k * (k + 1) / 2;
    let mut pi = RationalMatrix::zeros(rows, minors.len());
    let half = Rational::new(1.into(), 2.into());
    for (j, idx) in minors.iter().enumerate() {
        let (r1, r2, c1, c2) = (idx.rows[0], idx.rows[1], idx.cols[0], idx.cols[1]);
        let mut row = 0;
        for l in 0..k {
            for l2 in l..k {
                let (a, b) = (&plane[l], &plane[l2]);
                let x = a.get(r1, c1) * b.get(r2, c2) + b.get(r1, c1) * a.get(r2, c2)
                    - a.get(r1, c2) * b.get(r2, c1)
                    - b.get(r1, c2) * a.get(r2, c1);
                pi.set(row, j, x * &half);
                row += 1;
            }
        }
    }
    Ok(pi)
}

/// Symmetric k×k matrix from its upper-triangle vector.
fn unpack(k: usize, v: &DVector<f64>) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(k, k);
    let mut row = 0;
    for l in 0..k {
        for l2 in l..k {
            s[(l, l2)] = v[row];
            s[(l2, l)] = v[row];
            row += 1;
        }
    }
    s
}

fn pack(k: usize, s: &DMatrix<f64>) -> DVector<f64> {
    let mut v = DVector::zeros(k * (k + 1) / 2);
    let mut row = 0;
    for l in 0..k {
        for l2 in l..k {
            v[row] = s[(l, l2)];
            row += 1;
        }
    }
    v
}

/// Λ, span dimension and (when possible) a positive definite Σ β_j X_j at chart coordinates A.
pub fn grassmann_genericity(chart: &Chart, a: &DMatrix<f64>, seed: u64) -> Result<GenericityReport> {
    let k = chart.k();
    let (m, n) = chart.shape();
    let plane = chart.plane(a)?;
    let pi = pi_matrix_f64(&plane, m, n)?;
    let lambda = (&pi * pi.transpose()).determinant();
    let svd = pi.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let span_dim = svd.singular_values.iter().filter(|&&s| s > 1e-9 * smax.max(1.0)).count();
    let full = k * (k + 1) / 2;
    let mut report = GenericityReport {
        k,
        lambda,
        span_dim,
        full_span: span_dim == full,
        beta: None,
        min_eigenvalue: None,
        positive_definite: false,
    };
    if span_dim == 0 {
        return Ok(report);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut target = DMatrix::<f64>::identity(k, k);
    for attempt in 0..8 {
        if attempt > 0 {
            let scale = 0.25 * attempt as f64;
            let g = DMatrix::<f64>::from_fn(k, k, |_, _| StandardNormal.sample(&mut rng));
            target = DMatrix::identity(k, k) + (&g * g.transpose()) * scale;
        }
        let Ok(beta) = svd.solve(&pack(k, &target), 1e-12) else { break };
        let s = unpack(k, &(&pi * &beta));
        let min = SymmetricEigen::new(s).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        let better = report.min_eigenvalue.is_none_or(|m| min > m);
        if better {
            report.min_eigenvalue = Some(min);
            report.beta = Some(beta.iter().copied().collect());
        }
        if min > 1e-9 {
            report.positive_definite = true;
            break;
        }
    }
    Ok(report)
}

/// Exact rank of Π at rational chart coordinates.
pub fn exact_span_dim(chart: &Chart, a: &RationalMatrix) -> Result<usize> {
    let plane = chart.plane_exact(a)?;
    let (m, n) = chart.shape();
    Ok(pi_matrix_exact(&plane, m, n)?.rank())
}

/// Σ β_j M_j(X) at a plane element X = Σ y_l v_l.
pub fn combination_at(chart: &Chart, a: &DMatrix<f64>, beta: &[f64], y: &[f64]) -> Result<f64> {
    let plane = chart.plane(a)?;
    let (m, n) = chart.shape();
    let mut x = DMatrix::zeros(m, n);
    for (v, &c) in plane.iter().zip(y) {
        x += v * c;
    }
    let minors = enumerate_minors(m, n, MinorOrder::Order(2))?;
    Ok(minors
        .iter()
        .zip(beta)
        .map(|(idx, b)| {
            let (r1, r2, c1, c2) = (idx.rows[0], idx.rows[1], idx.cols[0], idx.cols[1]);
            b * (x[(r1, c1)] * x[(r2, c2)] - x[(r1, c2)] * x[(r2, c1)])
        })
        .sum())
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanSample {
    pub index: usize,
    pub lambda: f64,
    pub span_dim: usize,
    pub positive_definite: bool,
    pub min_eigenvalue: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanSummary {
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub lambda_nonzero: usize,
    pub positive_definite: usize,
    pub fraction_lambda_nonzero: f64,
    pub fraction_positive_definite: f64,
    pub per_sample: Vec<ScanSample>,
}

/// Random standard-normal chart coordinates; sample i uses seed + i, so results do not depend
/// on thread count.
pub fn grassmann_scan(k: usize, m: usize, n: usize, samples: usize, seed: u64) -> Result<ScanSummary> {
    let chart = Chart::standard(k, m, n)?;
    let rows = m * n - k;
    let per_sample = (0..samples)
        .into_par_iter()
        .map(|i| {
            let s = seed.wrapping_add(i as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let a = DMatrix::<f64>::from_fn(rows, k, |_, _| StandardNormal.sample(&mut rng));
            let r = grassmann_genericity(&chart, &a, s)?;
            Ok(ScanSample {
                index: i,
                lambda: r.lambda,
                span_dim: r.span_dim,
                positive_definite: r.positive_definite,
                min_eigenvalue: r.min_eigenvalue,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let lambda_nonzero = per_sample.iter().filter(|s| s.lambda.abs() > LAMBDA_TOL).count();
    let positive_definite = per_sample.iter().filter(|s| s.positive_definite).count();
    let denom = samples.max(1) as f64;
    Ok(ScanSummary {
        k,
        m,
        n,
        samples,
        seed,
        lambda_nonzero,
        positive_definite,
        fraction_lambda_nonzero: lambda_nonzero as f64 / denom,
        fraction_positive_definite: positive_definite as f64 / denom,
        per_sample,
    })
}
