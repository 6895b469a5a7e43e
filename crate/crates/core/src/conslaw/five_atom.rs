use nalgebra::{DMatrix, Matrix4, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::flux::FluxFunction;
use crate::error::{Error, Result};
use crate::measures::{is_null_lagrangian_f64, FloatMeasure, FloatNullLagrangianReport};
use crate::algebra::MinorOrder;

/// A 3×2 matrix on the conservation-law manifold together with the state that produced it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct K1Point {
    pub u: f64,
    pub v: f64,
    pub matrix: [[f64; 2]; 3],
}

/// Rows (u, v), (a(v), u), (u·a(v), u²/2 + F(v)).
pub fn p1(flux: &FluxFunction, u: f64, v: f64) -> K1Point {
    let a = flux.a(v);
    K1Point { u, v, matrix: [[u, v], [a, u], [u * a, 0.5 * u * u + flux.primitive(v)]] }
}

/// The manifold recentred at α with its quadratic part about α removed; P₁^α(α) = 0.
pub fn p1_alpha(flux: &FluxFunction, alpha: [f64; 2], u: f64, v: f64) -> K1Point {
    let (du, dv) = (u - alpha[0], v - alpha[1]);
    let a_shift = flux.a(v) - flux.a(alpha[1]);
    let f_shift = flux.primitive(v) - flux.primitive(alpha[1]) - flux.a(alpha[1]) * dv;
    K1Point { u, v, matrix: [[du, dv], [a_shift, du], [du * a_shift, 0.5 * du * du + f_shift]] }
}

/// The three 2×2 minors of a 3×2 matrix, taken on rows (1,2), (2,3), (1,3).
pub fn three_minors(x: &[[f64; 2]; 3]) -> [f64; 3] {
    let m = |i: usize, j: usize| x[i][0] * x[j][1] - x[i][1] * x[j][0];
    [m(0, 1), m(1, 2), m(0, 2)]
}

fn add(x: &[[f64; 2]; 3], y: &[[f64; 2]; 3]) -> [[f64; 2]; 3] {
    let mut out = *x;
    for i in 0..3 {
        for j in 0..2 {
            out[i][j] += y[i][j];
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct FiveAtomSystem {
    pub flux: FluxFunction,
    pub alpha: [f64; 2],
    pub s0: f64,
    pub t0: f64,
    /// ζ₀ … ζ₄; ζ₀ is the zero matrix.
    pub atoms: Vec<K1Point>,
    /// Rows D₁, D₂, D₃ at ζ₁…ζ₄, then a row of ones.
    pub a: [[f64; 4]; 4],
    pub a_inv: [[f64; 4]; 4],
    /// min and max of the last column of A⁻¹.
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Bound with ‖Q(γ)‖ ≤ C₁‖γ‖² and ‖DQ(z)‖ ≤ C₁‖z‖.
    pub c1: f64,
    /// ‖A⁻¹‖₂ · C₁.
    pub c2: f64,
    pub theta: f64,
    pub eps0: f64,
    /// Symmetric coefficient matrices with Q_i(γ) = γᵀ S_i γ.
    pub q_coeffs: [[[f64; 4]; 4]; 3],
}

fn to_array(m: &Matrix4<f64>) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = m[(i, j)];
        }
    }
    out
}

/// Largest multiple of 2⁻³⁰ not above λ/(4Λ + 2λ); then Σ_{p≥1} 2^{p−1}θ^p = θ/(1−2θ) ≤ λ/(4Λ).
pub fn dyadic_theta(lambda_min: f64, lambda_max: f64) -> f64 {
    let scale = (1u64 << 30) as f64;
    (lambda_min / (4.0 * lambda_max + 2.0 * lambda_min) * scale).floor() / scale
}

pub fn build_atoms(flux: &FluxFunction, alpha: [f64; 2], s0: f64, t0: f64) -> Result<FiveAtomSystem> {
    if !(s0 > 0.0 && t0 > 0.0) {
        return Err(Error::Precondition(format!("offsets must be positive (s0 = {s0}, t0 = {t0})")));
    }
    let slope = flux.da(alpha[1]);
    if !(slope > 0.0) {
        return Err(Error::Precondition(format!("a'(alpha_2) = {slope} is not positive")));
    }
    let a_shift = |t: f64| flux.a(alpha[1] + t) - flux.a(alpha[1]);
    let f_shift = |t: f64| flux.primitive(alpha[1] + t) - flux.primitive(alpha[1]) - flux.a(alpha[1]) * t;
    if !(a_shift(t0) > 0.0 && a_shift(-t0) < 0.0) {
        return Err(Error::Precondition(format!(
            "t0 = {t0} too large: need a(alpha_2 + t0) > a(alpha_2) > a(alpha_2 - t0)"
        )));
    }
    if !(f_shift(t0) > 0.0 && f_shift(-t0) > 0.0) {
        return Err(Error::Precondition(format!("t0 = {t0} too large: flux primitive is not strictly convex there")));
    }
    let atoms = vec![
        p1_alpha(flux, alpha, alpha[0], alpha[1]),
        p1_alpha(flux, alpha, alpha[0] + s0, alpha[1]),
        p1_alpha(flux, alpha, alpha[0] - s0, alpha[1]),
        p1_alpha(flux, alpha, alpha[0], alpha[1] + t0),
        p1_alpha(flux, alpha, alpha[0], alpha[1] - t0),
    ];
    let minors: Vec<[f64; 3]> = atoms.iter().map(|z| three_minors(&z.matrix)).collect();
    let a = Matrix4::from_fn(|i, j| if i < 3 { minors[j + 1][i] } else { 1.0 });
    let a_inv = a.try_inverse().ok_or_else(|| Error::Precondition("atom matrix is singular".into()))?;
    let last = a_inv.column(3);
    let lambda_min = last.min();
    let lambda_max = last.max();
    if !(lambda_min > 0.0) {
        return Err(Error::Precondition(format!("last column of the inverse atom matrix is not positive (min {lambda_min})")));
    }
    let mut q_coeffs = [[[0.0; 4]; 4]; 3];
    for j in 0..4 {
        for l in 0..4 {
            let (zj, zl) = (&atoms[j + 1].matrix, &atoms[l + 1].matrix);
            let sum = three_minors(&add(zj, zl));
            for i in 0..3 {
                q_coeffs[i][j][l] = if j == l { minors[j + 1][i] } else { 0.5 * (sum[i] - minors[j + 1][i] - minors[l + 1][i]) };
            }
        }
    }
    let row_sum_norm = |s: &[[f64; 4]; 4]| s.iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    let c1 = 2.0 * q_coeffs.iter().map(|s| row_sum_norm(s).powi(2)).sum::<f64>().sqrt();
    let inv_norm = a_inv.svd(false, false).singular_values.max();
    let c2 = inv_norm * c1;
    let theta = dyadic_theta(lambda_min, lambda_max);
    let eps0 = (theta / (2.0 * c2 * lambda_max)).min(0.5);
    Ok(FiveAtomSystem {
        flux: flux.clone(),
        alpha,
        s0,
        t0,
        atoms,
        a: to_array(&a),
        a_inv: to_array(&a_inv),
        lambda_min,
        lambda_max,
        c1,
        c2,
        theta,
        eps0,
        q_coeffs,
    })
}

impl FiveAtomSystem {
    fn a_mat(&self) -> Matrix4<f64> {
        Matrix4::from_fn(|i, j| self.a[i][j])
    }

    fn a_inv_mat(&self) -> Matrix4<f64> {
        Matrix4::from_fn(|i, j| self.a_inv[i][j])
    }

    /// (D₁, D₂, D₃)(Σ γ_j ζ_j), 0): evaluated from the quadratic coefficients.
    pub fn q(&self, gamma: &Vector4<f64>) -> Vector4<f64> {
        let mut out = Vector4::zeros();
        for i in 0..3 {
            let s = Matrix4::from_fn(|j, l| self.q_coeffs[i][j][l]);
            out[i] = gamma.dot(&(s * gamma));
        }
        out
    }

    /// The same quantity computed directly from the barycentre of the atoms.
    pub fn q_direct(&self, gamma: &Vector4<f64>) -> Vector4<f64> {
        let mut bary = [[0.0; 2]; 3];
        for j in 0..4 {
            for r in 0..3 {
                for c in 0..2 {
                    bary[r][c] += gamma[j] * self.atoms[j + 1].matrix[r][c];
                }
            }
        }
        let d = three_minors(&bary);
        Vector4::new(d[0], d[1], d[2], 0.0)
    }

    /// Aγ − (0,0,0,ε) − Q(γ).
    pub fn g(&self, gamma: &Vector4<f64>, eps: f64) -> Vector4<f64> {
        self.a_mat() * gamma - Vector4::new(0.0, 0.0, 0.0, eps) - self.q(gamma)
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Precondition(format!("mass parameter must lie in (0, 1), got {eps}")));
    }
    Ok(())
}

/// Unique solution of Aγ = (0,0,0,ε).
pub fn solve_linear_weights(sys: &FiveAtomSystem, eps: f64) -> Result<[f64; 4]> {
    check_eps(eps)?;
    let g = sys.a_inv_mat() * Vector4::new(0.0, 0.0, 0.0, eps);
    Ok([g[0], g[1], g[2], g[3]])
}

#[derive(Clone, Copy, Debug)]
pub struct IterationOptions {
    pub tol: f64,
    pub k_max: usize,
}

impl Default for IterationOptions {
    fn default() -> Self {
        Self { tol: 1e-12, k_max: 64 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceStep {
    pub k: usize,
    pub delta_norm: f64,
    /// 2^{k−1} θ^k ‖γ₀‖.
    pub bound: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct IterationResult {
    pub eps: f64,
    pub gamma0: [f64; 4],
    pub gamma: [f64; 4],
    pub residual: f64,
    pub steps: usize,
    pub trace: Vec<TraceStep>,
    /// ε ≤ ε₀, so the convergence and weight-floor guarantees apply.
    pub within_guarantee: bool,
    pub bounds_hold: bool,
}

/// γ_k = γ_{k−1} − A⁻¹ G(γ_{k−1}) from γ₀ = A⁻¹(0,0,0,ε).
pub fn iterate_weights(sys: &FiveAtomSystem, eps: f64, opts: &IterationOptions) -> Result<IterationResult> {
    let g0 = solve_linear_weights(sys, eps)?;
    let gamma0 = Vector4::from(g0);
    let a_inv = sys.a_inv_mat();
    let norm0 = gamma0.norm();
    let mut gamma = gamma0;
    let mut residual = sys.g(&gamma, eps).norm();
    let mut trace = Vec::new();
    let mut k = 0;
    while residual > opts.tol {
        if k >= opts.k_max || !residual.is_finite() {
            return Err(Error::NonConvergence(format!(
                "weight iteration: residual {residual:e} after {k} steps (eps = {eps:e}, eps0 = {:e})",
                sys.eps0
            )));
        }
        k += 1;
        let delta = a_inv * (-sys.g(&gamma, eps));
        gamma += delta;
        residual = sys.g(&gamma, eps).norm();
        let bound = 2f64.powi(k as i32 - 1) * sys.theta.powi(k as i32) * norm0;
        trace.push(TraceStep { k, delta_norm: delta.norm(), bound, residual });
    }
    let within_guarantee = eps <= sys.eps0;
    let floor = 0.5 * sys.lambda_min * eps;
    let slack = 1e-12 * norm0.max(1e-300);
    let bounds_hold = trace.iter().all(|t| t.delta_norm <= t.bound * (1.0 + 1e-9) + slack)
        && (gamma - gamma0).norm() <= floor + slack
        && gamma.iter().all(|&x| x >= floor - slack);
    Ok(IterationResult {
        eps,
        gamma0: g0,
        gamma: [gamma[0], gamma[1], gamma[2], gamma[3]],
        residual,
        steps: k,
        trace,
        within_guarantee,
        bounds_hold,
    })
}

fn as_dmatrix(x: &[[f64; 2]; 3]) -> DMatrix<f64> {
    DMatrix::from_fn(3, 2, |i, j| x[i][j])
}

pub const COMMUTATION_TOL: f64 = 1e-9;

/// (1 − ε)δ_{ζ₀} + Σ γ̄_j δ_{ζ_j}, checked to commute with the three minors.
pub fn five_atom_measure(sys: &FiveAtomSystem, it: &IterationResult) -> Result<(FloatMeasure, FloatNullLagrangianReport)> {
    let mut weights = vec![1.0 - it.eps];
    weights.extend(it.gamma);
    let atoms: Vec<DMatrix<f64>> = sys.atoms.iter().map(|z| as_dmatrix(&z.matrix)).collect();
    let mu = FloatMeasure::from_matrices(&atoms, weights);
    let report = is_null_lagrangian_f64(&mu, MinorOrder::Order(2), COMMUTATION_TOL)?;
    if !report.verdict {
        return Err(Error::Verification(format!("five-atom measure residual {:e}", report.max_abs_residual)));
    }
    Ok((mu, report))
}

#[derive(Clone, Debug, Serialize)]
pub struct PushForward {
    pub measure: FloatMeasure,
    pub states: Vec<[f64; 2]>,
    pub check: FloatNullLagrangianReport,
    /// max ‖(u, v) − α‖ over the atoms.
    pub state_radius: f64,
    /// max ‖P₁^α(u, v)‖ over the atoms.
    pub atom_radius: f64,
}

/// Recovers each state from the first row (u − α₁, v − α₂) and replaces the atom by P₁(u, v).
pub fn push_forward_to_k1(mu: &FloatMeasure, flux: &FluxFunction, alpha: [f64; 2], tol: f64) -> Result<PushForward> {
    if mu.shape != [3, 2] {
        return Err(Error::DimensionMismatch(format!("atoms must be 3×2, got {:?}", mu.shape)));
    }
    let mut atoms = Vec::new();
    let mut states = Vec::new();
    let (mut state_radius, mut atom_radius) = (0.0f64, 0.0f64);
    for x in &mu.atoms {
        let (u, v) = (x[0][0] + alpha[0], x[0][1] + alpha[1]);
        let expect = p1_alpha(flux, alpha, u, v).matrix;
        let mut off = 0.0f64;
        let mut norm = 0.0f64;
        for r in 0..3 {
            for c in 0..2 {
                off = off.max((expect[r][c] - x[r][c]).abs());
                norm += x[r][c] * x[r][c];
            }
        }
        if off > tol {
            return Err(Error::Precondition(format!("atom is off the recentred manifold by {off:e}")));
        }
        state_radius = state_radius.max(((u - alpha[0]).powi(2) + (v - alpha[1]).powi(2)).sqrt());
        atom_radius = atom_radius.max(norm.sqrt());
        states.push([u, v]);
        atoms.push(as_dmatrix(&p1(flux, u, v).matrix));
    }
    let measure = FloatMeasure::from_matrices(&atoms, mu.weights.clone());
    let check = is_null_lagrangian_f64(&measure, MinorOrder::Order(2), COMMUTATION_TOL)?;
    Ok(PushForward { measure, states, check, state_radius, atom_radius })
}

#[derive(Clone, Debug, Serialize)]
pub struct SignReport {
    pub samples: usize,
    pub delta: f64,
    pub min: f64,
    pub max: f64,
    /// No strictly negative value beyond rounding: det(X − Y) ≥ 0 on every sampled pair.
    pub sign_constant: bool,
    /// Evidence only; triviality in this branch rests on an external result.
    pub conclusive: bool,
}

/// Samples pairs in B_δ(α) and reports the range of (Δu)² − Δv·Δa, the determinant of the
/// difference of two system matrices [[u, v], [a(v), u]].
pub fn negative_branch_evidence(flux: &FluxFunction, alpha: [f64; 2], delta: f64, samples: usize, seed: u64) -> Result<SignReport> {
    let slope = flux.da(alpha[1]);
    if !(slope < 0.0) {
        return Err(Error::Precondition(format!("a'(alpha_2) = {slope} is not negative")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut point = || loop {
        let (x, y): (f64, f64) = (rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
        if x * x + y * y <= 1.0 {
            return (alpha[0] + delta * x, alpha[1] + delta * y);
        }
    };
    let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..samples {
        let (u1, v1) = point();
        let (u2, v2) = point();
        let val = (u2 - u1).powi(2) - (v2 - v1) * (flux.a(v2) - flux.a(v1));
        min = min.min(val);
        max = max.max(val);
    }
    let scale = delta * delta;
    Ok(SignReport { samples, delta, min, max, sign_constant: min >= -1e-12 * scale, conclusive: false })
}
