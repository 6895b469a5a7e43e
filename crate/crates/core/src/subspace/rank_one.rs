use nalgebra::{DMatrix, DVector};
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Subspace;
use crate::algebra::{
    approximate, rational_sqrt, to_f64, QuadraticForm, QuadraticSurd, Rational,
};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    /// Exact algebra; only available for d ≤ 2.
    Exact,
    /// Sphere sampling plus Levenberg–Marquardt refinement; non-detection is not a proof.
    Numeric,
    /// Exact when d ≤ 2, numeric otherwise.
    Auto,
}

#[derive(Clone, Debug)]
pub struct RankOneOptions {
    pub density: usize,
    pub seed: u64,
    pub vanish_tol: f64,
    pub absence_tol: f64,
    pub refine_top: usize,
    pub max_iter: usize,
}

impl Default for RankOneOptions {
    fn default() -> Self {
        Self { density: 100_000, seed: 0, vanish_tol: 1e-9, absence_tol: 1e-6, refine_top: 24, max_iter: 200 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "z", rename_all = "snake_case")]
pub enum ExactDirection {
    Rational(#[serde(with = "crate::json::rational_vec")] Vec<Rational>),
    /// Coordinates in Q(√D), used when the d = 2 root is irrational.
    Surd(Vec<QuadraticSurd>),
}

#[derive(Clone, Debug, Serialize)]
pub struct RankOneWitness {
    /// Unit vector in parameter space.
    pub direction: Vec<f64>,
    /// Σ minors² / ‖P(z)‖⁴ at `direction`.
    pub residual: f64,
    pub exact: Option<ExactDirection>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RankOneSearch {
    pub mode: SearchMode,
    pub witness: Option<RankOneWitness>,
    /// Smallest normalized residual seen (0 for exact witnesses).
    pub min_residual: f64,
    /// True when the answer is proved exactly (exact witness, or exact non-existence).
    pub conclusive: bool,
    pub samples: usize,
}

impl RankOneSearch {
    pub fn found(&self) -> bool {
        self.witness.is_some()
    }

    pub fn rational_witness(&self) -> Option<&[Rational]> {
        match self.witness.as_ref()?.exact.as_ref()? {
            ExactDirection::Rational(z) => Some(z),
            ExactDirection::Surd(_) => None,
        }
    }

    /// Numeric non-detection with the residual kept above `tol` everywhere sampled.
    pub fn absence_bound_met(&self, tol: f64) -> bool {
        self.witness.is_none() && self.min_residual > tol
    }
}

pub fn find_rank_one(k: &Subspace, mode: SearchMode, opts: &RankOneOptions) -> Result<RankOneSearch> {
    let exact = match mode {
        SearchMode::Exact => {
            if k.d() > 2 {
                return Err(Error::Unsupported(format!("exact rank-1 search needs d ≤ 2, got d = {}", k.d())));
            }
            true
        }
        SearchMode::Numeric => false,
        SearchMode::Auto => k.d() <= 2,
    };
    let forms: Vec<QuadraticForm> = k.minor_forms().into_iter().filter(|q| !q.is_zero()).collect();
    if exact {
        Ok(exact_search(k, &forms))
    } else {
        Ok(NumericObjective::new(k, &forms).search(k, &forms, opts))
    }
}

fn unit(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / n).collect()
}

/// Every order-2 minor vanishes at z, i.e. rank P(z) ≤ 1.
pub(crate) fn minors_vanish(forms: &[QuadraticForm], z: &[Rational]) -> bool {
    forms.iter().all(|q| q.eval(z).map(|v| v.is_zero()).unwrap_or(false))
}

fn exact_witness(k: &Subspace, forms: &[QuadraticForm], z: ExactDirection) -> RankOneWitness {
    let approx: Vec<f64> = match &z {
        ExactDirection::Rational(v) => v.iter().map(to_f64).collect(),
        ExactDirection::Surd(v) => v.iter().map(QuadraticSurd::to_f64).collect(),
    };
    let direction = unit(&approx);
    let residual = NumericObjective::new(k, forms).value(&direction);
    RankOneWitness { direction, residual, exact: Some(z) }
}

fn exact_search(k: &Subspace, forms: &[QuadraticForm]) -> RankOneSearch {
    let done = |w: Option<RankOneWitness>| RankOneSearch {
        mode: SearchMode::Exact,
        min_residual: if w.is_some() { 0.0 } else { f64::NAN },
        witness: w,
        conclusive: true,
        samples: 0,
    };
    if k.d() == 1 {
        let z = vec![Rational::one()];
        return done(minors_vanish(forms, &z).then(|| exact_witness(k, forms, ExactDirection::Rational(z))));
    }
    // z = (t, 1) turns each form into a_k t² + b_k t + c_k; z = (1, 0) is the point at infinity.
    let infinity = vec![Rational::one(), Rational::zero()];
    if minors_vanish(forms, &infinity) {
        return done(Some(exact_witness(k, forms, ExactDirection::Rational(infinity))));
    }
    let two = Rational::from_integer(2.into());
    let polys: Vec<Vec<Rational>> = forms
        .iter()
        .map(|q| {
            let m = q.matrix();
            trim(vec![m.get(1, 1).clone(), m.get(0, 1) * &two, m.get(0, 0).clone()])
        })
        .collect();
    let g = polys.iter().fold(Vec::new(), |acc, p| if acc.is_empty() { p.clone() } else { univariate_gcd(&acc, p) });
    let finish = |t: Rational| {
        let z = vec![t, Rational::one()];
        debug_assert!(minors_vanish(forms, &z));
        done(Some(exact_witness(k, forms, ExactDirection::Rational(z))))
    };
    match g.len() {
        0 | 1 => done(None),
        2 => finish(-&g[0] / &g[1]),
        _ => {
            let (c, b, a) = (&g[0], &g[1], &g[2]);
            let disc = b * b - Rational::from_integer(4.into()) * a * c;
            if disc.is_negative() {
                return done(None);
            }
            let denom = a * &two;
            if let Some(root) = rational_sqrt(&disc) {
                return finish((-b + root) / denom);
            }
            let t = QuadraticSurd { a: -b / &denom, b: Rational::one() / &denom, d: disc.clone() };
            let z = vec![t, QuadraticSurd::from_rational(Rational::one(), &disc)];
            debug_assert!(surd_minors_vanish(forms, &z));
            done(Some(exact_witness(k, forms, ExactDirection::Surd(z))))
        }
    }
}

/// Exact evaluation of every order-2 minor at a point with coordinates in Q(√D).
pub fn surd_minors_vanish(forms: &[QuadraticForm], z: &[QuadraticSurd]) -> bool {
    let Some(d) = z.first().map(|s| s.d.clone()) else { return true };
    forms.iter().all(|q| {
        let m = q.matrix();
        let mut acc = QuadraticSurd::from_rational(Rational::zero(), &d);
        for i in 0..z.len() {
            for j in 0..z.len() {
                let c = QuadraticSurd::from_rational(m.get(i, j).clone(), &d);
                acc = &acc + &(&c * &(&z[i] * &z[j]));
            }
        }
        acc.is_zero()
    })
}

/// Low-to-high coefficients with trailing zeros removed.
fn trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn univariate_rem(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut r = a.to_vec();
    let lead = b.last().expect("non-zero divisor");
    while r.len() >= b.len() && !r.is_empty() {
        let f = r.last().unwrap() / lead;
        let shift = r.len() - b.len();
        for (i, c) in b.iter().enumerate() {
            r[shift + i] -= &f * c;
        }
        r = trim(r);
    }
    r
}

/// Monic gcd over Q.
fn univariate_gcd(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let (mut x, mut y) = (trim(a.to_vec()), trim(b.to_vec()));
    while !y.is_empty() {
        let r = univariate_rem(&x, &y);
        x = y;
        y = r;
    }
    if let Some(lead) = x.last().cloned() {
        x.iter_mut().for_each(|c| *c /= &lead);
    }
    x
}

/// Scale-free objective Σ_k M_k(P(z))² / ‖P(z)‖⁴, compressed to a square factor.
struct NumericObjective {
    d: usize,
    pairs: Vec<(usize, usize)>,
    r: DMatrix<f64>,
    gram: DMatrix<f64>,
}

impl NumericObjective {
    fn new(k: &Subspace, forms: &[QuadraticForm]) -> Self {
        let d = k.d();
        let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (i..d).map(move |j| (i, j))).collect();
        let s = DMatrix::from_fn(forms.len(), pairs.len(), |row, p| {
            let (i, j) = pairs[p];
            let x = to_f64(forms[row].matrix().get(i, j));
            if i == j {
                x
            } else {
                2.0 * x
            }
        });
        let r = if s.nrows() > s.ncols() { s.qr().r() } else { s };
        Self { d, pairs, r, gram: k.gram().to_f64() }
    }

    fn monomials(&self, z: &[f64]) -> DVector<f64> {
        DVector::from_iterator(self.pairs.len(), self.pairs.iter().map(|&(i, j)| z[i] * z[j]))
    }

    fn norm2(&self, z: &[f64]) -> f64 {
        let v = DVector::from_column_slice(z);
        v.dot(&(&self.gram * &v))
    }

    fn value(&self, z: &[f64]) -> f64 {
        if self.r.nrows() == 0 {
            return 0.0;
        }
        let g = self.norm2(z);
        (&self.r * self.monomials(z)).norm_squared() / (g * g)
    }

    fn residual_and_jacobian(&self, z: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let v = DVector::from_column_slice(z);
        let gz = &self.gram * &v;
        let g = v.dot(&gz);
        let mut dw = DMatrix::zeros(self.pairs.len(), self.d);
        for (p, &(i, j)) in self.pairs.iter().enumerate() {
            dw[(p, i)] += z[j];
            dw[(p, j)] += z[i];
        }
        let r = &self.r * self.monomials(z);
        let jac = (&self.r * dw) / g - (&r * gz.transpose()) * (2.0 / (g * g));
        (r / g, jac)
    }

    fn refine(&self, start: &[f64], max_iter: usize) -> (Vec<f64>, f64) {
        let mut z = unit(start);
        let mut f = self.value(&z);
        let mut mu = 1e-3;
        for _ in 0..max_iter {
            if f < 1e-32 {
                break;
            }
            let (rho, jac) = self.residual_and_jacobian(&z);
            let jtj = jac.transpose() * &jac;
            let grad = jac.transpose() * rho;
            let mut improved = false;
            while mu < 1e12 {
                let mut a = jtj.clone();
                for i in 0..self.d {
                    a[(i, i)] += mu * jtj[(i, i)].max(1e-12);
                }
                let Some(step) = a.lu().solve(&(-&grad)) else {
                    mu *= 4.0;
                    continue;
                };
                let cand: Vec<f64> = z.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
                let cand = unit(&cand);
                let fc = self.value(&cand);
                if fc < f {
                    let moved: f64 = cand.iter().zip(&z).map(|(a, b)| (a - b).abs()).sum();
                    z = cand;
                    f = fc;
                    mu = (mu / 3.0).max(1e-15);
                    improved = moved > 1e-16;
                    break;
                }
                mu *= 4.0;
            }
            if !improved {
                break;
            }
        }
        (z, f)
    }

    fn sample_points(&self, opts: &RankOneOptions) -> Vec<Vec<f64>> {
        let n = opts.density.max(1);
        match self.d {
            1 => vec![vec![1.0]],
            2 => (0..n).map(|i| {
                let a = std::f64::consts::PI * (i as f64 + 0.5) / n as f64;
                vec![a.cos(), a.sin()]
            }).collect(),
            3 => {
                let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
                (0..n)
                    .map(|i| {
                        let y = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
                        let r = (1.0 - y * y).max(0.0).sqrt();
                        let phi = golden * i as f64;
                        vec![r * phi.cos(), y, r * phi.sin()]
                    })
                    .collect()
            }
            d => {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
                (0..n).map(|_| unit(&(0..d).map(|_| StandardNormal.sample(&mut rng)).collect::<Vec<f64>>())).collect()
            }
        }
    }

    fn search(&self, k: &Subspace, forms: &[QuadraticForm], opts: &RankOneOptions) -> RankOneSearch {
        if forms.is_empty() {
            let mut z = vec![Rational::zero(); k.d()];
            z[0] = Rational::one();
            return RankOneSearch {
                mode: SearchMode::Numeric,
                witness: Some(exact_witness(k, forms, ExactDirection::Rational(z))),
                min_residual: 0.0,
                conclusive: true,
                samples: 0,
            };
        }
        let points = self.sample_points(opts);
        let values: Vec<f64> = points.par_iter().map(|z| self.value(z)).collect();
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
        let mut starts: Vec<usize> = Vec::new();
        for &i in &order {
            if starts.len() >= opts.refine_top {
                break;
            }
            let close = starts.iter().any(|&j| {
                let c: f64 = points[i].iter().zip(&points[j]).map(|(a, b)| a * b).sum();
                c.abs() > 0.999
            });
            if !close {
                starts.push(i);
            }
        }
        let refined: Vec<(Vec<f64>, f64)> = starts.par_iter().map(|&i| self.refine(&points[i], opts.max_iter)).collect();
        let sampled_min = order.first().map_or(f64::INFINITY, |&i| values[i]);
        let (best_z, best_f) = refined
            .into_iter()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap_or_else(|| (points[order[0]].clone(), sampled_min));
        let min_residual = best_f.min(sampled_min);
        let witness = (best_f <= opts.vanish_tol).then(|| {
            let exact = rationalize(&best_z, forms).map(ExactDirection::Rational);
            RankOneWitness { direction: best_z, residual: best_f, exact }
        });
        let conclusive = witness.as_ref().is_some_and(|w| w.exact.is_some());
        RankOneSearch { mode: SearchMode::Numeric, witness, min_residual, conclusive, samples: points.len() }
    }
}

/// Snap a numeric direction to small rationals and keep it only if every minor vanishes exactly.
fn rationalize(z: &[f64], forms: &[QuadraticForm]) -> Option<Vec<Rational>> {
    let piv = z.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if piv == 0.0 {
        return None;
    }
    for max_den in [16, 1_000, 100_000] {
        let q: Vec<Rational> = z.iter().map(|x| approximate(x / piv, max_den)).collect();
        if q.iter().any(|x| !x.is_zero()) && minors_vanish(forms, &q) {
            return Some(q);
        }
    }
    None
}
