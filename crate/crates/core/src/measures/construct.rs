use std::collections::HashSet;

use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::measure::{is_null_lagrangian, DiscreteMeasure};
use super::simplex::{farkas_solve, FarkasOutcome, FarkasProblem};
use crate::algebra::{
    combinations, independent_subset, poly_det, Exponent, MinorOrder, MultiPoly, Rational, RationalMatrix,
};
use crate::error::{Error, Result};
use crate::subspace::{parametrize, Subspace};

/// Source of points on a cone, given in the cone's own coordinates.
pub trait ConeSampler {
    fn points(&mut self, count: usize) -> Vec<Vec<Rational>>;
}

/// Gaussian directions on the unit sphere, snapped to a dyadic grid and emitted in ± pairs.
pub struct SphereSampler {
    dim: usize,
    rng: ChaCha8Rng,
    grid: i64,
}

impl SphereSampler {
    pub fn new(dim: usize, seed: u64) -> Self {
        Self { dim, rng: ChaCha8Rng::seed_from_u64(seed), grid: 64 }
    }
}

impl ConeSampler for SphereSampler {
    fn points(&mut self, count: usize) -> Vec<Vec<Rational>> {
        let mut out = Vec::with_capacity(count + 1);
        while out.len() < count {
            let g: Vec<f64> = (0..self.dim).map(|_| StandardNormal.sample(&mut self.rng)).collect();
            let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            let p: Vec<Rational> = g
                .iter()
                .map(|x| Rational::new(((x / norm) * self.grid as f64).round().to_string().parse().unwrap(), self.grid.into()))
                .collect();
            if p.iter().all(Zero::is_zero) {
                continue;
            }
            out.push(p.iter().map(|x| -x).collect());
            out.push(p);
        }
        out
    }
}

/// Offers fixed candidate points first, then defers to another sampler.
pub struct CandidateSampler<S> {
    candidates: Vec<Vec<Rational>>,
    inner: S,
}

impl<S: ConeSampler> CandidateSampler<S> {
    pub fn new(candidates: Vec<Vec<Rational>>, inner: S) -> Self {
        Self { candidates, inner }
    }
}

impl<S: ConeSampler> ConeSampler for CandidateSampler<S> {
    fn points(&mut self, count: usize) -> Vec<Vec<Rational>> {
        let take = count.min(self.candidates.len());
        let mut out: Vec<Vec<Rational>> = self.candidates.drain(..take).collect();
        if out.len() < count {
            out.extend(self.inner.points(count - out.len()));
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct ConstructionConfig {
    /// Total sampled points across all rounds.
    pub budget: usize,
    pub rounds: usize,
    pub seed: u64,
}

impl Default for ConstructionConfig {
    fn default() -> Self {
        Self { budget: 512, rounds: 8, seed: 0 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstructionOutcome {
    /// Atoms are points of Q^d stored as d×1 columns.
    pub measure: Option<DiscreteMeasure>,
    pub samples_used: usize,
    pub rounds_used: usize,
    pub family_rank: usize,
    /// Last separating functional when every round was infeasible.
    #[serde(skip_serializing_if = "Option::is_none", with = "opt_rational_vec")]
    pub separator: Option<Vec<Rational>>,
}

mod opt_rational_vec {
    use super::Rational;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &Option<Vec<Rational>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => crate::json::rational_vec::serialize(v, s),
            None => s.serialize_none(),
        }
    }
}

fn all_monomials(family: &[MultiPoly]) -> Vec<Exponent> {
    let mut set: Vec<Exponent> = family.iter().flat_map(|f| f.terms().keys().cloned()).collect();
    set.sort();
    set.dedup();
    set
}

/// Finds μ = Σ λ_i δ_{ζ_i} with ∫f dμ = f(0) for every f in the family, by growing a point sample
/// until 0 lies in the convex hull of {(f(ζ) − f(0))_f}.
pub fn construct_nontrivial(
    family: &[MultiPoly],
    nvars: usize,
    sampler: &mut dyn ConeSampler,
    config: &ConstructionConfig,
) -> Result<ConstructionOutcome> {
    if family.iter().any(|f| f.nvars() != nvars) {
        return Err(Error::DimensionMismatch("family polynomials over different variable counts".into()));
    }
    for j in 0..nvars {
        let proj = MultiPoly::var(nvars, j);
        if !family.contains(&proj) {
            return Err(Error::Precondition(format!("family is missing the coordinate projection z{}", j + 1)));
        }
    }
    let origin = vec![Rational::zero(); nvars];
    let centered: Vec<MultiPoly> = family
        .iter()
        .map(|f| f - &MultiPoly::constant(nvars, f.eval(&origin).expect("arity checked")))
        .collect();
    let mons = all_monomials(&centered);
    let coeffs: Vec<Vec<Rational>> = centered.iter().map(|f| f.coefficients_in(&mons)).collect();
    let basis: Vec<MultiPoly> = independent_subset(&coeffs).into_iter().map(|i| centered[i].clone()).collect();

    let rounds = config.rounds.max(1);
    let mut points: Vec<Vec<Rational>> = Vec::new();
    let mut seen: HashSet<Vec<Rational>> = HashSet::new();
    let mut columns: Vec<Vec<Rational>> = Vec::new();
    let mut separator = None;
    for round in 1..=rounds {
        let target = config.budget * round / rounds;
        if target > points.len() {
            for p in sampler.points(target - points.len()) {
                if p.len() == nvars && p.iter().any(|x| !x.is_zero()) && seen.insert(p.clone()) {
                    let mut col: Vec<Rational> = basis.iter().map(|f| f.eval(&p).expect("arity")).collect();
                    col.push(Rational::one());
                    columns.push(col);
                    points.push(p);
                }
            }
        }
        if points.is_empty() {
            continue;
        }
        let a = RationalMatrix::from_columns(&columns, basis.len() + 1)?;
        let mut b = vec![Rational::zero(); basis.len()];
        b.push(Rational::one());
        let problem = FarkasProblem::new(a, b)?;
        match farkas_solve(&problem)? {
            FarkasOutcome::Feasible(x) => {
                let (atoms, weights): (Vec<_>, Vec<_>) = points
                    .iter()
                    .zip(x)
                    .filter(|(_, w)| !w.is_zero())
                    .map(|(p, w)| (RationalMatrix::from_columns(std::slice::from_ref(p), nvars).expect("column"), w))
                    .unzip();
                for f in &centered {
                    let total: Rational = atoms.iter().zip(&weights).map(|(a, w)| w * f.eval(&a.column(0)).unwrap()).sum();
                    if !total.is_zero() {
                        return Err(Error::Verification("constructed measure does not commute with the family".into()));
                    }
                }
                let measure = DiscreteMeasure::new((nvars, 1), atoms, weights)?;
                return Ok(ConstructionOutcome {
                    measure: Some(measure),
                    samples_used: points.len(),
                    rounds_used: round,
                    family_rank: basis.len(),
                    separator: None,
                });
            }
            FarkasOutcome::Infeasible(y) => separator = Some(y),
        }
    }
    Ok(ConstructionOutcome { measure: None, samples_used: points.len(), rounds_used: rounds, family_rank: basis.len(), separator })
}

/// Upper bound on the number of minor polynomials built for a cone family.
pub const MAX_FAMILY_MINORS: usize = 20_000;

/// Projections plus every minor of order ≥ 2 of the pencil restricted to the cone, in cone coordinates.
/// Rows and columns that vanish identically on the cone are dropped since their minors are zero.
pub fn cone_family(k: &Subspace, cone: &RationalMatrix) -> Result<(Subspace, Vec<MultiPoly>)> {
    let sub = k.restrict(cone)?;
    let kd = sub.d();
    let pencil = parametrize(&sub);
    let rows: Vec<usize> = (0..sub.m()).filter(|&i| pencil[i].iter().any(|p| !p.is_zero())).collect();
    let cols: Vec<usize> = (0..sub.n()).filter(|&j| rows.iter().any(|&i| !pencil[i][j].is_zero())).collect();
    let top = rows.len().min(cols.len());
    let total: usize = (2..=top).map(|p| combinations(rows.len(), p).len() * combinations(cols.len(), p).len()).sum();
    if total > MAX_FAMILY_MINORS {
        return Err(Error::Unsupported(format!("{total} minors on the cone exceed the family limit")));
    }
    let mut family: Vec<MultiPoly> = (0..kd).map(|j| MultiPoly::var(kd, j)).collect();
    for p in 2..=top {
        for rs in combinations(rows.len(), p) {
            for cs in combinations(cols.len(), p) {
                let e: Vec<Vec<MultiPoly>> =
                    rs.iter().map(|&i| cs.iter().map(|&j| pencil[rows[i]][cols[j]].clone()).collect()).collect();
                let f = poly_det(&e, kd);
                if !f.is_zero() {
                    family.push(f);
                }
            }
        }
    }
    Ok((sub, family))
}

#[derive(Clone, Debug, Serialize)]
pub struct ConeConstruction {
    pub measure: Option<DiscreteMeasure>,
    pub outcome: ConstructionOutcome,
}

/// Builds a non-trivial measure with barycenter 0 supported on span(P(cone)), verified exactly on all minors.
pub fn construct_on_cone(
    k: &Subspace,
    cone: &RationalMatrix,
    candidates: &[RationalMatrix],
    config: &ConstructionConfig,
) -> Result<ConeConstruction> {
    let (sub, family) = cone_family(k, cone)?;
    let cand: Vec<Vec<Rational>> = candidates.iter().filter_map(|x| sub.coordinates(x)).collect();
    let mut sampler = CandidateSampler::new(cand, SphereSampler::new(sub.d(), config.seed));
    let outcome = construct_nontrivial(&family, sub.d(), &mut sampler, config)?;
    let measure = match &outcome.measure {
        None => None,
        Some(points) => {
            let atoms = points.atoms().iter().map(|a| sub.eval(&a.column(0))).collect::<Result<Vec<_>>>()?;
            let mu = DiscreteMeasure::new((k.m(), k.n()), atoms, points.weights().to_vec())?;
            let report = is_null_lagrangian(&mu, (k.m(), k.n()), MinorOrder::All)?;
            if !report.verdict {
                return Err(Error::Verification(format!("{} minors fail to commute", report.nonzero.len())));
            }
            Some(mu)
        }
    };
    Ok(ConeConstruction { measure, outcome })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::int;

    #[test]
    fn rank_one_line_gives_symmetric_pair() {
        let a = RationalMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        let k = Subspace::new(2, 2, vec![a.clone()]).unwrap();
        let r = construct_on_cone(&k, &RationalMatrix::identity(1), &[], &ConstructionConfig::default()).unwrap();
        let mu = r.measure.unwrap();
        assert_eq!(mu.len(), 2);
        assert!(mu.atoms().contains(&a) && mu.atoms().contains(&a.neg()));
        assert_eq!(mu.weights(), &[Rational::new(1.into(), 2.into()), Rational::new(1.into(), 2.into())]);
    }

    #[test]
    fn positive_combination_blocks_construction() {
        let mut a = RationalMatrix::zeros(4, 4);
        let mut b = RationalMatrix::zeros(4, 4);
        for i in 0..2 {
            a.set(i, i, int(1));
            b.set(i + 2, i + 2, int(1));
        }
        let k = Subspace::new(4, 4, vec![a, b]).unwrap();
        let cfg = ConstructionConfig { budget: 64, rounds: 2, seed: 3 };
        let r = construct_on_cone(&k, &RationalMatrix::identity(2), &[], &cfg).unwrap();
        assert!(r.measure.is_none());
        assert!(r.outcome.separator.is_some());
    }

    #[test]
    fn missing_projection_rejected() {
        let fam = vec![MultiPoly::var(2, 0)];
        let mut s = SphereSampler::new(2, 0);
        assert!(matches!(
            construct_nontrivial(&fam, 2, &mut s, &ConstructionConfig::default()),
            Err(Error::Precondition(_))
        ));
    }
}
