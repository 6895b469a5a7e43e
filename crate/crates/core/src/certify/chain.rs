use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::combination::{verify_combination, CombinationVerdict, Cone, MinorCombination};
use super::reduction::{find_certificate_d_le_3, CertificateSearch, ReductionCase};
use crate::algebra::{independent_subset, int, QuadraticForm, Rational, RationalMatrix};
use crate::error::{Error, Result};
use crate::subspace::{find_rank_one, RankOneOptions, RankOneSearch, SearchMode, Subspace};

/// Trace inner product of symmetric matrices.
fn frobenius(a: &QuadraticForm, b: &QuadraticForm) -> Rational {
    a.matrix().frobenius_dot(b.matrix())
}

/// Projects PD targets (identity first, then seeded random ones) onto span{X_k} and keeps the
/// first projection that is positive semidefinite and non-zero. Labelled heuristic: failure
/// does not mean no certificate exists.
pub fn heuristic_combination(k: &Subspace, seed: u64, attempts: usize) -> Result<Option<MinorCombination>> {
    let d = k.d();
    let forms = k.minor_forms();
    let keep = independent_subset(&forms.iter().map(QuadraticForm::upper_vector).collect::<Vec<_>>());
    if keep.is_empty() {
        return Ok(None);
    }
    let s = keep.len();
    let mut gram = RationalMatrix::zeros(s, s);
    for a in 0..s {
        for b in a..s {
            let v = frobenius(&forms[keep[a]], &forms[keep[b]]);
            gram.set(a, b, v.clone());
            gram.set(b, a, v);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0..attempts.max(1) {
        let target = if attempt == 0 {
            QuadraticForm::identity(d)
        } else {
            let l = RationalMatrix::new(d, d, (0..d * d).map(|_| int(rng.gen_range(-3..=3))).collect())?;
            let llt = l.mul(&l.transpose())?.add(&RationalMatrix::identity(d))?;
            QuadraticForm::new(llt)?
        };
        let rhs: Vec<Rational> = keep.iter().map(|&i| frobenius(&forms[i], &target)).collect();
        let Some(c) = gram.solve(&rhs)? else { continue };
        let mut beta = vec![Rational::zero(); forms.len()];
        for (ci, &i) in c.into_iter().zip(&keep) {
            beta[i] = ci;
        }
        if beta.iter().all(Zero::is_zero) {
            continue;
        }
        let combo = MinorCombination::new(k, beta)?;
        if verify_combination(k, &combo, &Cone::whole(d))?.is_certified() {
            return Ok(Some(combo));
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepMethod {
    Constructive,
    Heuristic,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainStep {
    /// Basis of the current cone in the original parameters (d × k), stored as k column vectors.
    #[serde(serialize_with = "columns")]
    pub cone_basis: RationalMatrix,
    /// β over the order-2 minors, evaluated on the subspace restricted to the cone.
    pub combination: MinorCombination,
    pub method: StepMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<ReductionCase>,
}

fn columns<S: serde::Serializer>(m: &RationalMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    let cols: Vec<Vec<Rational>> = (0..m.cols()).map(|j| m.column(j)).collect();
    crate::json::rational_vecs::serialize(&cols, s)
}

/// Descending chain of cones V₁ ⊋ V₂ ⊋ … each cut out by a positive semidefinite combination.
#[derive(Clone, Debug, Serialize)]
pub struct TrivialityCertificate {
    pub subspace: Subspace,
    pub chain: Vec<ChainStep>,
    /// The last kernel is {0}.
    pub terminal: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ChainOutcome {
    Certificate(TrivialityCertificate),
    Obstruction {
        partial: TrivialityCertificate,
        /// Cone on which no combination was found (d × k).
        #[serde(serialize_with = "columns")]
        stuck_cone: RationalMatrix,
        #[serde(skip_serializing_if = "Option::is_none")]
        rank_one: Option<RankOneSearch>,
        /// True when the stuck cone has dimension ≤ 3, so the failure is not a heuristic miss.
        conclusive: bool,
    },
}

impl ChainOutcome {
    pub fn certificate(&self) -> Option<&TrivialityCertificate> {
        match self {
            Self::Certificate(c) => Some(c),
            Self::Obstruction { .. } => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ChainOptions {
    pub rank_one: RankOneOptions,
    pub heuristic_attempts: usize,
    /// Run a numeric rank-1 search on a stuck cone of dimension > 3.
    pub probe_rank_one: bool,
}

impl Default for ChainOptions {
    fn default() -> Self {
        Self { rank_one: RankOneOptions::default(), heuristic_attempts: 9, probe_rank_one: true }
    }
}

/// Zero set of a positive semidefinite form, as a d × k' basis inside the cone.
fn kernel_cone(cone: &RationalMatrix, form: &QuadraticForm) -> Result<RationalMatrix> {
    let ker = form.diagonalize().kernel();
    let lifted: Vec<Vec<Rational>> = ker.iter().map(|w| cone.mul_vec(w)).collect::<Result<_>>()?;
    RationalMatrix::from_columns(&lifted, cone.rows())
}

pub fn reduce_chain(k: &Subspace, opts: &ChainOptions) -> Result<ChainOutcome> {
    let d = k.d();
    let mut cone = RationalMatrix::identity(d);
    let mut chain = Vec::new();
    loop {
        if cone.cols() == 0 {
            return Ok(ChainOutcome::Certificate(TrivialityCertificate { subspace: k.clone(), chain, terminal: true }));
        }
        let sub = k.restrict(&cone)?;
        let dim = sub.d();
        let mut rank_one = None;
        let found = if dim <= 3 {
            match find_certificate_d_le_3(&sub, &opts.rank_one)? {
                CertificateSearch::Found { combination, case: ReductionCase::Projection } => {
                    Some((combination, StepMethod::Heuristic, Some(ReductionCase::Projection)))
                }
                CertificateSearch::Found { combination, case } => {
                    // A definite combination ends the chain at once; prefer it when the case
                    // analysis only produced a degenerate one.
                    let rank = combination.form().diagonalize().rank();
                    let wider = if rank < dim {
                        heuristic_combination(&sub, opts.rank_one.seed, opts.heuristic_attempts)?
                            .filter(|h| h.form().diagonalize().rank() > rank)
                    } else {
                        None
                    };
                    match wider {
                        Some(h) => Some((h, StepMethod::Heuristic, None)),
                        None => Some((combination, StepMethod::Constructive, Some(case))),
                    }
                }
                CertificateSearch::RankOne { search } => {
                    rank_one = Some(search);
                    None
                }
                CertificateSearch::NotFound => None,
            }
        } else {
            heuristic_combination(&sub, opts.rank_one.seed, opts.heuristic_attempts)?
                .map(|c| (c, StepMethod::Heuristic, None))
        };
        let Some((combination, method, case)) = found else {
            if rank_one.is_none() && dim > 3 && opts.probe_rank_one {
                let s = find_rank_one(&sub, SearchMode::Numeric, &opts.rank_one)?;
                if s.found() {
                    rank_one = Some(s);
                }
            }
            let partial = TrivialityCertificate { subspace: k.clone(), chain, terminal: false };
            return Ok(ChainOutcome::Obstruction { partial, stuck_cone: cone, rank_one, conclusive: dim <= 3 });
        };
        let next = kernel_cone(&cone, combination.form())?;
        if next.cols() >= cone.cols() {
            return Err(Error::Verification("chain failed to descend".into()));
        }
        chain.push(ChainStep { cone_basis: cone, combination, method, case });
        cone = next;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepCheck {
    pub step: usize,
    pub verdict: CombinationVerdict,
    pub descends: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateCheck {
    pub verified: bool,
    pub terminal: bool,
    pub steps: Vec<StepCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

/// Independent re-verification: every step is PSD and non-zero on its cone, and the next
/// cone is exactly that form's kernel.
pub fn verify_certificate(k: &Subspace, steps: &[(RationalMatrix, Vec<Rational>)], terminal: bool) -> Result<CertificateCheck> {
    let d = k.d();
    let mut checks = Vec::new();
    let fail = |checks: Vec<StepCheck>, msg: String| CertificateCheck { verified: false, terminal, steps: checks, failure: Some(msg) };
    if steps.is_empty() {
        return Ok(fail(checks, "empty chain".into()));
    }
    if steps[0].0.rows() != d || steps[0].0.rank() != d || steps[0].0.cols() != d {
        return Ok(fail(checks, "first cone must be the whole parameter space".into()));
    }
    for (s, (cone, beta)) in steps.iter().enumerate() {
        if cone.rows() != d || cone.rank() != cone.cols() {
            return Ok(fail(checks, format!("step {s}: cone basis is not a full-rank d × k matrix")));
        }
        let sub = k.restrict(cone)?;
        let combo = match MinorCombination::new(&sub, beta.clone()) {
            Ok(c) => c,
            Err(e) => return Ok(fail(checks, format!("step {s}: {e}"))),
        };
        let verdict = verify_combination(&sub, &combo, &Cone::whole(sub.d()))?;
        let ok = verdict.is_certified();
        let kernel = kernel_cone(cone, combo.form())?;
        let descends = match steps.get(s + 1) {
            Some((next, _)) => {
                let stacked = RationalMatrix::from_columns(
                    &(0..kernel.cols()).map(|j| kernel.column(j)).chain((0..next.cols()).map(|j| next.column(j))).collect::<Vec<_>>(),
                    d,
                )?;
                next.cols() == kernel.cols() && stacked.rank() == kernel.cols()
            }
            None => !terminal || kernel.cols() == 0,
        };
        checks.push(StepCheck { step: s, verdict, descends });
        if !ok {
            return Ok(fail(checks, format!("step {s}: combination is not positive semidefinite and non-zero on its cone")));
        }
        if !descends {
            return Ok(fail(checks, format!("step {s}: next cone is not the kernel of this step")));
        }
    }
    Ok(CertificateCheck { verified: true, terminal, steps: checks, failure: None })
}

impl TrivialityCertificate {
    pub fn verify(&self) -> Result<CertificateCheck> {
        let steps: Vec<(RationalMatrix, Vec<Rational>)> =
            self.chain.iter().map(|s| (s.cone_basis.clone(), s.combination.beta().to_vec())).collect();
        verify_certificate(&self.subspace, &steps, self.terminal)
    }
}

/// JSON form accepted by the verifier: the subspace, then per step the cone columns and β.
#[derive(Clone, Debug, Deserialize)]
pub struct CertificateArtifact {
    pub subspace: Subspace,
    pub chain: Vec<ArtifactStep>,
    pub terminal: bool,
}

#[derive(Clone, Debug, Deserialize)]
pub struct ArtifactStep {
    #[serde(with = "crate::json::rational_vecs")]
    pub cone_basis: Vec<Vec<Rational>>,
    pub combination: ArtifactCombination,
}

#[derive(Clone, Debug, Deserialize)]
pub struct ArtifactCombination {
    #[serde(with = "crate::json::rational_vec")]
    pub beta: Vec<Rational>,
}

impl CertificateArtifact {
    pub fn verify(&self) -> Result<CertificateCheck> {
        let d = self.subspace.d();
        let steps = self
            .chain
            .iter()
            .map(|s| Ok((RationalMatrix::from_columns(&s.cone_basis, d)?, s.combination.beta.clone())))
            .collect::<Result<Vec<_>>>()?;
        verify_certificate(&self.subspace, &steps, self.terminal)
    }
}

/// ½δ_A + ½δ_{−A} for a rational rank-1 direction.
pub fn two_atom_measure(k: &Subspace, z: &[Rational]) -> Result<crate::measures::DiscreteMeasure> {
    let a = k.eval(z)?;
    if a.is_zero() || a.rank() != 1 {
        return Err(Error::Verification("direction is not a non-zero rank-1 element".into()));
    }
    crate::measures::DiscreteMeasure::symmetric_pair(a)
}
