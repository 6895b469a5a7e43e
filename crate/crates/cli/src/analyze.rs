use nullag_core::certify::{reduce_chain, two_atom_measure, ChainOptions, ChainOutcome};
use nullag_core::measures::{construct_on_cone, is_null_lagrangian, ConstructionConfig};
use nullag_core::algebra::MinorOrder;
use nullag_core::subspace::{find_rank_one, surd_minors_vanish, ExactDirection, RankOneOptions, SearchMode};
use nullag_core::{Error, RationalMatrix, Result, Subspace};
use serde_json::{json, Value};

use crate::report::{RunReport, Timer, EXIT_INCONCLUSIVE, EXIT_NONTRIVIAL, EXIT_OK};

pub struct AnalyzeInput {
    pub subspace: Subspace,
    /// Atoms worth trying first in the measure construction.
    pub candidates: Vec<RationalMatrix>,
}

/// Accepts a bare subspace or any object with a `subspace` key (such as a fixture dump).
pub fn parse_input(v: &Value) -> Result<AnalyzeInput> {
    let schema = |e: serde_json::Error| Error::Schema(e.to_string());
    let (sub_v, cand_v) = match v.get("subspace") {
        Some(s) => (s.clone(), v.get("candidates").cloned()),
        None => (v.clone(), None),
    };
    let subspace: Subspace = serde_json::from_value(sub_v).map_err(schema)?;
    let candidates = match cand_v {
        Some(c) => serde_json::from_value(c).map_err(schema)?,
        None => Vec::new(),
    };
    Ok(AnalyzeInput { subspace, candidates })
}

pub struct AnalyzeFlags {
    pub seed: u64,
    pub tol: f64,
    pub budget: usize,
    pub use_candidates: bool,
}

pub fn analyze(input: &AnalyzeInput, flags: &AnalyzeFlags, mut report: RunReport) -> Result<RunReport> {
    let k = &input.subspace;
    let timer = Timer::start();
    let rank_opts = RankOneOptions { seed: flags.seed, vanish_tol: flags.tol, ..RankOneOptions::default() };
    let search = find_rank_one(k, SearchMode::Auto, &rank_opts)?;
    timer.record(&mut report, "rank_one");
    let shape = json!({ "m": k.m(), "n": k.n(), "d": k.d() });

    if let Some(w) = search.witness.as_ref() {
        match &w.exact {
            Some(ExactDirection::Rational(z)) => {
                let mu = two_atom_measure(k, z)?;
                let check = is_null_lagrangian(&mu, (k.m(), k.n()), MinorOrder::All)?;
                if !check.verdict {
                    return Err(Error::Verification("two-atom measure does not commute".into()));
                }
                report.artifact = Some(json!({ "kind": "measure", "subspace": k, "measure": mu }));
                let details = json!({ "shape": shape, "rank_one": search, "measure_check": check });
                return Ok(report.finish("nontrivial_measure", "find_rank_one", EXIT_NONTRIVIAL, details));
            }
            Some(ExactDirection::Surd(z)) => {
                if !surd_minors_vanish(&k.minor_forms(), z) {
                    return Err(Error::Verification("surd rank-1 witness fails exact check".into()));
                }
                report.artifact = Some(json!({ "kind": "rank_one_surd", "subspace": k, "direction": z }));
                let details = json!({
                    "shape": shape,
                    "rank_one": search,
                    "measure": "1/2 delta_A + 1/2 delta_-A with A = P(z), z over a real quadratic field",
                });
                return Ok(report.finish("nontrivial_measure", "find_rank_one", EXIT_NONTRIVIAL, details));
            }
            // A numeric witness is not a proof; fall through to the chain, which may still
            // conclude via an exact construction.
            None => {}
        }
    }

    let chain_opts = ChainOptions { rank_one: rank_opts, ..ChainOptions::default() };
    let outcome = reduce_chain(k, &chain_opts)?;
    timer.record(&mut report, "reduce_chain");
    let (partial, stuck_cone, conclusive) = match outcome {
        ChainOutcome::Certificate(cert) => {
            let check = cert.verify()?;
            if !check.verified {
                return Err(Error::Verification(check.failure.unwrap_or_default()));
            }
            let mut artifact = serde_json::to_value(&cert).map_err(|e| Error::Schema(e.to_string()))?;
            artifact["kind"] = json!("certificate");
            report.artifact = Some(artifact);
            let details = json!({ "shape": shape, "rank_one": search, "chain_length": cert.chain.len(), "check": check });
            return Ok(report.finish("certified_trivial", "reduce_chain", EXIT_OK, details));
        }
        ChainOutcome::Obstruction { partial, stuck_cone, rank_one, conclusive } => {
            if let Some(z) = rank_one.as_ref().and_then(|s| s.rational_witness()) {
                let sub = k.restrict(&stuck_cone)?;
                let mu = two_atom_measure(&sub, z)?;
                let check = is_null_lagrangian(&mu, (k.m(), k.n()), MinorOrder::All)?;
                if check.verdict {
                    report.artifact = Some(json!({ "kind": "measure", "subspace": k, "measure": mu }));
                    let details = json!({ "shape": shape, "rank_one": rank_one, "measure_check": check });
                    return Ok(report.finish("nontrivial_measure", "reduce_chain", EXIT_NONTRIVIAL, details));
                }
            }
            (partial, stuck_cone, conclusive)
        }
    };

    let config = ConstructionConfig { budget: flags.budget, seed: flags.seed, ..ConstructionConfig::default() };
    let candidates: &[RationalMatrix] = if flags.use_candidates { &input.candidates } else { &[] };
    let built = construct_on_cone(k, &stuck_cone, candidates, &config)?;
    timer.record(&mut report, "construct_on_cone");
    let stuck_cols: Vec<Vec<String>> = (0..stuck_cone.cols())
        .map(|j| stuck_cone.column(j).iter().map(nullag_core::algebra::format_rational).collect())
        .collect();
    let details = json!({
        "shape": shape,
        "rank_one": search,
        "partial_chain": partial,
        "stuck_cone": stuck_cols,
        "stuck_cone_conclusive": conclusive,
        "construction": built.outcome,
    });
    match built.measure {
        Some(mu) => {
            let check = is_null_lagrangian(&mu, (k.m(), k.n()), MinorOrder::All)?;
            report.artifact = Some(json!({ "kind": "measure", "subspace": k, "measure": mu }));
            let mut details = details;
            details["measure_check"] = serde_json::to_value(&check).map_err(|e| Error::Schema(e.to_string()))?;
            Ok(report.finish("nontrivial_measure", "construct_on_cone", EXIT_NONTRIVIAL, details))
        }
        None => Ok(report.finish("inconclusive", "construct_on_cone", EXIT_INCONCLUSIVE, details)),
    }
}
