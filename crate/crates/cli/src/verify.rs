use nullag_core::algebra::{MinorOrder, QuadraticSurd};
use nullag_core::certify::CertificateArtifact;
use nullag_core::measures::{is_null_lagrangian, is_null_lagrangian_f64, DiscreteMeasure, FloatMeasure};
use nullag_core::subspace::surd_minors_vanish;
use nullag_core::{Error, Result, Subspace};
use serde_json::{json, Value};

use crate::report::{RunReport, EXIT_FAILED, EXIT_OK};

fn schema(e: serde_json::Error) -> Error {
    Error::Schema(e.to_string())
}

/// Finds the artifact inside a report, a fixture dump, or a bare artifact.
fn locate(v: &Value) -> Result<(String, Value)> {
    if let Some(kind) = v.get("kind").and_then(Value::as_str) {
        return Ok((kind.to_string(), v.clone()));
    }
    if let Some(a) = v.get("artifact").filter(|a| !a.is_null()) {
        return locate(a);
    }
    if v.get("chain").is_some() {
        return Ok(("certificate".into(), v.clone()));
    }
    if v.get("measure").is_some_and(|m| !m.is_null()) {
        return Ok(("measure".into(), v.clone()));
    }
    if v.get("atoms").is_some() {
        return Ok(("measure".into(), json!({ "measure": v })));
    }
    Err(Error::Schema("no certificate or measure found in input".into()))
}

fn exact_atoms(m: &Value) -> bool {
    m.pointer("/atoms/0/0/0").is_some_and(Value::is_string)
}

pub fn verify(input: &Value, tol: f64, report: RunReport) -> Result<RunReport> {
    let (kind, art) = locate(input)?;
    match kind.as_str() {
        "certificate" => {
            let cert: CertificateArtifact = serde_json::from_value(art).map_err(schema)?;
            let check = cert.verify()?;
            let ok = check.verified;
            let details = serde_json::to_value(&check).map_err(schema)?;
            let (verdict, code) = if ok { ("verified", EXIT_OK) } else { ("rejected", EXIT_FAILED) };
            Ok(report.finish(verdict, "verify_certificate", code, details))
        }
        "measure" if exact_atoms(&art["measure"]) => {
            let mu: DiscreteMeasure = serde_json::from_value(art["measure"].clone()).map_err(schema)?;
            let check = is_null_lagrangian(&mu, mu.shape(), MinorOrder::All)?;
            let mut problems = Vec::new();
            if !check.verdict {
                problems.push(format!("{} minors fail to commute", check.nonzero.len()));
            }
            // Atoms must lie in the subspace when one is supplied.
            if let Some(s) = art.get("subspace").filter(|s| !s.is_null()) {
                let k: Subspace = serde_json::from_value(s.clone()).map_err(schema)?;
                let outside = mu.atoms().iter().filter(|a| a.shape() != (k.m(), k.n()) || k.coordinates(a).is_none()).count();
                if outside > 0 {
                    problems.push(format!("{outside} atoms lie outside the subspace"));
                }
            }
            let details = json!({
                "exact": true,
                "null_lagrangian": check,
                "trivial": mu.is_trivial(),
                "problems": problems,
            });
            let (verdict, code) = if problems.is_empty() { ("verified", EXIT_OK) } else { ("rejected", EXIT_FAILED) };
            Ok(report.finish(verdict, "is_null_lagrangian", code, details))
        }
        "measure" | "float_measure" => {
            let mu: FloatMeasure = serde_json::from_value(art["measure"].clone()).map_err(schema)?;
            let tol = art.get("tolerance").and_then(Value::as_f64).unwrap_or(tol);
            let check = is_null_lagrangian_f64(&mu, MinorOrder::All, tol)?;
            let ok = check.verdict;
            let details = json!({ "exact": false, "null_lagrangian": check });
            let (verdict, code) = if ok { ("verified", EXIT_OK) } else { ("rejected", EXIT_FAILED) };
            Ok(report.finish(verdict, "is_null_lagrangian_f64", code, details))
        }
        "rank_one_surd" => {
            let k: Subspace = serde_json::from_value(art["subspace"].clone()).map_err(schema)?;
            let z: Vec<QuadraticSurd> = serde_json::from_value(art["direction"].clone()).map_err(schema)?;
            if z.len() != k.d() {
                return Err(Error::DimensionMismatch(format!("direction has {} entries, d = {}", z.len(), k.d())));
            }
            let nonzero = z.iter().any(|s| !s.is_zero());
            let ok = nonzero && surd_minors_vanish(&k.minor_forms(), &z);
            let details = json!({ "exact": true, "nonzero_direction": nonzero, "minors_vanish": ok });
            let (verdict, code) = if ok { ("verified", EXIT_OK) } else { ("rejected", EXIT_FAILED) };
            Ok(report.finish(verdict, "surd_minors_vanish", code, details))
        }
        other => Err(Error::Schema(format!("unknown artifact kind `{other}`"))),
    }
}
