//! JSON encodings. Every integer is written as a decimal string.

use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use crate::arith::{BinaryForm, Factorization, Prime};
use crate::bounds::{BoundValue, Verdict};
use crate::dynamics::{OrbitCertificate, RationalMap};
use crate::projective::ProjectivePoint;
use crate::suites::{CertificateBounds, CertificateChecks, CheckOutcome, CheckStatus};

pub fn int(v: impl ToString) -> Value {
    Value::String(v.to_string())
}

pub fn point(p: &ProjectivePoint) -> Value {
    json!([int(p.x()), int(p.y())])
}

fn form(f: &BinaryForm) -> Value {
    Value::Array(f.coeffs().iter().map(int).collect())
}

pub fn map(m: &RationalMap) -> Value {
    json!({ "F": form(m.f()), "G": form(m.g()) })
}

pub fn primes(ps: &[Prime]) -> Value {
    Value::Array(ps.iter().map(int).collect())
}

pub fn factorization(f: &Factorization) -> Value {
    Value::Array(
        f.factors
            .iter()
            .map(|(p, e)| json!({ "prime": int(p), "exponent": int(e) }))
            .collect(),
    )
}

pub fn verdict(v: Verdict) -> Value {
    Value::String(
        match v {
            Verdict::Satisfied => "satisfied",
            Verdict::Violated => "violated",
            Verdict::Inconclusive => "inconclusive",
        }
        .to_string(),
    )
}

pub fn bound(b: &BoundValue) -> Value {
    let mut obj = Map::new();
    obj.insert("id".into(), Value::String(b.formula.id().into()));
    obj.insert("params".into(), Value::String(b.formula.params()));
    obj.insert("ln_lower".into(), Value::String(b.ln_lower.to_string()));
    obj.insert("ln_upper".into(), Value::String(b.ln_upper.to_string()));
    obj.insert("magnitude".into(), Value::String(b.magnitude()));
    obj.insert("form".into(), Value::String(b.exact_form.clone()));
    obj.insert("precision".into(), int(b.precision_digits));
    if let Some(e) = &b.exact {
        obj.insert("exact".into(), int(e));
    }
    Value::Object(obj)
}

fn check(c: &CheckOutcome) -> Value {
    let mut obj = Map::new();
    obj.insert("status".into(), Value::String(c.label().into()));
    obj.insert("checks".into(), int(c.checks));
    match &c.status {
        CheckStatus::Failed(why) | CheckStatus::Skipped(why) => {
            obj.insert("detail".into(), Value::String(why.clone()));
        }
        CheckStatus::Passed => {}
    }
    Value::Object(obj)
}

pub fn certificate(cert: &OrbitCertificate, checks: &CertificateChecks, bounds: &CertificateBounds) -> Value {
    json!({
        "schema": crate::SCHEMA,
        "map": map(cert.map()),
        "start": point(cert.start()),
        "tail_length": int(cert.tail_length()),
        "period": int(cert.period()),
        "points": cert.points().iter().map(point).collect::<Vec<_>>(),
        "bad_primes": primes(cert.bad_primes()),
        "s": int(cert.s()),
        "checks": {
            "prop51": check(&checks.prop51),
            "prop52": check(&checks.prop52),
            "remark": check(&checks.remark),
            "divisibility": check(&checks.divisibility),
        },
        "bounds": {
            "ln_c_s": Value::String(bounds.c_s.ln_upper.to_string()),
            "ln_ms": Value::String(bounds.period_bound.ln_upper.to_string()),
            "period_bound": Value::String(bounds.period_bound.formula.id().into()),
            "length_verdict": verdict(bounds.length_verdict),
            "period_verdict": verdict(bounds.period_verdict),
            "satisfied": bounds.satisfied(),
        },
    })
}

fn get<'a>(v: &'a Value, key: &str) -> Result<&'a Value, String> {
    v.get(key).ok_or_else(|| format!("missing field {key:?}"))
}

fn parse_int(v: &Value) -> Result<BigInt, String> {
    v.as_str()
        .ok_or("integers are encoded as strings")?
        .parse()
        .map_err(|e| format!("bad integer: {e}"))
}

fn parse_usize(v: &Value) -> Result<usize, String> {
    v.as_str()
        .ok_or("integers are encoded as strings")?
        .parse()
        .map_err(|e| format!("bad count: {e}"))
}

fn parse_form(v: &Value) -> Result<BinaryForm, String> {
    let arr = v.as_array().ok_or("form must be an array")?;
    Ok(BinaryForm::new(arr.iter().map(parse_int).collect::<Result<_, _>>()?))
}

fn parse_point(v: &Value) -> Result<ProjectivePoint, String> {
    match v.as_array().map(Vec::as_slice) {
        Some([x, y]) => ProjectivePoint::new(parse_int(x)?, parse_int(y)?).map_err(|e| e.to_string()),
        _ => Err("point must be [x, y]".into()),
    }
}

/// Rebuilds and re-verifies a certificate from its JSON encoding.
pub fn parse_certificate(v: &Value) -> Result<OrbitCertificate, String> {
    if get(v, "schema")?.as_str() != Some(crate::SCHEMA) {
        return Err("unknown schema".into());
    }
    let m = get(v, "map")?;
    let map = RationalMap::new(parse_form(get(m, "F")?)?, parse_form(get(m, "G")?)?).map_err(|e| e.to_string())?;
    let points = get(v, "points")?
        .as_array()
        .ok_or("points must be an array")?
        .iter()
        .map(parse_point)
        .collect::<Result<Vec<_>, _>>()?;
    if points.first() != Some(&parse_point(get(v, "start")?)?) {
        return Err("start is not the first point".into());
    }
    let cert = OrbitCertificate::from_parts(
        map,
        points,
        parse_usize(get(v, "tail_length")?)?,
        parse_usize(get(v, "period")?)?,
    )
    .map_err(|e| e.to_string())?;
    let listed: Vec<String> = get(v, "bad_primes")?
        .as_array()
        .ok_or("bad_primes must be an array")?
        .iter()
        .map(|p| p.as_str().unwrap_or_default().to_string())
        .collect();
    let actual: Vec<String> = cert.bad_primes().iter().map(ToString::to_string).collect();
    if listed != actual {
        return Err("bad_primes disagree with the resultant".into());
    }
    if parse_usize(get(v, "s")?)? != cert.s() {
        return Err("s disagrees with bad_primes".into());
    }
    Ok(cert)
}
