//! Turning command-line strings into library values.

use std::path::Path;

use liepoisson::catalog::{self, CatalogEntry, Kind};
use liepoisson::dissipation::identity;
use liepoisson::scalar::{format_scalar, parse_scalar, parse_scalar_list, to_f64};
use liepoisson::{Error, Observable, Polynomial, SymmetricBracketSpec};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Self {
        Failure { code: 2, message: msg.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NonFiniteState { .. } => 1,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InputRecord {
    pub name: String,
    /// `"file"` or `"catalog"`.
    pub source: &'static str,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

/// An existing file wins over a catalog entry of the same name.
pub fn resolve_spec(arg: &str, kind: Option<Kind>) -> Result<(CatalogEntry, InputRecord), Failure> {
    let path = Path::new(arg);
    if path.is_file() {
        let bytes = read(path)?;
        let entry = catalog::load_path(path, kind)?;
        let rec = InputRecord { name: arg.to_string(), source: "file", sha256: sha256_hex(&bytes) };
        return Ok((entry, rec));
    }
    let entry = catalog::get(arg).map_err(|_| {
        Failure::usage(format!("{arg:?} is neither a readable file nor a catalog entry"))
    })?;
    if let Some(k) = kind {
        if k != entry.spec.kind() {
            return Err(Failure::usage(format!("{arg} is a {} spec, not {k}", entry.spec.kind())));
        }
    }
    let bytes = read(&catalog::fixture_dir().join(format!("{arg}.json")))?;
    let rec = InputRecord { name: arg.to_string(), source: "catalog", sha256: sha256_hex(&bytes) };
    Ok((entry, rec))
}

/// Inline JSON, a path to a JSON file, or a shorthand:
/// `quad:w1,..,wn` for `½ Σ w_i z_i²` and `lin:c1,..,cn` for `Σ c_i z_i`.
pub fn parse_observable(arg: &str, dim: usize) -> Result<Polynomial, Failure> {
    let t = arg.trim();
    let p = if let Some(w) = t.strip_prefix("quad:") {
        Polynomial::diagonal_quadratic(&parse_scalar_list(w)?)
    } else if let Some(c) = t.strip_prefix("lin:") {
        Polynomial::linear(&parse_scalar_list(c)?)
    } else {
        let text = if t.starts_with('{') {
            t.to_string()
        } else {
            String::from_utf8(read(Path::new(t))?).map_err(|e| Failure::usage(e.to_string()))?
        };
        match Observable::from_json(&text)? {
            Observable::Polynomial(p) => p,
            Observable::Function(_) => unreachable!("JSON observables are polynomials"),
        }
    };
    if let Some(d) = p.dim() {
        if d != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: d }.into());
        }
    }
    Ok(p)
}

pub fn observable_value(v: &Value, dim: usize) -> Result<Polynomial, Failure> {
    match v {
        Value::String(s) => parse_observable(s, dim),
        other => parse_observable(&other.to_string(), dim),
    }
}

/// A bare variant name, inline JSON or a JSON file. Casimir and Hamilton
/// dissipation default to `psi = I` and to the sum of the entry's declared
/// Casimirs.
pub fn parse_dissipation(arg: &Value, entry: &CatalogEntry, dim: usize) -> Result<SymmetricBracketSpec, Failure> {
    let mut v = match arg {
        Value::String(s) => {
            let t = s.trim();
            if t.starts_with('{') {
                serde_json::from_str(t).map_err(Error::from)?
            } else if Path::new(t).is_file() {
                serde_json::from_slice(&read(Path::new(t))?).map_err(Error::from)?
            } else {
                serde_json::json!({ "variant": t })
            }
        }
        other => other.clone(),
    };
    let variant = v.get("variant").and_then(Value::as_str).unwrap_or_default().to_string();
    if let (Value::Object(map), "casimir" | "hamilton") = (&mut v, variant.as_str()) {
        if !map.contains_key("psi") {
            let rows: Vec<Vec<String>> = identity(dim).iter().map(|r| r.iter().map(format_scalar).collect()).collect();
            map.insert("psi".into(), serde_json::json!(rows));
        }
        if !map.contains_key("casimir") && !entry.casimirs.is_empty() {
            let mut sum = Polynomial::zero();
            for (_, c) in &entry.casimirs {
                if let Some(p) = c.as_polynomial() {
                    sum = sum.plus(p);
                }
            }
            map.insert("casimir".into(), serde_json::to_value(sum.simplified()).expect("polynomial serializes"));
        }
    }
    let spec = SymmetricBracketSpec::from_value(v)?;
    spec.check(dim)?;
    Ok(spec)
}

/// Comma-separated numbers; each may be a float (`1e-3`) or a rational (`1/3`).
pub fn parse_state(s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|x| {
            let t = x.trim();
            t.parse::<f64>().or_else(|_| parse_scalar(t).map(|q| to_f64(&q))).map_err(Failure::from)
        })
        .collect()
}
