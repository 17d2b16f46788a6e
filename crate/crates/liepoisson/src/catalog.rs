//! Named example systems stored as JSON fixtures.
//!
//! A fixture is `<dir>/<name>.json` with the wrapper
//! `{"name", "kind": "algebra"|"extension"|"coupling", "sign", "casimirs": {..},
//! "annotations": [..], "spec": {..}}`. The directory is `$LIEPOISSON_FIXTURES`
//! when set, otherwise the `fixtures/` directory shipped with this crate.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;
use serde_json::Value;

use crate::algebra::{jacobi_report, LieAlgebraSpec, SignConvention};
use crate::error::{Error, Result};
use crate::extensions::{
    assemble_total_constants, couple_cocycle_extensions, verify_extended_structure, Acc,
    CocycleCouplingSpec, ExtendedStructureSpec, VerificationReport,
};
use crate::io;
use crate::observable::Observable;
use crate::poisson::PoissonBivector;

pub const FIXTURE_ENV: &str = "LIEPOISSON_FIXTURES";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Algebra,
    Extension,
    Coupling,
}

impl FromStr for Kind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "algebra" => Ok(Kind::Algebra),
            "extension" => Ok(Kind::Extension),
            "coupling" => Ok(Kind::Coupling),
            _ => Err(Error::Schema(format!("unknown spec kind {s:?}"))),
        }
    }
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Kind::Algebra => "algebra",
            Kind::Extension => "extension",
            Kind::Coupling => "coupling",
        })
    }
}

#[derive(Clone, Debug)]
pub enum SystemSpec {
    Algebra(LieAlgebraSpec),
    Extension(ExtendedStructureSpec),
    Coupling(CocycleCouplingSpec),
}

impl SystemSpec {
    pub fn kind(&self) -> Kind {
        match self {
            SystemSpec::Algebra(_) => Kind::Algebra,
            SystemSpec::Extension(_) => Kind::Extension,
            SystemSpec::Coupling(_) => Kind::Coupling,
        }
    }

    /// The algebra whose dual carries the dynamics.
    pub fn total(&self) -> Result<LieAlgebraSpec> {
        match self {
            SystemSpec::Algebra(a) => Ok(a.clone()),
            SystemSpec::Extension(e) => assemble_total_constants(e),
            SystemSpec::Coupling(c) => Ok(couple_cocycle_extensions(c)?.total),
        }
    }

    pub fn verify(&self) -> Result<VerificationReport> {
        match self {
            SystemSpec::Algebra(a) => {
                let (res, w) = jacobi_report(a)?;
                let mut acc = Acc::new("alg.jacobi");
                if let Some(w) = w {
                    acc.push(&w[..3], 0, &one_hot(a.dim(), w[3] - 1, res));
                }
                let mut r = VerificationReport::new(vec![acc.finish()]);
                r.labels = a.labels().to_vec();
                Ok(r)
            }
            SystemSpec::Extension(e) => verify_extended_structure(e),
            SystemSpec::Coupling(c) => match couple_cocycle_extensions(c) {
                Ok(out) => Ok(out.report),
                Err(Error::NotMatched(r)) | Err(Error::NotACocycle(r)) => Ok(*r),
                Err(e) => Err(e),
            },
        }
    }
}

fn one_hot(n: usize, at: usize, v: crate::scalar::Scalar) -> Vec<crate::scalar::Scalar> {
    let mut out = vec![num_traits::Zero::zero(); n];
    out[at] = v;
    out
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub sign: SignConvention,
    /// Known Casimirs of the total algebra, in name order.
    pub casimirs: Vec<(String, Observable)>,
    pub annotations: Vec<String>,
    pub spec: SystemSpec,
}

impl CatalogEntry {
    pub fn bivector(&self) -> Result<PoissonBivector> {
        Ok(PoissonBivector::new(self.spec.total()?, self.sign))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Wrapper {
    name: Option<String>,
    kind: String,
    #[serde(default)]
    sign: SignConvention,
    #[serde(default)]
    casimirs: serde_json::Map<String, Value>,
    #[serde(default)]
    annotations: Vec<String>,
    spec: Value,
}

pub fn fixture_dir() -> PathBuf {
    match std::env::var_os(FIXTURE_ENV) {
        Some(d) if !d.is_empty() => PathBuf::from(d),
        _ => PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures")),
    }
}

pub fn list_catalog() -> Result<Vec<String>> {
    list_from(&fixture_dir())
}

/// Fixture names in `dir`, sorted.
pub fn list_from(dir: &Path) -> Result<Vec<String>> {
    let io_err = |source| Error::Io { path: dir.display().to_string(), source };
    let mut names = Vec::new();
    for e in std::fs::read_dir(dir).map_err(io_err)? {
        let p = e.map_err(io_err)?.path();
        if p.extension().is_some_and(|x| x == "json") {
            if let Some(stem) = p.file_stem().and_then(|s| s.to_str()) {
                names.push(stem.to_string());
            }
        }
    }
    names.sort();
    Ok(names)
}

pub fn get(name: &str) -> Result<CatalogEntry> {
    get_from(&fixture_dir(), name)
}

pub fn get_from(dir: &Path, name: &str) -> Result<CatalogEntry> {
    let valid = !name.is_empty()
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
    let path = dir.join(format!("{name}.json"));
    if !valid || !path.is_file() {
        return Err(Error::UnknownEntry(name.to_string()));
    }
    load_path(&path, None)
}

/// Reads a wrapped fixture or a bare spec. Bare specs are classified by
/// their keys unless `kind` is given.
pub fn load_path(path: &Path, kind: Option<Kind>) -> Result<CatalogEntry> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("spec")
        .to_string();
    parse_entry(&text, &stem, kind)
}

pub fn parse_entry(text: &str, default_name: &str, kind: Option<Kind>) -> Result<CatalogEntry> {
    let v: Value = serde_json::from_str(text)?;
    if v.get("spec").is_some() {
        let w: Wrapper = serde_json::from_value(v)?;
        let k: Kind = w.kind.parse()?;
        if let Some(want) = kind {
            if want != k {
                return Err(Error::Schema(format!("fixture is a {k} spec, not {want}")));
            }
        }
        let casimirs = w
            .casimirs
            .into_iter()
            .map(|(n, o)| Ok((n, Observable::from_value(o)?)))
            .collect::<Result<Vec<_>>>()?;
        return Ok(CatalogEntry {
            name: w.name.unwrap_or_else(|| default_name.to_string()),
            sign: w.sign,
            casimirs,
            annotations: w.annotations,
            spec: build(k, w.spec)?,
        });
    }
    let k = match kind {
        Some(k) => k,
        None => classify(&v)?,
    };
    Ok(CatalogEntry {
        name: default_name.to_string(),
        sign: SignConvention::default(),
        casimirs: Vec::new(),
        annotations: Vec::new(),
        spec: build(k, v)?,
    })
}

fn classify(v: &Value) -> Result<Kind> {
    let has = |k: &str| v.get(k).is_some();
    if has("g") && has("dimH") {
        Ok(Kind::Extension)
    } else if has("l") && has("k") {
        Ok(Kind::Coupling)
    } else if has("dim") {
        Ok(Kind::Algebra)
    } else {
        Err(Error::Schema("cannot tell the spec kind; pass it explicitly".into()))
    }
}

fn build(kind: Kind, v: Value) -> Result<SystemSpec> {
    Ok(match kind {
        Kind::Algebra => SystemSpec::Algebra(io::algebra_from_value(v)?),
        Kind::Extension => SystemSpec::Extension(io::extension_from_value(v)?),
        Kind::Coupling => SystemSpec::Coupling(io::coupling_from_value(v)?),
    })
}
