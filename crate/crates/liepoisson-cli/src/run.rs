//! `simulate`: option resolution, integration and the run manifest.

use std::path::{Path, PathBuf};

use clap::Args;
use liepoisson::scalar::{format_scalar, parse_scalar};
use liepoisson::{
    integrate, lp_vector_field, metriplectic_field, IntegratorConfig, MetriplecticSystem, Method,
    Observable, Polynomial, SignConvention,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::inputs::{self, sha256_hex, Failure, InputRecord};

#[derive(Args)]
pub struct SimulateArgs {
    /// Path to a JSON spec or a catalog name (or `spec` in the config file).
    spec: Option<String>,
    /// Hamiltonian: inline JSON polynomial, a JSON file, `quad:w1,..` or `lin:c1,..`.
    #[arg(long = "h")]
    h: Option<String>,
    /// Entropy-like generator of the dissipative part, same forms as --h.
    #[arg(long = "s")]
    s: Option<String>,
    /// `double`, `ck`, `casimir`, `hamilton`, `rayleigh`, inline JSON or a JSON file.
    #[arg(long)]
    dissipation: Option<String>,
    /// Coupling in front of the dissipative field.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Initial state, e.g. `1,0,1`.
    #[arg(long, allow_hyphen_values = true)]
    z0: Option<String>,
    /// CSV output path; the manifest goes to `<out>.manifest.json`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = crate::parse_method)]
    method: Option<Method>,
    /// Record every `stride`-th step.
    #[arg(long)]
    stride: Option<usize>,
    #[arg(long, value_parser = crate::parse_sign)]
    sign: Option<SignConvention>,
    /// JSON file with any of the options above; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    spec: Option<String>,
    h: Option<Value>,
    s: Option<Value>,
    dissipation: Option<Value>,
    a: Option<Value>,
    dt: Option<f64>,
    steps: Option<usize>,
    z0: Option<Value>,
    out: Option<String>,
    method: Option<String>,
    stride: Option<usize>,
    sign: Option<String>,
}

#[derive(Serialize)]
struct Manifest {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    inputs: Vec<InputRecord>,
    system: SystemInfo,
    options: Options,
    monitors: Vec<String>,
    output: Output,
}

#[derive(Serialize)]
struct SystemInfo {
    name: String,
    kind: String,
    sign: String,
    labels: Vec<String>,
}

#[derive(Serialize)]
struct Options {
    method: String,
    dt: f64,
    steps: usize,
    stride: usize,
    z0: Vec<f64>,
    h: Polynomial,
    #[serde(skip_serializing_if = "Option::is_none")]
    s: Option<Polynomial>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dissipation: Option<DissipationInfo>,
}

#[derive(Serialize)]
struct DissipationInfo {
    variant: &'static str,
    a: String,
    input: Value,
}

#[derive(Serialize)]
struct Output {
    csv: String,
    rows: usize,
    sha256: String,
}

fn need<T>(v: Option<T>, what: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::usage(format!("simulate needs {what}")))
}

fn str_value(v: Value) -> String {
    match v {
        Value::String(s) => s,
        other => other.to_string(),
    }
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

pub fn simulate(args: SimulateArgs) -> Result<u8, Failure> {
    let mut inputs = Vec::new();
    let cfg: ConfigFile = match &args.config {
        Some(p) => {
            let bytes = std::fs::read(p).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?;
            let c = serde_json::from_slice(&bytes).map_err(liepoisson::Error::from)?;
            inputs.push(InputRecord { name: p.display().to_string(), source: "file", sha256: sha256_hex(&bytes) });
            c
        }
        None => ConfigFile::default(),
    };

    let spec_arg = need(args.spec.or(cfg.spec), "a spec")?;
    let (mut entry, rec) = inputs::resolve_spec(&spec_arg, None)?;
    inputs.insert(0, rec);
    let sign = match (args.sign, cfg.sign) {
        (Some(s), _) => s,
        (None, Some(s)) => s.parse()?,
        (None, None) => entry.sign,
    };
    entry.sign = sign;
    let biv = entry.bivector()?;
    let dim = biv.dim();

    let h = match args.h {
        Some(s) => inputs::parse_observable(&s, dim)?,
        None => inputs::observable_value(&need(cfg.h, "--h")?, dim)?,
    };
    let s = match (args.s, cfg.s) {
        (Some(s), _) => Some(inputs::parse_observable(&s, dim)?),
        (None, Some(v)) => Some(inputs::observable_value(&v, dim)?),
        (None, None) => None,
    };
    let diss_input = args.dissipation.map(Value::String).or(cfg.dissipation);
    let a = args.a.or(cfg.a.map(str_value)).map(|a| parse_scalar(&a)).transpose()?;
    let dt = need(args.dt.or(cfg.dt), "--dt")?;
    let steps = need(args.steps.or(cfg.steps), "--steps")?;
    let z0 = match (args.z0, cfg.z0) {
        (Some(z), _) => inputs::parse_state(&z)?,
        (None, Some(Value::Array(xs))) => inputs::parse_state(&xs.into_iter().map(str_value).collect::<Vec<_>>().join(","))?,
        (None, Some(v)) => inputs::parse_state(&str_value(v))?,
        (None, None) => return Err(Failure::usage("simulate needs --z0")),
    };
    if z0.len() != dim {
        return Err(liepoisson::Error::DimensionMismatch { expected: dim, found: z0.len() }.into());
    }
    let out = need(args.out.or(cfg.out.map(PathBuf::from)), "--out")?;
    let method = match (args.method, cfg.method) {
        (Some(m), _) => m,
        (None, Some(m)) => m.parse()?,
        (None, None) => Method::default(),
    };
    let stride = args.stride.or(cfg.stride).unwrap_or(1);
    let icfg = IntegratorConfig::new(method, dt, steps).with_stride(stride);

    let hamiltonian = Observable::Polynomial(h.clone());
    let mut monitors = vec![("H".to_string(), hamiltonian.clone())];
    let labels = biv.alg.labels().to_vec();
    for (name, c) in &entry.casimirs {
        let clash = labels.contains(name) || name == "H" || name == "S" || name == "t";
        let name = if clash { format!("casimir_{name}") } else { name.clone() };
        monitors.push((name, c.clone()));
    }
    if let Some(s) = &s {
        monitors.push(("S".to_string(), Observable::Polynomial(s.clone())));
    }

    if a.is_some() && diss_input.is_none() {
        return Err(Failure::usage("--a only applies together with --dissipation"));
    }
    let (traj, diss_info) = match diss_input {
        Some(input) => {
            let mut sym = inputs::parse_dissipation(&input, &entry, dim)?;
            if let Some(a) = a {
                sym = sym.with_a(a);
            }
            let sys = MetriplecticSystem {
                biv: biv.clone(),
                sym,
                hamiltonian,
                entropy: s.clone().map(Observable::Polynomial),
            };
            let info = DissipationInfo { variant: sys.sym.name(), a: format_scalar(&sys.coupling()), input };
            (integrate(|z: &[f64]| metriplectic_field(&sys, z), &z0, &icfg, &monitors)?, Some(info))
        }
        None => (integrate(|z: &[f64]| lp_vector_field(&biv, &hamiltonian, z), &z0, &icfg, &monitors)?, None),
    };

    let mut csv = Vec::new();
    traj.write_csv(&labels, &mut csv).map_err(|e| Failure::usage(e.to_string()))?;
    let write = |p: &Path, bytes: &[u8]| std::fs::write(p, bytes).map_err(|e| Failure::usage(format!("{}: {e}", p.display())));
    write(&out, &csv)?;

    let manifest = Manifest {
        tool: "liepoisson",
        version: env!("CARGO_PKG_VERSION"),
        command: "simulate",
        inputs,
        system: SystemInfo { name: entry.name.clone(), kind: entry.spec.kind().to_string(), sign: sign.to_string(), labels },
        options: Options { method: method.to_string(), dt, steps, stride, z0, h, s, dissipation: diss_info },
        monitors: monitors.iter().map(|(n, _)| n.clone()).collect(),
        output: Output {
            csv: out.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default(),
            rows: traj.len(),
            sha256: sha256_hex(&csv),
        },
    };
    let mpath = manifest_path(&out);
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    write(&mpath, text.as_bytes())?;
    println!("wrote {} ({} rows) and {}", out.display(), traj.len(), mpath.display());
    Ok(0)
}
