mod inputs;
mod run;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use liepoisson::catalog::{self, Kind};
use liepoisson::scalar::format_scalar;
use liepoisson::{
    cartan_killing_metric, double_bracket_metric, linear_casimir_basis, Error, Method, Scalar,
    SignConvention,
};

use inputs::{resolve_spec, Failure};

/// Construct, verify and simulate Lie-Poisson systems.
#[derive(Parser)]
#[command(name = "liepoisson", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a spec: Jacobi for algebras, the extension conditions otherwise.
    /// Exit 0 if everything passes, 1 if a condition fails, 2 on bad input.
    Verify {
        /// Path to a JSON spec or a catalog name.
        spec: String,
        #[arg(long, value_parser = parse_kind)]
        kind: Option<Kind>,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Integrate the Lie-Poisson or metriplectic flow and write a CSV plus `<out>.manifest.json`.
    Simulate(run::SimulateArgs),
    /// Print the Cartan-Killing metric or the double-bracket metric at a state.
    Metric {
        spec: String,
        #[arg(long, value_enum, default_value_t = MetricVariant::Ck)]
        variant: MetricVariant,
        /// State for the double-bracket metric, e.g. `0,0,1` (rationals allowed).
        #[arg(long)]
        at: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// List a basis of the linear Casimirs.
    Casimirs { spec: String },
    /// List catalog entries, or describe one.
    Catalog { name: Option<String> },
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricVariant {
    Ck,
    Double,
}

fn parse_kind(s: &str) -> Result<Kind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn dispatch(cmd: Cmd) -> Result<u8, Failure> {
    match cmd {
        Cmd::Verify { spec, kind, json } => verify(&spec, kind, json),
        Cmd::Simulate(args) => run::simulate(args),
        Cmd::Metric { spec, variant, at, json } => metric(&spec, variant, at.as_deref(), json),
        Cmd::Casimirs { spec } => casimirs(&spec),
        Cmd::Catalog { name } => list(name.as_deref()),
    }
}

fn verify(spec: &str, kind: Option<Kind>, json: bool) -> Result<u8, Failure> {
    let (entry, _) = resolve_spec(spec, kind)?;
    let report = entry.spec.verify()?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        println!("{} ({})", entry.name, entry.spec.kind());
        print!("{}", report.to_text());
    }
    Ok(if report.pass { 0 } else { 1 })
}

fn print_matrix(labels: &[String], m: &[Vec<Scalar>], json: bool) {
    let cells: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(format_scalar).collect()).collect();
    if json {
        let v = serde_json::json!({ "labels": labels, "matrix": cells });
        println!("{}", serde_json::to_string_pretty(&v).expect("matrix serializes"));
        return;
    }
    let width = cells.iter().flatten().chain(labels).map(|s| s.len()).max().unwrap_or(1);
    let head: Vec<String> = labels.iter().map(|l| format!("{l:>width$}")).collect();
    println!("{:width$}  {}", "", head.join(" "));
    for (l, r) in labels.iter().zip(&cells) {
        let row: Vec<String> = r.iter().map(|c| format!("{c:>width$}")).collect();
        println!("{l:>width$}  {}", row.join(" "));
    }
}

fn metric(spec: &str, variant: MetricVariant, at: Option<&str>, json: bool) -> Result<u8, Failure> {
    let (entry, _) = resolve_spec(spec, None)?;
    let biv = entry.bivector()?;
    let labels = biv.alg.labels().to_vec();
    let m = match variant {
        MetricVariant::Ck => cartan_killing_metric(&biv.alg),
        MetricVariant::Double => {
            let at = at.ok_or_else(|| Failure::usage("the double-bracket metric needs --at"))?;
            let z = liepoisson::scalar::parse_scalar_list(at)?;
            double_bracket_metric(&biv, &z)?
        }
    };
    print_matrix(&labels, &m, json);
    Ok(0)
}

fn casimirs(spec: &str) -> Result<u8, Failure> {
    let (entry, _) = resolve_spec(spec, None)?;
    let alg = entry.spec.total()?;
    let basis = linear_casimir_basis(&alg);
    if basis.is_empty() {
        println!("no linear Casimirs");
    }
    for c in basis {
        let coords: Vec<String> = c.iter().map(format_scalar).collect();
        println!("({})", coords.join(","));
    }
    Ok(0)
}

fn list(name: Option<&str>) -> Result<u8, Failure> {
    let Some(name) = name else {
        for n in catalog::list_catalog()? {
            println!("{n}");
        }
        return Ok(0);
    };
    let e = catalog::get(name)?;
    let alg = e.spec.total()?;
    println!("name:   {}", e.name);
    println!("kind:   {}", e.spec.kind());
    println!("sign:   {}", e.sign);
    println!("dim:    {}", alg.dim());
    println!("labels: {}", alg.labels().join(","));
    let names: Vec<&str> = e.casimirs.iter().map(|(n, _)| n.as_str()).collect();
    println!("casimirs: {}", if names.is_empty() { "-".into() } else { names.join(",") });
    for a in &e.annotations {
        println!("note: {a}");
    }
    Ok(0)
}

pub(crate) fn parse_sign(s: &str) -> Result<SignConvention, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

pub(crate) fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}
