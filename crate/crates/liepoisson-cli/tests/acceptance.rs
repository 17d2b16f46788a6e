//! Acceptance suite: one line per criterion, exit status reflects the
//! outcome against the list of documented failures below.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use liepoisson::catalog::{self, SystemSpec};
use liepoisson::dissipation::identity;
use liepoisson::scalar::{format_scalar, int, parse_scalar, ratio};
use liepoisson::*;
use nalgebra::DMatrix;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria that cannot pass against the reference values; see the README.
const DOCUMENTED_FAILURES: [usize; 3] = [1, 4, 5];

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, summary: impl Into<String>, details: Vec<String>) -> Self {
        Outcome { pass, summary: summary.into(), details }
    }
}

fn main() -> ExitCode {
    let criteria: [(usize, fn() -> Outcome); 9] = [
        (1, exact_validation),
        (2, condition_engine),
        (3, coupled_heisenberg_two_ways),
        (4, reference_matrices),
        (5, vector_field_oracles),
        (6, conservation_and_dissipation),
        (7, integration_drift),
        (8, convergence),
        (9, reproducibility),
    ];
    let mut unexpected = Vec::new();
    for (n, run) in criteria {
        let start = Instant::now();
        let out = run();
        let documented = DOCUMENTED_FAILURES.contains(&n);
        let tag = match (out.pass, documented) {
            (false, true) => " [documented]",
            (true, true) => " [unexpected pass]",
            (false, false) => " [unexpected failure]",
            (true, false) => "",
        };
        println!(
            "criterion {n}: {} {} ({:.2}s){tag}",
            if out.pass { "PASS" } else { "FAIL" },
            out.summary,
            start.elapsed().as_secs_f64()
        );
        for d in &out.details {
            println!("    {d}");
        }
        if out.pass == documented {
            unexpected.push(n);
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: all outcomes as documented");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected outcome for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}

// ---------------------------------------------------------------- helpers

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn rand_q(rng: &mut ChaCha8Rng) -> Scalar {
    ratio(rng.random_range(-9..=9), rng.random_range(1..=4))
}

fn rand_state(rng: &mut ChaCha8Rng, n: usize) -> Vec<Scalar> {
    (0..n).map(|_| rand_q(rng)).collect()
}

fn rand_f64_state(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Random polynomial with up to five monomials of degree `1..=max_deg`.
fn rand_poly(rng: &mut ChaCha8Rng, n: usize, max_deg: usize, coeff: fn(&mut ChaCha8Rng) -> Scalar) -> Observable {
    let monomials = (0..rng.random_range(1..=5))
        .map(|_| {
            let mut powers = vec![0u32; n];
            for _ in 0..rng.random_range(1..=max_deg) {
                powers[rng.random_range(0..n)] += 1;
            }
            Monomial { coeff: coeff(rng), powers }
        })
        .collect();
    Observable::Polynomial(Polynomial::new(monomials).unwrap())
}

fn small_q(rng: &mut ChaCha8Rng) -> Scalar {
    ratio(rng.random_range(-4..=4), 4)
}

fn entry(name: &str) -> CatalogEntry {
    catalog::get(name).unwrap()
}

fn extension(name: &str) -> ExtendedStructureSpec {
    match entry(name).spec {
        SystemSpec::Extension(s) => s,
        _ => panic!("{name} is not an extension"),
    }
}

fn biv(name: &str) -> PoissonBivector {
    entry(name).bivector().unwrap()
}

fn dot<T: Clone + std::ops::Mul<Output = T> + std::ops::Add<Output = T> + Zero>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |s, (x, y)| s + x.clone() * y.clone())
}

fn cross(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    vec![
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

fn scaled(s: &Scalar, v: &[Scalar]) -> Vec<Scalar> {
    v.iter().map(|x| s * x).collect()
}

fn sum(vs: &[Vec<Scalar>]) -> Vec<Scalar> {
    (0..vs[0].len()).map(|i| vs.iter().fold(Scalar::zero(), |s, v| s + &v[i])).collect()
}

fn neg(v: &[Scalar]) -> Vec<Scalar> {
    v.iter().map(|x| -x).collect()
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_liepoisson"))
}

fn short(v: &[Scalar]) -> String {
    v.iter().map(format_scalar).collect::<Vec<_>>().join(",")
}

// ------------------------------------------------------------ criterion 1

/// Single-entry mutations of the stored tensors: negate, zero or double a
/// nonzero entry, or set a zero entry to 1. Alternating tensors change
/// together with their partner entry.
fn mutations(spec: &ExtendedStructureSpec) -> Vec<(String, ExtendedStructureSpec)> {
    let mut out = Vec::new();
    let (n, m) = (spec.dim_g(), spec.dim_h);
    let edits = |v: &Scalar| -> Vec<Scalar> {
        if v.is_zero() {
            vec![int(1)]
        } else {
            vec![-v.clone(), Scalar::zero(), v * int(2)]
        }
    };
    for i in 0..n {
        for j in (i + 1)..n {
            for k in 0..n {
                for nv in edits(spec.g.c(i, j, k)) {
                    let label = format_scalar(&nv);
                    let mut d = spec.g.dense().to_vec();
                    d[(i * n + j) * n + k] = nv.clone();
                    d[(j * n + i) * n + k] = -nv;
                    let mut s = spec.clone();
                    s.g = LieAlgebraSpec::from_dense(n, Some(spec.g.labels().to_vec()), d).unwrap();
                    out.push((format!("C[{}][{}][{}]={}", i + 1, j + 1, k + 1, label), s));
                }
            }
        }
    }
    for a in 0..m {
        for b in (a + 1)..m {
            for x in 0..n {
                for nv in edits(spec.phi.get(a, b, x)) {
                    let label = format_scalar(&nv);
                    let mut s = spec.clone();
                    s.phi.set(a, b, x, nv.clone());
                    s.phi.set(b, a, x, -nv);
                    out.push((format!("phi[{}][{}][{}]={}", a + 1, b + 1, x + 1, label), s));
                }
            }
            for d in 0..m {
                for nv in edits(spec.kappa.get(a, b, d)) {
                    let label = format_scalar(&nv);
                    let mut s = spec.clone();
                    s.kappa.set(a, b, d, nv.clone());
                    s.kappa.set(b, a, d, -nv);
                    out.push((format!("D[{}][{}][{}]={}", a + 1, b + 1, d + 1, label), s));
                }
            }
        }
    }
    for a in 0..m {
        for al in 0..n {
            for be in 0..n {
                for nv in edits(spec.actions.l.get(a, al, be)) {
                    let label = format_scalar(&nv);
                    let mut s = spec.clone();
                    s.actions.l.set(a, al, be, nv);
                    out.push((format!("L[{}][{}][{}]={}", a + 1, al + 1, be + 1, label), s));
                }
            }
            for b in 0..m {
                for nv in edits(spec.actions.r.get(a, al, b)) {
                    let label = format_scalar(&nv);
                    let mut s = spec.clone();
                    s.actions.r.set(a, al, b, nv);
                    out.push((format!("R[{}][{}][{}]={}", a + 1, al + 1, b + 1, label), s));
                }
            }
        }
    }
    out
}

fn exact_validation() -> Outcome {
    let start = Instant::now();
    let mut details = Vec::new();
    let mut pass = true;
    let names = catalog::list_catalog().unwrap();
    let nonzero: Vec<String> = names
        .iter()
        .filter(|n| !jacobi_residual(&entry(n).spec.total().unwrap()).unwrap().is_zero())
        .cloned()
        .collect();
    pass &= nonzero.is_empty();
    details.push(format!("jacobi residual is exactly 0 for {}/{} totals", names.len() - nonzero.len(), names.len()));
    for name in ["rigid_body_pair", "coupled_heisenberg"] {
        let muts = mutations(&extension(name));
        let survivors: Vec<&str> = muts
            .iter()
            .filter(|(_, s)| {
                let j = jacobi_residual(&assemble_total_constants(s).unwrap()).unwrap();
                let r = verify_extended_structure(s).unwrap();
                j.is_zero() || r.pass || r.failing().next().is_none()
            })
            .map(|(w, _)| w.as_str())
            .collect();
        pass &= survivors.is_empty();
        let mut line = format!("{name}: {}/{} mutations detected", muts.len() - survivors.len(), muts.len());
        if !survivors.is_empty() {
            let shown: Vec<&str> = survivors.iter().take(8).copied().collect();
            line += &format!("; still Lie after mutation: {}{}", shown.join(" "), if survivors.len() > 8 { " ..." } else { "" });
        }
        details.push(line);
    }
    let t = start.elapsed().as_secs_f64();
    pass &= t < 1.0;
    details.push(format!("runtime {t:.3}s (limit 1s)"));
    if !pass {
        details.push("coupled_heisenberg is 2-step nilpotent: rescaling or zeroing its brackets keeps Jacobi".into());
    }
    Outcome::new(pass, "exact Jacobi and single-entry mutation detection", details)
}

// ------------------------------------------------------------ criterion 2

fn random_sparse_spec(rng: &mut ChaCha8Rng) -> Option<ExtendedStructureSpec> {
    let (n, m) = (rng.random_range(1..=3), rng.random_range(1..=3));
    let (mut g, mut phi, mut kappa, mut l, mut r) = (vec![], vec![], vec![], vec![], vec![]);
    for _ in 0..rng.random_range(0..7) {
        let (i, j, k) = (rng.random_range(1..=3), rng.random_range(1..=3), rng.random_range(1..=3));
        let v = int([-2, -1, 1, 2][rng.random_range(0..4)]);
        match rng.random_range(0..5) {
            0 if i <= n && j <= n && k <= n && i != j => g.push((i, j, k, v)),
            1 if i <= m && j <= m && k <= n && i != j => phi.push((i, j, k, v)),
            2 if i <= m && j <= m && k <= m && i != j => kappa.push((i, j, k, v)),
            3 if i <= m && j <= n && k <= n => l.push((i, j, k, v)),
            4 if i <= m && j <= n && k <= m => r.push((i, j, k, v)),
            _ => {}
        }
    }
    ExtendedStructureSpec::new(
        LieAlgebraSpec::new(n, None, g).ok()?,
        m,
        None,
        Tensor3::alternating_from_triples([m, m, n], "phi", phi).ok()?,
        Tensor3::alternating_from_triples([m, m, m], "kappa", kappa).ok()?,
        ActionTensors::from_triples(n, m, l, r).ok()?,
    )
    .ok()
}

/// A 3+3 decomposition of a catalog total, sometimes with one action entry
/// perturbed.
fn derived_spec(rng: &mut ChaCha8Rng, totals: &[LieAlgebraSpec]) -> Option<ExtendedStructureSpec> {
    let total = &totals[rng.random_range(0..totals.len())];
    let mut idx: Vec<usize> = (1..=6).collect();
    for i in (1..6).rev() {
        idx.swap(i, rng.random_range(0..=i));
    }
    let mut sub = idx[..3].to_vec();
    sub.sort();
    let mut spec = decompose_along_subalgebra(total, &sub).ok()?;
    if rng.random_bool(0.5) {
        let (a, b, c) = (rng.random_range(0..3), rng.random_range(0..3), rng.random_range(0..3));
        let v = spec.actions.l.get(a, b, c) + int(1);
        spec.actions.l.set(a, b, c, v);
    }
    Some(spec)
}

fn condition_engine() -> Outcome {
    let start = Instant::now();
    let totals: Vec<LieAlgebraSpec> = ["rigid_body_pair", "coupled_heisenberg", "coupled_heisenberg_as_cocycle"]
        .iter()
        .map(|n| entry(n).spec.total().unwrap())
        .collect();
    let mut rng = rng(2);
    let (mut checked, mut lie, mut disagree) = (0, 0, Vec::new());
    while checked < 200 {
        let spec = if rng.random_bool(0.5) { random_sparse_spec(&mut rng) } else { derived_spec(&mut rng, &totals) };
        let Some(spec) = spec else { continue };
        checked += 1;
        let report = verify_extended_structure(&spec).unwrap();
        let jacobi = jacobi_residual(&assemble_total_constants(&spec).unwrap()).unwrap().is_zero();
        lie += jacobi as usize;
        if report.pass != jacobi {
            disagree.push(checked);
        }
    }
    let t = start.elapsed().as_secs_f64();
    let pass = disagree.is_empty() && t < 30.0;
    let details = vec![
        format!("{checked} specs, {lie} with a Lie total, {} without; {} disagreements", checked - lie, disagree.len()),
        format!("runtime {t:.3}s (limit 30s)"),
    ];
    Outcome::new(pass, "condition engine agrees with the total Jacobi identity", details)
}

// ------------------------------------------------------------ criterion 3

/// `[(ξ,η),(ξ',η')]` for the coupled Heisenberg algebras, basis (e1,e2,e3,f1,f2,f3).
fn heisenberg_pair_bracket(x: &[i64], y: &[i64]) -> [i64; 6] {
    let e3 = x[0] * y[1] - x[1] * y[0] - x[3] * y[1] + y[3] * x[1];
    let f3 = x[3] * y[4] - x[4] * y[3] - x[4] * y[0] + y[4] * x[0];
    [0, 0, e3, 0, 0, f3]
}

fn coupled_heisenberg_two_ways() -> Outcome {
    let SystemSpec::Coupling(c) = entry("coupled_heisenberg_as_cocycle").spec else {
        return Outcome::new(false, "coupling fixture has the wrong kind", vec![]);
    };
    let out = couple_cocycle_extensions(&c).unwrap();
    // (v,w,l,k) and (v,l,w,k) reordered to (mu1,mu2,mu3,nu1,nu2,nu3)
    let theta = out.total.permuted(&[2, 5, 0, 1, 3, 4]).unwrap();
    let matched = out.matched_total.permuted(&[2, 0, 1, 5, 3, 4]).unwrap();
    let direct = entry("coupled_heisenberg").spec.total().unwrap();
    let mut dense = vec![Scalar::zero(); 216];
    for i in 0..6 {
        for j in 0..6 {
            let (mut x, mut y) = ([0i64; 6], [0i64; 6]);
            x[i] = 1;
            y[j] = 1;
            for (k, v) in heisenberg_pair_bracket(&x, &y).iter().enumerate() {
                dense[(i * 6 + j) * 6 + k] = int(*v);
            }
        }
    }
    let closed = LieAlgebraSpec::from_dense(6, None, dense).unwrap();
    let checks = [
        ("matched pair of the two extensions == Theta-extension", matched.dense() == theta.dense()),
        ("Theta-extension == closed-form bracket", theta.dense() == closed.dense()),
        ("closed-form bracket == coupled_heisenberg total", closed.dense() == direct.dense()),
        ("coupling report passes", out.report.pass),
    ];
    let pass = checks.iter().all(|(_, ok)| *ok);
    let details = checks.iter().map(|(w, ok)| format!("{w}: {}", if *ok { "yes" } else { "no" })).collect();
    Outcome::new(pass, "coupled Heisenberg built two ways gives one tensor", details)
}

// ------------------------------------------------------------ criterion 4

const REFERENCE_CK: [[i64; 6]; 6] = [
    [-4, 0, 0, 0, -5, 0],
    [0, -4, 0, 5, 0, 0],
    [0, 0, -4, 0, 0, 0],
    [0, 5, 0, -2, 0, 0],
    [-5, 0, 0, 0, -2, 0],
    [0, 0, 0, 0, 0, 1],
];

fn reference_double_metric(m3: &Scalar, n3: &Scalar) -> Vec<Vec<Scalar>> {
    let mut g = vec![vec![Scalar::zero(); 6]; 6];
    let s = m3 + n3;
    g[0][0] = m3 * m3;
    g[1][1] = int(2) * m3 * m3 + int(2) * n3 * m3 + n3 * n3;
    g[1][4] = -(&s * &s);
    g[4][1] = -(&s * &s);
    g[4][4] = int(2) * n3 * n3 + int(2) * m3 * n3 + m3 * m3;
    g[3][3] = n3 * n3;
    g
}

fn reference_matrices() -> Outcome {
    let mut details = Vec::new();
    let out = cli().args(["metric", "rigid_body_pair", "--json"]).output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let ck: Vec<Vec<Scalar>> = v["matrix"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r.as_array().unwrap().iter().map(|c| parse_scalar(c.as_str().unwrap()).unwrap()).collect())
        .collect();
    let mut ck_diff = Vec::new();
    for i in 0..6 {
        for j in 0..6 {
            if ck[i][j] != int(REFERENCE_CK[i][j]) {
                ck_diff.push(format!("({},{}) {} vs {}", i + 1, j + 1, format_scalar(&ck[i][j]), REFERENCE_CK[i][j]));
            }
        }
    }
    details.push(format!("rigid_body_pair ck metric: {}/36 entries differ from the reference", ck_diff.len()));
    if !ck_diff.is_empty() {
        details.push(format!("  computed rows: {}", ck.iter().map(|r| short(r)).collect::<Vec<_>>().join("; ")));
        details.push("  the reference is also inconsistent with its own component equations".into());
    }

    let b = biv("coupled_heisenberg");
    let mut rng = rng(4);
    let mut double_diff = 0;
    for (m3, n3) in [(1, 0), (0, 1), (1, 1), (2, 3)] {
        let (m3, n3) = (int(m3), int(n3));
        let mut z = rand_state(&mut rng, 6);
        z[2] = m3.clone();
        z[5] = n3.clone();
        let g = double_bracket_metric(&b, &z).unwrap();
        let want = reference_double_metric(&m3, &n3);
        let diff = (0..36).filter(|k| g[k / 6][k % 6] != want[k / 6][k % 6]).count();
        double_diff += diff;
        details.push(format!(
            "coupled_heisenberg double metric at (mu3,nu3)=({},{}): {diff}/36 entries differ",
            format_scalar(&m3),
            format_scalar(&n3)
        ));
        if diff > 0 {
            details.push(format!("  computed rows: {}", g.iter().map(|r| short(r)).collect::<Vec<_>>().join("; ")));
        }
    }
    let pass = out.status.success() && ck_diff.is_empty() && double_diff == 0;
    Outcome::new(pass, "reference Cartan-Killing and double-bracket matrices", details)
}

// ------------------------------------------------------------ criterion 5

/// Heisenberg: μ̇1 = μ3 H_μ2, μ̇2 = −μ3 H_μ1, μ̇3 = 0.
fn heisenberg_reference(z: &[Scalar], g: &[Scalar]) -> Vec<Scalar> {
    vec![&z[2] * &g[1], -(&z[2] * &g[0]), Scalar::zero()]
}

/// Coupled Heisenberg reference field; `corrected` negates the two terms
/// listed in the fixture annotation (ν3 H_ν2 in μ̇1 and ν3 H_μ1 in ν̇2).
fn coupled_heisenberg_reference(z: &[Scalar], g: &[Scalar], corrected: bool) -> Vec<Scalar> {
    let s = if corrected { int(-1) } else { int(1) };
    let (m3, n3) = (&z[2], &z[5]);
    vec![
        -(&s * n3 * &g[4]) + m3 * &g[1],
        m3 * &g[3] - m3 * &g[0],
        Scalar::zero(),
        -(m3 * &g[1]) + n3 * &g[4],
        -(n3 * &g[3]) + &s * n3 * &g[0],
        Scalar::zero(),
    ]
}

/// Coupled oscillators at μ3 = ν3 = 1 in (q, p, u, w) = (μ1, μ2, ν1, ν2).
fn coupled_qp_reference(g: &[Scalar], corrected: bool) -> Vec<Scalar> {
    let s = if corrected { int(-1) } else { int(1) };
    let (hq, hp, hu, hw) = (&g[0], &g[1], &g[3], &g[4]);
    vec![hp - &s * hw, hu - hq, Scalar::zero(), -hp + hw, -hu + &s * hq, Scalar::zero()]
}

/// Rigid bodies with k = (0,0,1). `l = 1` is the reference; `l = −1`
/// negates the terms coming from the left action.
fn rigid_body_pair_reference(z: &[Scalar], g: &[Scalar], l: i64) -> Vec<Scalar> {
    let (mu, nu) = (&z[..3], &z[3..]);
    let (hm, hn) = (&g[..3], &g[3..]);
    let k = [int(0), int(0), int(1)];
    let l = int(l);
    let mu_dot = sum(&[
        cross(hm, mu),
        scaled(&(&l * dot(hn, &k)), mu),
        scaled(&(-(&l * dot(mu, &k))), hn),
        neg(&cross(nu, hn)),
    ]);
    let nu_dot = sum(&[
        scaled(&dot(&k, hn), nu),
        scaled(&-dot(nu, hn), &k),
        cross(hm, nu),
        scaled(&(&l * dot(mu, &k)), hm),
        scaled(&(-(&l * dot(mu, hm))), &k),
    ]);
    [mu_dot, nu_dot].concat()
}

/// Cartan-Killing dissipative field of the rigid body pair, reference form.
fn rigid_body_ck_reference(s: &[Scalar]) -> Vec<Scalar> {
    vec![
        int(-4) * &s[0] + int(5) * &s[1],
        int(-4) * &s[1] - int(5) * &s[0],
        int(-4) * &s[2],
        int(-5) * &s[4] - int(2) * &s[3],
        int(5) * &s[3] - int(2) * &s[4],
        s[5].clone(),
    ]
}

fn count_mismatches(
    b: &PoissonBivector,
    seed: u64,
    fix: impl Fn(&mut Vec<Scalar>),
    reference: impl Fn(&[Scalar], &[Scalar]) -> Vec<Scalar>,
) -> usize {
    let mut rng = rng(seed);
    let n = b.dim();
    (0..100)
        .filter(|_| {
            let h = rand_poly(&mut rng, n, 3, rand_q);
            let mut z = rand_state(&mut rng, n);
            fix(&mut z);
            let g = h.gradient(&z).unwrap();
            lp_vector_field(b, &h, &z).unwrap() != reference(&z, &g)
        })
        .count()
}

fn vector_field_oracles() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    let mut report = |what: &str, bad: usize, counts: bool, details: &mut Vec<String>| {
        details.push(format!("{what}: {}/100 states differ", bad));
        if counts {
            pass &= bad == 0;
        }
    };
    let keep = |_: &mut Vec<Scalar>| {};
    let unit = |z: &mut Vec<Scalar>| {
        z[2] = int(1);
        z[5] = int(1);
    };

    let heis = biv("heisenberg3");
    report("heisenberg3 vs reference", count_mismatches(&heis, 51, keep, heisenberg_reference), true, &mut details);

    let ch = biv("coupled_heisenberg");
    let documented = entry("coupled_heisenberg").annotations.iter().any(|a| a.contains("cross terms"));
    report("coupled_heisenberg vs reference as printed", count_mismatches(&ch, 52, keep, |z, g| coupled_heisenberg_reference(z, g, false)), false, &mut details);
    report(
        "coupled_heisenberg vs reference with the annotated sign slip corrected",
        count_mismatches(&ch, 52, keep, |z, g| coupled_heisenberg_reference(z, g, true)),
        true,
        &mut details,
    );
    details.push(format!("  sign slip recorded in the fixture annotations: {}", if documented { "yes" } else { "no" }));

    let rb = biv("rigid_body_pair");
    report("rigid_body_pair vs reference", count_mismatches(&rb, 53, keep, |z, g| rigid_body_pair_reference(z, g, 1)), true, &mut details);
    let flipped = count_mismatches(&rb, 53, keep, |z, g| rigid_body_pair_reference(z, g, -1));
    details.push(format!("  with the left-action terms negated: {flipped}/100 states differ"));
    let mut neg_l = extension("rigid_body_pair");
    let [a, b, c] = neg_l.actions.l.shape();
    for i in 0..a {
        for j in 0..b {
            for k in 0..c {
                let v = -neg_l.actions.l.get(i, j, k);
                neg_l.actions.l.set(i, j, k, v);
            }
        }
    }
    let r = jacobi_residual(&assemble_total_constants(&neg_l).unwrap()).unwrap();
    details.push(format!("  the algebra with L negated has Jacobi residual {}", format_scalar(&r)));

    report("coupled (q,p,u,w) form vs reference as printed", count_mismatches(&ch, 54, unit, |_, g| coupled_qp_reference(g, false)), true, &mut details);
    let corrected = count_mismatches(&ch, 54, unit, |_, g| coupled_qp_reference(g, true));
    details.push(format!("  with the same annotated slip corrected: {corrected}/100 states differ"));

    let spec = SymmetricBracketSpec::new(DissipationVariant::CartanKilling);
    let mut rng = rng(55);
    let ck_bad = (0..100)
        .filter(|_| {
            let s = rand_poly(&mut rng, 6, 3, rand_q);
            let z = rand_state(&mut rng, 6);
            let ds = s.gradient(&z).unwrap();
            dissipative_field(&rb, &spec, &s, &z).unwrap() != rigid_body_ck_reference(&ds)
        })
        .count();
    report("rigid_body_pair Cartan-Killing field vs reference", ck_bad, true, &mut details);
    Outcome::new(pass && documented, "closed-form vector fields", details)
}

// ------------------------------------------------------------ criterion 6

fn conservation_and_dissipation() -> Outcome {
    const TOL: f64 = 1e-12;
    let mut rng = rng(6);
    let (mut energy, mut psd, mut cas_h, mut cas_c, mut ham_c, mut ham_s) = (0f64, 0f64, 0f64, f64::MIN, 0f64, f64::MIN);
    let names = catalog::list_catalog().unwrap();
    for name in &names {
        let b = biv(name);
        let n = b.dim();
        let psi = identity(n);
        for _ in 0..1000 {
            let z = rand_f64_state(&mut rng, n);
            let h = rand_poly(&mut rng, n, 2, small_q);
            let c = rand_poly(&mut rng, n, 2, small_q);
            let (dh, dc) = (h.gradient(&z).unwrap(), c.gradient(&z).unwrap());
            energy = energy.max(dot(&dh, &lp_vector_field(&b, &h, &z).unwrap()).abs());

            let g = double_bracket_metric(&b, &z).unwrap();
            let min = DMatrix::from_fn(n, n, |i, j| g[i][j]).symmetric_eigenvalues().min();
            psd = psd.min(min);

            let cas = SymmetricBracketSpec::new(DissipationVariant::CasimirDissipation { psi: psi.clone(), casimir: c.clone() });
            let f = dissipative_field(&b, &cas, &h, &z).unwrap();
            cas_h = cas_h.max(dot(&dh, &f).abs());
            cas_c = cas_c.max(dot(&dc, &f));

            let ham = SymmetricBracketSpec::new(DissipationVariant::HamiltonDissipation { psi: psi.clone(), casimir: c.clone() });
            let f = dissipative_field(&b, &ham, &h, &z).unwrap();
            ham_c = ham_c.max(dot(&dc, &f).abs());
            ham_s = ham_s.max(dot(&dh, &f));
        }
    }
    let checks = [
        ("max |grad H . LP field|", energy, energy <= TOL),
        ("min eigenvalue of the double-bracket metric", psd, psd >= -TOL),
        ("casimir dissipation: max |dH/dt|", cas_h, cas_h <= TOL),
        ("casimir dissipation: max dC/dt", cas_c, cas_c <= TOL),
        ("hamilton dissipation: max |dC/dt|", ham_c, ham_c <= TOL),
        ("hamilton dissipation: max dS/dt", ham_s, ham_s <= TOL),
    ];
    let mut details = vec![format!("{} systems x 1000 states, tolerance {TOL:e}", names.len())];
    details.extend(checks.iter().map(|(w, v, ok)| format!("{w} = {v:.3e} {}", if *ok { "ok" } else { "out of tolerance" })));
    Outcome::new(checks.iter().all(|c| c.2), "conservation and dissipation at the continuous level", details)
}

// ------------------------------------------------------------ criterion 7

fn integration_drift() -> Outcome {
    let b = biv("so3");
    let h = Observable::Polynomial(Polynomial::diagonal_quadratic(&[int(1), ratio(1, 2), ratio(1, 3)]));
    let cfg = IntegratorConfig::new(Method::Rk4, 1e-3, 100_000);
    let start = Instant::now();
    let t = integrate(|z: &[f64]| lp_vector_field(&b, &h, z), &[1.0, 1.0, 1.0], &cfg, &[("H".into(), h.clone())]).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let h_drift = monitor_drift(&t, "H").unwrap();
    let norm = |z: &[f64]| z.iter().map(|x| x * x).sum::<f64>();
    let n0 = norm(&t.states[0]);
    let n_drift = t.states.iter().map(|z| (norm(z) - n0).abs()).fold(0.0, f64::max);

    let heis = biv("heisenberg3");
    let hh = Observable::Polynomial(Polynomial::half_norm_sq(3, &[0, 1]));
    let sys = MetriplecticSystem {
        biv: heis,
        sym: SymmetricBracketSpec::new(DissipationVariant::Double).with_a(int(-1)),
        hamiltonian: hh.clone(),
        entropy: None,
    };
    let cfg = IntegratorConfig::new(Method::Rk4, 1e-2, 500).with_stride(5);
    let d = integrate(|z: &[f64]| metriplectic_field(&sys, z), &[1.0, 0.5, 1.0], &cfg, &[("H".into(), hh)]).unwrap();
    let hs = d.monitor("H").unwrap();
    let monotone = hs.windows(2).all(|w| w[1] < w[0]);

    let pass = h_drift <= 1e-8 && n_drift <= 1e-8 && elapsed < 10.0 && monotone;
    let details = vec![
        format!("free rigid body, 1e5 rk4 steps: |H-H0| <= {h_drift:.3e}, ||mu|^2-|mu0|^2| <= {n_drift:.3e} (limit 1e-8)"),
        format!("runtime {elapsed:.3}s (limit 10s)"),
        format!(
            "heisenberg3 double bracket a=-1: H {} over {} recorded points ({:.6} -> {:.6})",
            if monotone { "strictly decreasing" } else { "NOT monotone" },
            hs.len(),
            hs[0],
            hs[hs.len() - 1]
        ),
    ];
    Outcome::new(pass, "energy and Casimir drift, monotone dissipation", details)
}

// ------------------------------------------------------------ criterion 8

fn convergence() -> Outcome {
    let b = biv("heisenberg3");
    let h = Observable::Polynomial(Polynomial::half_norm_sq(3, &[0, 1]));
    let dts = [0.1, 0.05, 0.025, 0.0125];
    let order = |m| {
        let f = |z: &[f64]| lp_vector_field(&b, &h, z);
        convergence_order_estimate(f, &[1.0, 0.0, 1.0], 1.0, &dts, m).unwrap().value().unwrap_or(f64::NAN)
    };
    let (rk4, euler) = (order(Method::Rk4), order(Method::Euler));
    let pass = (rk4 - 4.0).abs() <= 0.2 && (euler - 1.0).abs() <= 0.2;
    let details = vec![format!("rk4 order {rk4:.4} (4 +- 0.2), euler order {euler:.4} (1 +- 0.2), dt = {dts:?}, T = 1")];
    Outcome::new(pass, "observed convergence orders", details)
}

// ------------------------------------------------------------ criterion 9

fn simulate_into(dir: &Path, args: &[&str]) -> Option<(Vec<u8>, Vec<u8>)> {
    let out = dir.join("run.csv");
    let status = cli().arg("simulate").args(args).arg("--out").arg(&out).output().ok()?.status;
    if !status.success() {
        return None;
    }
    Some((std::fs::read(&out).ok()?, std::fs::read(dir.join("run.csv.manifest.json")).ok()?))
}

fn reproducibility() -> Outcome {
    let runs: [&[&str]; 2] = [
        &["so3", "--h", "quad:1,1/2,1/3", "--dt", "1e-3", "--steps", "2000", "--stride", "10", "--z0", "1,1,1"],
        &[
            "coupled_heisenberg", "--h", "quad:1,1,1,1,1,1", "--dissipation", "double", "--a", "-1", "--dt", "0.01",
            "--steps", "300", "--z0", "1,0.5,1,-0.3,0.2,2", "--method", "euler",
        ],
    ];
    let mut pass = true;
    let mut details = Vec::new();
    for args in runs {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        match (simulate_into(a.path(), args), simulate_into(b.path(), args)) {
            (Some(x), Some(y)) => {
                let same = x == y;
                pass &= same;
                details.push(format!(
                    "{}: csv {} bytes, manifest {} bytes, {}",
                    args[0],
                    x.0.len(),
                    x.1.len(),
                    if same { "byte-identical" } else { "DIFFERENT" }
                ));
            }
            _ => {
                pass = false;
                details.push(format!("{}: simulate failed", args[0]));
            }
        }
    }
    Outcome::new(pass, "repeated simulate runs are byte-identical", details)
}
