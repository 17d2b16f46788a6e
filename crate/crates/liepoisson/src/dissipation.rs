//! Symmetric brackets, dissipative vector fields and metriplectic assembly.

use num_traits::{One, Zero};
use serde::Deserialize;

use crate::algebra::{bracket_eval, cartan_killing_metric, LieAlgebraSpec, StructureConstants};
use crate::error::{check_dim, Error, Result};
use crate::observable::Observable;
use crate::poisson::{bracket_of_gradients, lp_vector_field, PoissonBivector};
use crate::scalar::{self, int, Coeff, Scalar};

#[derive(Clone, Debug)]
pub enum DissipationVariant {
    /// Metric `Λ Λᵀ`.
    Double,
    /// Constant metric from the Cartan-Killing form.
    CartanKilling,
    /// `(F,S) = −ψ([∇F,∇S],[∇C,∇S])`
    CasimirDissipation { psi: Vec<Vec<Scalar>>, casimir: Observable },
    /// `(F,S) = −ψ([∇F,∇C],[∇S,∇C])`
    HamiltonDissipation { psi: Vec<Vec<Scalar>>, casimir: Observable },
    /// `ż_j = Σ c[i][j][n] z_n (Υz)_i`, independent of any generator.
    Rayleigh { upsilon: Vec<Vec<Scalar>> },
}

#[derive(Clone, Debug)]
pub struct SymmetricBracketSpec {
    pub variant: DissipationVariant,
    /// Coupling in front of the dissipative field; `None` picks the default.
    pub a: Option<Scalar>,
}

impl SymmetricBracketSpec {
    pub fn new(variant: DissipationVariant) -> Self {
        SymmetricBracketSpec { variant, a: None }
    }

    pub fn with_a(mut self, a: Scalar) -> Self {
        self.a = Some(a);
        self
    }

    pub fn name(&self) -> &'static str {
        match self.variant {
            DissipationVariant::Double => "double",
            DissipationVariant::CartanKilling => "ck",
            DissipationVariant::CasimirDissipation { .. } => "casimir",
            DissipationVariant::HamiltonDissipation { .. } => "hamilton",
            DissipationVariant::Rayleigh { .. } => "rayleigh",
        }
    }

    /// `{"variant": "double"|"ck"|"casimir"|"hamilton"|"rayleigh", "psi": [[..]],
    /// "casimir": <observable>, "upsilon": [[..]], "a": "1"}`
    pub fn from_json(s: &str) -> Result<Self> {
        let raw: DissipationJson = serde_json::from_str(s)?;
        raw.into_spec()
    }

    pub fn from_value(v: serde_json::Value) -> Result<Self> {
        let raw: DissipationJson = serde_json::from_value(v)?;
        raw.into_spec()
    }

    pub fn check(&self, dim: usize) -> Result<()> {
        let square = |m: &Vec<Vec<Scalar>>, name: &str| -> Result<()> {
            check_dim(dim, m.len())?;
            for r in m {
                if r.len() != dim {
                    return Err(Error::Shape(format!("{name} must be {dim}x{dim}")));
                }
            }
            Ok(())
        };
        match &self.variant {
            DissipationVariant::CasimirDissipation { psi, casimir }
            | DissipationVariant::HamiltonDissipation { psi, casimir } => {
                square(psi, "psi")?;
                for i in 0..dim {
                    for j in 0..i {
                        if psi[i][j] != psi[j][i] {
                            return Err(Error::Shape("psi must be symmetric".into()));
                        }
                    }
                }
                if let Some(d) = casimir.dim() {
                    check_dim(dim, d)?;
                }
                Ok(())
            }
            DissipationVariant::Rayleigh { upsilon } => square(upsilon, "upsilon"),
            _ => Ok(()),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DissipationJson {
    variant: String,
    #[serde(default, with = "opt_matrix")]
    psi: Option<Vec<Vec<Scalar>>>,
    #[serde(default)]
    casimir: Option<serde_json::Value>,
    #[serde(default, with = "opt_matrix")]
    upsilon: Option<Vec<Vec<Scalar>>>,
    #[serde(default, with = "opt_scalar")]
    a: Option<Scalar>,
}

mod opt_matrix {
    use super::*;
    use serde::Deserializer;

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Vec<Vec<Scalar>>>, D::Error> {
        scalar::serde_matrix::deserialize(d).map(Some)
    }
}

mod opt_scalar {
    use super::*;
    use serde::Deserializer;

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Scalar>, D::Error> {
        scalar::serde_scalar::deserialize(d).map(Some)
    }
}

impl DissipationJson {
    fn into_spec(self) -> Result<SymmetricBracketSpec> {
        let casimir = self.casimir.map(Observable::from_value).transpose()?;
        let variant = match self.variant.as_str() {
            "double" => DissipationVariant::Double,
            "ck" | "cartan-killing" => DissipationVariant::CartanKilling,
            "casimir" | "hamilton" => {
                let psi = self.psi.ok_or(Error::MissingPsi)?;
                let casimir = casimir.ok_or(Error::MissingCasimir)?;
                if self.variant == "casimir" {
                    DissipationVariant::CasimirDissipation { psi, casimir }
                } else {
                    DissipationVariant::HamiltonDissipation { psi, casimir }
                }
            }
            "rayleigh" => DissipationVariant::Rayleigh {
                upsilon: self
                    .upsilon
                    .ok_or_else(|| Error::Schema("rayleigh dissipation needs \"upsilon\"".into()))?,
            },
            other => return Err(Error::Schema(format!("unknown dissipation variant {other:?}"))),
        };
        Ok(SymmetricBracketSpec { variant, a: self.a })
    }
}

pub fn identity(n: usize) -> Vec<Vec<Scalar>> {
    (0..n).map(|i| (0..n).map(|j| int((i == j) as i64)).collect()).collect()
}

/// `G(z) = Λ(z) Λ(z)ᵀ`.
pub fn double_bracket_metric<T: Coeff + StructureConstants>(biv: &PoissonBivector, z: &[T]) -> Result<Vec<Vec<T>>> {
    let lam = biv.matrix(z)?;
    let n = lam.len();
    let mut g = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let mut s = T::zero();
            for l in 0..n {
                s = s + lam[i][l].clone() * lam[j][l].clone();
            }
            g[i][j] = s.clone();
            g[j][i] = s;
        }
    }
    Ok(g)
}

fn matvec<T: Coeff>(m: &[Vec<Scalar>], v: &[T]) -> Vec<T> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(T::zero(), |acc, (a, b)| acc + T::from_scalar(a) * b.clone())
        })
        .collect()
}

fn matvec_t<T: Coeff>(m: &[Vec<T>], v: &[T]) -> Vec<T> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone()))
        .collect()
}

fn dot<T: Coeff>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

fn ck_metric<T: Coeff>(alg: &LieAlgebraSpec) -> Vec<Vec<T>> {
    cartan_killing_metric(alg)
        .iter()
        .map(|r| r.iter().map(T::from_scalar).collect())
        .collect()
}

/// `ż_i = −Σ_{j,k} c[i][j][k] x_j w_k`, the field `Ḟ = −⟨w, [∇F, x]⟩`.
fn pair_against<T: Coeff + StructureConstants>(alg: &LieAlgebraSpec, x: &[T], w: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); alg.dim()];
    for (i, j, k, c) in T::constants(alg) {
        out[*i] = out[*i].clone() - c.clone() * x[*j].clone() * w[*k].clone();
    }
    out
}

fn rayleigh<T: Coeff + StructureConstants>(alg: &LieAlgebraSpec, upsilon: &[Vec<Scalar>], z: &[T]) -> Vec<T> {
    let u = matvec(upsilon, z);
    let mut out = vec![T::zero(); alg.dim()];
    for (i, j, n, c) in T::constants(alg) {
        out[*j] = out[*j].clone() + c.clone() * z[*n].clone() * u[*i].clone();
    }
    out
}

/// `(F, S)` for the chosen variant. For Rayleigh this is the rate of `F`
/// along the Rayleigh field, and `S` is ignored.
pub fn symmetric_bracket_eval<T: Coeff + StructureConstants>(
    biv: &PoissonBivector,
    spec: &SymmetricBracketSpec,
    f: &Observable,
    s: &Observable,
    z: &[T],
) -> Result<T> {
    check_dim(biv.dim(), z.len())?;
    spec.check(biv.dim())?;
    let df = f.gradient(z)?;
    let alg = &biv.alg;
    Ok(match &spec.variant {
        DissipationVariant::Double => {
            let ds = s.gradient(z)?;
            dot(&df, &matvec_t(&double_bracket_metric(biv, z)?, &ds))
        }
        DissipationVariant::CartanKilling => {
            let ds = s.gradient(z)?;
            dot(&df, &matvec_t(&ck_metric(alg), &ds))
        }
        DissipationVariant::CasimirDissipation { psi, casimir } => {
            let ds = s.gradient(z)?;
            let dc = casimir.gradient(z)?;
            let fs = bracket_eval(alg, &df, &ds)?;
            let cs = bracket_eval(alg, &dc, &ds)?;
            -dot(&fs, &matvec(psi, &cs))
        }
        DissipationVariant::HamiltonDissipation { psi, casimir } => {
            let ds = s.gradient(z)?;
            let dc = casimir.gradient(z)?;
            let fc = bracket_eval(alg, &df, &dc)?;
            let sc = bracket_eval(alg, &ds, &dc)?;
            -dot(&fc, &matvec(psi, &sc))
        }
        DissipationVariant::Rayleigh { upsilon } => dot(&df, &rayleigh(alg, upsilon, z)),
    })
}

/// Field with `Ḟ = (F, S)` for every `F`.
pub fn dissipative_field<T: Coeff + StructureConstants>(
    biv: &PoissonBivector,
    spec: &SymmetricBracketSpec,
    s: &Observable,
    z: &[T],
) -> Result<Vec<T>> {
    check_dim(biv.dim(), z.len())?;
    spec.check(biv.dim())?;
    let alg = &biv.alg;
    Ok(match &spec.variant {
        DissipationVariant::Double => matvec_t(&double_bracket_metric(biv, z)?, &s.gradient(z)?),
        DissipationVariant::CartanKilling => matvec_t(&ck_metric(alg), &s.gradient(z)?),
        DissipationVariant::CasimirDissipation { psi, casimir } => {
            let ds = s.gradient(z)?;
            let w = matvec(psi, &bracket_eval(alg, &casimir.gradient(z)?, &ds)?);
            pair_against(alg, &ds, &w)
        }
        DissipationVariant::HamiltonDissipation { psi, casimir } => {
            let ds = s.gradient(z)?;
            let dc = casimir.gradient(z)?;
            let w = matvec(psi, &bracket_eval(alg, &ds, &dc)?);
            pair_against(alg, &dc, &w)
        }
        DissipationVariant::Rayleigh { upsilon } => rayleigh(alg, upsilon, z),
    })
}

/// Rayleigh field on a total algebra with block-diagonal `Υ = Υg ⊕ Υh`.
pub fn coupled_rayleigh_field<T: Coeff + StructureConstants>(
    total: &LieAlgebraSpec,
    upsilon_g: &[Vec<Scalar>],
    upsilon_h: &[Vec<Scalar>],
    z: &[T],
) -> Result<Vec<T>> {
    let (n, m) = (upsilon_g.len(), upsilon_h.len());
    if n + m != total.dim() {
        return Err(Error::Shape(format!(
            "upsilon blocks {n}+{m} do not cover dimension {}",
            total.dim()
        )));
    }
    if upsilon_g.iter().any(|r| r.len() != n) || upsilon_h.iter().any(|r| r.len() != m) {
        return Err(Error::Shape("upsilon blocks must be square".into()));
    }
    check_dim(total.dim(), z.len())?;
    Ok(rayleigh(total, &block_diag(upsilon_g, upsilon_h), z))
}

pub fn block_diag(a: &[Vec<Scalar>], b: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    let (n, m) = (a.len(), b.len());
    let mut out = vec![vec![Scalar::zero(); n + m]; n + m];
    for i in 0..n {
        out[i][..n].clone_from_slice(&a[i]);
    }
    for i in 0..m {
        out[n + i][n..].clone_from_slice(&b[i]);
    }
    out
}

#[derive(Clone, Debug)]
pub struct MetriplecticSystem {
    pub biv: PoissonBivector,
    pub sym: SymmetricBracketSpec,
    pub hamiltonian: Observable,
    /// Absent for the single-generator form, where `H` drives both parts.
    pub entropy: Option<Observable>,
}

impl MetriplecticSystem {
    /// `a` from the spec, else −1 for single-generator double-bracket
    /// dissipation and +1 otherwise.
    pub fn coupling(&self) -> Scalar {
        if let Some(a) = &self.sym.a {
            return a.clone();
        }
        match (&self.sym.variant, &self.entropy) {
            (DissipationVariant::Double, None) => -Scalar::one(),
            _ => Scalar::one(),
        }
    }

    pub fn generator(&self) -> &Observable {
        self.entropy.as_ref().unwrap_or(&self.hamiltonian)
    }
}

/// `X_H(z) + a · D_S(z)`.
pub fn metriplectic_field<T: Coeff + StructureConstants>(sys: &MetriplecticSystem, z: &[T]) -> Result<Vec<T>> {
    let rev = lp_vector_field(&sys.biv, &sys.hamiltonian, z)?;
    let a = sys.coupling();
    if a.is_zero() {
        return Ok(rev);
    }
    let diss = dissipative_field(&sys.biv, &sys.sym, sys.generator(), z)?;
    let a = T::from_scalar(&a);
    Ok(rev
        .into_iter()
        .zip(diss)
        .map(|(x, y)| x + a.clone() * y)
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompatibilityReport {
    /// `max |{S,H}|` over samples.
    pub poisson_residual: f64,
    /// `max |(H,S)|` over samples.
    pub symmetric_residual: f64,
}

impl CompatibilityReport {
    pub fn pass(&self, tol: f64) -> bool {
        self.poisson_residual <= tol && self.symmetric_residual <= tol
    }
}

pub fn generation_compatibility_check<T: Coeff + StructureConstants>(
    sys: &MetriplecticSystem,
    samples: &[Vec<T>],
) -> Result<CompatibilityReport> {
    let s = sys.entropy.as_ref().ok_or(Error::MissingEntropy)?;
    let mut rep = CompatibilityReport { poisson_residual: 0.0, symmetric_residual: 0.0 };
    for z in samples {
        let ds = s.gradient(z)?;
        let dh = sys.hamiltonian.gradient(z)?;
        let p = bracket_of_gradients(&sys.biv, &ds, &dh, z);
        let q = symmetric_bracket_eval(&sys.biv, &sys.sym, &sys.hamiltonian, s, z)?;
        rep.poisson_residual = rep.poisson_residual.max(p.abs_f64());
        rep.symmetric_residual = rep.symmetric_residual.max(q.abs_f64());
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::SignConvention;
    use crate::observable::Polynomial;

    fn heis() -> PoissonBivector {
        PoissonBivector::new(
            LieAlgebraSpec::new(3, None, [(1, 2, 3, int(1))]).unwrap(),
            SignConvention::Minus,
        )
    }

    #[test]
    fn heisenberg_double_metric_is_diagonal() {
        let z = [int(4), int(-2), int(3)];
        let g = double_bracket_metric(&heis(), &z).unwrap();
        assert_eq!(g, vec![
            vec![int(9), int(0), int(0)],
            vec![int(0), int(9), int(0)],
            vec![int(0), int(0), int(0)],
        ]);
    }

    #[test]
    fn single_generator_double_defaults_to_minus_one() {
        let sys = MetriplecticSystem {
            biv: heis(),
            sym: SymmetricBracketSpec::new(DissipationVariant::Double),
            hamiltonian: Polynomial::half_norm_sq(3, &[0, 1]).into(),
            entropy: None,
        };
        assert_eq!(sys.coupling(), int(-1));
        // μ3 = 1: ż = X_H − ∇H
        let z = [int(2), int(3), int(1)];
        let f = metriplectic_field(&sys, &z).unwrap();
        assert_eq!(f, vec![int(3 - 2), int(-2 - 3), int(0)]);
    }

    #[test]
    fn json_variants() {
        let s = SymmetricBracketSpec::from_json(
            r#"{"variant":"casimir","psi":[["1",0],[0,1]],"casimir":{"monomials":[{"coeff":"1","powers":[1,0]}]},"a":"1/2"}"#,
        )
        .unwrap();
        assert_eq!(s.name(), "casimir");
        assert_eq!(s.a, Some(scalar::ratio(1, 2)));
        assert!(matches!(
            SymmetricBracketSpec::from_json(r#"{"variant":"hamilton","psi":[[1]]}"#),
            Err(Error::MissingCasimir)
        ));
        assert!(SymmetricBracketSpec::from_json(r#"{"variant":"nope"}"#).is_err());
    }
}
