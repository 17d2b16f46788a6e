//! Lie-Poisson bivectors, brackets, Hamiltonian vector fields and linear Casimirs.

use crate::algebra::{coadjoint_apply, LieAlgebraSpec, SignConvention, StructureConstants};
use crate::error::{check_dim, Result};
use crate::linalg;
use crate::observable::{Observable, Polynomial};
use crate::scalar::{Coeff, Scalar};

/// `Λ_ij(z) = σ Σ_n c[i][j][n] z_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct PoissonBivector {
    pub alg: LieAlgebraSpec,
    pub sign: SignConvention,
}

impl PoissonBivector {
    pub fn new(alg: LieAlgebraSpec, sign: SignConvention) -> Self {
        PoissonBivector { alg, sign }
    }

    pub fn dim(&self) -> usize {
        self.alg.dim()
    }

    pub fn matrix<T: Coeff + StructureConstants>(&self, z: &[T]) -> Result<Vec<Vec<T>>> {
        check_dim(self.dim(), z.len())?;
        let n = self.dim();
        let mut m = vec![vec![T::zero(); n]; n];
        for (i, j, k, c) in T::constants(&self.alg) {
            m[*i][*j] = m[*i][*j].clone() + c.clone() * z[*k].clone();
        }
        Ok(m
            .into_iter()
            .map(|r| r.into_iter().map(|v| self.sign.apply(v)).collect())
            .collect())
    }

    /// `ż_j = σ Σ c[i][j][n] z_n g_i` for a given gradient `g`.
    pub fn field_from_gradient<T: Coeff + StructureConstants>(&self, grad: &[T], z: &[T]) -> Result<Vec<T>> {
        coadjoint_apply(&self.alg, grad, z, self.sign)
    }
}

pub fn lp_vector_field<T: Coeff + StructureConstants>(
    biv: &PoissonBivector,
    h: &Observable,
    z: &[T],
) -> Result<Vec<T>> {
    check_dim(biv.dim(), z.len())?;
    let g = h.gradient(z)?;
    biv.field_from_gradient(&g, z)
}

/// `{F,H}(z) = σ Σ c[i][j][n] z_n ∂F/∂z_i ∂H/∂z_j`.
pub fn poisson_bracket_eval<T: Coeff + StructureConstants>(
    biv: &PoissonBivector,
    f: &Observable,
    h: &Observable,
    z: &[T],
) -> Result<T> {
    check_dim(biv.dim(), z.len())?;
    let df = f.gradient(z)?;
    let dh = h.gradient(z)?;
    Ok(bracket_of_gradients(biv, &df, &dh, z))
}

pub(crate) fn bracket_of_gradients<T: Coeff + StructureConstants>(
    biv: &PoissonBivector,
    df: &[T],
    dh: &[T],
    z: &[T],
) -> T {
    let mut s = T::zero();
    for (i, j, n, c) in T::constants(&biv.alg) {
        s = s + c.clone() * z[*n].clone() * df[*i].clone() * dh[*j].clone();
    }
    biv.sign.apply(s)
}

/// `{F,H}` as a polynomial, for polynomial `F` and `H` on a space of dimension `dim`.
pub fn poisson_bracket_polynomial(biv: &PoissonBivector, f: &Polynomial, h: &Polynomial) -> Result<Polynomial> {
    let n = biv.dim();
    for p in [f, h] {
        if let Some(d) = p.dim() {
            check_dim(n, d)?;
        }
    }
    let df: Vec<Polynomial> = (0..n).map(|i| f.derivative(i)).collect();
    let dh: Vec<Polynomial> = (0..n).map(|i| h.derivative(i)).collect();
    let sigma = Scalar::from_integer(biv.sign.sigma().into());
    let mut out = Polynomial::zero();
    for (i, j, k, c) in biv.alg.entries() {
        let zk = Polynomial::coordinate(n, *k).scaled(&(c * &sigma));
        out = out.plus(&zk.mul(&df[*i]).mul(&dh[*j]));
    }
    Ok(out.simplified())
}

/// Basis of `{c : Σ_i c_i c[i][j][m] = 0 ∀ j,m}`, i.e. linear functions `c·z`
/// that Poisson-commute with everything.
pub fn linear_casimir_basis(alg: &LieAlgebraSpec) -> Vec<Vec<Scalar>> {
    let n = alg.dim();
    let mut rows = Vec::with_capacity(n * n);
    for j in 0..n {
        for m in 0..n {
            let row: Vec<Scalar> = (0..n).map(|i| alg.c(i, j, m).clone()).collect();
            if row.iter().any(|x| !num_traits::Zero::is_zero(x)) {
                rows.push(row);
            }
        }
    }
    linalg::nullspace(rows, n)
}

/// `max_samples ‖Λ(z)∇C(z)‖_∞`.
pub fn casimir_residual<T: Coeff + StructureConstants>(
    biv: &PoissonBivector,
    c: &Observable,
    samples: &[Vec<T>],
) -> Result<f64> {
    let mut worst = 0.0f64;
    for z in samples {
        let lam = biv.matrix(z)?;
        let g = c.gradient(z)?;
        for row in &lam {
            let mut s = T::zero();
            for (a, b) in row.iter().zip(&g) {
                s = s + a.clone() * b.clone();
            }
            worst = worst.max(s.abs_f64());
        }
    }
    Ok(worst)
}
