//! Finite-dimensional Lie algebras given by exact structure constants.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::scalar::{self, Coeff, Scalar};

/// Sign in front of the Lie-Poisson bracket.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SignConvention {
    Plus,
    #[default]
    Minus,
}

impl SignConvention {
    pub fn sigma(self) -> i64 {
        match self {
            SignConvention::Plus => 1,
            SignConvention::Minus => -1,
        }
    }

    pub fn apply<T: Coeff>(self, v: T) -> T {
        match self {
            SignConvention::Plus => v,
            SignConvention::Minus => -v,
        }
    }
}

impl std::str::FromStr for SignConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(SignConvention::Plus),
            "minus" | "-" => Ok(SignConvention::Minus),
            _ => Err(Error::Schema(format!("unknown sign convention {s:?}"))),
        }
    }
}

impl std::fmt::Display for SignConvention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SignConvention::Plus => "plus",
            SignConvention::Minus => "minus",
        })
    }
}

/// `[e_i, e_j] = Σ_k c[i][j][k] e_k`. Antisymmetry is structural: every stored
/// entry has its reflected partner.
#[derive(Clone, Debug)]
pub struct LieAlgebraSpec {
    dim: usize,
    labels: Vec<String>,
    dense: Vec<Scalar>,
    exact: Vec<(usize, usize, usize, Scalar)>,
    float: Vec<(usize, usize, usize, f64)>,
}

impl PartialEq for LieAlgebraSpec {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.dense == other.dense
    }
}

pub fn default_labels(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

impl LieAlgebraSpec {
    /// Builds from 1-based triples `(i, j, k, v)`. A triple given only in one
    /// order is reflected; a triple given in both orders must be antisymmetric.
    pub fn new<I>(dim: usize, labels: Option<Vec<String>>, triples: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, usize, Scalar)>,
    {
        let mut given: BTreeMap<(usize, usize, usize), Scalar> = BTreeMap::new();
        for (i, j, k, v) in triples {
            for idx in [i, j, k] {
                if idx == 0 || idx > dim {
                    return Err(Error::Shape(format!(
                        "structure constant index {idx} outside 1..={dim}"
                    )));
                }
            }
            let slot = given.entry((i, j, k)).or_insert_with(Scalar::zero);
            *slot += v;
        }
        let mut dense = vec![Scalar::zero(); dim * dim * dim];
        for (&(i, j, k), v) in &given {
            if i == j {
                if !v.is_zero() {
                    return Err(Error::AntisymmetryViolation { i, j, k });
                }
                continue;
            }
            if let Some(w) = given.get(&(j, i, k)) {
                if *w != -v.clone() {
                    let (a, b) = if i < j { (i, j) } else { (j, i) };
                    return Err(Error::AntisymmetryViolation { i: a, j: b, k });
                }
            }
            let (a, b, c) = (i - 1, j - 1, k - 1);
            dense[(a * dim + b) * dim + c] = v.clone();
            dense[(b * dim + a) * dim + c] = -v.clone();
        }
        Self::from_dense(dim, labels, dense)
    }

    /// Builds from a dense row-major `dim³` tensor (0-based); antisymmetry is checked.
    pub fn from_dense(dim: usize, labels: Option<Vec<String>>, dense: Vec<Scalar>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Shape("algebra dimension must be positive".into()));
        }
        check_dim(dim * dim * dim, dense.len())?;
        let labels = labels.unwrap_or_else(|| default_labels("e", dim));
        if labels.len() != dim {
            return Err(Error::Shape(format!(
                "{} labels given for dimension {dim}",
                labels.len()
            )));
        }
        let mut exact = Vec::new();
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let v = &dense[(i * dim + j) * dim + k];
                    let w = &dense[(j * dim + i) * dim + k];
                    if *v != -w.clone() {
                        return Err(Error::AntisymmetryViolation {
                            i: i.min(j) + 1,
                            j: i.max(j) + 1,
                            k: k + 1,
                        });
                    }
                    if !v.is_zero() {
                        exact.push((i, j, k, v.clone()));
                    }
                }
            }
        }
        let float = exact
            .iter()
            .map(|(i, j, k, v)| (*i, *j, *k, scalar::to_f64(v)))
            .collect();
        Ok(LieAlgebraSpec {
            dim,
            labels,
            dense,
            exact,
            float,
        })
    }

    pub fn abelian(dim: usize, labels: Option<Vec<String>>) -> Result<Self> {
        Self::from_dense(dim, labels, vec![Scalar::zero(); dim * dim * dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        check_dim(self.dim, labels.len())?;
        self.labels = labels;
        Ok(self)
    }

    /// Structure constant with 0-based indices.
    pub fn c(&self, i: usize, j: usize, k: usize) -> &Scalar {
        &self.dense[(i * self.dim + j) * self.dim + k]
    }

    pub fn dense(&self) -> &[Scalar] {
        &self.dense
    }

    /// All nonzero entries (both orders), 0-based.
    pub fn entries(&self) -> &[(usize, usize, usize, Scalar)] {
        &self.exact
    }

    pub fn entries_f64(&self) -> &[(usize, usize, usize, f64)] {
        &self.float
    }

    /// Nonzero entries with `i < j`, 1-based, in lexicographic order.
    pub fn upper_triples(&self) -> Vec<(usize, usize, usize, Scalar)> {
        self.exact
            .iter()
            .filter(|(i, j, _, _)| i < j)
            .map(|(i, j, k, v)| (i + 1, j + 1, k + 1, v.clone()))
            .collect()
    }

    /// Relabels the basis: old basis element `i` becomes new element `perm[i]` (0-based).
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        check_dim(self.dim, perm.len())?;
        let mut seen = vec![false; self.dim];
        for &p in perm {
            if p >= self.dim || seen[p] {
                return Err(Error::Shape("not a permutation".into()));
            }
            seen[p] = true;
        }
        let n = self.dim;
        let mut dense = vec![Scalar::zero(); n * n * n];
        for (i, j, k, v) in &self.exact {
            dense[(perm[*i] * n + perm[*j]) * n + perm[*k]] = v.clone();
        }
        let mut labels = vec![String::new(); n];
        for (old, &new) in perm.iter().enumerate() {
            labels[new] = self.labels[old].clone();
        }
        Self::from_dense(n, Some(labels), dense)
    }

    /// Direct sum `self ⊕ other` with `self` first.
    pub fn direct_sum(&self, other: &LieAlgebraSpec) -> Result<Self> {
        let n = self.dim + other.dim;
        let mut dense = vec![Scalar::zero(); n * n * n];
        for (i, j, k, v) in &self.exact {
            dense[(i * n + j) * n + k] = v.clone();
        }
        let o = self.dim;
        for (i, j, k, v) in &other.exact {
            dense[((i + o) * n + j + o) * n + k + o] = v.clone();
        }
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        Self::from_dense(n, Some(labels), dense)
    }

    /// Whether the restriction to `indices` (0-based) closes under the bracket;
    /// returns the first offending pair otherwise.
    pub fn closure_witness(&self, indices: &[usize]) -> Option<(usize, usize)> {
        let inside: Vec<bool> = (0..self.dim).map(|i| indices.contains(&i)).collect();
        let mut worst: Option<(usize, usize)> = None;
        for (i, j, k, _) in &self.exact {
            if inside[*i] && inside[*j] && !inside[*k] && i < j {
                let cand = (*i, *j);
                if worst.is_none_or(|w| cand < w) {
                    worst = Some(cand);
                }
            }
        }
        worst
    }
}

/// Max over (i,j,k,m) of |Σ_n c[i][j][n]c[n][k][m] + c[j][k][n]c[n][i][m] + c[k][i][n]c[n][j][m]|.
pub fn jacobi_residual(alg: &LieAlgebraSpec) -> Result<Scalar> {
    Ok(jacobi_report(alg)?.0)
}

/// Residual plus the lexicographically smallest 1-based tuple `(i,j,k,m)` where it is nonzero.
pub fn jacobi_report(alg: &LieAlgebraSpec) -> Result<(Scalar, Option<[usize; 4]>)> {
    let n = alg.dim();
    for (i, j, k, v) in alg.entries() {
        if *alg.c(*j, *i, *k) != -v.clone() {
            return Err(Error::AntisymmetryViolation {
                i: i + 1,
                j: j + 1,
                k: k + 1,
            });
        }
    }
    // t[i][j][k][m] = Σ_n c[i][j][n] c[n][k][m]
    let mut t = vec![Scalar::zero(); n * n * n * n];
    let mut by_first: Vec<Vec<(usize, usize, &Scalar)>> = vec![Vec::new(); n];
    for (a, b, c, v) in alg.entries() {
        by_first[*a].push((*b, *c, v));
    }
    for (i, j, q, a) in alg.entries() {
        for (k, m, b) in &by_first[*q] {
            t[((i * n + j) * n + k) * n + m] += a * *b;
        }
    }
    let at = |i: usize, j: usize, k: usize, m: usize| &t[((i * n + j) * n + k) * n + m];
    let mut worst = Scalar::zero();
    let mut witness = None;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for m in 0..n {
                    let s = at(i, j, k, m) + at(j, k, i, m) + at(k, i, j, m);
                    if s.is_zero() {
                        continue;
                    }
                    if witness.is_none() {
                        witness = Some([i + 1, j + 1, k + 1, m + 1]);
                    }
                    let a = s.abs();
                    if a > worst {
                        worst = a;
                    }
                }
            }
        }
    }
    Ok((worst, witness))
}

/// `([x,y])_k = Σ_{i,j} c[i][j][k] x_i y_j`.
pub fn bracket_eval<T: Coeff + StructureConstants>(
    alg: &LieAlgebraSpec,
    x: &[T],
    y: &[T],
) -> Result<Vec<T>> {
    check_dim(alg.dim(), x.len())?;
    check_dim(alg.dim(), y.len())?;
    let mut out = vec![T::zero(); alg.dim()];
    for (i, j, k, c) in T::constants(alg) {
        out[*k] = out[*k].clone() + c.clone() * x[*i].clone() * y[*j].clone();
    }
    Ok(out)
}

/// `w_j = σ Σ_{i,n} c[i][j][n] μ_n ξ_i`.
pub fn coadjoint_apply<T: Coeff + StructureConstants>(
    alg: &LieAlgebraSpec,
    xi: &[T],
    mu: &[T],
    sign: SignConvention,
) -> Result<Vec<T>> {
    check_dim(alg.dim(), xi.len())?;
    check_dim(alg.dim(), mu.len())?;
    let mut out = vec![T::zero(); alg.dim()];
    for (i, j, n, c) in T::constants(alg) {
        out[*j] = out[*j].clone() + c.clone() * mu[*n].clone() * xi[*i].clone();
    }
    Ok(out.into_iter().map(|v| sign.apply(v)).collect())
}

/// `G[i][j] = Σ_{m,n} c[i][m][n] c[j][n][m]`.
pub fn cartan_killing_metric(alg: &LieAlgebraSpec) -> Vec<Vec<Scalar>> {
    let n = alg.dim();
    let mut g = vec![vec![Scalar::zero(); n]; n];
    for (i, m, k, a) in alg.entries() {
        for j in 0..n {
            let b = alg.c(j, *k, *m);
            if !b.is_zero() {
                g[*i][j] += a * b;
            }
        }
    }
    g
}

/// Gives generic code access to the cached constants in the matching numeric type.
pub trait StructureConstants: Sized {
    fn constants(alg: &LieAlgebraSpec) -> &[(usize, usize, usize, Self)];
}

impl StructureConstants for f64 {
    fn constants(alg: &LieAlgebraSpec) -> &[(usize, usize, usize, f64)] {
        alg.entries_f64()
    }
}

impl StructureConstants for Scalar {
    fn constants(alg: &LieAlgebraSpec) -> &[(usize, usize, usize, Scalar)] {
        alg.entries()
    }
}
