//! Scalar functions on the dual space together with their gradients.

use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::scalar::{self, int, Coeff, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Monomial {
    #[serde(with = "scalar::serde_scalar")]
    pub coeff: Scalar,
    pub powers: Vec<u32>,
}

/// Polynomial with exact rational coefficients; evaluates and differentiates
/// exactly in any [`Coeff`] type.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Polynomial {
    pub monomials: Vec<Monomial>,
}

fn pow<T: Coeff>(x: &T, p: u32) -> T {
    let mut out = T::one();
    for _ in 0..p {
        out = out * x.clone();
    }
    out
}

impl Polynomial {
    pub fn new(monomials: Vec<Monomial>) -> Result<Self> {
        let p = Polynomial { monomials };
        p.dim_checked()?;
        Ok(p)
    }

    pub fn zero() -> Self {
        Polynomial { monomials: Vec::new() }
    }

    /// `c · z_i` (0-based `i`).
    pub fn coordinate(dim: usize, i: usize) -> Self {
        Self::linear(&(0..dim).map(|j| int((j == i) as i64)).collect::<Vec<_>>())
    }

    pub fn linear(coeffs: &[Scalar]) -> Self {
        let dim = coeffs.len();
        let monomials = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                let mut powers = vec![0; dim];
                powers[i] = 1;
                Monomial { coeff: c.clone(), powers }
            })
            .collect();
        Polynomial { monomials }
    }

    /// `½ Σ w_i z_i²`.
    pub fn diagonal_quadratic(weights: &[Scalar]) -> Self {
        let dim = weights.len();
        let half = scalar::ratio(1, 2);
        let monomials = weights
            .iter()
            .enumerate()
            .filter(|(_, w)| !w.is_zero())
            .map(|(i, w)| {
                let mut powers = vec![0; dim];
                powers[i] = 2;
                Monomial { coeff: w * &half, powers }
            })
            .collect();
        Polynomial { monomials }
    }

    /// `½ Σ_{i∈idx} z_i²` for a subset of coordinates.
    pub fn half_norm_sq(dim: usize, idx: &[usize]) -> Self {
        let w: Vec<Scalar> = (0..dim).map(|i| int(idx.contains(&i) as i64)).collect();
        Self::diagonal_quadratic(&w)
    }

    /// `½ zᵀ Q z` for a symmetric rational matrix.
    pub fn quadratic_form(q: &[Vec<Scalar>]) -> Self {
        let dim = q.len();
        let mut monomials = Vec::new();
        for i in 0..dim {
            for j in i..dim {
                let c = if i == j {
                    &q[i][i] * scalar::ratio(1, 2)
                } else {
                    (&q[i][j] + &q[j][i]) * scalar::ratio(1, 2)
                };
                if c.is_zero() {
                    continue;
                }
                let mut powers = vec![0; dim];
                powers[i] += 1;
                powers[j] += 1;
                monomials.push(Monomial { coeff: c, powers });
            }
        }
        Polynomial { monomials }
    }

    pub fn plus(mut self, other: &Polynomial) -> Self {
        self.monomials.extend(other.monomials.iter().cloned());
        self
    }

    pub fn scaled(mut self, s: &Scalar) -> Self {
        for m in &mut self.monomials {
            m.coeff *= s;
        }
        self
    }

    /// Product, with like terms merged.
    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut monomials = Vec::new();
        for a in &self.monomials {
            for b in &other.monomials {
                monomials.push(Monomial {
                    coeff: &a.coeff * &b.coeff,
                    powers: a.powers.iter().zip(&b.powers).map(|(p, q)| p + q).collect(),
                });
            }
        }
        Polynomial { monomials }.simplified()
    }

    /// `∂/∂z_i` (0-based).
    pub fn derivative(&self, i: usize) -> Polynomial {
        let monomials = self
            .monomials
            .iter()
            .filter(|m| m.powers.get(i).is_some_and(|p| *p > 0))
            .map(|m| {
                let mut powers = m.powers.clone();
                powers[i] -= 1;
                Monomial { coeff: &m.coeff * int(m.powers[i] as i64), powers }
            })
            .collect();
        Polynomial { monomials }.simplified()
    }

    /// Merges like terms, drops zeros and sorts monomials by exponent vector.
    pub fn simplified(&self) -> Polynomial {
        let mut acc: std::collections::BTreeMap<Vec<u32>, Scalar> = Default::default();
        for m in &self.monomials {
            *acc.entry(m.powers.clone()).or_insert_with(Scalar::zero) += &m.coeff;
        }
        Polynomial {
            monomials: acc
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(powers, coeff)| Monomial { coeff, powers })
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.simplified().monomials.is_empty()
    }

    /// Number of variables, `None` for the empty (zero) polynomial.
    pub fn dim(&self) -> Option<usize> {
        self.monomials.first().map(|m| m.powers.len())
    }

    fn dim_checked(&self) -> Result<Option<usize>> {
        let d = self.dim();
        if let Some(d) = d {
            for m in &self.monomials {
                if m.powers.len() != d {
                    return Err(Error::Schema(format!(
                        "monomial powers have inconsistent lengths {} and {}",
                        d,
                        m.powers.len()
                    )));
                }
            }
        }
        Ok(d)
    }

    pub fn eval<T: Coeff>(&self, z: &[T]) -> Result<T> {
        self.check(z.len())?;
        let mut out = T::zero();
        for m in &self.monomials {
            let mut t = T::from_scalar(&m.coeff);
            for (x, &p) in z.iter().zip(&m.powers) {
                if p > 0 {
                    t = t * pow(x, p);
                }
            }
            out = out + t;
        }
        Ok(out)
    }

    pub fn gradient<T: Coeff>(&self, z: &[T]) -> Result<Vec<T>> {
        self.check(z.len())?;
        let mut g = vec![T::zero(); z.len()];
        for m in &self.monomials {
            for (i, gi) in g.iter_mut().enumerate() {
                let pi = m.powers[i];
                if pi == 0 {
                    continue;
                }
                let mut t = T::from_scalar(&(&m.coeff * int(pi as i64)));
                for (j, (x, &p)) in z.iter().zip(&m.powers).enumerate() {
                    let p = if j == i { p - 1 } else { p };
                    if p > 0 {
                        t = t * pow(x, p);
                    }
                }
                *gi = gi.clone() + t;
            }
        }
        Ok(g)
    }

    fn check(&self, n: usize) -> Result<()> {
        match self.dim() {
            Some(d) => check_dim(d, n),
            None => Ok(()),
        }
    }
}

type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Floating-point observable given by closures.
#[derive(Clone)]
pub struct FnObservable {
    pub dim: usize,
    f: ScalarFn,
    grad: Option<GradFn>,
}

impl fmt::Debug for FnObservable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnObservable")
            .field("dim", &self.dim)
            .field("analytic_gradient", &self.grad.is_some())
            .finish()
    }
}

#[derive(Clone, Debug)]
pub enum Observable {
    Polynomial(Polynomial),
    Function(FnObservable),
}

impl From<Polynomial> for Observable {
    fn from(p: Polynomial) -> Self {
        Observable::Polynomial(p)
    }
}

/// Central differences with step `cbrt(eps)·max(1,|z_i|)`.
pub fn finite_difference_gradient(f: &dyn Fn(&[f64]) -> f64, z: &[f64]) -> Vec<f64> {
    let base = f64::EPSILON.cbrt();
    let mut w = z.to_vec();
    (0..z.len())
        .map(|i| {
            let h = base * z[i].abs().max(1.0);
            w[i] = z[i] + h;
            let up = f(&w);
            w[i] = z[i] - h;
            let down = f(&w);
            w[i] = z[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

impl Observable {
    pub fn function<F>(dim: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Observable::Function(FnObservable { dim, f: Arc::new(f), grad: None })
    }

    pub fn function_with_gradient<F, G>(dim: usize, f: F, grad: G) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Observable::Function(FnObservable {
            dim,
            f: Arc::new(f),
            grad: Some(Arc::new(grad)),
        })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let p: Polynomial = serde_json::from_str(s)?;
        p.dim_checked()?;
        Ok(Observable::Polynomial(p))
    }

    pub fn from_value(v: serde_json::Value) -> Result<Self> {
        let p: Polynomial = serde_json::from_value(v)?;
        p.dim_checked()?;
        Ok(Observable::Polynomial(p))
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            Observable::Polynomial(p) => p.dim(),
            Observable::Function(f) => Some(f.dim),
        }
    }

    pub fn as_polynomial(&self) -> Option<&Polynomial> {
        match self {
            Observable::Polynomial(p) => Some(p),
            Observable::Function(_) => None,
        }
    }

    pub fn eval<T: Coeff>(&self, z: &[T]) -> Result<T> {
        match self {
            Observable::Polynomial(p) => p.eval(z),
            Observable::Function(o) => {
                check_dim(o.dim, z.len())?;
                let x = T::to_f64_slice(z).ok_or(Error::GradientUnavailable)?;
                let v = T::from_f64_vec(vec![(o.f)(&x)]).ok_or(Error::GradientUnavailable)?;
                Ok(v.into_iter().next().unwrap_or_else(T::zero))
            }
        }
    }

    /// Exact for polynomials; closures use their analytic gradient when given
    /// and central differences otherwise, and are unavailable in exact types.
    pub fn gradient<T: Coeff>(&self, z: &[T]) -> Result<Vec<T>> {
        match self {
            Observable::Polynomial(p) => p.gradient(z),
            Observable::Function(o) => {
                check_dim(o.dim, z.len())?;
                let x = T::to_f64_slice(z).ok_or(Error::GradientUnavailable)?;
                let g = match &o.grad {
                    Some(g) => {
                        let g = g(&x);
                        check_dim(o.dim, g.len())?;
                        g
                    }
                    None => finite_difference_gradient(&*o.f, &x),
                };
                T::from_f64_vec(g).ok_or(Error::GradientUnavailable)
            }
        }
    }

    /// Central-difference gradient regardless of the available analytic form.
    pub fn gradient_fd(&self, z: &[f64]) -> Result<Vec<f64>> {
        if let Some(d) = self.dim() {
            check_dim(d, z.len())?;
        }
        Ok(finite_difference_gradient(
            &|x: &[f64]| self.eval::<f64>(x).unwrap_or(f64::NAN),
            z,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    #[test]
    fn polynomial_json_and_exact_gradient() {
        let o = Observable::from_json(
            r#"{"monomials":[{"coeff":"1/2","powers":[2,0,0]},{"coeff":"3","powers":[1,1,0]}]}"#,
        )
        .unwrap();
        let z = [int(2), int(5), int(7)];
        assert_eq!(o.eval(&z).unwrap(), int(2 + 30));
        assert_eq!(o.gradient(&z).unwrap(), vec![int(2 + 15), int(6), int(0)]);
    }

    #[test]
    fn inconsistent_powers_rejected() {
        let r = Observable::from_json(
            r#"{"monomials":[{"coeff":"1","powers":[1,0]},{"coeff":"1","powers":[1]}]}"#,
        );
        assert!(matches!(r, Err(Error::Schema(_))));
    }

    #[test]
    fn closures_refuse_exact_gradients() {
        let o = Observable::function(2, |z| z[0] * z[1]);
        assert!(matches!(o.gradient::<Scalar>(&[int(1), int(2)]), Err(Error::GradientUnavailable)));
        let g = o.gradient::<f64>(&[3.0, 4.0]).unwrap();
        assert!((g[0] - 4.0).abs() < 1e-8 && (g[1] - 3.0).abs() < 1e-8);
    }

    #[test]
    fn quadratic_form_matches_matrix() {
        let q = vec![vec![int(2), int(1)], vec![int(1), int(4)]];
        let p = Polynomial::quadratic_form(&q);
        // ½(2x² + 2xy + 4y²) at (1,1)
        assert_eq!(p.eval(&[int(1), int(1)]).unwrap(), int(4));
        assert_eq!(p.gradient(&[int(1), int(0)]).unwrap(), vec![int(2), int(1)]);
        let h = Polynomial::diagonal_quadratic(&[int(1), ratio(1, 2)]);
        assert_eq!(h.eval(&[int(2), int(2)]).unwrap(), int(3));
    }
}
