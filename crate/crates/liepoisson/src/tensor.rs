//! Dense rank-3 rational tensors with 1-based triple import/export.

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor3 {
    shape: [usize; 3],
    data: Vec<Scalar>,
}

impl Tensor3 {
    pub fn zeros(shape: [usize; 3]) -> Self {
        Tensor3 {
            shape,
            data: vec![Scalar::zero(); shape[0] * shape[1] * shape[2]],
        }
    }

    /// Entries from 1-based triples; repeated triples accumulate.
    pub fn from_triples<I>(shape: [usize; 3], name: &str, triples: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, usize, Scalar)>,
    {
        let mut t = Self::zeros(shape);
        for (i, j, k, v) in triples {
            t.check_range(name, i, j, k)?;
            let slot = t.slot(i - 1, j - 1, k - 1);
            t.data[slot] += v;
        }
        Ok(t)
    }

    /// Alternating in the first two slots: a triple `(a,b,x)` also sets
    /// `(b,a,x)` to its negative unless that partner is given explicitly.
    pub fn alternating_from_triples<I>(shape: [usize; 3], name: &str, triples: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, usize, Scalar)>,
    {
        let triples: Vec<_> = triples.into_iter().collect();
        let explicit: BTreeSet<(usize, usize, usize)> =
            triples.iter().map(|(i, j, k, _)| (*i, *j, *k)).collect();
        let mut t = Self::zeros(shape);
        for (i, j, k, v) in triples {
            t.check_range(name, i, j, k)?;
            let slot = t.slot(i - 1, j - 1, k - 1);
            t.data[slot] += v.clone();
            if i != j && !explicit.contains(&(j, i, k)) {
                t.check_range(name, j, i, k)?;
                let slot = t.slot(j - 1, i - 1, k - 1);
                t.data[slot] -= v;
            }
        }
        Ok(t)
    }

    fn check_range(&self, name: &str, i: usize, j: usize, k: usize) -> Result<()> {
        for (idx, bound) in [(i, self.shape[0]), (j, self.shape[1]), (k, self.shape[2])] {
            if idx == 0 || idx > bound {
                return Err(Error::Shape(format!(
                    "{name}: index {idx} outside 1..={bound} (triple {i},{j},{k})"
                )));
            }
        }
        Ok(())
    }

    fn slot(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.shape[1] + j) * self.shape[2] + k
    }

    pub fn shape(&self) -> [usize; 3] {
        self.shape
    }

    /// 0-based access.
    pub fn get(&self, i: usize, j: usize, k: usize) -> &Scalar {
        &self.data[self.slot(i, j, k)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: Scalar) {
        let s = self.slot(i, j, k);
        self.data[s] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, k: usize, v: &Scalar) {
        let s = self.slot(i, j, k);
        self.data[s] += v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Nonzero entries as 1-based triples in lexicographic order.
    pub fn triples(&self) -> Vec<(usize, usize, usize, Scalar)> {
        let mut out = Vec::new();
        for i in 0..self.shape[0] {
            for j in 0..self.shape[1] {
                for k in 0..self.shape[2] {
                    let v = self.get(i, j, k);
                    if !v.is_zero() {
                        out.push((i + 1, j + 1, k + 1, v.clone()));
                    }
                }
            }
        }
        out
    }

    /// Contracts the first two slots with `x` and `y`: `Σ_{i,j} t[i][j][k] x_i y_j`.
    pub fn contract12(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); self.shape[2]];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let w = xi * yj;
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.get(i, j, k);
                    if !c.is_zero() {
                        *o += c * &w;
                    }
                }
            }
        }
        out
    }
}
