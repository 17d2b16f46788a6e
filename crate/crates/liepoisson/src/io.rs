//! JSON forms of algebras, extended structures and coupling data.
//! All tensor indices are 1-based triples `{"i","j","k","v"}`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::{default_labels, LieAlgebraSpec};
use crate::error::Result;
use crate::extensions::{ActionTensors, CocycleCouplingSpec, ExtendedStructureSpec};
use crate::scalar::{self, Scalar};
use crate::tensor::Tensor3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleJson {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    #[serde(with = "scalar::serde_scalar")]
    pub v: Scalar,
}

type Triples = Vec<TripleJson>;

fn raw(t: Triples) -> impl Iterator<Item = (usize, usize, usize, Scalar)> {
    t.into_iter().map(|x| (x.i, x.j, x.k, x.v))
}

fn to_triples(t: Vec<(usize, usize, usize, Scalar)>) -> Triples {
    t.into_iter().map(|(i, j, k, v)| TripleJson { i, j, k, v }).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraJson {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default)]
    pub c: Triples,
}

impl AlgebraJson {
    pub fn build(self) -> Result<LieAlgebraSpec> {
        LieAlgebraSpec::new(self.dim, self.labels, raw(self.c))
    }

    /// Upper triples only (`i < j`); the reader reflects them.
    pub fn from_spec(alg: &LieAlgebraSpec) -> Self {
        AlgebraJson {
            dim: alg.dim(),
            labels: Some(alg.labels().to_vec()),
            c: to_triples(alg.upper_triples()),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionJson {
    pub g: AlgebraJson,
    #[serde(rename = "dimH")]
    pub dim_h: usize,
    #[serde(rename = "hLabels", default)]
    pub h_labels: Option<Vec<String>>,
    #[serde(default)]
    pub phi: Triples,
    #[serde(default)]
    pub kappa: Triples,
    #[serde(rename = "L", default)]
    pub l: Triples,
    #[serde(rename = "R", default)]
    pub r: Triples,
}

impl ExtensionJson {
    /// `phi` and `kappa` are alternating: a triple given in one order only is reflected.
    pub fn build(self) -> Result<ExtendedStructureSpec> {
        let g = self.g.build()?;
        let (n, m) = (g.dim(), self.dim_h);
        let phi = Tensor3::alternating_from_triples([m, m, n], "phi", raw(self.phi))?;
        let kappa = Tensor3::alternating_from_triples([m, m, m], "kappa", raw(self.kappa))?;
        let actions = ActionTensors::from_triples(n, m, raw(self.l), raw(self.r))?;
        ExtendedStructureSpec::new(g, m, self.h_labels, phi, kappa, actions)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct CouplingJson {
    pub l: AlgebraJson,
    pub k: AlgebraJson,
    pub dim_v: usize,
    pub dim_w: usize,
    #[serde(default)]
    pub v_labels: Option<Vec<String>>,
    #[serde(default)]
    pub w_labels: Option<Vec<String>>,
    #[serde(default)]
    pub varphi: Triples,
    #[serde(default)]
    pub phi2: Triples,
    #[serde(default)]
    pub act_l: Triples,
    #[serde(default)]
    pub act_k: Triples,
    #[serde(default)]
    pub black_r: Triples,
    #[serde(default)]
    pub black_l: Triples,
    #[serde(default)]
    pub curv_r: Triples,
    #[serde(default)]
    pub curv_l: Triples,
    #[serde(default)]
    pub eps: Triples,
    #[serde(default)]
    pub iota: Triples,
}

impl CouplingJson {
    pub fn build(self) -> Result<CocycleCouplingSpec> {
        let l = self.l.build()?;
        let k = self.k.build()?;
        let (dl, dk, dv, dw) = (l.dim(), k.dim(), self.dim_v, self.dim_w);
        let spec = CocycleCouplingSpec {
            varphi: Tensor3::alternating_from_triples([dl, dl, dv], "varphi", raw(self.varphi))?,
            phi2: Tensor3::alternating_from_triples([dk, dk, dw], "phi2", raw(self.phi2))?,
            act_l: Tensor3::from_triples([dl, dv, dv], "actL", raw(self.act_l))?,
            act_k: Tensor3::from_triples([dk, dw, dw], "actK", raw(self.act_k))?,
            black_r: Tensor3::from_triples([dk, dl, dl], "blackR", raw(self.black_r))?,
            black_l: Tensor3::from_triples([dk, dl, dk], "blackL", raw(self.black_l))?,
            curv_r: Tensor3::from_triples([dk, dv, dv], "curvR", raw(self.curv_r))?,
            curv_l: Tensor3::from_triples([dw, dl, dw], "curvL", raw(self.curv_l))?,
            eps: Tensor3::from_triples([dk, dl, dv], "eps", raw(self.eps))?,
            iota: Tensor3::from_triples([dk, dl, dw], "iota", raw(self.iota))?,
            v_labels: self.v_labels.unwrap_or_else(|| default_labels("v", dv)),
            w_labels: self.w_labels.unwrap_or_else(|| default_labels("w", dw)),
            l,
            k,
            dim_v: dv,
            dim_w: dw,
        };
        spec.check_shapes()?;
        Ok(spec)
    }
}

pub fn algebra_from_value(v: Value) -> Result<LieAlgebraSpec> {
    serde_json::from_value::<AlgebraJson>(v)?.build()
}

pub fn extension_from_value(v: Value) -> Result<ExtendedStructureSpec> {
    serde_json::from_value::<ExtensionJson>(v)?.build()
}

pub fn coupling_from_value(v: Value) -> Result<CocycleCouplingSpec> {
    serde_json::from_value::<CouplingJson>(v)?.build()
}
