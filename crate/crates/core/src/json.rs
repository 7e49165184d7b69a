//! Wire formats.
//!
//! Schemas (field names are part of the interface):
//! - algebra: `{"block_dims": [..], "trace_weights": [..]}`
//! - element: algebra fields plus `"blocks"`: per block a row-major flat
//!   list of `[re, im]` pairs
//! - complex matrix: rows of `[re, im]` pairs
//! - form / superoperator: `{"basis": "canonical-v1", "matrix": ..}`
//! - derivation: `{"kind": "inner", "z": element}` or
//!   `{"kind": "explicit", "matrix": ..}`
//! - coefficient matrix: `{"size": n, "components": [n×n real, per block]}`
//! - verdict: `{"status", "margin", "witness"?, "samples", "seed", "method"}`
//! - instance: `{label, seed, family?, provenance?, algebra,
//!   derivations? | z_list?, C? | A?, form, generator}`

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::algebra::{Algebra, AlgebraRef, Element};
use crate::constructions::CoefficientMatrix;
use crate::derivations::{Derivation, DerivationKind};
use crate::error::{Error, Result};
use crate::forms::Form;
use crate::instance::{Family, Instance};
use crate::semigroups::SuperOperator;
use crate::verdict::{Status, Verdict, Witness};
use crate::C64;

/// Basis tag for coordinate matrices: weighted matrix units ordered by
/// block, then row-major.
pub const BASIS_TAG: &str = "canonical-v1";

pub type ComplexMatrixJson = Vec<Vec<[f64; 2]>>;

fn matrix_to_json(m: &DMatrix<C64>) -> ComplexMatrixJson {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn matrix_from_json(rows: &ComplexMatrixJson) -> Result<DMatrix<C64>> {
    let nr = rows.len();
    let nc = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != nc) {
        return Err(Error::Serialization("ragged matrix rows".into()));
    }
    Ok(DMatrix::from_fn(nr, nc, |i, j| {
        C64::new(rows[i][j][0], rows[i][j][1])
    }))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub block_dims: Vec<usize>,
    pub trace_weights: Vec<f64>,
}

impl From<&Algebra> for AlgebraJson {
    fn from(a: &Algebra) -> Self {
        AlgebraJson {
            block_dims: a.block_dims().to_vec(),
            trace_weights: a.trace_weights().to_vec(),
        }
    }
}

impl AlgebraJson {
    pub fn to_algebra(&self) -> Result<AlgebraRef> {
        Algebra::shared(self.block_dims.clone(), self.trace_weights.clone())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ElementJson {
    pub block_dims: Vec<usize>,
    pub trace_weights: Vec<f64>,
    /// Row-major complex entries per block.
    pub blocks: Vec<Vec<[f64; 2]>>,
}

impl From<&Element> for ElementJson {
    fn from(e: &Element) -> Self {
        ElementJson {
            block_dims: e.algebra().block_dims().to_vec(),
            trace_weights: e.algebra().trace_weights().to_vec(),
            blocks: e
                .blocks()
                .iter()
                .map(|b| {
                    let n = b.nrows();
                    (0..n * n)
                        .map(|flat| {
                            let v = b[(flat / n, flat % n)];
                            [v.re, v.im]
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

impl ElementJson {
    pub fn to_element(&self) -> Result<Element> {
        let alg = Algebra::shared(self.block_dims.clone(), self.trace_weights.clone())?;
        if self.blocks.len() != alg.num_blocks() {
            return Err(Error::Serialization("wrong number of blocks".into()));
        }
        let blocks = self
            .blocks
            .iter()
            .zip(alg.block_dims())
            .map(|(flat, &n)| {
                if flat.len() != n * n {
                    return Err(Error::Serialization(format!(
                        "block has {} entries, expected {}",
                        flat.len(),
                        n * n
                    )));
                }
                Ok(DMatrix::from_fn(n, n, |i, j| {
                    C64::new(flat[i * n + j][0], flat[i * n + j][1])
                }))
            })
            .collect::<Result<Vec<_>>>()?;
        Element::from_blocks(alg, blocks)
    }

    /// Deserialize against an existing algebra (shapes must agree).
    pub fn to_element_in(&self, alg: &AlgebraRef) -> Result<Element> {
        let e = self.to_element()?;
        if e.algebra().as_ref() != alg.as_ref() {
            return Err(Error::Serialization(
                "element algebra differs from the enclosing instance".into(),
            ));
        }
        Element::from_blocks(alg.clone(), e.blocks().to_vec())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FormJson {
    pub basis: String,
    pub matrix: ComplexMatrixJson,
}

impl From<&Form> for FormJson {
    fn from(f: &Form) -> Self {
        FormJson {
            basis: BASIS_TAG.into(),
            matrix: matrix_to_json(f.matrix()),
        }
    }
}

impl FormJson {
    pub fn to_form(&self, alg: &AlgebraRef) -> Result<Form> {
        if self.basis != BASIS_TAG {
            return Err(Error::Serialization(format!("unknown basis tag '{}'", self.basis)));
        }
        Form::from_matrix(alg.clone(), matrix_from_json(&self.matrix)?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuperOperatorJson {
    pub basis: String,
    pub matrix: ComplexMatrixJson,
}

impl From<&SuperOperator> for SuperOperatorJson {
    fn from(t: &SuperOperator) -> Self {
        SuperOperatorJson {
            basis: BASIS_TAG.into(),
            matrix: matrix_to_json(t.matrix()),
        }
    }
}

impl SuperOperatorJson {
    pub fn to_superop(&self, alg: &AlgebraRef) -> Result<SuperOperator> {
        if self.basis != BASIS_TAG {
            return Err(Error::Serialization(format!("unknown basis tag '{}'", self.basis)));
        }
        SuperOperator::from_matrix(alg.clone(), matrix_from_json(&self.matrix)?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DerivationJson {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<ElementJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<ComplexMatrixJson>,
}

impl From<&Derivation> for DerivationJson {
    fn from(d: &Derivation) -> Self {
        match d.kind() {
            DerivationKind::Inner { z } => DerivationJson {
                kind: "inner".into(),
                z: Some(ElementJson::from(z)),
                matrix: None,
            },
            DerivationKind::Explicit => DerivationJson {
                kind: "explicit".into(),
                z: None,
                matrix: Some(matrix_to_json(d.matrix())),
            },
        }
    }
}

impl DerivationJson {
    pub fn to_derivation(&self, alg: &AlgebraRef) -> Result<Derivation> {
        match self.kind.as_str() {
            "inner" => {
                let z = self
                    .z
                    .as_ref()
                    .ok_or_else(|| Error::Serialization("inner derivation without z".into()))?
                    .to_element_in(alg)?;
                Derivation::inner(z)
            }
            "explicit" => {
                let m = self
                    .matrix
                    .as_ref()
                    .ok_or_else(|| Error::Serialization("explicit derivation without matrix".into()))?;
                Derivation::explicit(alg.clone(), matrix_from_json(m)?)
            }
            other => Err(Error::Serialization(format!("unknown derivation kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoefficientMatrixJson {
    pub size: usize,
    /// Real `size × size` matrix per central component, row-major rows.
    pub components: Vec<Vec<Vec<f64>>>,
}

impl From<&CoefficientMatrix> for CoefficientMatrixJson {
    fn from(c: &CoefficientMatrix) -> Self {
        CoefficientMatrixJson {
            size: c.size(),
            components: c
                .components()
                .iter()
                .map(|m| {
                    (0..m.nrows())
                        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
                        .collect()
                })
                .collect(),
        }
    }
}

impl CoefficientMatrixJson {
    pub fn to_coefficients(&self, alg: &AlgebraRef) -> Result<CoefficientMatrix> {
        let comps = self
            .components
            .iter()
            .map(|rows| {
                if rows.len() != self.size || rows.iter().any(|r| r.len() != self.size) {
                    return Err(Error::Serialization("coefficient component shape".into()));
                }
                Ok(DMatrix::from_fn(self.size, self.size, |i, j| rows[i][j]))
            })
            .collect::<Result<Vec<_>>>()?;
        CoefficientMatrix::new(alg.clone(), comps)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessJson {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub element: Option<ElementJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_block: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vector: Option<Vec<[f64; 2]>>,
}

impl From<&Witness> for WitnessJson {
    fn from(w: &Witness) -> Self {
        match w {
            Witness::Element(e) => WitnessJson {
                kind: "element".into(),
                element: Some(ElementJson::from(e)),
                block: None,
                out_block: None,
                vector: None,
            },
            Witness::Vector { block, v } => WitnessJson {
                kind: "rank-one".into(),
                element: None,
                block: Some(*block),
                out_block: None,
                vector: Some(v.iter().map(|z| [z.re, z.im]).collect()),
            },
            Witness::ChoiVector { in_block, out_block, v } => WitnessJson {
                kind: "choi-vector".into(),
                element: None,
                block: Some(*in_block),
                out_block: Some(*out_block),
                vector: Some(v.iter().map(|z| [z.re, z.im]).collect()),
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerdictJson {
    pub status: String,
    pub margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessJson>,
    pub samples: usize,
    pub seed: u64,
    pub method: String,
}

impl From<&Verdict> for VerdictJson {
    fn from(v: &Verdict) -> Self {
        VerdictJson {
            status: match v.status {
                Status::Pass => "PASS",
                Status::SampledPass => "SAMPLED-PASS",
                Status::Fail => "FAIL",
            }
            .into(),
            margin: v.margin,
            witness: v.witness.as_ref().map(WitnessJson::from),
            samples: v.samples,
            seed: v.seed,
            method: v.method.clone(),
        }
    }
}

/// Provenance header written by the generator command.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProvenanceJson {
    pub tool: String,
    pub version: String,
    pub family: String,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceJson {
    pub label: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub provenance: Option<ProvenanceJson>,
    pub algebra: AlgebraJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub derivations: Option<Vec<DerivationJson>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_list: Option<Vec<ElementJson>>,
    #[serde(rename = "C", skip_serializing_if = "Option::is_none")]
    pub coeff_antisym: Option<CoefficientMatrixJson>,
    #[serde(rename = "A", skip_serializing_if = "Option::is_none")]
    pub coeff_full: Option<CoefficientMatrixJson>,
    pub form: FormJson,
    pub generator: SuperOperatorJson,
}

impl From<&Instance> for InstanceJson {
    fn from(inst: &Instance) -> Self {
        InstanceJson {
            label: inst.label.clone(),
            seed: inst.seed,
            family: Some(inst.family.token().into()),
            provenance: Some(ProvenanceJson {
                tool: "ncd".into(),
                version: env!("CARGO_PKG_VERSION").into(),
                family: inst.family.token().into(),
                seed: inst.seed,
            }),
            algebra: AlgebraJson::from(inst.algebra.as_ref()),
            derivations: inst
                .derivations
                .as_ref()
                .map(|ds| ds.iter().map(DerivationJson::from).collect()),
            z_list: inst
                .z_list
                .as_ref()
                .map(|zs| zs.iter().map(ElementJson::from).collect()),
            coeff_antisym: inst.coeff_antisym.as_ref().map(CoefficientMatrixJson::from),
            coeff_full: inst.coeff_full.as_ref().map(CoefficientMatrixJson::from),
            form: FormJson::from(&inst.form),
            generator: SuperOperatorJson::from(&inst.generator),
        }
    }
}

/// A loaded instance: algebra, form and generator are always present;
/// construction data is carried through when the file has it.
pub struct LoadedInstance {
    pub label: String,
    pub seed: u64,
    pub family: Option<Family>,
    pub algebra: AlgebraRef,
    pub derivations: Option<Vec<Derivation>>,
    pub z_list: Option<Vec<Element>>,
    pub coeff_antisym: Option<CoefficientMatrix>,
    pub coeff_full: Option<CoefficientMatrix>,
    pub form: Form,
    pub generator: SuperOperator,
}

impl InstanceJson {
    pub fn load(&self) -> Result<LoadedInstance> {
        let alg = self.algebra.to_algebra()?;
        let form = self.form.to_form(&alg)?;
        let generator = self.generator.to_superop(&alg)?;
        let derivations = self
            .derivations
            .as_ref()
            .map(|ds| ds.iter().map(|d| d.to_derivation(&alg)).collect::<Result<Vec<_>>>())
            .transpose()?;
        let z_list = self
            .z_list
            .as_ref()
            .map(|zs| zs.iter().map(|z| z.to_element_in(&alg)).collect::<Result<Vec<_>>>())
            .transpose()?;
        let coeff_antisym = self
            .coeff_antisym
            .as_ref()
            .map(|c| c.to_coefficients(&alg))
            .transpose()?;
        let coeff_full = self
            .coeff_full
            .as_ref()
            .map(|c| c.to_coefficients(&alg))
            .transpose()?;
        Ok(LoadedInstance {
            label: self.label.clone(),
            seed: self.seed,
            family: self.family.as_deref().map(Family::parse).transpose()?,
            algebra: alg,
            derivations,
            z_list,
            coeff_antisym,
            coeff_full,
            form,
            generator,
        })
    }
}
