//! JSON file formats.
//!
//! Matrices are `{"rows": r, "cols": c, "data": [[re, im], ...]}` in row-major
//! order. Channels, POVMs, Lindbladians and representations nest matrices in
//! that format. Syntax errors and non-finite entries are reported as
//! [`Error::Parse`]; structurally valid files describing invalid objects
//! (non-unitary group elements, incomplete Kraus sets) fail validation with
//! the usual invariant errors.

use serde::{Deserialize, Serialize};

use crate::channels::{KrausChannel, PovmChannel};
use crate::error::{Error, Result};
use crate::groups::GroupRep;
use crate::linalg::{ComplexMatrix, C64};
use crate::lindblad::{Jump, LindbladSpec};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl TryFrom<&MatrixJson> for ComplexMatrix {
    type Error = Error;

    fn try_from(m: &MatrixJson) -> Result<Self> {
        if m.data.len() != m.rows * m.cols {
            return Err(Error::Parse(format!(
                "matrix declares {}x{} but has {} entries",
                m.rows,
                m.cols,
                m.data.len()
            )));
        }
        if m.data.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Parse(
                "matrix contains NaN or infinite entries".into(),
            ));
        }
        let data = m.data.iter().map(|&[re, im]| C64::new(re, im)).collect();
        ComplexMatrix::new(m.rows, m.cols, data).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data: m.data().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelJson {
    pub in_dim: usize,
    pub out_dim: usize,
    pub kraus: Vec<MatrixJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PovmJson {
    pub in_dim: usize,
    pub effects: Vec<MatrixJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpJson {
    pub op: MatrixJson,
    pub rate: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LindbladJson {
    pub dim: usize,
    pub hamiltonian: MatrixJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian_terms: Option<Vec<MatrixJson>>,
    #[serde(default)]
    pub jumps: Vec<JumpJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepJson {
    pub elements: Vec<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_elements: Option<Vec<MatrixJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_perm: Option<Vec<Vec<usize>>>,
}

fn matrices(list: &[MatrixJson]) -> Result<Vec<ComplexMatrix>> {
    list.iter().map(ComplexMatrix::try_from).collect()
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializing plain data cannot fail")
}

pub fn parse_matrix(s: &str) -> Result<ComplexMatrix> {
    let m: MatrixJson = serde_json::from_str(s)?;
    ComplexMatrix::try_from(&m)
}

pub fn matrix_to_json(m: &ComplexMatrix) -> String {
    to_json(&MatrixJson::from(m))
}

pub fn parse_channel(s: &str) -> Result<KrausChannel> {
    let c: ChannelJson = serde_json::from_str(s)?;
    KrausChannel::new(c.in_dim, c.out_dim, matrices(&c.kraus)?)
}

pub fn channel_to_json(ch: &KrausChannel) -> String {
    to_json(&ChannelJson {
        in_dim: ch.in_dim(),
        out_dim: ch.out_dim(),
        kraus: ch.kraus_ops().iter().map(MatrixJson::from).collect(),
    })
}

pub fn parse_povm(s: &str) -> Result<PovmChannel> {
    let p: PovmJson = serde_json::from_str(s)?;
    PovmChannel::new(p.in_dim, matrices(&p.effects)?)
}

pub fn povm_to_json(p: &PovmChannel) -> String {
    to_json(&PovmJson {
        in_dim: p.in_dim(),
        effects: p.effects().iter().map(MatrixJson::from).collect(),
    })
}

pub fn parse_lindblad(s: &str) -> Result<LindbladSpec> {
    let l: LindbladJson = serde_json::from_str(s)?;
    let jumps = l
        .jumps
        .iter()
        .map(|j| {
            if !j.rate.is_finite() {
                return Err(Error::Parse("jump rate must be finite".into()));
            }
            Ok(Jump {
                op: ComplexMatrix::try_from(&j.op)?,
                rate: j.rate,
            })
        })
        .collect::<Result<_>>()?;
    let terms = match &l.hamiltonian_terms {
        Some(t) => matrices(t)?,
        None => Vec::new(),
    };
    LindbladSpec::with_terms(
        l.dim,
        ComplexMatrix::try_from(&l.hamiltonian)?,
        terms,
        jumps,
    )
}

pub fn lindblad_to_json(spec: &LindbladSpec) -> String {
    let terms = spec.hamiltonian_terms();
    to_json(&LindbladJson {
        dim: spec.dim(),
        hamiltonian: MatrixJson::from(spec.hamiltonian()),
        hamiltonian_terms: (!terms.is_empty())
            .then(|| terms.iter().map(MatrixJson::from).collect()),
        jumps: spec
            .jumps()
            .iter()
            .map(|j| JumpJson {
                op: MatrixJson::from(&j.op),
                rate: j.rate,
            })
            .collect(),
    })
}

pub fn parse_rep(s: &str) -> Result<GroupRep> {
    let r: RepJson = serde_json::from_str(s)?;
    let out = match &r.out_elements {
        Some(list) => Some(matrices(list)?),
        None => None,
    };
    GroupRep::with_outputs(matrices(&r.elements)?, out, r.out_perm)
}

pub fn rep_to_json(rep: &GroupRep) -> String {
    let out_elements = rep.has_out_elements().then(|| {
        (0..rep.order())
            .map(|g| MatrixJson::from(rep.out_element(g)))
            .collect()
    });
    to_json(&RepJson {
        elements: rep.elements().iter().map(MatrixJson::from).collect(),
        out_elements,
        out_perm: rep.out_perm().map(|p| p.to_vec()),
    })
}
