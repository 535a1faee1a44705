//! JSON documents for observables, channels, instruments and joints.
//!
//! Complex numbers are `[re, im]`; matrices are row-major nested arrays.

use std::fs;
use std::path::Path;

use indexmap::IndexMap;
use obsrel_core::{Channel, Complex64, ComplexMatrix, Instrument, JointObservable, Povm};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub type Matrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Document {
    Povm(PovmDoc),
    Channel(ChannelDoc),
    Instrument(InstrumentDoc),
    Joint(JointDoc),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PovmDoc {
    pub dim: usize,
    pub effects: IndexMap<String, Matrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelDoc {
    pub in_dim: usize,
    pub out_factors: Vec<usize>,
    pub kraus: Vec<Matrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstrumentDoc {
    pub dim: usize,
    /// Kraus operators per outcome.
    pub outcomes: IndexMap<String, Vec<Matrix>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointDoc {
    pub dim: usize,
    pub a_outcomes: Vec<String>,
    pub b_outcomes: Vec<String>,
    /// `effects[x][y] = J(x, y)`.
    pub effects: Vec<Vec<Matrix>>,
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Povm(_) => "povm",
            Self::Channel(_) => "channel",
            Self::Instrument(_) => "instrument",
            Self::Joint(_) => "joint",
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    /// Reads and parses a file; structural validation happens in the
    /// `to_*` conversions.
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| e.in_file(path))
    }

    pub fn to_povm(&self) -> Result<Povm, CliError> {
        match self {
            Self::Povm(p) => p.to_core(),
            other => Err(CliError::WrongKind { expected: "povm", found: other.kind() }),
        }
    }

    pub fn to_channel(&self) -> Result<Channel, CliError> {
        match self {
            Self::Channel(c) => c.to_core(),
            other => Err(CliError::WrongKind { expected: "channel", found: other.kind() }),
        }
    }

    pub fn to_instrument(&self) -> Result<Instrument, CliError> {
        match self {
            Self::Instrument(i) => i.to_core(),
            other => Err(CliError::WrongKind { expected: "instrument", found: other.kind() }),
        }
    }

    pub fn to_joint(&self) -> Result<JointObservable, CliError> {
        match self {
            Self::Joint(j) => j.to_core(),
            other => Err(CliError::WrongKind { expected: "joint", found: other.kind() }),
        }
    }
}

pub fn matrix_to_doc(m: &ComplexMatrix) -> Matrix {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn matrix_from_doc(m: &Matrix, rows: usize, cols: usize, what: &str) -> Result<ComplexMatrix, CliError> {
    if m.len() != rows || m.iter().any(|r| r.len() != cols) {
        return Err(CliError::Invalid(format!("{what}: expected a {rows}x{cols} matrix")));
    }
    let data: Vec<Complex64> = m.iter().flatten().map(|&[re, im]| Complex64::new(re, im)).collect();
    if data.iter().any(|z| !z.is_finite()) {
        return Err(CliError::Invalid(format!("{what}: non-finite entry")));
    }
    Ok(ComplexMatrix::new(rows, cols, data)?)
}

impl PovmDoc {
    pub fn from_core(p: &Povm) -> Self {
        Self {
            dim: p.dim(),
            effects: p
                .outcomes()
                .iter()
                .zip(p.effects())
                .map(|(l, e)| (l.clone(), matrix_to_doc(e)))
                .collect(),
        }
    }

    /// Validated observable; the error names the first failing invariant.
    pub fn to_core(&self) -> Result<Povm, CliError> {
        let effects = self
            .effects
            .iter()
            .map(|(l, m)| matrix_from_doc(m, self.dim, self.dim, &format!("effect '{l}'")))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Povm::new(self.effects.keys().cloned().collect(), effects)?)
    }
}

impl ChannelDoc {
    pub fn from_core(c: &Channel) -> Self {
        Self {
            in_dim: c.in_dim(),
            out_factors: c.out_factors().to_vec(),
            kraus: c.kraus().iter().map(matrix_to_doc).collect(),
        }
    }

    pub fn to_core(&self) -> Result<Channel, CliError> {
        let out: usize = self.out_factors.iter().product();
        let kraus = self
            .kraus
            .iter()
            .enumerate()
            .map(|(k, m)| matrix_from_doc(m, out, self.in_dim, &format!("Kraus operator {k}")))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Channel::new(self.in_dim, self.out_factors.clone(), kraus)?)
    }
}

impl InstrumentDoc {
    pub fn from_core(i: &Instrument) -> Self {
        Self {
            dim: i.dim(),
            outcomes: i
                .outcomes()
                .iter()
                .zip(i.maps())
                .map(|(l, ks)| (l.clone(), ks.iter().map(matrix_to_doc).collect()))
                .collect(),
        }
    }

    pub fn to_core(&self) -> Result<Instrument, CliError> {
        let out_dim = self
            .outcomes
            .values()
            .flatten()
            .next()
            .map(|m| m.len())
            .ok_or_else(|| CliError::Invalid("instrument has no Kraus operators".into()))?;
        let maps = self
            .outcomes
            .iter()
            .map(|(l, ks)| {
                ks.iter()
                    .map(|m| matrix_from_doc(m, out_dim, self.dim, &format!("Kraus operator of outcome '{l}'")))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Instrument::new(self.dim, self.outcomes.keys().cloned().collect(), maps)?)
    }
}

impl JointDoc {
    pub fn from_core(j: &JointObservable) -> Self {
        let n = j.b_outcomes().len();
        Self {
            dim: j.dim(),
            a_outcomes: j.a_outcomes().to_vec(),
            b_outcomes: j.b_outcomes().to_vec(),
            effects: j.effects().chunks(n).map(|row| row.iter().map(matrix_to_doc).collect()).collect(),
        }
    }

    pub fn to_core(&self) -> Result<JointObservable, CliError> {
        if self.effects.len() != self.a_outcomes.len() || self.effects.iter().any(|r| r.len() != self.b_outcomes.len()) {
            return Err(CliError::Invalid(format!(
                "joint effects must form a {}x{} grid",
                self.a_outcomes.len(),
                self.b_outcomes.len()
            )));
        }
        let mut effects = Vec::new();
        for (x, row) in self.effects.iter().enumerate() {
            for (y, m) in row.iter().enumerate() {
                effects.push(matrix_from_doc(
                    m,
                    self.dim,
                    self.dim,
                    &format!("J({}, {})", self.a_outcomes[x], self.b_outcomes[y]),
                )?);
            }
        }
        Ok(JointObservable::new(self.a_outcomes.clone(), self.b_outcomes.clone(), effects)?)
    }
}

impl From<&Povm> for Document {
    fn from(p: &Povm) -> Self {
        Self::Povm(PovmDoc::from_core(p))
    }
}

impl From<&Channel> for Document {
    fn from(c: &Channel) -> Self {
        Self::Channel(ChannelDoc::from_core(c))
    }
}

impl From<&Instrument> for Document {
    fn from(i: &Instrument) -> Self {
        Self::Instrument(InstrumentDoc::from_core(i))
    }
}

impl From<&JointObservable> for Document {
    fn from(j: &JointObservable) -> Self {
        Self::Joint(JointDoc::from_core(j))
    }
}
