//! JSON file formats.
//!
//! Seed files look like
//!
//! ```json
//! {"name": "rank one", "m": 2, "n": 1, "B": [[0], [1]], "Lambda": [[0, -1], [1, 0]]}
//! ```
//!
//! with optional `vars` (one list of term records per cluster variable) and
//! `initialLambda` (the commutation matrix of the torus the variables are
//! written in; defaults to `Lambda`). A term record is
//! `{"exponents": [..], "coeff": [[doubledQExponent, "integer"], ..]}`.
//! Integers inside coefficients are decimal strings so they never lose
//! precision.

use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::matrix::{IntMatrix, MatrixError, RationalMatrix};
use crate::qcoeff::QCoefficient;
use crate::seed::{ExchangeData, QuantumSeed, SeedError};
use crate::torus::{ExponentVector, QuantumLaurent, Torus};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid file: {0}")]
    Invalid(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Seed(#[from] SeedError),
}

impl FormatError {
    /// See [`SeedError::is_integrity`].
    pub fn is_integrity(&self) -> bool {
        matches!(self, FormatError::Seed(e) if e.is_integrity())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub exponents: Vec<i64>,
    pub coeff: Vec<(i64, String)>,
}

/// Serializes in decreasing lexicographic order.
pub fn laurent_to_records(f: &QuantumLaurent) -> Vec<TermRecord> {
    f.terms()
        .rev()
        .map(|(a, c)| TermRecord {
            exponents: a.as_slice().to_vec(),
            coeff: c.terms().map(|(e, x)| (e, x.to_string())).collect(),
        })
        .collect()
}

pub fn laurent_from_records(torus: &Arc<Torus>, records: &[TermRecord]) -> Result<QuantumLaurent, FormatError> {
    let mut terms = Vec::with_capacity(records.len());
    for r in records {
        let mut pairs = Vec::with_capacity(r.coeff.len());
        for (e, s) in &r.coeff {
            let c = BigInt::from_str(s).map_err(|_| FormatError::Invalid(format!("bad integer {s:?}")))?;
            pairs.push((*e, c));
        }
        terms.push((ExponentVector::new(r.exponents.clone()), QCoefficient::from_terms(pairs)));
    }
    QuantumLaurent::from_ordered_terms(torus, terms).map_err(|e| FormatError::Seed(e.into()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub m: usize,
    pub n: usize,
    #[serde(rename = "B")]
    pub b: Vec<Vec<i64>>,
    #[serde(rename = "Lambda")]
    pub lambda: Vec<Vec<i64>>,
    #[serde(rename = "initialLambda", default, skip_serializing_if = "Option::is_none")]
    pub initial_lambda: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vars: Option<Vec<Vec<TermRecord>>>,
}

impl SeedFile {
    pub fn from_seed(seed: &QuantumSeed) -> Self {
        let (initial_lambda, vars) = if seed.has_initial_vars() {
            (None, None)
        } else {
            (
                Some(seed.initial_torus().lambda().to_rows()),
                Some(seed.vars().iter().map(laurent_to_records).collect()),
            )
        };
        SeedFile {
            name: None,
            description: None,
            m: seed.m(),
            n: seed.n(),
            b: seed.b().to_rows(),
            lambda: seed.lambda().to_rows(),
            initial_lambda,
            vars,
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// Validates every seed invariant.
    pub fn to_seed(&self) -> Result<QuantumSeed, FormatError> {
        let b = IntMatrix::from_rows(&self.b)?;
        let lambda = IntMatrix::from_rows(&self.lambda)?;
        if b.rows() != self.m || (self.m > 0 && b.cols() != self.n) {
            return Err(FormatError::Invalid(format!(
                "B is {}x{}, header says m = {}, n = {}",
                b.rows(),
                b.cols(),
                self.m,
                self.n
            )));
        }
        if self.n == 0 || self.n > self.m {
            return Err(FormatError::Invalid(format!("need 1 <= n <= m, got m = {}, n = {}", self.m, self.n)));
        }
        let exchange = ExchangeData::new(b, lambda)?;
        match &self.vars {
            None => {
                if self.initial_lambda.as_ref().is_some_and(|l| *l != self.lambda) {
                    return Err(FormatError::Invalid("initialLambda given without vars".into()));
                }
                Ok(QuantumSeed::initial(exchange))
            }
            Some(vars) => {
                let init = IntMatrix::from_rows(self.initial_lambda.as_ref().unwrap_or(&self.lambda))?;
                let torus = Torus::new(init).map_err(|e| FormatError::Seed(e.into()))?;
                let vars = vars
                    .iter()
                    .map(|r| laurent_from_records(&torus, r))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(QuantumSeed::from_parts(exchange, vars, torus)?)
            }
        }
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("seed files always serialize")
    }
}

pub fn read_text(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.display().to_string(), source })
}

pub fn load_seed(path: &Path) -> Result<QuantumSeed, FormatError> {
    SeedFile::parse(&read_text(path)?)?.to_seed()
}

pub fn save_seed(path: &Path, file: &SeedFile) -> Result<(), FormatError> {
    fs::write(path, file.to_json() + "\n").map_err(|source| FormatError::Io { path: path.display().to_string(), source })
}

/// SHA-256 of the compact JSON of the seed (metadata excluded).
pub fn seed_digest(seed: &QuantumSeed) -> String {
    let json = serde_json::to_string(&SeedFile::from_seed(seed)).expect("seed files always serialize");
    hex::encode(Sha256::digest(json.as_bytes()))
}

pub fn matrix_digest(b: &IntMatrix) -> String {
    let json = serde_json::to_string(b).expect("matrices always serialize");
    hex::encode(Sha256::digest(json.as_bytes()))
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum RationalEntry {
    Int(i64),
    Text(String),
}

impl RationalEntry {
    fn value(&self) -> Result<BigRational, FormatError> {
        match self {
            RationalEntry::Int(v) => Ok(BigRational::from_integer((*v).into())),
            RationalEntry::Text(s) => {
                BigRational::from_str(s.trim()).map_err(|_| FormatError::Invalid(format!("bad rational {s:?}")))
            }
        }
    }
}

/// Input of the `B, C, D` construction: `D` is the diagonal as a list.
/// Entries are JSON integers or strings like `"3/2"`.
#[derive(Clone, Debug, Deserialize)]
pub struct BcdFile {
    #[serde(rename = "B")]
    b: Vec<Vec<RationalEntry>>,
    #[serde(rename = "C")]
    c: Vec<Vec<RationalEntry>>,
    #[serde(rename = "D")]
    d: Vec<RationalEntry>,
}

impl BcdFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    fn matrix(rows: &[Vec<RationalEntry>]) -> Result<RationalMatrix, FormatError> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(RationalEntry::value).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RationalMatrix::from_rows(rows)?)
    }

    pub fn b(&self) -> Result<RationalMatrix, FormatError> {
        Self::matrix(&self.b)
    }

    pub fn c(&self) -> Result<RationalMatrix, FormatError> {
        Self::matrix(&self.c)
    }

    pub fn d(&self) -> Result<Vec<BigRational>, FormatError> {
        self.d.iter().map(RationalEntry::value).collect()
    }
}

/// Rational matrix as rows of decimal strings.
pub fn rational_rows(m: &RationalMatrix) -> Vec<Vec<String>> {
    m.to_rows().into_iter().map(|r| r.into_iter().map(|x| x.to_string()).collect()).collect()
}
