//! JSON module-definition files.
//!
//! ```json
//! {"name": "forms", "dim": 1, "rank": 1, "order": 1,
//!  "terms": [{"i": 1, "alpha": [1], "matrix": [["1"]]}]}
//! ```
//!
//! `i` is 1-based; omitted `(i, α)` entries are zero matrices.

use serde::{Deserialize, Serialize};

use super::{AVModule, PolyMatrix};
use crate::error::{Error, Result};
use crate::poly::{parse_poly, MultiIndex};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dim: usize,
    pub rank: usize,
    pub order: u32,
    #[serde(default)]
    pub terms: Vec<TermEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermEntry {
    pub i: usize,
    pub alpha: Vec<u16>,
    pub matrix: Vec<Vec<String>>,
}

impl ModuleFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("module files always serialize")
    }

    /// Builds the module. Shape and schema problems are errors; a failed
    /// bracket check is recorded on the module (see [`AVModule::is_valid`]).
    pub fn to_module(&self) -> Result<AVModule> {
        let d = self.dim;
        if d == 0 {
            return Err(Error::Schema("dim must be at least 1".into()));
        }
        if self.rank == 0 {
            return Err(Error::Schema("rank must be at least 1".into()));
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for (n, t) in self.terms.iter().enumerate() {
            if t.i == 0 || t.i > d {
                return Err(Error::Schema(format!("terms[{n}]: i = {} outside 1..={d}", t.i)));
            }
            if t.alpha.len() != d {
                return Err(Error::Schema(format!("terms[{n}]: alpha has length {}, expected {d}", t.alpha.len())));
            }
            if t.matrix.len() != self.rank || t.matrix.iter().any(|row| row.len() != self.rank) {
                return Err(Error::Schema(format!("terms[{n}]: matrix is not {0}x{0}", self.rank)));
            }
            let rows = t
                .matrix
                .iter()
                .map(|row| row.iter().map(|s| parse_poly(s, d)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            terms.push(((t.i - 1, MultiIndex::from_slice(&t.alpha)), PolyMatrix::from_rows(d, rows)?));
        }
        AVModule::new(self.name.clone(), d, self.rank, self.order, terms)
    }

    pub fn from_module(module: &AVModule) -> Self {
        ModuleFile {
            name: module.name().map(str::to_string),
            dim: module.dim(),
            rank: module.rank(),
            order: module.order(),
            terms: module
                .terms()
                .map(|(i, a, m)| TermEntry { i: i + 1, alpha: a.entries().to_vec(), matrix: m.to_strings() })
                .collect(),
        }
    }
}

/// Parses a module file; the module must validate.
pub fn import_module(text: &str) -> Result<AVModule> {
    let m = ModuleFile::from_json(text)?.to_module()?;
    m.require_valid()?;
    Ok(m)
}

pub fn export_module(module: &AVModule) -> String {
    ModuleFile::from_module(module).to_json()
}
