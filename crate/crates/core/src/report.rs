//! Structured pass/fail records shared by every verifier.

use std::collections::BTreeMap;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// The nonzero difference left over when a check fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Witness {
    /// Components of a difference in A#V, as polynomials in `(x; y)`.
    Smash(Vec<String>),
    /// A difference in A.
    Function(String),
    /// A difference of module elements (or of localized elements).
    Module(Vec<String>),
    /// A nonzero operator matrix, row-major.
    Matrix(Vec<Vec<String>>),
    /// Free-form description of a failing instance.
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub identity: String,
    pub inputs: BTreeMap<String, String>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl VerificationReport {
    pub fn pass(identity: impl Into<String>, inputs: BTreeMap<String, String>) -> Self {
        VerificationReport { identity: identity.into(), inputs, status: Status::Pass, witness: None }
    }

    pub fn fail(identity: impl Into<String>, inputs: BTreeMap<String, String>, witness: Witness) -> Self {
        VerificationReport { identity: identity.into(), inputs, status: Status::Fail, witness: Some(witness) }
    }

    /// Pass when `witness` is `None`, fail with it otherwise.
    pub fn from_witness(
        identity: impl Into<String>,
        inputs: BTreeMap<String, String>,
        witness: Option<Witness>,
    ) -> Self {
        match witness {
            None => Self::pass(identity, inputs),
            Some(w) => Self::fail(identity, inputs, w),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Sort key used to make aggregated reports order-independent.
    pub fn sort_key(&self) -> (String, Vec<(String, String)>) {
        (
            self.identity.clone(),
            self.inputs.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
        )
    }
}
