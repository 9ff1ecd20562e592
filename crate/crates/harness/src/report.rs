//! Check identifiers, specifications and the per-check report record.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Every named verification job. The declaration order is the report order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CheckId {
    MainSupercongruence,
    ScalarKatzDwork,
    MixedCartierCancellation,
    ClosureScalars,
    BridgeCancellation,
    LayerDivisibility,
    NumeratorSaturation,
    LayerDefectEquivalence,
    SplitTower,
    InertObstruction,
    InertParity,
    InertAp72,
    MumSignature,
    TransportDiagnostic,
}

impl CheckId {
    pub const ALL: [CheckId; 14] = [
        Self::MainSupercongruence,
        Self::ScalarKatzDwork,
        Self::MixedCartierCancellation,
        Self::ClosureScalars,
        Self::BridgeCancellation,
        Self::LayerDivisibility,
        Self::NumeratorSaturation,
        Self::LayerDefectEquivalence,
        Self::SplitTower,
        Self::InertObstruction,
        Self::InertParity,
        Self::InertAp72,
        Self::MumSignature,
        Self::TransportDiagnostic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::MainSupercongruence => "MainSupercongruence",
            Self::ScalarKatzDwork => "ScalarKatzDwork",
            Self::MixedCartierCancellation => "MixedCartierCancellation",
            Self::ClosureScalars => "ClosureScalars",
            Self::BridgeCancellation => "BridgeCancellation",
            Self::LayerDivisibility => "LayerDivisibility",
            Self::NumeratorSaturation => "NumeratorSaturation",
            Self::LayerDefectEquivalence => "LayerDefectEquivalence",
            Self::SplitTower => "SplitTower",
            Self::InertObstruction => "InertObstruction",
            Self::InertParity => "InertParity",
            Self::InertAp72 => "InertAp72",
            Self::MumSignature => "MumSignature",
            Self::TransportDiagnostic => "TransportDiagnostic",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|id| id.as_str().eq_ignore_ascii_case(s))
    }

    /// Report-only checks never influence the aggregate status.
    pub fn is_diagnostic(self) -> bool {
        self == Self::TransportDiagnostic
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Optional ranges; each check falls back to its own defaults.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckParams {
    pub ells: Option<Vec<u32>>,
    pub m_max: Option<usize>,
    pub r_max: Option<u32>,
    pub n_max: Option<usize>,
    pub split_max: Option<u64>,
    pub inert_max: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckSpec {
    pub id: CheckId,
    pub prime: Option<u64>,
    pub params: CheckParams,
    /// q-precision replacing the default `5p^2`.
    pub precision_override: Option<usize>,
}

impl CheckSpec {
    pub fn new(id: CheckId, prime: Option<u64>) -> Self {
        Self { id, prime, params: CheckParams::default(), precision_override: None }
    }

    pub fn with_params(mut self, params: CheckParams) -> Self {
        self.params = params;
        self
    }

    pub fn ells(&self) -> Vec<u32> {
        self.params.ells.clone().unwrap_or_else(|| vec![1, 2, 3])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pass => "PASS",
            Self::Fail => "FAIL",
            Self::Skipped => "SKIPPED",
        })
    }
}

/// First offending index and its residue.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureDetail {
    pub index: Option<i64>,
    pub residue: Option<String>,
    pub message: String,
}

impl FailureDetail {
    pub fn message(message: impl Into<String>) -> Self {
        Self { index: None, residue: None, message: message.into() }
    }

    pub fn at(index: i64, residue: impl ToString, message: impl Into<String>) -> Self {
        Self { index: Some(index), residue: Some(residue.to_string()), message: message.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub id: CheckId,
    pub prime: Option<u64>,
    pub ells: Vec<u32>,
    /// Human-readable modulus, e.g. `p^4` or `p^(4-l)`.
    pub modulus: String,
    pub status: Status,
    pub diagnostic: bool,
    pub witnesses: BTreeMap<String, i64>,
    pub max_index_tested: i64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub elapsed_ms: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub failure_detail: Option<FailureDetail>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl VerificationReport {
    pub fn witness(&self, name: &str) -> Option<i64> {
        self.witnesses.get(name).copied()
    }

    pub(crate) fn sort_key(&self) -> (CheckId, u64, Vec<u32>) {
        (self.id, self.prime.unwrap_or(0), self.ells.clone())
    }
}

/// What a check body produces; the registry adds identity and timing.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub passed: bool,
    pub ells: Vec<u32>,
    pub modulus: String,
    pub witnesses: BTreeMap<String, i64>,
    pub max_index: i64,
    pub failure: Option<FailureDetail>,
    pub note: Option<String>,
    /// Marks an outcome that could not be evaluated (e.g. precision too low).
    pub skipped: bool,
}

impl Outcome {
    pub fn new(modulus: impl Into<String>) -> Self {
        Self { passed: true, modulus: modulus.into(), ..Self::default() }
    }

    pub fn witness(&mut self, name: impl Into<String>, value: i64) {
        self.witnesses.insert(name.into(), value);
    }

    /// Records a failure; only the first detail is kept.
    pub fn fail(&mut self, detail: FailureDetail) {
        self.passed = false;
        if self.failure.is_none() {
            self.failure = Some(detail);
        }
    }

    pub fn reach(&mut self, index: i64) {
        self.max_index = self.max_index.max(index);
    }
}
