//! Decision procedures for the postulates, each returning a status and a witness.

pub mod chsh;
pub mod faith;
pub mod observability;
pub mod purify;

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::GptError;
use crate::models::ModelBundle;
use crate::tolerance::Tolerance;

pub use chsh::{chsh_max, chsh_optimum, chsh_value, ChshOptimum, ChshSetting};
pub use faith::{audit_faithe, audit_pfaith, audit_teleport, faithe_minimum, teleport_check, FaitheMinimum, TeleportOutcome};
pub use observability::audit_local_observability;
pub use purify::{audit_purify, purifications_of};

pub const DEFAULT_SEED: u64 = 0xD1CE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Postulate {
    Pfaith,
    Faithe,
    Purify,
    LocalObservability,
    Teleport,
    Chsh,
}

impl fmt::Display for Postulate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Postulate::Pfaith => "PFAITH",
            Postulate::Faithe => "FAITHE",
            Postulate::Purify => "PURIFY",
            Postulate::LocalObservability => "LOCAL_OBSERVABILITY",
            Postulate::Teleport => "TELEPORT",
            Postulate::Chsh => "CHSH",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Holds,
    Fails,
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Holds => "holds",
            Status::Fails => "fails",
            Status::Inconclusive => "inconclusive",
        })
    }
}

/// A state, effect, transformation or bipartite matrix attached to a verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Row-major entries; vectors are stored as a single row.
    pub matrix: Vec<Vec<f64>>,
}

impl Witness {
    pub fn matrix(kind: &str, label: Option<String>, m: &DMatrix<f64>) -> Self {
        let matrix = (0..m.nrows()).map(|i| m.row(i).iter().map(|&v| clean(v)).collect()).collect();
        Witness { kind: kind.to_string(), label, matrix }
    }

    pub fn vector(kind: &str, label: Option<String>, v: &DVector<f64>) -> Self {
        Witness { kind: kind.to_string(), label, matrix: vec![v.iter().map(|&x| clean(x)).collect()] }
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        let rows = self.matrix.len();
        let cols = self.matrix.first().map_or(0, |r| r.len());
        DMatrix::from_fn(rows, cols, |i, j| self.matrix[i][j])
    }
}

/// Rounds away floating noise so that reports are stable across platforms.
pub fn clean(v: f64) -> f64 {
    let r = (v * 1e12).round() / 1e12;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditResult {
    pub postulate: Postulate,
    pub status: Status,
    pub value: Option<f64>,
    pub witness: Option<Witness>,
    pub notes: Vec<String>,
    #[serde(default)]
    pub details: BTreeMap<String, f64>,
}

impl AuditResult {
    pub fn new(postulate: Postulate, status: Status) -> Self {
        AuditResult { postulate, status, value: None, witness: None, notes: Vec::new(), details: BTreeMap::new() }
    }

    pub fn inconclusive(postulate: Postulate, err: &GptError) -> Self {
        let mut r = AuditResult::new(postulate, Status::Inconclusive);
        r.notes.push(err.to_string());
        r
    }

    pub fn with_value(mut self, v: f64) -> Self {
        self.value = Some(clean(v));
        self
    }

    pub fn with_witness(mut self, w: Witness) -> Self {
        self.witness = Some(w);
        self
    }

    pub fn note(mut self, s: impl Into<String>) -> Self {
        self.notes.push(s.into());
        self
    }

    pub fn detail(mut self, key: &str, v: f64) -> Self {
        self.details.insert(key.to_string(), clean(v));
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditConfig {
    pub tol: Tolerance,
    pub seed: u64,
    /// Mixed states drawn by the purification audit.
    pub purify_samples: usize,
    /// Random family members tried before declaring that no negative witness exists.
    pub search_samples: usize,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig { tol: Tolerance::default(), seed: DEFAULT_SEED, purify_samples: 100, search_samples: 100_000 }
    }
}

/// PFAITH, FAITHE, PURIFY, local observability and CHSH, in that order.
pub fn audit_all(m: &ModelBundle, cfg: &AuditConfig) -> Vec<AuditResult> {
    let mut out = vec![audit_pfaith(m, cfg)];
    let mut faithe = audit_faithe(m, cfg);
    if faithe.status == Status::Fails {
        faithe.notes.push("no super-faithful state admissible".into());
    }
    out.push(faithe);
    out.push(audit_purify(m, cfg));
    out.push(audit_local_observability(m, cfg));
    out.push(chsh_max(m, cfg));
    out
}
