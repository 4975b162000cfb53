//! Report documents and their JSON, Markdown and plain-table renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::audit::{AuditResult, Status};
use crate::models::{Group, ModelBundle};
use crate::tolerance::Tolerance;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelInfo {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<Group>,
}

impl ModelInfo {
    pub fn of(m: &ModelBundle) -> Self {
        ModelInfo { name: m.name().to_string(), n: m.kind.n(), group: m.kind.group() }
    }

    pub fn title(&self) -> String {
        let mut s = self.name.clone();
        if let Some(n) = self.n {
            let _ = write!(s, " n={n}");
        }
        if let Some(g) = self.group {
            let _ = write!(s, " {g}");
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub model: ModelInfo,
    pub tolerance: Tolerance,
    pub seed: u64,
    pub results: Vec<AuditResult>,
    pub version: String,
    /// Seconds since the Unix epoch; the only field that varies between identical runs.
    pub generated_unix: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Markdown,
    Table,
}

impl ReportDocument {
    pub fn new(m: &ModelBundle, tol: Tolerance, seed: u64, results: Vec<AuditResult>) -> Self {
        let generated_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        ReportDocument {
            model: ModelInfo::of(m),
            tolerance: tol,
            seed,
            results,
            version: env!("CARGO_PKG_VERSION").to_string(),
            generated_unix,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Markdown => self.to_markdown(),
            Format::Table => self.to_table(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# Audit: {}\n", self.model.title());
        let _ = writeln!(
            s,
            "seed `{}`, eps `{:e}`, angular grid `{}`, gamma grid `{}`\n",
            self.seed, self.tolerance.eps, self.tolerance.grid_angle, self.tolerance.grid_gamma
        );
        s.push_str("| postulate | status | value | witness | notes |\n");
        s.push_str("|---|---|---|---|---|\n");
        for r in &self.results {
            let _ = writeln!(
                s,
                "| {} | {} {} | {} | {} | {} |",
                r.postulate,
                glyph(r.status),
                r.status,
                value_cell(r.value),
                r.witness.as_ref().and_then(|w| w.label.clone()).unwrap_or_else(|| "-".into()),
                r.notes.join("; ").replace('|', "\\|")
            );
        }
        s
    }

    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "model: {}   seed: {}", self.model.title(), self.seed);
        let _ = writeln!(s, "{:<20} {:<13} {:>12}  witness", "postulate", "status", "value");
        for r in &self.results {
            let _ = writeln!(
                s,
                "{:<20} {:<13} {:>12}  {}",
                r.postulate.to_string(),
                r.status.to_string(),
                value_cell(r.value),
                r.witness.as_ref().and_then(|w| w.label.clone()).unwrap_or_else(|| "-".into())
            );
        }
        s
    }
}

fn glyph(s: Status) -> &'static str {
    match s {
        Status::Holds => "✅",
        Status::Fails => "❌",
        Status::Inconclusive => "❔",
    }
}

fn value_cell(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v:.6}"))
}
