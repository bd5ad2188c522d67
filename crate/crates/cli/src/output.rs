//! The output envelope and its three renderings.

use serde::{Deserialize, Serialize};
use siegel_core::support::{SupportError};
use siegel_core::verify::VerifyError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("bad arguments: {0}")]
    BadArgs(String),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error("output: {0}")]
    Output(String),
}

impl From<SupportError> for CliError {
    fn from(e: SupportError) -> Self {
        // flatten so that limit detection sees the underlying error
        CliError::Verify(match e {
            SupportError::Chars(e) => e.into(),
            SupportError::Model(e) => e.into(),
            SupportError::FiniteGroup(e) => e.into(),
            SupportError::Padic(e) => e.into(),
            e => VerifyError::Support(e),
        })
    }
}

impl From<siegel_core::models::ModelError> for CliError {
    fn from(e: siegel_core::models::ModelError) -> Self {
        CliError::Verify(e.into())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::BadArgs(_) => 4,
            CliError::Verify(VerifyError::BadOrder(_) | VerifyError::UnknownSuite(_)) => 4,
            CliError::Verify(e) if e.is_limit() => 3,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Everything that determined a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub q: Option<u32>,
    pub p: Option<u32>,
    pub f: Option<u32>,
    pub n_min: Option<u32>,
    pub n_max: Option<u32>,
    pub sigma: Option<String>,
    pub ext_sign: Option<i32>,
    pub raw: bool,
    pub suite: Option<String>,
    pub precision: Option<u32>,
    pub source: Option<String>,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOut {
    pub name: String,
    pub passed: bool,
    pub informational: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Output {
    pub config: RunConfig,
    pub rows: Vec<serde_json::Value>,
    pub checks: Vec<CheckOut>,
    pub seed: u64,
    pub version: String,
}

impl Output {
    pub fn new<R: Serialize>(config: RunConfig, rows: &[R], checks: Vec<CheckOut>, seed: u64) -> Result<Output, CliError> {
        let rows = rows.iter().map(serde_json::to_value).collect::<Result<_, _>>().map_err(out_err)?;
        Ok(Output { config, rows, checks, seed, version: env!("CARGO_PKG_VERSION").to_string() })
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed || c.informational)
    }

    /// Pretty JSON with sorted keys, so re-emitting parsed output is byte-identical.
    pub fn to_json(&self) -> Result<String, CliError> {
        let v = serde_json::to_value(self).map_err(out_err)?;
        let mut s = serde_json::to_string_pretty(&v).map_err(out_err)?;
        s.push('\n');
        Ok(s)
    }

    /// Rows as CSV, or the checks when there are no rows.
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        if self.rows.is_empty() {
            for c in &self.checks {
                w.serialize(c).map_err(out_err)?;
            }
        } else {
            let header: Vec<String> = match &self.rows[0] {
                serde_json::Value::Object(m) => m.keys().cloned().collect(),
                _ => return Err(CliError::Output("rows are not objects".into())),
            };
            w.write_record(&header).map_err(out_err)?;
            for row in &self.rows {
                w.write_record(header.iter().map(|k| cell(&row[k]))).map_err(out_err)?;
            }
        }
        String::from_utf8(w.into_inner().map_err(out_err)?).map_err(out_err)
    }
}

fn cell(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::Null => String::new(),
        serde_json::Value::String(s) => s.clone(),
        v => v.to_string(),
    }
}

fn out_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Output(e.to_string())
}

/// Fixed-width text table.
pub fn text_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (i, c) in r.iter().enumerate() {
            w[i] = w[i].max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let parts: Vec<String> = cells.iter().enumerate().map(|(i, c)| format!("{c:<width$}", width = w[i])).collect();
        parts.join("  ").trim_end().to_string() + "\n"
    };
    let mut s = line(header.to_vec());
    for r in rows {
        s += &line(r.iter().map(String::as_str).collect());
    }
    s
}

pub fn text_checks(checks: &[CheckOut]) -> String {
    let mut s = String::new();
    for c in checks {
        let tag = match (c.passed, c.informational) {
            (true, _) => "ok  ",
            (false, true) => "info",
            (false, false) => "FAIL",
        };
        s += &format!("{tag} {}", c.name);
        if !c.detail.is_empty() {
            s += &format!(": {}", c.detail);
        }
        s.push('\n');
    }
    let failed = checks.iter().filter(|c| !c.passed && !c.informational).count();
    s += &format!("{} checks, {} failed\n", checks.len(), failed);
    s
}
