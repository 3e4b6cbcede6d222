use std::collections::BTreeMap;
use std::fmt::Write as _;

use bc_canon::io::{to_canonical_json, MatrixFile};
use bc_canon::ComplexMatrix;
use clap::ValueEnum;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Metric {
    Count(u64),
    Real(f64),
}

impl From<usize> for Metric {
    fn from(v: usize) -> Self {
        Metric::Count(v as u64)
    }
}

impl From<f64> for Metric {
    fn from(v: f64) -> Self {
        Metric::Real(v)
    }
}

impl Metric {
    pub fn as_f64(&self) -> f64 {
        match *self {
            Metric::Count(v) => v as f64,
            Metric::Real(v) => v,
        }
    }
}

/// Outcome of one command.
///
/// Metric keys per command:
/// - `check`: `m`, `rank_AB`, `rank_A`, `rank_B`, `gram_residual`
/// - `canon`: `m`, `n`, `rank_A`, `rank_B`, `predicted_rank_A`, `predicted_rank_B`,
///   `null_count`, `r`, `reconstruction_residual`, `row_space_angle`,
///   `w_unitarity_residual` (odd order);
///   `m`, `n`, `rank_S`, `reconstruction_residual` (order `2n`)
/// - `classify`: `m`, `n`, `rank_A`, `rank_B`, `r`, plus `null_count` (odd) or `rank_S` (even)
/// - `generate`: `m`, `seed`, `rank_A`, `rank_B`, `gram_residual`, plus `unit_cosines` when given
/// - `selftest`: `checks`, `failures`, `trials`, and `max_<check>` for each bounded check
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub verdict: String,
    pub metrics: BTreeMap<String, Metric>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factors: Option<BTreeMap<String, MatrixFile>>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_owned(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            verdict: String::new(),
            metrics: BTreeMap::new(),
            factors: None,
        }
    }

    pub fn metric(&mut self, key: &str, value: impl Into<Metric>) {
        self.metrics.insert(key.to_owned(), value.into());
    }

    pub fn factor(&mut self, name: &str, m: &ComplexMatrix) {
        self.factors
            .get_or_insert_with(BTreeMap::new)
            .insert(name.to_owned(), MatrixFile::from_matrix(m));
    }
}

fn label(key: &str) -> &str {
    match key {
        "rank_AB" => "rank(A:B)",
        "rank_A" => "rank(A)",
        "rank_B" => "rank(B)",
        "rank_S" => "rank(S)",
        other => other,
    }
}

pub fn format_report(report: &Report, mode: Format) -> String {
    match mode {
        Format::Json => {
            let mut s = to_canonical_json(report);
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "command = {}", report.command);
            for input in &report.inputs {
                let _ = writeln!(s, "input = {input}");
            }
            let _ = writeln!(s, "verdict = {}", report.verdict);
            for (key, value) in &report.metrics {
                match value {
                    Metric::Count(v) => {
                        let _ = writeln!(s, "{} = {v}", label(key));
                    }
                    Metric::Real(v) => {
                        let _ = writeln!(s, "{} = {v:e}", label(key));
                    }
                }
            }
            for output in &report.outputs {
                let _ = writeln!(s, "output = {output}");
            }
            if let Some(factors) = &report.factors {
                let names: Vec<&str> = factors.keys().map(String::as_str).collect();
                let _ = writeln!(s, "factors = {}", names.join(", "));
            }
            s
        }
    }
}
