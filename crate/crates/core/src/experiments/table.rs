use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::ExperimentConfig;

/// One recorded comparison. `margin = bound - value` is fixed at
/// construction and recomputable from the row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub n: f64,
    pub replicate: Option<usize>,
    pub statistic: String,
    pub value: f64,
    pub bound: f64,
    pub margin: f64,
}

impl ResultRow {
    pub fn new(n: f64, replicate: Option<usize>, statistic: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { n, replicate, statistic: statistic.into(), value, bound, margin: bound - value }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub experiment: String,
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
    /// Seconds since the Unix epoch. Not part of the hash or the CSV.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub metadata: Metadata,
    pub rows: Vec<ResultRow>,
    pub assertions: Vec<Assertion>,
    /// Subcommand-specific detail for the JSON output.
    pub report: serde_json::Value,
}

/// SHA-256 of the config's canonical JSON, hex encoded.
pub fn config_hash(config: &ExperimentConfig) -> String {
    let json = serde_json::to_string(config).expect("config serializes");
    Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

impl ResultTable {
    pub fn new(experiment: &str, config: &ExperimentConfig) -> Self {
        Self {
            metadata: Metadata {
                experiment: experiment.to_string(),
                config_hash: config_hash(config),
                seed: config.seed,
                version: env!("CARGO_PKG_VERSION").to_string(),
                timestamp: None,
            },
            rows: Vec::new(),
            assertions: Vec::new(),
            report: serde_json::Value::Null,
        }
    }

    pub fn push(&mut self, row: ResultRow) {
        self.rows.push(row);
    }

    pub fn assert(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.assertions.push(Assertion { name: name.to_string(), passed, detail: detail.into() });
    }

    pub fn all_passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    /// Rows with a negative or non-finite bound, or a margin that does not
    /// match `bound - value`.
    pub fn malformed_rows(&self) -> Vec<usize> {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, r)| !(r.bound >= 0.0) || r.margin.to_bits() != (r.bound - r.value).to_bits())
            .map(|(i, _)| i)
            .collect()
    }

    /// Columns `n,replicate,statistic,value,bound,margin`; floats use the
    /// shortest representation that round-trips.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["n", "replicate", "statistic", "value", "bound", "margin"]).expect("in-memory write");
        for r in &self.rows {
            let rep = r.replicate.map(|x| x.to_string()).unwrap_or_default();
            w.write_record([
                r.n.to_string(),
                rep,
                r.statistic.clone(),
                r.value.to_string(),
                r.bound.to_string(),
                r.margin.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }
}
