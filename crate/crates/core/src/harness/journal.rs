//! Append-only JSON-lines journal of experiment records.

use std::collections::BTreeSet;
use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const RECORD_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub schema_version: u32,
    pub case_id: String,
    /// `random`, `complete`, or a named fixed topology.
    pub topology: String,
    pub seed: u64,
    pub n_buses: usize,
    pub num_lines: usize,
    pub signature_key: String,
    pub avg_clique_size: f64,
    pub topology_class: String,
    pub num_pv: usize,
    pub num_load: usize,
    pub num_zero_injection: usize,
    pub num_paths: usize,
    pub num_finite_complex: usize,
    pub num_real: usize,
    pub num_at_infinity: usize,
    pub num_singular: usize,
    pub num_failed: usize,
    pub num_path_jumps: usize,
    pub attempts: u32,
    pub bezout: u64,
    pub kappa_n: u64,
    pub topology_bound: Option<u64>,
    pub is_conjecture: bool,
    /// `finite ≤ topology_bound`, present only for certified solves with a bound.
    pub bound_respected: Option<bool>,
    pub runtime_ms: u64,
    pub solver_config_digest: String,
}

impl ExperimentRecord {
    pub fn is_certified(&self) -> bool {
        self.num_failed == 0 && self.num_path_jumps == 0
    }
}

/// Parses journal text. A final line without a trailing newline is a write
/// interrupted by a crash and is ignored.
pub fn parse_journal(text: &str) -> Result<Vec<ExperimentRecord>> {
    let complete = match text.rfind('\n') {
        Some(i) => &text[..=i],
        None => "",
    };
    complete
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let rec: ExperimentRecord = serde_json::from_str(line)
                .map_err(|e| Error::Journal(format!("line {}: {e}", i + 1)))?;
            if rec.schema_version != RECORD_SCHEMA_VERSION {
                return Err(Error::Journal(format!(
                    "line {}: schema version {} (expected {RECORD_SCHEMA_VERSION})",
                    i + 1,
                    rec.schema_version
                )));
            }
            Ok(rec)
        })
        .collect()
}

pub fn read_journal(path: &Path) -> Result<Vec<ExperimentRecord>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_journal(&text)
}

/// Journal open for appending; remembers which case ids it already holds.
pub struct Journal {
    path: PathBuf,
    writer: BufWriter<File>,
    done: BTreeSet<String>,
    records: Vec<ExperimentRecord>,
}

impl Journal {
    /// Opens or creates `path`, dropping any torn final line.
    pub fn open(path: &Path) -> Result<Self> {
        let records = if path.exists() {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            let records = parse_journal(&text)?;
            if !text.is_empty() && !text.ends_with('\n') {
                let keep = text.rfind('\n').map_or(0, |i| i + 1);
                fs::write(path, &text[..keep]).map_err(|e| Error::io(path, e))?;
            }
            records
        } else {
            Vec::new()
        };
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| Error::io(path, e))?;
        Ok(Self {
            path: path.to_path_buf(),
            writer: BufWriter::new(file),
            done: records.iter().map(|r| r.case_id.clone()).collect(),
            records,
        })
    }

    pub fn contains(&self, case_id: &str) -> bool {
        self.done.contains(case_id)
    }

    pub fn records(&self) -> &[ExperimentRecord] {
        &self.records
    }

    /// Appends and flushes; records whose case id is already present are skipped.
    pub fn append(&mut self, records: &[ExperimentRecord]) -> Result<()> {
        for rec in records {
            if !self.done.insert(rec.case_id.clone()) {
                continue;
            }
            let line = serde_json::to_string(rec)?;
            writeln!(self.writer, "{line}").map_err(|e| Error::io(&self.path, e))?;
            self.records.push(rec.clone());
        }
        self.writer.flush().map_err(|e| Error::io(&self.path, e))
    }
}

#[cfg(test)]
pub(crate) fn sample_record(case_id: &str) -> ExperimentRecord {
    ExperimentRecord {
        schema_version: RECORD_SCHEMA_VERSION,
        case_id: case_id.to_string(),
        topology: "complete".into(),
        seed: 0,
        n_buses: 3,
        num_lines: 3,
        signature_key: "3".into(),
        avg_clique_size: 3.0,
        topology_class: "BlockNetwork".into(),
        num_pv: 0,
        num_load: 2,
        num_zero_injection: 0,
        num_paths: 16,
        num_finite_complex: 6,
        num_real: 4,
        num_at_infinity: 10,
        num_singular: 0,
        num_failed: 0,
        num_path_jumps: 0,
        attempts: 1,
        bezout: 16,
        kappa_n: 6,
        topology_bound: Some(6),
        is_conjecture: false,
        bound_respected: Some(true),
        runtime_ms: 1,
        solver_config_digest: "abc".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn append_and_resume() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("j.jsonl");
        let mut j = Journal::open(&path).unwrap();
        j.append(&[sample_record("a"), sample_record("b"), sample_record("a")]).unwrap();
        drop(j);
        let j = Journal::open(&path).unwrap();
        assert!(j.contains("a") && j.contains("b"));
        assert_eq!(read_journal(&path).unwrap().len(), 2);
    }

    #[test]
    fn torn_line_is_dropped() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("j.jsonl");
        let good = serde_json::to_string(&sample_record("a")).unwrap();
        fs::write(&path, format!("{good}\n{{\"schema_ver")).unwrap();
        let mut j = Journal::open(&path).unwrap();
        assert_eq!(j.records().len(), 1);
        j.append(&[sample_record("b")]).unwrap();
        assert_eq!(read_journal(&path).unwrap().len(), 2);
    }

    #[test]
    fn wrong_schema_version_rejected() {
        let mut rec = sample_record("a");
        rec.schema_version = 99;
        let line = serde_json::to_string(&rec).unwrap() + "\n";
        assert!(matches!(parse_journal(&line), Err(Error::Journal(_))));
    }
}
