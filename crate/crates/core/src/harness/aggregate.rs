//! Per-signature maxima over certified records, and the CSV export used to
//! plot maximum solution counts against average clique size.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::journal::ExperimentRecord;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReportStatus {
    Ok,
    /// No certified records to aggregate.
    Empty,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignatureRow {
    pub n_buses: usize,
    pub signature_key: String,
    pub avg_clique_size: f64,
    /// The shared class name, or `mixed` when topologies disagree.
    pub topology_class: String,
    pub case_count: usize,
    pub max_num_finite_complex: usize,
    pub max_num_real: usize,
    pub kappa_n: u64,
    /// Absent when the rows' topologies carry no bound or disagree on it.
    pub applicable_bound: Option<u64>,
    pub is_conjecture: bool,
    pub bound_attained: bool,
    /// Cases exceeding a conjectured bound.
    pub counterexamples: Vec<String>,
    /// Cases exceeding a proven bound; non-empty means a solver defect.
    pub proven_violations: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub status: ReportStatus,
    pub solver_config_digest: Option<String>,
    pub total_records: usize,
    pub excluded_uncertified: usize,
    /// Sorted by bus count, then average clique size, then key.
    pub rows: Vec<SignatureRow>,
}

/// Groups certified records by `(n_buses, signature_key)`. The result does
/// not depend on record order. Records from different solver
/// configurations are rejected.
pub fn aggregate(records: &[ExperimentRecord]) -> Result<AggregateReport> {
    let mut digests: Vec<&str> = records.iter().map(|r| r.solver_config_digest.as_str()).collect();
    digests.sort_unstable();
    digests.dedup();
    if digests.len() > 1 {
        return Err(Error::Journal(format!(
            "records from {} solver configurations: {}",
            digests.len(),
            digests.join(", ")
        )));
    }
    let certified: Vec<&ExperimentRecord> = records.iter().filter(|r| r.is_certified()).collect();
    let mut groups: BTreeMap<(usize, String), Vec<&ExperimentRecord>> = BTreeMap::new();
    for r in &certified {
        groups.entry((r.n_buses, r.signature_key.clone())).or_default().push(r);
    }
    let mut rows: Vec<SignatureRow> = groups.into_iter().map(|((n, key), rs)| row(n, key, &rs)).collect();
    rows.sort_by(|a, b| {
        (a.n_buses, a.avg_clique_size, &a.signature_key)
            .partial_cmp(&(b.n_buses, b.avg_clique_size, &b.signature_key))
            .expect("finite averages")
    });
    Ok(AggregateReport {
        status: if certified.is_empty() { ReportStatus::Empty } else { ReportStatus::Ok },
        solver_config_digest: digests.first().map(|d| d.to_string()),
        total_records: records.len(),
        excluded_uncertified: records.len() - certified.len(),
        rows,
    })
}

fn row(n_buses: usize, signature_key: String, rs: &[&ExperimentRecord]) -> SignatureRow {
    let first = rs[0];
    let same = |f: &dyn Fn(&ExperimentRecord) -> String| rs.iter().all(|r| f(r) == f(first));
    let topology_class = if same(&|r| r.topology_class.clone()) {
        first.topology_class.clone()
    } else {
        "mixed".to_string()
    };
    let bound_agrees = rs
        .iter()
        .all(|r| r.topology_bound == first.topology_bound && r.is_conjecture == first.is_conjecture);
    let applicable_bound = if bound_agrees { first.topology_bound } else { None };
    let is_conjecture = applicable_bound.is_some() && first.is_conjecture;
    let max_num_finite_complex = rs.iter().map(|r| r.num_finite_complex).max().unwrap_or(0);
    let mut counterexamples = Vec::new();
    let mut proven_violations = Vec::new();
    for r in rs {
        if r.num_finite_complex as u64 > r.kappa_n {
            proven_violations.push(r.case_id.clone());
        } else if let Some(b) = r.topology_bound {
            if r.num_finite_complex as u64 > b {
                if r.is_conjecture {
                    counterexamples.push(r.case_id.clone());
                } else {
                    proven_violations.push(r.case_id.clone());
                }
            }
        }
    }
    counterexamples.sort();
    proven_violations.sort();
    SignatureRow {
        n_buses,
        signature_key,
        avg_clique_size: first.avg_clique_size,
        topology_class,
        case_count: rs.len(),
        max_num_finite_complex,
        max_num_real: rs.iter().map(|r| r.num_real).max().unwrap_or(0),
        kappa_n: first.kappa_n,
        applicable_bound,
        is_conjecture,
        bound_attained: applicable_bound == Some(max_num_finite_complex as u64),
        counterexamples,
        proven_violations,
    }
}

pub const FIG1_CSV_HEADER: &str =
    "signature_key,avg_clique_size,max_complex,max_real,n_buses,kappa_n,applicable_bound,bound_attained";

pub fn fig1_csv(report: &AggregateReport) -> String {
    let mut out = String::from(FIG1_CSV_HEADER);
    out.push('\n');
    for r in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.signature_key,
            r.avg_clique_size,
            r.max_num_finite_complex,
            r.max_num_real,
            r.n_buses,
            r.kappa_n,
            r.applicable_bound.map(|b| b.to_string()).unwrap_or_default(),
            r.bound_attained
        ));
    }
    out
}

pub fn export_fig1_csv(report: &AggregateReport, path: &Path) -> Result<()> {
    fs::write(path, fig1_csv(report)).map_err(|e| Error::io(path, e))
}
