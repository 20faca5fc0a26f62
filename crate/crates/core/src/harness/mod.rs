//! Experiment orchestration: generate cases, solve them, compare the counts
//! with the topology bounds, and journal one record per case.

mod aggregate;
mod journal;
mod reference;

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

pub use aggregate::{aggregate, export_fig1_csv, fig1_csv, AggregateReport, ReportStatus, SignatureRow, FIG1_CSV_HEADER};
pub use journal::{parse_journal, read_journal, ExperimentRecord, Journal, RECORD_SCHEMA_VERSION};
pub use reference::{reference_topologies, reference_topology, verify_reference_topologies, ReferenceCheck, ReferenceTopology};

use crate::bounds::bound_for;
use crate::casegen::{enumerate_small_topologies, generate_case, generate_case_on, GenConfig};
use crate::cliques::maximal_cliques;
use crate::error::Result;
use crate::graph::Graph;
use crate::homotopy::{solve_all, SolutionSet, TrackerConfig};
use crate::pfmodel::{build_pf_system, BusKind, Network};

/// Where a batch's topologies come from.
#[derive(Clone, Debug)]
pub enum TopologySource {
    /// Fresh random topology per case.
    Random,
    /// Complete graph on `n_buses`.
    Complete,
    /// Fixed graph under a label that becomes part of the case id.
    Fixed { label: String, graph: Graph },
}

impl TopologySource {
    fn label(&self) -> &str {
        match self {
            Self::Random => "random",
            Self::Complete => "complete",
            Self::Fixed { label, .. } => label,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub n_buses: usize,
    pub count: usize,
    pub base_seed: u64,
    pub topology: TopologySource,
    pub gen: GenConfig,
}

impl ExperimentSpec {
    pub fn random(n_buses: usize, count: usize, base_seed: u64) -> Self {
        Self {
            n_buses,
            count,
            base_seed,
            topology: TopologySource::Random,
            gen: GenConfig::default(),
        }
    }

    pub fn with_topology(mut self, topology: TopologySource) -> Self {
        if let TopologySource::Fixed { graph, .. } = &topology {
            self.n_buses = graph.num_nodes();
        }
        self.topology = topology;
        self
    }

    pub fn case_id(&self, seed: u64) -> String {
        format!("{}-n{}-s{seed}", self.topology.label(), self.n_buses)
    }

    /// The network of case `seed`.
    pub fn network(&self, seed: u64) -> Result<Network> {
        let gen = GenConfig {
            n_buses: self.n_buses,
            seed,
            ..self.gen.clone()
        };
        match &self.topology {
            TopologySource::Random => generate_case(&gen),
            TopologySource::Complete => generate_case_on(&Graph::complete(self.n_buses), &gen, "complete"),
            TopologySource::Fixed { label, graph } => generate_case_on(graph, &gen, label),
        }
    }
}

/// Solution set plus record for one network.
pub fn analyze_case(
    case_id: &str,
    topology: &str,
    net: &Network,
    cfg: &TrackerConfig,
) -> Result<(ExperimentRecord, SolutionSet)> {
    let started = Instant::now();
    let g = net.graph();
    let cs = maximal_cliques(&g);
    let bounds = bound_for(&g)?;
    let system = build_pf_system(net)?;
    let sols = solve_all(&system, cfg)?;
    let certified = sols.is_certified();
    let count = |pred: &dyn Fn(&crate::pfmodel::Bus) -> bool| net.buses.iter().filter(|b| pred(b)).count();
    let record = ExperimentRecord {
        schema_version: RECORD_SCHEMA_VERSION,
        case_id: case_id.to_string(),
        topology: topology.to_string(),
        seed: net.seed.unwrap_or(cfg.seed),
        n_buses: net.num_buses(),
        num_lines: g.num_edges(),
        signature_key: cs.signature_key(),
        avg_clique_size: cs.avg_size,
        topology_class: bounds.topology_class.to_string(),
        num_pv: count(&|b| b.kind == BusKind::PV),
        num_load: count(&|b| b.kind == BusKind::PQ && (b.p != 0.0 || b.q != 0.0)),
        num_zero_injection: count(&|b| b.kind == BusKind::PQ && b.p == 0.0 && b.q == 0.0),
        num_paths: sols.num_paths,
        num_finite_complex: sols.finite.len(),
        num_real: sols.num_real(),
        num_at_infinity: sols.num_at_infinity,
        num_singular: sols.num_singular,
        num_failed: sols.num_failed,
        num_path_jumps: sols.num_path_jumps,
        attempts: sols.attempts,
        bezout: bounds.bezout,
        kappa_n: bounds.kappa_n,
        topology_bound: bounds.topology_bound,
        is_conjecture: bounds.is_conjecture,
        bound_respected: bounds
            .topology_bound
            .filter(|_| certified)
            .map(|b| sols.finite.len() as u64 <= b),
        runtime_ms: started.elapsed().as_millis() as u64,
        solver_config_digest: cfg.digest(),
    };
    Ok((record, sols))
}

/// Runs seeds `base_seed .. base_seed + count`. With a journal, cases it
/// already holds are skipped and new records are appended in seed order as
/// each parallel chunk completes. Returns the records of every seed in the
/// batch, journaled or new.
///
/// The tracker seed of each case is `cfg.seed + case seed`.
pub fn run_experiment(
    spec: &ExperimentSpec,
    cfg: &TrackerConfig,
    mut journal: Option<&mut Journal>,
) -> Result<Vec<ExperimentRecord>> {
    cfg.validate()?;
    let seeds: Vec<u64> = (0..spec.count as u64).map(|i| spec.base_seed + i).collect();
    let pending: Vec<u64> = seeds
        .iter()
        .copied()
        .filter(|&s| journal.as_ref().is_none_or(|j| !j.contains(&spec.case_id(s))))
        .collect();
    let chunk = 2 * rayon::current_num_threads().max(1);
    let mut fresh = Vec::with_capacity(pending.len());
    for part in pending.chunks(chunk) {
        let records = part
            .par_iter()
            .map(|&seed| {
                let net = spec.network(seed)?;
                let case_cfg = TrackerConfig {
                    seed: cfg.seed.wrapping_add(seed),
                    ..cfg.clone()
                };
                analyze_case(&spec.case_id(seed), spec.topology.label(), &net, &case_cfg).map(|(r, _)| r)
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(j) = journal.as_deref_mut() {
            j.append(&records)?;
        }
        fresh.extend(records);
    }
    let mut all: Vec<ExperimentRecord> = match journal {
        Some(j) => j
            .records()
            .iter()
            .filter(|r| seeds.iter().any(|&s| r.case_id == spec.case_id(s)))
            .cloned()
            .collect(),
        None => fresh,
    };
    all.sort_by_key(|r| r.seed);
    Ok(all)
}

/// Every connected topology on `n ≤ 5` buses, each with `seeds_per_topology`
/// parameter draws.
pub fn sweep_small_topologies(
    n: usize,
    seeds_per_topology: usize,
    base_seed: u64,
    cfg: &TrackerConfig,
    mut journal: Option<&mut Journal>,
) -> Result<Vec<ExperimentRecord>> {
    let mut out = Vec::new();
    for (k, graph) in enumerate_small_topologies(n)?.into_iter().enumerate() {
        if graph.num_nodes() < 2 {
            continue;
        }
        let spec = ExperimentSpec::random(n, seeds_per_topology, base_seed).with_topology(TopologySource::Fixed {
            label: format!("class{k}"),
            graph,
        });
        out.extend(run_experiment(&spec, cfg, journal.as_deref_mut())?);
    }
    Ok(out)
}

/// Reads a journal and aggregates it.
pub fn aggregate_journal(path: &Path) -> Result<AggregateReport> {
    aggregate(&read_journal(path)?)
}
