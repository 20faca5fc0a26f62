//! `pfroots`: all power flow solutions of small networks, their clique
//! structure, and solution-count bounds.
//!
//! Exit codes: 0 success, 1 usage error, 2 model or runtime error, 3 a
//! single-case solve that could not be certified.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pfroots::bounds::bound_for;
use pfroots::cliques::{clique_graph, decompose, maximal_cliques};
use pfroots::graph::Graph;
use pfroots::harness::{
    aggregate_journal, analyze_case, fig1_csv, reference_topology, run_experiment, sweep_small_topologies,
    verify_reference_topologies, ExperimentSpec, Journal, ReportStatus, TopologySource,
};
use pfroots::homotopy::{filter_real, TrackerConfig};
use pfroots::pfmodel::{build_pf_system, recover_outputs, Network};

const EXIT_USAGE: u8 = 1;
const EXIT_MODEL: u8 = 2;
const EXIT_UNCERTIFIED: u8 = 3;

/// Largest bus count run without `--allow-large`.
const DEFAULT_MAX_BUSES: usize = 5;

#[derive(Parser, Debug)]
#[command(name = "pfroots", version, about = "All power flow solutions by homotopy continuation")]
struct Cli {
    /// Base seed for case generation and path tracking.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Experiment journal (JSON lines).
    #[arg(long, global = true, default_value = "journal.jsonl")]
    journal: PathBuf,
    /// Tracker configuration as JSON; missing fields take defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate random networks as JSON files.
    Gen {
        #[arg(long)]
        buses: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        topo: TopologyArgs,
    },
    /// Find all solutions of one network.
    Solve {
        network: PathBuf,
        /// Print the full result as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Maximal cliques, clique graph and blocks of a network or edge list.
    Cliques { input: PathBuf },
    /// Solution-count bounds of a network or edge list.
    Bounds { input: PathBuf },
    /// Generate, solve and journal a batch of cases.
    Experiment {
        #[arg(long)]
        buses: usize,
        /// Cases per batch, or per topology with `--sweep`.
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[command(flatten)]
        topo: TopologyArgs,
        /// Run every connected topology on `--buses` (at most 5) nodes.
        #[arg(long)]
        sweep: bool,
        /// Permit more than five buses (4^(n-1) paths per case).
        #[arg(long)]
        allow_large: bool,
    },
    /// Aggregate the journal into per-signature maxima.
    Report {
        /// Write the plotting CSV here.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Check cliques, classes and bounds of the built-in reference topologies.
    VerifyPaper {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Debug)]
struct TopologyArgs {
    #[arg(long, value_enum, default_value_t = TopologyKind::Random)]
    topology: TopologyKind,
    /// Named reference topology, with `--topology reference`.
    #[arg(long)]
    reference: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TopologyKind {
    Random,
    Complete,
    Reference,
}

impl TopologyArgs {
    fn source(&self) -> Result<TopologySource> {
        Ok(match self.topology {
            TopologyKind::Random => TopologySource::Random,
            TopologyKind::Complete => TopologySource::Complete,
            TopologyKind::Reference => {
                let Some(name) = &self.reference else {
                    bail!(UsageError("--topology reference needs --reference NAME".into()));
                };
                let r = reference_topology(name)
                    .ok_or_else(|| UsageError(format!("unknown reference topology {name}")))?;
                TopologySource::Fixed {
                    label: r.name.to_string(),
                    graph: r.graph,
                }
            }
        })
    }
}

#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::from(EXIT_MODEL)
            }
        }
    }
}

fn tracker_config(cli: &Cli) -> Result<TrackerConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => TrackerConfig::default(),
    };
    cfg.seed = cfg.seed.wrapping_add(cli.seed);
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    match &cli.command {
        Command::Gen { buses, count, out, topo } => gen(&cli, *buses, *count, out, topo),
        Command::Solve { network, json } => solve(&cli, network, *json),
        Command::Cliques { input } => cliques(input),
        Command::Bounds { input } => bounds(input),
        Command::Experiment {
            buses,
            count,
            topo,
            sweep,
            allow_large,
        } => experiment(&cli, *buses, *count, topo, *sweep, *allow_large),
        Command::Report { csv, json } => report(&cli, csv.as_deref(), *json),
        Command::VerifyPaper { json } => verify(*json),
    }
}

fn gen(cli: &Cli, buses: usize, count: usize, out: &Path, topo: &TopologyArgs) -> Result<ExitCode> {
    let source = topo.source()?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let spec = ExperimentSpec::random(buses, count, cli.seed).with_topology(source);
    for seed in cli.seed..cli.seed + count as u64 {
        let net = spec.network(seed)?;
        let path = out.join(format!("{}.json", spec.case_id(seed)));
        fs::write(&path, net.to_json()).with_context(|| format!("writing {}", path.display()))?;
        println!("{}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn solve(cli: &Cli, path: &Path, json: bool) -> Result<ExitCode> {
    let cfg = tracker_config(cli)?;
    let net = Network::load(path)?;
    let (record, sols) = analyze_case(&net.name, "file", &net, &cfg)?;
    let system = build_pf_system(&net)?;
    let real = filter_real(&system, &sols, cfg.real_tol);
    if json {
        let outputs = real
            .iter()
            .map(|s| recover_outputs(&net, s))
            .collect::<pfroots::Result<Vec<_>>>()?;
        let doc = serde_json::json!({
            "record": record,
            "variables": system.var_names(),
            "finite": sols.finite.iter().map(|s| s.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "real": real,
            "real_outputs": outputs,
        });
        println!("{}", serde_json::to_string_pretty(&doc)?);
    } else {
        println!("network      {} ({} buses, {} lines)", net.name, record.n_buses, record.num_lines);
        println!("paths        {}", record.num_paths);
        println!("finite       {}", record.num_finite_complex);
        println!("real         {}", record.num_real);
        println!("at infinity  {}", record.num_at_infinity);
        println!("singular     {}", record.num_singular);
        println!("failed       {}", record.num_failed);
        println!("kappa_n      {}", record.kappa_n);
        match record.topology_bound {
            Some(b) => println!(
                "bound        {b} ({}{})",
                record.topology_class,
                if record.is_conjecture { ", conjectured max" } else { "" }
            ),
            None => println!("bound        none ({})", record.topology_class),
        }
        for (k, s) in real.iter().enumerate() {
            let outs = recover_outputs(&net, s)?;
            let volts: Vec<String> = outs.iter().map(|o| format!("{:.4}∠{:.2}°", o.vm, o.va_deg)).collect();
            println!("real #{k:<3}  {}", volts.join("  "));
        }
    }
    if !sols.is_certified() {
        eprintln!(
            "warning: not certified ({} failed paths, {} path jumps after {} attempts)",
            sols.num_failed, sols.num_path_jumps, sols.attempts
        );
        return Ok(ExitCode::from(EXIT_UNCERTIFIED));
    }
    Ok(ExitCode::SUCCESS)
}

/// Network JSON (by extension or a leading `{`) or edge-list text.
fn load_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let is_json = path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{');
    if is_json {
        Ok(Network::from_json(&text)?.graph())
    } else {
        Ok(text.parse()?)
    }
}

fn cliques(path: &Path) -> Result<ExitCode> {
    let g = load_graph(path)?;
    let cs = maximal_cliques(&g);
    println!("signature    {}", cs.signature_key());
    println!("avg size     {:.4}", cs.avg_size);
    for (k, c) in cs.cliques.iter().enumerate() {
        println!("C{:<3}         {:?}", k + 1, c);
    }
    for e in clique_graph(&cs).edges {
        println!("C{} - C{}      shares {}", e.i + 1, e.j + 1, e.shared_buses);
    }
    for b in decompose(&g, &cs) {
        println!("block        {:?} {:?}", b.nodes, b.kind);
    }
    Ok(ExitCode::SUCCESS)
}

fn bounds(path: &Path) -> Result<ExitCode> {
    let g = load_graph(path)?;
    let r = bound_for(&g)?;
    println!("class        {}", r.topology_class);
    println!("bezout       {}", r.bezout);
    println!("kappa_n      {}", r.kappa_n);
    match r.topology_bound {
        Some(b) => println!("bound        {b}{}", if r.is_conjecture { " (conjectured max)" } else { "" }),
        None => println!("bound        none"),
    }
    for b in &r.per_block_detail {
        let f = b.factor.map_or("-".to_string(), |f| f.to_string());
        println!("block        {:<12} {:?} {f}", b.signature_key, b.kind);
    }
    Ok(ExitCode::SUCCESS)
}

fn experiment(
    cli: &Cli,
    buses: usize,
    count: usize,
    topo: &TopologyArgs,
    sweep: bool,
    allow_large: bool,
) -> Result<ExitCode> {
    if count == 0 {
        bail!(UsageError("--count must be at least 1".into()));
    }
    if buses > DEFAULT_MAX_BUSES && !allow_large {
        bail!(UsageError(format!("{buses} buses needs --allow-large")));
    }
    let cfg = tracker_config(cli)?;
    let mut journal = Journal::open(&cli.journal)?;
    let records = if sweep {
        sweep_small_topologies(buses, count, cli.seed, &cfg, Some(&mut journal))?
    } else {
        let spec = ExperimentSpec::random(buses, count, cli.seed).with_topology(topo.source()?);
        run_experiment(&spec, &cfg, Some(&mut journal))?
    };
    let uncertified = records.iter().filter(|r| !r.is_certified()).count();
    let max = records.iter().map(|r| r.num_finite_complex).max().unwrap_or(0);
    println!(
        "{} cases, max finite {max}, {uncertified} uncertified, journal {}",
        records.len(),
        cli.journal.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn report(cli: &Cli, csv: Option<&Path>, json: bool) -> Result<ExitCode> {
    let rep = aggregate_journal(&cli.journal)?;
    if let Some(path) = csv {
        pfroots::harness::export_fig1_csv(&rep, path)?;
    }
    if json {
        println!("{}", serde_json::to_string_pretty(&rep)?);
        return Ok(ExitCode::SUCCESS);
    }
    if rep.status == ReportStatus::Empty {
        println!("no certified records ({} excluded)", rep.excluded_uncertified);
        return Ok(ExitCode::SUCCESS);
    }
    println!(
        "{} records, {} uncertified excluded, config {}",
        rep.total_records,
        rep.excluded_uncertified,
        rep.solver_config_digest.as_deref().unwrap_or("-")
    );
    print!("{}", fig1_csv(&rep));
    for row in &rep.rows {
        for c in &row.counterexamples {
            println!("conjecture counterexample: {c} ({} > {:?})", row.max_num_finite_complex, row.applicable_bound);
        }
        for c in &row.proven_violations {
            println!("proven bound violated: {c}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(json: bool) -> Result<ExitCode> {
    let checks = verify_reference_topologies();
    if json {
        println!("{}", serde_json::to_string_pretty(&checks)?);
    } else {
        for c in &checks {
            let bound = c.bound.map_or("none".to_string(), |b| b.to_string());
            println!(
                "{:<4} {:<24} {:<10} {:<20} bound {:<6} kappa_n {}{}",
                if c.passed() { "ok" } else { "FAIL" },
                c.name,
                c.signature,
                c.class.as_str(),
                bound,
                c.kappa_n,
                if c.passed() { String::new() } else { format!("  [{}]", c.mismatches.join("; ")) }
            );
        }
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    if failed > 0 {
        eprintln!("{failed} reference topologies mismatched");
        return Ok(ExitCode::from(EXIT_MODEL));
    }
    Ok(ExitCode::SUCCESS)
}
