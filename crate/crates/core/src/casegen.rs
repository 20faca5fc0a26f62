//! Seeded random test networks.
//!
//! Draw order is fixed so a case is reproducible from its seed: the line
//! count, the spanning tree walk and the extra lines first; then every
//! branch in index order (R, X, b, transformer flag, τ, θ); then every bus
//! in id order (generator flag, then either setpoint and dispatch or the
//! load flag and load components); finally the forced slack if no bus drew
//! a generator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::pfmodel::{Branch, Bus, BusKind, Network};

/// System base for converting MW/MVAr to per unit.
pub const BASE_MVA: f64 = 100.0;

/// Name recorded in generated networks' `rng` field.
pub const RNG_NAME: &str = "ChaCha8Rng/rand_chacha-0.9";

/// Smallest accepted series reactance magnitude; smaller draws are redrawn.
pub const MIN_REACTANCE: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gaussian {
    pub mean: f64,
    pub std: f64,
}

impl Gaussian {
    pub const fn new(mean: f64, std: f64) -> Self {
        Self { mean, std }
    }

    fn sample(&self, rng: &mut impl Rng) -> f64 {
        Normal::new(self.mean, self.std)
            .expect("validated standard deviation")
            .sample(rng)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    pub n_buses: usize,
    pub seed: u64,
    /// Per unit.
    pub r: Gaussian,
    pub x: Gaussian,
    pub b: Gaussian,
    pub transformer_prob: f64,
    pub tau: Gaussian,
    /// Degrees.
    pub theta_deg: Gaussian,
    pub generator_prob: f64,
    pub vset_range: (f64, f64),
    /// MW.
    pub pg: Gaussian,
    pub load_prob: f64,
    /// MW.
    pub pd: Gaussian,
    /// MVAr.
    pub qd: Gaussian,
    /// Constant-impedance load conductance, per unit.
    pub pz: Gaussian,
    /// Constant-impedance load susceptance magnitude, per unit.
    pub qz: Gaussian,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            n_buses: 4,
            seed: 0,
            r: Gaussian::new(0.03, 0.03),
            x: Gaussian::new(0.10, 0.03),
            b: Gaussian::new(0.005, 0.001),
            transformer_prob: 0.08,
            tau: Gaussian::new(1.0, 0.02),
            theta_deg: Gaussian::new(0.0, 3.0),
            generator_prob: 0.30,
            vset_range: (0.90, 1.10),
            pg: Gaussian::new(200.0, 30.0),
            load_prob: 0.70,
            pd: Gaussian::new(50.0, 20.0),
            qd: Gaussian::new(30.0, 20.0),
            pz: Gaussian::new(0.1, 0.03),
            qz: Gaussian::new(0.1, 0.05),
        }
    }
}

impl GenConfig {
    pub fn new(n_buses: usize, seed: u64) -> Self {
        Self {
            n_buses,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_buses < 2 {
            return Err(Error::Config("n_buses must be at least 2".into()));
        }
        let gaussians = [
            self.r, self.x, self.b, self.tau, self.theta_deg, self.pg, self.pd, self.qd, self.pz, self.qz,
        ];
        if gaussians.iter().any(|g| !(g.std >= 0.0 && g.std.is_finite() && g.mean.is_finite())) {
            return Err(Error::Config("Gaussian parameters must be finite with std >= 0".into()));
        }
        let probs = [self.transformer_prob, self.generator_prob, self.load_prob];
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::Config("probabilities must lie in [0, 1]".into()));
        }
        let (lo, hi) = self.vset_range;
        if !(0.0 < lo && lo <= hi) {
            return Err(Error::Config("vset range must satisfy 0 < lo <= hi".into()));
        }
        Ok(())
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// Random spanning tree of `K_n` from the first-entrance edges of a
/// simple random walk, which is uniform over all `n^(n−2)` labeled trees.
pub fn random_spanning_tree(n: usize, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    assert!(n >= 2, "a spanning tree needs at least two nodes");
    let mut visited = vec![false; n + 1];
    let mut current = rng.random_range(1..=n);
    visited[current] = true;
    let mut edges = Vec::with_capacity(n - 1);
    while edges.len() < n - 1 {
        // uniform neighbor of `current` in K_n
        let mut next = rng.random_range(1..n);
        if next >= current {
            next += 1;
        }
        if !visited[next] {
            visited[next] = true;
            edges.push((current.min(next), current.max(next)));
        }
        current = next;
    }
    edges
}

/// Inclusive line-count range: `n + 1 ..= (n² + n)/2`, clamped to the
/// simple-graph maximum `n(n − 1)/2`.
pub fn line_count_range(n: usize) -> (usize, usize) {
    let simple_max = n * (n - 1) / 2;
    let hi = ((n * n + n) / 2).min(simple_max);
    let lo = (n + 1).min(hi);
    (lo, hi)
}

/// Random connected simple graph: a uniform spanning tree plus random
/// extra lines until the drawn line count is reached.
pub fn generate_topology(n: usize, rng: &mut impl Rng) -> Graph {
    let (lo, hi) = line_count_range(n);
    let lines = rng.random_range(lo..=hi);
    let mut g = Graph::new(n);
    for (u, v) in random_spanning_tree(n, rng) {
        g.add_edge(u, v);
    }
    while g.num_edges() < lines {
        let u = rng.random_range(1..=n);
        let v = rng.random_range(1..=n);
        if u != v {
            g.add_edge(u, v);
        }
    }
    g
}

/// Electrical parameters of one branch.
pub fn sample_branch(from: usize, to: usize, cfg: &GenConfig, rng: &mut impl Rng) -> Branch {
    let r = cfg.r.sample(rng).max(0.0);
    let mut x = cfg.x.sample(rng);
    while x < MIN_REACTANCE {
        x = cfg.x.sample(rng);
    }
    let b = cfg.b.sample(rng);
    let (tau, theta_deg) = if rng.random_bool(cfg.transformer_prob) {
        let mut tau = cfg.tau.sample(rng);
        while tau <= 0.0 {
            tau = cfg.tau.sample(rng);
        }
        (tau, cfg.theta_deg.sample(rng))
    } else {
        (1.0, 0.0)
    };
    Branch { from, to, r, x, b, tau, theta_deg }
}

/// Role drawn for one bus, in native units (MW, MVAr, per unit).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BusDraw {
    Generator { vset: f64, pg_mw: f64 },
    Load { pd_mw: f64, qd_mvar: f64, pz: f64, qz: f64 },
    Empty,
}

fn sample_generator(cfg: &GenConfig, rng: &mut impl Rng) -> BusDraw {
    let (lo, hi) = cfg.vset_range;
    let vset = if lo == hi { lo } else { rng.random_range(lo..=hi) };
    BusDraw::Generator {
        vset,
        pg_mw: cfg.pg.sample(rng),
    }
}

pub fn sample_bus(cfg: &GenConfig, rng: &mut impl Rng) -> BusDraw {
    if rng.random_bool(cfg.generator_prob) {
        sample_generator(cfg, rng)
    } else if rng.random_bool(cfg.load_prob) {
        BusDraw::Load {
            pd_mw: cfg.pd.sample(rng),
            qd_mvar: cfg.qd.sample(rng),
            pz: cfg.pz.sample(rng),
            qz: cfg.qz.sample(rng),
        }
    } else {
        BusDraw::Empty
    }
}

/// Random case on the drawn topology.
pub fn generate_case(cfg: &GenConfig) -> Result<Network> {
    cfg.validate()?;
    let mut rng = cfg.rng();
    let g = generate_topology(cfg.n_buses, &mut rng);
    build_case(&g, cfg, &mut rng, format!("rand{}-s{}", cfg.n_buses, cfg.seed))
}

/// Random electrical parameters on a fixed topology (`cfg.n_buses` is
/// ignored in favour of the graph's node count).
pub fn generate_case_on(g: &Graph, cfg: &GenConfig, name: &str) -> Result<Network> {
    let cfg = GenConfig {
        n_buses: g.num_nodes(),
        ..cfg.clone()
    };
    cfg.validate()?;
    if !g.is_connected() {
        return Err(Error::Model("topology is disconnected".into()));
    }
    let mut rng = cfg.rng();
    build_case(g, &cfg, &mut rng, format!("{name}-s{}", cfg.seed))
}

fn build_case(g: &Graph, cfg: &GenConfig, rng: &mut ChaCha8Rng, name: String) -> Result<Network> {
    let branches: Vec<Branch> = g.edges().map(|(u, v)| sample_branch(u, v, cfg, rng)).collect();
    let n = g.num_nodes();
    let mut draws: Vec<BusDraw> = (0..n).map(|_| sample_bus(cfg, rng)).collect();
    if !draws.iter().any(|d| matches!(d, BusDraw::Generator { .. })) {
        let forced = rng.random_range(0..n);
        draws[forced] = sample_generator(cfg, rng);
    }
    let mut slack_assigned = false;
    let buses = draws
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let id = i + 1;
            match *d {
                BusDraw::Generator { vset, pg_mw } => {
                    let kind = if slack_assigned { BusKind::PV } else { BusKind::Slack };
                    slack_assigned = true;
                    Bus { id, kind, p: pg_mw / BASE_MVA, q: 0.0, vset, gs: 0.0, bs: 0.0 }
                }
                // constant-impedance part consumes pz + j·qz at 1 p.u.: y = pz − j·qz
                BusDraw::Load { pd_mw, qd_mvar, pz, qz } => Bus {
                    id,
                    kind: BusKind::PQ,
                    p: -pd_mw / BASE_MVA,
                    q: -qd_mvar / BASE_MVA,
                    vset: 0.0,
                    gs: pz,
                    bs: -qz,
                },
                BusDraw::Empty => Bus::pq(id, 0.0, 0.0),
            }
        })
        .collect();
    let mut net = Network::new(name, buses, branches)?;
    net.seed = Some(cfg.seed);
    net.rng = Some(RNG_NAME.to_string());
    Ok(net)
}

/// Every connected simple graph on `n ≤ 5` labeled nodes, one per
/// isomorphism class. Each representative is the class member whose edge
/// bitmask is smallest, found by brute force over all relabelings.
pub fn enumerate_small_topologies(n: usize) -> Result<Vec<Graph>> {
    if n > 5 {
        return Err(Error::Config("exhaustive enumeration is limited to n <= 5".into()));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|u| (u + 1..=n).map(move |v| (u, v))).collect();
    let index_of = |u: usize, v: usize| pairs.iter().position(|&p| p == (u.min(v), u.max(v))).unwrap();
    let perms = permutations(n);
    let mut classes: Vec<u32> = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let g = Graph::from_edges(n, &edges)?;
        if !g.is_connected() {
            continue;
        }
        let canonical = perms
            .iter()
            .map(|p| {
                edges
                    .iter()
                    .fold(0u32, |acc, &(u, v)| acc | 1 << index_of(p[u - 1], p[v - 1]))
            })
            .min()
            .unwrap();
        if !classes.contains(&canonical) {
            classes.push(canonical);
        }
    }
    classes.sort_unstable();
    Ok(classes
        .into_iter()
        .map(|mask| {
            let edges: Vec<(usize, usize)> = pairs
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            Graph::from_edges(n, &edges).expect("valid edges")
        })
        .collect())
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v + 1);
                rec(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}
