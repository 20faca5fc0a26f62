//! Bus/branch network model and its rectangular-coordinate power flow system.
//!
//! All electrical quantities are per unit on a 100 MVA base. Bus injections
//! are *net*: generation minus constant-power load, so a load has negative
//! `p`/`q`. Constant-impedance load components live in the bus shunt
//! `gs + j·bs`. Transformer taps sit on the `from` side; the phase shift is
//! stored in degrees.
//!
//! The slack bus voltage is substituted as constants (`Vd = vset`, `Vq = 0`),
//! leaving `2n − 2` real unknowns `(Vd_i, Vq_i)` for the non-slack buses.

use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::polysys::{inf_norm, Monomial, Polynomial, PolynomialSystem};

pub const NETWORK_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BusKind {
    PQ,
    PV,
    Slack,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bus {
    pub id: usize,
    pub kind: BusKind,
    /// Net active injection (PQ, PV). Ignored for the slack bus.
    #[serde(default)]
    pub p: f64,
    /// Net reactive injection (PQ only).
    #[serde(default)]
    pub q: f64,
    /// Voltage magnitude setpoint (PV, slack).
    #[serde(default)]
    pub vset: f64,
    #[serde(default)]
    pub gs: f64,
    #[serde(default)]
    pub bs: f64,
}

impl Bus {
    pub fn pq(id: usize, p: f64, q: f64) -> Self {
        Self { id, kind: BusKind::PQ, p, q, vset: 0.0, gs: 0.0, bs: 0.0 }
    }

    pub fn pv(id: usize, p: f64, vset: f64) -> Self {
        Self { id, kind: BusKind::PV, p, q: 0.0, vset, gs: 0.0, bs: 0.0 }
    }

    pub fn slack(id: usize, vset: f64) -> Self {
        Self { id, kind: BusKind::Slack, p: 0.0, q: 0.0, vset, gs: 0.0, bs: 0.0 }
    }
}

fn default_tau() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub from: usize,
    pub to: usize,
    pub r: f64,
    pub x: f64,
    /// Total line charging; half is placed at each end.
    #[serde(default)]
    pub b: f64,
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default)]
    pub theta_deg: f64,
}

impl Branch {
    pub fn line(from: usize, to: usize, r: f64, x: f64, b: f64) -> Self {
        Self { from, to, r, x, b, tau: 1.0, theta_deg: 0.0 }
    }

    pub fn is_transformer(&self) -> bool {
        self.tau != 1.0 || self.theta_deg != 0.0
    }
}

/// Network in the versioned JSON schema. Construct through [`Network::new`]
/// or [`Network::from_json`] so the invariants are checked.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub version: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Random generator used to produce the case, when generated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rng: Option<String>,
    pub buses: Vec<Bus>,
    pub branches: Vec<Branch>,
}

impl Network {
    pub fn new(name: impl Into<String>, mut buses: Vec<Bus>, branches: Vec<Branch>) -> Result<Self> {
        buses.sort_by_key(|b| b.id);
        let net = Self {
            version: NETWORK_SCHEMA_VERSION,
            name: name.into(),
            seed: None,
            rng: None,
            buses,
            branches,
        };
        net.validate()?;
        Ok(net)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut net: Network = serde_json::from_str(text)?;
        if net.version != NETWORK_SCHEMA_VERSION {
            return Err(Error::Model(format!(
                "unsupported network schema version {}",
                net.version
            )));
        }
        net.buses.sort_by_key(|b| b.id);
        net.validate()?;
        Ok(net)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network serializes")
    }

    pub fn num_buses(&self) -> usize {
        self.buses.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.buses.len();
        if n < 2 {
            return Err(Error::Model("a network needs at least two buses".into()));
        }
        for (i, bus) in self.buses.iter().enumerate() {
            if bus.id != i + 1 {
                return Err(Error::Model(format!("bus ids must be 1..={n} without gaps")));
            }
            let finite = [bus.p, bus.q, bus.vset, bus.gs, bus.bs].iter().all(|v| v.is_finite());
            if !finite {
                return Err(Error::Model(format!("bus {}: non-finite quantity", bus.id)));
            }
            if matches!(bus.kind, BusKind::PV | BusKind::Slack) && bus.vset <= 0.0 {
                return Err(Error::Model(format!("bus {}: voltage setpoint must be positive", bus.id)));
            }
        }
        let slacks = self.buses.iter().filter(|b| b.kind == BusKind::Slack).count();
        if slacks != 1 {
            return Err(Error::Model(format!("expected exactly one slack bus, found {slacks}")));
        }
        for (k, br) in self.branches.iter().enumerate() {
            if br.from == 0 || br.to == 0 || br.from > n || br.to > n {
                return Err(Error::Model(format!(
                    "branch {k}: references unknown bus ({} -> {})",
                    br.from, br.to
                )));
            }
            if br.from == br.to {
                return Err(Error::Model(format!("branch {k}: from and to bus are equal")));
            }
            let finite = [br.r, br.x, br.b, br.tau, br.theta_deg].iter().all(|v| v.is_finite());
            if !finite || br.r < 0.0 || br.x == 0.0 || br.tau <= 0.0 {
                return Err(Error::Model(format!(
                    "branch {k}: need finite parameters with r >= 0, x != 0, tau > 0"
                )));
            }
        }
        if !self.graph().is_connected() {
            return Err(Error::Model("network is disconnected".into()));
        }
        Ok(())
    }

    /// Topology with parallel branches collapsed.
    pub fn graph(&self) -> Graph {
        let mut g = Graph::new(self.buses.len());
        for br in &self.branches {
            if br.from != br.to && br.from >= 1 && br.to >= 1 {
                g.add_edge(br.from, br.to);
            }
        }
        g
    }

    pub fn slack_index(&self) -> usize {
        self.buses
            .iter()
            .position(|b| b.kind == BusKind::Slack)
            .expect("validated network has a slack bus")
    }

    /// Zero-based bus indices that carry unknowns, in id order.
    pub fn unknown_buses(&self) -> Vec<usize> {
        let s = self.slack_index();
        (0..self.buses.len()).filter(|&i| i != s).collect()
    }

    pub fn var_names(&self) -> Vec<String> {
        self.unknown_buses()
            .into_iter()
            .flat_map(|i| {
                let id = self.buses[i].id;
                [format!("Vd{id}"), format!("Vq{id}")]
            })
            .collect()
    }

    /// Full complex voltage vector (slack included) from the reduced unknowns.
    pub fn voltages(&self, solution: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.buses.len();
        if solution.len() != 2 * n - 2 {
            return Err(Error::DimensionMismatch { expected: 2 * n - 2, got: solution.len() });
        }
        let s = self.slack_index();
        let mut v = vec![Complex64::new(self.buses[s].vset, 0.0); n];
        for (k, i) in self.unknown_buses().into_iter().enumerate() {
            v[i] = solution[2 * k] + Complex64::i() * solution[2 * k + 1];
        }
        Ok(v)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdmittanceMatrix {
    pub g: DMatrix<f64>,
    pub b: DMatrix<f64>,
}

impl AdmittanceMatrix {
    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn complex(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.dim(), self.dim(), |i, k| Complex64::new(self.g[(i, k)], self.b[(i, k)]))
    }
}

/// Π-model assembly of `Y = G + jB`.
pub fn build_admittance(net: &Network) -> Result<AdmittanceMatrix> {
    let n = net.buses.len();
    let mut y = DMatrix::<Complex64>::zeros(n, n);
    for (k, br) in net.branches.iter().enumerate() {
        if br.from == 0 || br.to == 0 || br.from > n || br.to > n {
            return Err(Error::Model(format!("branch {k}: references unknown bus")));
        }
        let (f, t) = (br.from - 1, br.to - 1);
        let ys = Complex64::new(br.r, br.x).inv();
        let ych = Complex64::new(0.0, br.b / 2.0);
        let tap = Complex64::from_polar(br.tau, br.theta_deg.to_radians());
        y[(f, f)] += (ys + ych) / (br.tau * br.tau);
        y[(t, t)] += ys + ych;
        y[(f, t)] -= ys / tap.conj();
        y[(t, f)] -= ys / tap;
    }
    for (i, bus) in net.buses.iter().enumerate() {
        y[(i, i)] += Complex64::new(bus.gs, bus.bs);
    }
    Ok(AdmittanceMatrix {
        g: y.map(|z| z.re),
        b: y.map(|z| z.im),
    })
}

/// One rectangular voltage component: an unknown or the substituted slack value.
#[derive(Clone, Copy)]
enum Comp {
    Var(usize),
    Const(f64),
}

fn product_term(coeff: f64, a: Comp, b: Comp, nvars: usize) -> Option<Monomial> {
    let mut exps = vec![0u32; nvars];
    let mut c = coeff;
    for comp in [a, b] {
        match comp {
            Comp::Var(j) => exps[j] += 1,
            Comp::Const(v) => c *= v,
        }
    }
    (c != 0.0).then(|| Monomial::new(c, exps))
}

/// Rectangular components `(Vd, Vq)` of every bus in terms of the unknowns.
fn components(net: &Network) -> Vec<(Comp, Comp)> {
    let s = net.slack_index();
    let mut comps = vec![(Comp::Const(net.buses[s].vset), Comp::Const(0.0)); net.buses.len()];
    for (k, i) in net.unknown_buses().into_iter().enumerate() {
        comps[i] = (Comp::Var(2 * k), Comp::Var(2 * k + 1));
    }
    comps
}

/// Active injection polynomial at bus `i`:
/// `Σ_k G_ik (Vd_i Vd_k + Vq_i Vq_k) + B_ik (Vq_i Vd_k − Vd_i Vq_k)`.
fn active_power_poly(y: &AdmittanceMatrix, comps: &[(Comp, Comp)], i: usize, nvars: usize) -> Polynomial {
    let (di, qi) = comps[i];
    let mut p = Vec::new();
    for (k, &(dk, qk)) in comps.iter().enumerate() {
        let (g, b) = (y.g[(i, k)], y.b[(i, k)]);
        p.extend(product_term(g, di, dk, nvars));
        p.extend(product_term(g, qi, qk, nvars));
        p.extend(product_term(b, qi, dk, nvars));
        p.extend(product_term(-b, di, qk, nvars));
    }
    p
}

/// Reactive injection polynomial at bus `i`:
/// `Σ_k G_ik (Vq_i Vd_k − Vd_i Vq_k) − B_ik (Vd_i Vd_k + Vq_i Vq_k)`.
fn reactive_power_poly(y: &AdmittanceMatrix, comps: &[(Comp, Comp)], i: usize, nvars: usize) -> Polynomial {
    let (di, qi) = comps[i];
    let mut p = Vec::new();
    for (k, &(dk, qk)) in comps.iter().enumerate() {
        let (g, b) = (y.g[(i, k)], y.b[(i, k)]);
        p.extend(product_term(g, qi, dk, nvars));
        p.extend(product_term(-g, di, qk, nvars));
        p.extend(product_term(-b, di, dk, nvars));
        p.extend(product_term(-b, qi, qk, nvars));
    }
    p
}

/// Square system of size `2n − 2`: for each non-slack bus in id order, the
/// active balance followed by either the reactive balance (PQ) or the
/// voltage magnitude constraint (PV).
pub fn build_pf_system(net: &Network) -> Result<PolynomialSystem> {
    net.validate()?;
    let y = build_admittance(net)?;
    let nvars = 2 * net.buses.len() - 2;
    let comps = components(net);
    let mut polys = Vec::with_capacity(nvars);
    for (k, i) in net.unknown_buses().into_iter().enumerate() {
        let bus = &net.buses[i];
        let mut p = active_power_poly(&y, &comps, i, nvars);
        p.push(Monomial::constant(-bus.p, nvars));
        polys.push(p);
        match bus.kind {
            BusKind::PQ => {
                let mut q = reactive_power_poly(&y, &comps, i, nvars);
                q.push(Monomial::constant(-bus.q, nvars));
                polys.push(q);
            }
            BusKind::PV => {
                let mut exd = vec![0; nvars];
                exd[2 * k] = 2;
                let mut exq = vec![0; nvars];
                exq[2 * k + 1] = 2;
                polys.push(vec![
                    Monomial::new(1.0, exd),
                    Monomial::new(1.0, exq),
                    Monomial::constant(-bus.vset * bus.vset, nvars),
                ]);
            }
            BusKind::Slack => unreachable!("slack bus carries no unknowns"),
        }
    }
    PolynomialSystem::new(nvars, polys, net.var_names())
        .map_err(|e| Error::Model(format!("power flow system for {:?}: {e}", net.name)))
}

/// ∞-norm of the power flow mismatch at `candidate`.
pub fn residual(net: &Network, candidate: &[Complex64]) -> Result<f64> {
    let sys = build_pf_system(net)?;
    sys.residual_norm(candidate)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BusInjection {
    pub id: usize,
    pub kind: BusKind,
    pub p: f64,
    pub q: f64,
    pub vm: f64,
    pub va_deg: f64,
}

/// Complex power injection `S = V ∘ conj(Y V)` at every bus for a real solution.
///
/// This goes through the complex admittance matrix, not the polynomial
/// system, so it doubles as an independent check of the latter. The slack
/// P/Q and the PV-bus Q are the "output" quantities.
pub fn recover_outputs(net: &Network, solution: &[f64]) -> Result<Vec<BusInjection>> {
    let x: Vec<Complex64> = solution.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let v = net.voltages(&x)?;
    let y = build_admittance(net)?.complex();
    let vv = nalgebra::DVector::from_vec(v.clone());
    let current = &y * &vv;
    Ok(net
        .buses
        .iter()
        .enumerate()
        .map(|(i, bus)| {
            let s = v[i] * current[i].conj();
            BusInjection {
                id: bus.id,
                kind: bus.kind,
                p: s.re,
                q: s.im,
                vm: v[i].norm(),
                va_deg: v[i].arg().to_degrees(),
            }
        })
        .collect())
}

/// Closed-form solutions of the two-bus problem: slack voltage `v` (angle 0)
/// feeding a PQ bus with net injection `p + jq` through `r + jx`, no shunts.
///
/// With load `S_L = −(p + jq)`, `c = Re(S_L·conj(z))`, `d = Im(S_L·conj(z))`
/// and `t = |V₂|²`, the balance reduces to `t² + (2c − v²)t + c² + d² = 0`;
/// then `Vd = (t + c)/v`, `Vq = d/v`. Both roots are returned as
/// `[Vd, Vq]`, complex when the discriminant is negative.
pub fn two_bus_closed_form(v: f64, p: f64, q: f64, r: f64, x: f64) -> ([[Complex64; 2]; 2], f64) {
    let (pl, ql) = (-p, -q);
    let c = pl * r + ql * x;
    let d = ql * r - pl * x;
    let bq = 2.0 * c - v * v;
    let disc = bq * bq - 4.0 * (c * c + d * d);
    let sq = Complex64::new(disc, 0.0).sqrt();
    let roots = [(-bq + sq) / 2.0, (-bq - sq) / 2.0];
    let to_phasor = |t: Complex64| [(t + c) / v, Complex64::new(d / v, 0.0)];
    ([to_phasor(roots[0]), to_phasor(roots[1])], disc)
}

/// Maximum of `|S_computed − S_specified|` over PQ active/reactive and PV
/// active balances for a real solution. Zero up to rounding when the
/// solution is valid.
pub fn balance_mismatch(net: &Network, solution: &[f64]) -> Result<f64> {
    let out = recover_outputs(net, solution)?;
    let mut worst = 0.0f64;
    for (bus, inj) in net.buses.iter().zip(&out) {
        match bus.kind {
            BusKind::PQ => {
                worst = worst.max((inj.p - bus.p).abs()).max((inj.q - bus.q).abs());
            }
            BusKind::PV => {
                worst = worst.max((inj.p - bus.p).abs()).max((inj.vm - bus.vset).abs());
            }
            BusKind::Slack => {}
        }
    }
    Ok(worst)
}

/// ∞-norm helper for complex candidates against a prebuilt system.
pub fn system_residual(sys: &PolynomialSystem, candidate: &[Complex64]) -> Result<f64> {
    Ok(inf_norm(&sys.evaluate(candidate)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    macro_rules! assert_close {
        ($a:expr, $b:expr, $tol:expr) => {{
            let (a, b): (f64, f64) = ($a, $b);
            assert!((a - b).abs() <= $tol, "{a} vs {b} (tol {})", $tol);
        }};
    }

    fn two_bus(p: f64, q: f64, r: f64, x: f64) -> Network {
        Network::new(
            "two-bus",
            vec![Bus::slack(1, 1.0), Bus::pq(2, p, q)],
            vec![Branch::line(1, 2, r, x, 0.0)],
        )
        .unwrap()
    }

    fn triangle_pq(p: f64) -> Network {
        Network::new(
            "tri",
            vec![Bus::slack(1, 1.0), Bus::pq(2, p, -0.1), Bus::pq(3, -0.2, -0.05)],
            vec![
                Branch::line(1, 2, 0.01, 0.1, 0.02),
                Branch::line(2, 3, 0.02, 0.12, 0.0),
                Branch::line(1, 3, 0.03, 0.09, 0.01),
            ],
        )
        .unwrap()
    }

    #[test]
    fn lossless_single_branch_admittance() {
        let y = build_admittance(&two_bus(0.0, 0.0, 0.0, 0.1)).unwrap();
        for (i, k, b) in [(0, 0, -10.0), (0, 1, 10.0), (1, 0, 10.0), (1, 1, -10.0)] {
            assert_close!(y.b[(i, k)], b, 1e-12);
            assert_close!(y.g[(i, k)], 0.0, 1e-12);
        }
    }

    #[test]
    fn lossy_line_with_charging() {
        let net = Network::new(
            "l",
            vec![Bus::slack(1, 1.0), Bus::pq(2, 0.0, 0.0)],
            vec![Branch::line(1, 2, 0.03, 0.10, 0.005)],
        )
        .unwrap();
        let y = build_admittance(&net).unwrap();
        // 1/(0.03 + 0.1j) = (0.03 - 0.1j)/(0.03² + 0.1²), by hand
        let den = 0.03 * 0.03 + 0.10 * 0.10;
        assert_close!(den, 0.0109, 1e-15);
        let (gs, bs) = (0.03 / den, -0.10 / den);
        assert_close!(y.g[(0, 1)], -gs, 1e-12);
        assert_close!(y.b[(0, 1)], -bs, 1e-12);
        assert_close!(y.g[(1, 1)], gs, 1e-12);
        assert_close!(y.b[(1, 1)], bs + 0.0025, 1e-12);
    }

    #[test]
    fn transformer_stamp_is_asymmetric_with_phase_shift() {
        let mut net = two_bus(0.0, 0.0, 0.0, 0.2);
        net.branches[0].tau = 1.05;
        net.branches[0].theta_deg = 10.0;
        let y = build_admittance(&net).unwrap().complex();
        let ys = Complex64::new(0.0, 0.2).inv();
        let t = Complex64::from_polar(1.05, 10f64.to_radians());
        assert!((y[(0, 0)] - ys / (1.05 * 1.05)).norm() < 1e-12);
        assert!((y[(0, 1)] + ys / t.conj()).norm() < 1e-12);
        assert!((y[(1, 0)] + ys / t).norm() < 1e-12);
        assert!((y[(0, 1)] - y[(1, 0)]).norm() > 1e-3);
    }

    #[test]
    fn branch_only_rows_sum_to_zero() {
        let mut net = triangle_pq(0.1);
        for br in &mut net.branches {
            br.b = 0.0;
        }
        let y = build_admittance(&net).unwrap().complex();
        for i in 0..3 {
            let s: Complex64 = (0..3).map(|k| y[(i, k)]).sum();
            assert!(s.norm() < 1e-12);
        }
        // complex-symmetric without transformers
        assert!((&y - y.transpose()).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn unknown_bus_is_model_error() {
        let err = Network::new(
            "bad",
            vec![Bus::slack(1, 1.0), Bus::pq(2, 0.0, 0.0)],
            vec![Branch::line(1, 3, 0.0, 0.1, 0.0)],
        );
        assert!(matches!(err, Err(Error::Model(_))));
    }

    #[test]
    fn invariants_are_enforced() {
        let two_slack = Network::new(
            "x",
            vec![Bus::slack(1, 1.0), Bus::slack(2, 1.0)],
            vec![Branch::line(1, 2, 0.0, 0.1, 0.0)],
        );
        assert!(two_slack.is_err());
        let disconnected = Network::new(
            "x",
            vec![Bus::slack(1, 1.0), Bus::pq(2, 0.0, 0.0), Bus::pq(3, 0.0, 0.0)],
            vec![Branch::line(1, 2, 0.0, 0.1, 0.0)],
        );
        assert!(matches!(disconnected, Err(Error::Model(m)) if m.contains("disconnected")));
        let zero_x = Network::new(
            "x",
            vec![Bus::slack(1, 1.0), Bus::pq(2, 0.0, 0.0)],
            vec![Branch::line(1, 2, 0.0, 0.0, 0.0)],
        );
        assert!(zero_x.is_err());
        let gap = Network::new(
            "x",
            vec![Bus::slack(1, 1.0), Bus::pq(3, 0.0, 0.0)],
            vec![Branch::line(1, 3, 0.0, 0.1, 0.0)],
        );
        assert!(gap.is_err());
    }

    #[test]
    fn three_bus_system_shape() {
        let sys = build_pf_system(&triangle_pq(0.1)).unwrap();
        assert_eq!(sys.num_vars(), 4);
        assert_eq!(sys.degrees(), vec![2, 2, 2, 2]);
        assert_eq!(sys.total_degree().unwrap(), 16);
        assert_eq!(sys.var_names(), &["Vd2", "Vq2", "Vd3", "Vq3"]);
    }

    #[test]
    fn flat_point_solves_zero_injection_network() {
        let net = Network::new(
            "z",
            vec![Bus::slack(1, 1.02), Bus::pq(2, 0.0, 0.0), Bus::pv(3, 0.0, 1.02)],
            vec![
                Branch::line(1, 2, 0.01, 0.1, 0.0),
                Branch::line(2, 3, 0.02, 0.12, 0.0),
                Branch::line(1, 3, 0.03, 0.09, 0.0),
            ],
        )
        .unwrap();
        let flat = [1.02, 0.0, 1.02, 0.0].map(|v| Complex64::new(v, 0.0));
        assert!(residual(&net, &flat).unwrap() < 1e-12);
        let out = recover_outputs(&net, &[1.02, 0.0, 1.02, 0.0]).unwrap();
        assert!(out[0].p.abs() < 1e-12 && out[0].q.abs() < 1e-12);
    }

    #[test]
    fn zero_vector_solves_pure_pq_zero_injection() {
        let mut net = triangle_pq(0.0);
        for b in &mut net.buses[1..] {
            b.p = 0.0;
            b.q = 0.0;
        }
        for br in &mut net.branches {
            br.b = 0.0;
        }
        assert_eq!(residual(&net, &[Complex64::default(); 4]).unwrap(), 0.0);
    }

    #[test]
    fn two_bus_closed_form_satisfies_system() {
        let net = two_bus(-0.5, -0.3, 0.02, 0.1);
        let sys = build_pf_system(&net).unwrap();
        let (roots, disc) = two_bus_closed_form(1.0, -0.5, -0.3, 0.02, 0.1);
        assert!(disc > 0.0);
        for root in roots {
            assert!(sys.residual_norm(&root).unwrap() < 1e-10);
        }
        let perturbed = [roots[0][0] + 1e-3, roots[0][1]];
        assert!(sys.residual_norm(&perturbed).unwrap() > 0.0);
    }

    #[test]
    fn two_bus_slack_output_includes_losses() {
        let (p, q, r, x) = (-0.5, -0.3, 0.02, 0.1);
        let net = two_bus(p, q, r, x);
        let (roots, _) = two_bus_closed_form(1.0, p, q, r, x);
        // high-voltage root has the larger |V2|
        let hv = roots
            .iter()
            .max_by(|a, b| (a[0].norm_sqr() + a[1].norm_sqr()).total_cmp(&(b[0].norm_sqr() + b[1].norm_sqr())))
            .unwrap();
        let sol = [hv[0].re, hv[1].re];
        let out = recover_outputs(&net, &sol).unwrap();
        let v2 = Complex64::new(sol[0], sol[1]);
        let i = (Complex64::new(1.0, 0.0) - v2) / Complex64::new(r, x);
        let loss = i.norm_sqr() * r;
        assert_close!(out[0].p, 0.5 + loss, 1e-10);
        assert_close!(out[1].p, p, 1e-10);
        assert_close!(out[1].q, q, 1e-10);
    }

    #[test]
    fn pv_reactive_output_matches_retyped_pq_system() {
        let net = Network::new(
            "pv",
            vec![Bus::slack(1, 1.0), Bus::pv(2, 0.3, 1.0)],
            vec![Branch::line(1, 2, 0.0, 0.2, 0.0)],
        )
        .unwrap();
        // lossless: P = sin(δ)/x at |V|=1, solve for the angle
        let delta = (0.3f64 * 0.2).asin();
        let sol = [delta.cos(), delta.sin()];
        let out = recover_outputs(&net, &sol).unwrap();
        assert_close!(out[1].p, 0.3, 1e-12);
        let mut as_pq = net.clone();
        as_pq.buses[1] = Bus::pq(2, 0.3, out[1].q);
        let z: Vec<Complex64> = sol.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        assert!(residual(&as_pq, &z).unwrap() < 1e-12);
    }

    #[test]
    fn json_round_trip_and_version_check() {
        let net = triangle_pq(0.1);
        let back = Network::from_json(&net.to_json()).unwrap();
        assert_eq!(back, net);
        let bumped = net.to_json().replace("\"version\": 1", "\"version\": 2");
        assert!(Network::from_json(&bumped).is_err());
    }
}
