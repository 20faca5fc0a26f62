//! Predictor–corrector tracking of a single homotopy path.
//!
//! Paths are followed in projective space: the affine unknowns `x` are
//! lifted to `X = (x0, x)` restricted to a random affine chart `a·X = 1`.
//! Paths heading to infinity then stay bounded and approach `x0 = 0`,
//! which makes divergence measurable without chasing huge affine norms.
//! Start points and finite endpoints are exchanged in affine coordinates.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::start::unit_complex;
use super::TrackerConfig;
use crate::error::{Error, Result};
use crate::linalg::{condition_number, solve};
use crate::polysys::{inf_norm, PolyMap, PolynomialSystem};

/// Endpoint Jacobians with a larger condition number count as singular.
pub const SINGULAR_CONDITION: f64 = 1e12;

/// `H(x, t) = γ(1 − t)·start(x) + t·target(x)`.
#[derive(Clone, Debug)]
pub struct Homotopy {
    pub start: PolynomialSystem,
    pub target: PolynomialSystem,
    pub gamma: Complex64,
    chart: Vec<Complex64>,
    start_h: PolyMap,
    target_h: PolyMap,
}

impl Homotopy {
    /// `chart_seed` fixes the random projective chart.
    pub fn new(
        start: PolynomialSystem,
        target: PolynomialSystem,
        gamma: Complex64,
        chart_seed: u64,
    ) -> Result<Self> {
        if start.num_vars() != target.num_vars() {
            return Err(Error::DimensionMismatch {
                expected: target.num_vars(),
                got: start.num_vars(),
            });
        }
        if start.degrees() != target.degrees() {
            return Err(Error::InvalidSystem(
                "start and target systems must have equal per-equation degrees".into(),
            ));
        }
        if (gamma.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!("|gamma| = {} is not 1", gamma.norm())));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(chart_seed);
        let chart = (0..=target.num_vars()).map(|_| unit_complex(&mut rng)).collect();
        let start_h = start.map().homogenize();
        let target_h = target.map().homogenize();
        Ok(Self {
            start,
            target,
            gamma,
            chart,
            start_h,
            target_h,
        })
    }

    fn dim(&self) -> usize {
        self.target.num_vars() + 1
    }

    /// Lifts an affine point into the chart.
    fn lift(&self, x: &[Complex64]) -> Option<Vec<Complex64>> {
        let mut big = Vec::with_capacity(x.len() + 1);
        big.push(Complex64::new(1.0, 0.0));
        big.extend_from_slice(x);
        let s: Complex64 = self.chart.iter().zip(&big).map(|(a, b)| a * b).sum();
        if s.norm() < 1e-14 {
            return None;
        }
        Some(big.into_iter().map(|z| z / s).collect())
    }
}

fn dehomogenize(big: &[Complex64]) -> Vec<Complex64> {
    big[1..].iter().map(|z| z / big[0]).collect()
}

/// `|x0| / ‖X‖∞`: 1 at the chart origin, 0 at infinity.
fn projective_ratio(big: &[Complex64]) -> f64 {
    let n = inf_norm(big);
    if n == 0.0 {
        0.0
    } else {
        big[0].norm() / n
    }
}

/// Reusable buffers for evaluating `H` and its derivatives.
struct Workspace<'a> {
    h: &'a Homotopy,
    g: Vec<Complex64>,
    f: Vec<Complex64>,
    jg: DMatrix<Complex64>,
    jf: DMatrix<Complex64>,
}

impl<'a> Workspace<'a> {
    fn new(h: &'a Homotopy) -> Self {
        let n = h.dim() - 1;
        let m = h.dim();
        Self {
            h,
            g: vec![Complex64::default(); n],
            f: vec![Complex64::default(); n],
            jg: DMatrix::zeros(n, m),
            jf: DMatrix::zeros(n, m),
        }
    }

    /// Returns `(H(X, t), ∂H/∂X, ∂H/∂t)` including the chart row.
    fn eval(&mut self, x: &[Complex64], t: f64) -> (Vec<Complex64>, DMatrix<Complex64>, Vec<Complex64>) {
        let h = self.h;
        let n = h.dim() - 1;
        h.start_h.eval_into(x, &mut self.g);
        h.target_h.eval_into(x, &mut self.f);
        h.start_h.jacobian_into(x, &mut self.jg);
        h.target_h.jacobian_into(x, &mut self.jf);
        let gs = h.gamma * (1.0 - t);
        let mut val = Vec::with_capacity(n + 1);
        let mut dt = Vec::with_capacity(n + 1);
        for i in 0..n {
            val.push(gs * self.g[i] + t * self.f[i]);
            dt.push(self.f[i] - h.gamma * self.g[i]);
        }
        let chart: Complex64 = h.chart.iter().zip(x).map(|(a, b)| a * b).sum();
        val.push(chart - 1.0);
        dt.push(Complex64::default());
        let mut jac = DMatrix::zeros(n + 1, n + 1);
        for i in 0..n {
            for j in 0..=n {
                jac[(i, j)] = gs * self.jg[(i, j)] + t * self.jf[(i, j)];
            }
        }
        for j in 0..=n {
            jac[(n, j)] = h.chart[j];
        }
        (val, jac, dt)
    }

    /// Newton corrector at fixed `t`; true on convergence within the budget.
    fn correct(&mut self, x: &mut [Complex64], t: f64, cfg: &TrackerConfig) -> bool {
        for _ in 0..cfg.corrector_max_iters {
            let (val, jac, _) = self.eval(x, t);
            let rhs: Vec<Complex64> = val.iter().map(|v| -v).collect();
            let Some(dx) = solve(jac, &rhs) else {
                return false;
            };
            for (xi, d) in x.iter_mut().zip(&dx) {
                *xi += d;
            }
            let nx = inf_norm(x);
            if !nx.is_finite() {
                return false;
            }
            if inf_norm(&dx) <= cfg.corrector_tol * nx.max(1e-3) {
                return true;
            }
        }
        false
    }

    /// Euler predictor: tangent `dX/dt = −(∂H/∂X)⁻¹ ∂H/∂t`.
    fn tangent(&mut self, x: &[Complex64], t: f64) -> Option<Vec<Complex64>> {
        let (_, jac, dt) = self.eval(x, t);
        let rhs: Vec<Complex64> = dt.iter().map(|v| -v).collect();
        solve(jac, &rhs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PathStatus {
    Finite,
    AtInfinity,
    Singular,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathResult {
    pub status: PathStatus,
    /// Affine endpoint for finite and (when recoverable) singular paths.
    pub endpoint: Option<Vec<Complex64>>,
    /// ∞-norm of the target system at the endpoint (infinite when absent).
    pub final_residual: f64,
    pub steps_taken: usize,
    pub start_index: usize,
    /// Homotopy parameter where tracking stopped.
    pub t_final: f64,
}

/// Follows the path through `start_point` from `t = 0` to `t = 1`.
///
/// Steps halve when the corrector fails and grow by 1.5× after four
/// consecutive successes; beyond `endgame_start` the step cap shrinks
/// tenfold. A path is `AtInfinity` once its affine norm exceeds
/// `divergence_norm`, or when it stalls while visibly approaching the
/// hyperplane at infinity; `Failed` when it stalls anywhere else.
pub fn track_path(h: &Homotopy, start_point: &[Complex64], cfg: &TrackerConfig) -> PathResult {
    track_indexed(h, start_point, 0, cfg)
}

pub(crate) fn track_indexed(
    h: &Homotopy,
    start_point: &[Complex64],
    start_index: usize,
    cfg: &TrackerConfig,
) -> PathResult {
    let failed = |steps, t| PathResult {
        status: PathStatus::Failed,
        endpoint: None,
        final_residual: f64::INFINITY,
        steps_taken: steps,
        start_index,
        t_final: t,
    };
    let Some(mut x) = h.lift(start_point) else {
        return failed(0, 0.0);
    };
    let mut ws = Workspace::new(h);
    if !ws.correct(&mut x, 0.0, cfg) {
        return failed(0, 0.0);
    }

    let mut t = 0.0f64;
    let mut step = cfg.initial_step;
    let mut streak = 0u32;
    let mut steps = 0usize;
    // (1 − t, projective ratio) samples inside the endgame region
    let mut endgame: Vec<(f64, f64)> = Vec::new();
    let mut stalled = false;

    while t < 1.0 {
        let cap = if t >= cfg.endgame_start {
            cfg.max_step / 10.0
        } else {
            cfg.max_step
        };
        step = step.min(cap);
        let t1 = if t + step >= 1.0 { 1.0 } else { t + step };
        let dt = t1 - t;

        let accepted = ws.tangent(&x, t).and_then(|tan| {
            let mut xp: Vec<Complex64> = x.iter().zip(&tan).map(|(xi, ti)| xi + ti * dt).collect();
            ws.correct(&mut xp, t1, cfg).then_some(xp)
        });

        match accepted {
            Some(xn) => {
                x = xn;
                t = t1;
                steps += 1;
                streak += 1;
                if streak >= 4 {
                    step = (step * 1.5).min(cap);
                    streak = 0;
                }
                let rho = projective_ratio(&x);
                if rho * cfg.divergence_norm < 1.0 {
                    return at_infinity(start_index, steps, t);
                }
                if t >= cfg.endgame_start {
                    endgame.push((1.0 - t, rho));
                }
            }
            None => {
                step /= 2.0;
                streak = 0;
                if step < cfg.min_step {
                    stalled = true;
                    break;
                }
            }
        }
    }

    classify_endpoint(h, x, t, stalled, &endgame, steps, start_index, cfg)
}

fn at_infinity(start_index: usize, steps: usize, t: f64) -> PathResult {
    PathResult {
        status: PathStatus::AtInfinity,
        endpoint: None,
        final_residual: f64::INFINITY,
        steps_taken: steps,
        start_index,
        t_final: t,
    }
}

/// Decay exponent `k` of the projective ratio, `ρ ~ (1 − t)^k`, fitted
/// between the last sample and the sample closest to ten times further
/// from `t = 1`.
fn decay_exponent(endgame: &[(f64, f64)]) -> Option<f64> {
    let &(s_end, rho_end) = endgame.last()?;
    let &(s_ref, rho_ref) = endgame
        .iter()
        .rev()
        .find(|(s, _)| *s >= 10.0 * s_end)
        .or_else(|| endgame.first())?;
    if s_ref <= s_end || rho_end <= 0.0 || rho_ref <= 0.0 {
        return None;
    }
    Some((rho_ref / rho_end).ln() / (s_ref / s_end).ln())
}

/// A stalled path whose projective ratio is small and still shrinking
/// like a power of `1 − t` is taken to be diverging.
/// Convergent paths have `k → 0`; a path winding `w` times into infinity has
/// `k = 1/w`, so the decay cutoff admits windings up to ten.
const INFINITY_RATIO: f64 = 0.05;
const INFINITY_DECAY: f64 = 0.1;

#[allow(clippy::too_many_arguments)]
fn classify_endpoint(
    h: &Homotopy,
    x: Vec<Complex64>,
    t: f64,
    stalled: bool,
    endgame: &[(f64, f64)],
    steps: usize,
    start_index: usize,
    cfg: &TrackerConfig,
) -> PathResult {
    let rho = projective_ratio(&x);
    let diverging = rho < INFINITY_RATIO && decay_exponent(endgame).is_some_and(|k| k > INFINITY_DECAY);
    if diverging {
        return at_infinity(start_index, steps, t);
    }

    let affine = dehomogenize(&x);
    let (point, residual, cond) = refine(&h.target, affine, cfg);
    let finite_point = point.iter().all(|z| z.re.is_finite() && z.im.is_finite());
    let status = if !finite_point || inf_norm(&point) > cfg.divergence_norm {
        PathStatus::AtInfinity
    } else if cond > SINGULAR_CONDITION {
        PathStatus::Singular
    } else if h.target.map().scaled_residual(&point) < cfg.corrector_tol {
        PathStatus::Finite
    } else if stalled {
        // nonsingular but unconverged: tracking lost the path
        PathStatus::Failed
    } else {
        PathStatus::Singular
    };
    PathResult {
        status,
        endpoint: matches!(status, PathStatus::Finite | PathStatus::Singular).then_some(point),
        final_residual: if finite_point { residual } else { f64::INFINITY },
        steps_taken: steps,
        start_index,
        t_final: t,
    }
}

/// Newton refinement on the affine target. Returns the point, its residual
/// ∞-norm and the condition number of the target Jacobian there.
pub(crate) fn refine(
    target: &PolynomialSystem,
    mut x: Vec<Complex64>,
    cfg: &TrackerConfig,
) -> (Vec<Complex64>, f64, f64) {
    let map = target.map();
    let n = target.num_vars();
    let mut val = vec![Complex64::default(); n];
    let mut jac = DMatrix::zeros(n, n);
    map.eval_into(&x, &mut val);
    let mut res = inf_norm(&val);
    for _ in 0..8 {
        if !res.is_finite() || res < cfg.corrector_tol * 1e-2 {
            break;
        }
        map.jacobian_into(&x, &mut jac);
        let rhs: Vec<Complex64> = val.iter().map(|v| -v).collect();
        let Some(dx) = solve(jac.clone(), &rhs) else {
            break;
        };
        let trial: Vec<Complex64> = x.iter().zip(&dx).map(|(a, b)| a + b).collect();
        map.eval_into(&trial, &mut val);
        let trial_res = inf_norm(&val);
        if !(trial_res < res) {
            map.eval_into(&x, &mut val);
            break;
        }
        x = trial;
        res = trial_res;
    }
    map.jacobian_into(&x, &mut jac);
    (x, res, condition_number(&jac))
}
