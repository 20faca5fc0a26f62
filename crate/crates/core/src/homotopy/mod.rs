//! Total-degree homotopy continuation: finds every isolated complex
//! solution of a square polynomial system.

mod start;
mod tracker;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use start::build_start_system;
pub use tracker::{track_path, Homotopy, PathResult, PathStatus, SINGULAR_CONDITION};

use crate::error::{Error, Result};
use crate::polysys::{inf_norm, PolynomialSystem};

/// Number of γ draws tried before a run is declared non-certified.
pub const MAX_ATTEMPTS: u32 = 3;

/// Residual every reported finite or real solution must meet.
pub const VERIFY_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackerConfig {
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    pub corrector_tol: f64,
    pub corrector_max_iters: u32,
    pub divergence_norm: f64,
    pub endgame_start: f64,
    pub dedup_tol: f64,
    pub real_tol: f64,
    pub seed: u64,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            initial_step: 0.05,
            min_step: 1e-7,
            max_step: 0.1,
            corrector_tol: 1e-10,
            corrector_max_iters: 3,
            divergence_norm: 1e8,
            endgame_start: 0.9,
            dedup_tol: 1e-6,
            real_tol: 1e-6,
            seed: 0,
        }
    }
}

impl TrackerConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ordered = 0.0 < self.min_step
            && self.min_step < self.initial_step
            && self.initial_step <= self.max_step
            && self.max_step < 1.0;
        if !ordered {
            return Err(Error::Config(
                "need 0 < min_step < initial_step <= max_step < 1".into(),
            ));
        }
        let positive = [
            self.corrector_tol,
            self.divergence_norm,
            self.dedup_tol,
            self.real_tol,
        ]
        .iter()
        .all(|v| *v > 0.0 && v.is_finite());
        if !positive || self.corrector_max_iters == 0 {
            return Err(Error::Config("tolerances and iteration limits must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.endgame_start) {
            return Err(Error::Config("endgame_start must lie in [0, 1)".into()));
        }
        Ok(())
    }

    /// Hex SHA-256 of every numerical setting except the seed. Records
    /// produced under different settings carry different digests.
    pub fn digest(&self) -> String {
        let unseeded = Self { seed: 0, ..self.clone() };
        let json = serde_json::to_string(&unseeded).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))[..16].to_string()
    }
}

/// Deduplicated outcome of tracking every total-degree path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionSet {
    /// Distinct finite nonsingular solutions.
    pub finite: Vec<Vec<Complex64>>,
    pub num_paths: usize,
    pub num_at_infinity: usize,
    /// Singular endpoints plus extra paths that landed on an already found
    /// finite solution.
    pub num_singular: usize,
    pub num_failed: usize,
    /// Finite paths that duplicated another path's nonsingular endpoint.
    /// Generic targets never do this; it means a path jumped.
    pub num_path_jumps: usize,
    /// Indices into `finite` of the real solutions.
    pub real_indices: Vec<usize>,
    /// Distinct singular endpoints, for inspection.
    pub singular_points: Vec<Vec<Complex64>>,
    pub gamma: Complex64,
    pub attempts: u32,
}

impl SolutionSet {
    pub fn is_certified(&self) -> bool {
        self.num_failed == 0 && self.num_path_jumps == 0
    }

    pub fn num_real(&self) -> usize {
        self.real_indices.len()
    }

    /// Each non-real solution has its conjugate in the set within `tol`.
    pub fn is_conjugate_closed(&self, tol: f64) -> bool {
        self.finite.iter().all(|s| {
            let conj: Vec<Complex64> = s.iter().map(|z| z.conj()).collect();
            self.finite.iter().any(|o| dist(o, &conj) < tol)
        })
    }
}

fn dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn attempt_seed(seed: u64, attempt: u32) -> u64 {
    seed.wrapping_add(u64::from(attempt).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Tracks every path for a single γ draw.
fn solve_once(target: &PolynomialSystem, cfg: &TrackerConfig, attempt: u32) -> Result<SolutionSet> {
    let seed = attempt_seed(cfg.seed, attempt);
    let (start, start_points) = build_start_system(target, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5DEE_CE66_D1CE_4E5B);
    let gamma = start::unit_complex(&mut rng);
    let h = Homotopy::new(start, target.clone(), gamma, seed.rotate_left(17))?;

    let paths: Vec<PathResult> = start_points
        .par_iter()
        .enumerate()
        .map(|(i, p)| tracker::track_indexed(&h, p, i, cfg))
        .collect();

    let mut set = SolutionSet {
        finite: Vec::new(),
        num_paths: paths.len(),
        num_at_infinity: 0,
        num_singular: 0,
        num_failed: 0,
        num_path_jumps: 0,
        real_indices: Vec::new(),
        singular_points: Vec::new(),
        gamma,
        attempts: attempt + 1,
    };
    for path in paths {
        match path.status {
            PathStatus::AtInfinity => set.num_at_infinity += 1,
            PathStatus::Failed => set.num_failed += 1,
            PathStatus::Singular => {
                set.num_singular += 1;
                if let Some(p) = path.endpoint {
                    if !set.singular_points.iter().any(|s| dist(s, &p) < cfg.dedup_tol) {
                        set.singular_points.push(p);
                    }
                }
            }
            PathStatus::Finite => {
                let p = path.endpoint.expect("finite paths carry an endpoint");
                if set.finite.iter().any(|s| dist(s, &p) < cfg.dedup_tol) {
                    set.num_singular += 1;
                    set.num_path_jumps += 1;
                } else {
                    set.finite.push(p);
                }
            }
        }
    }
    set.real_indices = set
        .finite
        .iter()
        .enumerate()
        .filter(|(_, s)| polish_real(target, s, cfg.real_tol).is_some())
        .map(|(i, _)| i)
        .collect();
    Ok(set)
}

/// Finds all isolated solutions of `target`.
///
/// Paths run in parallel but merge by start index, so the result depends
/// only on `target` and `cfg`. A run with failed or jumped paths is retried
/// with a fresh γ up to [`MAX_ATTEMPTS`] times; the best attempt is returned
/// and [`SolutionSet::is_certified`] reports whether it is clean.
pub fn solve_all(target: &PolynomialSystem, cfg: &TrackerConfig) -> Result<SolutionSet> {
    cfg.validate()?;
    target.total_degree()?;
    let mut best: Option<SolutionSet> = None;
    for attempt in 0..MAX_ATTEMPTS {
        let set = solve_once(target, cfg, attempt)?;
        if set.is_certified() {
            return Ok(set);
        }
        let badness = |s: &SolutionSet| (s.num_failed + s.num_path_jumps, usize::MAX - s.finite.len());
        if best.as_ref().is_none_or(|b| badness(&set) < badness(b)) {
            best = Some(set);
        }
    }
    Ok(best.expect("at least one attempt"))
}

/// Zeroes the imaginary part, applies one Newton step over the reals and
/// re-verifies the residual.
fn polish_real(target: &PolynomialSystem, s: &[Complex64], real_tol: f64) -> Option<Vec<f64>> {
    if s.iter().any(|z| z.im.abs() >= real_tol) {
        return None;
    }
    let x: Vec<Complex64> = s.iter().map(|z| Complex64::new(z.re, 0.0)).collect();
    let val = target.evaluate(&x).ok()?;
    let jac = target.jacobian(&x).ok()?;
    let rhs: Vec<Complex64> = val.iter().map(|v| -v).collect();
    let polished: Vec<Complex64> = match crate::linalg::solve(jac, &rhs) {
        Some(dx) => x.iter().zip(&dx).map(|(a, d)| Complex64::new(a.re + d.re, 0.0)).collect(),
        None => x,
    };
    let res = inf_norm(&target.evaluate(&polished).ok()?);
    (res < VERIFY_TOL).then(|| polished.iter().map(|z| z.re).collect())
}

/// Real members of `sols`, polished and verified against `target`.
pub fn filter_real(target: &PolynomialSystem, sols: &SolutionSet, real_tol: f64) -> Vec<Vec<f64>> {
    sols.finite
        .iter()
        .filter_map(|s| polish_real(target, s, real_tol))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polysys::Monomial;

    fn sys(polys: Vec<Vec<Monomial>>) -> PolynomialSystem {
        PolynomialSystem::with_default_names(polys.len(), polys).unwrap()
    }

    #[test]
    fn default_config_is_valid() {
        TrackerConfig::default().validate().unwrap();
        let bad = TrackerConfig {
            min_step: 0.5,
            ..TrackerConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn digest_ignores_seed() {
        let a = TrackerConfig::with_seed(1);
        let b = TrackerConfig::with_seed(2);
        assert_eq!(a.digest(), b.digest());
        let c = TrackerConfig {
            max_step: 0.05,
            ..a.clone()
        };
        assert_ne!(a.digest(), c.digest());
    }

    #[test]
    fn identity_homotopy_returns_start_point() {
        let target = sys(vec![
            vec![Monomial::new(1.0, vec![2, 0]), Monomial::new(0.5, vec![0, 1]), Monomial::constant(-1.0, 2)],
            vec![Monomial::new(1.0, vec![1, 1]), Monomial::constant(-0.25, 2)],
        ]);
        let cfg = TrackerConfig::default();
        let sols = solve_all(&target, &cfg).unwrap();
        let h = Homotopy::new(target.clone(), target.clone(), Complex64::new(1.0, 0.0), 3).unwrap();
        for s in &sols.finite {
            let r = track_path(&h, s, &cfg);
            assert_eq!(r.status, PathStatus::Finite);
            assert!(dist(r.endpoint.as_ref().unwrap(), s) < 1e-9);
        }
    }

    #[test]
    fn two_independent_quadrics() {
        let target = sys(vec![
            vec![Monomial::new(1.0, vec![2, 0]), Monomial::constant(-1.0, 2)],
            vec![Monomial::new(1.0, vec![0, 2]), Monomial::constant(-1.0, 2)],
        ]);
        let s = solve_all(&target, &TrackerConfig::with_seed(5)).unwrap();
        assert!(s.is_certified());
        assert_eq!(s.finite.len(), 4);
        assert_eq!(s.num_real(), 4);
    }

    #[test]
    fn real_filter_univariate() {
        let plus = sys(vec![vec![Monomial::new(1.0, vec![2]), Monomial::constant(-1.0, 1)]]);
        let s = solve_all(&plus, &TrackerConfig::default()).unwrap();
        assert_eq!(filter_real(&plus, &s, 1e-6).len(), 2);

        let minus = sys(vec![vec![Monomial::new(1.0, vec![2]), Monomial::constant(1.0, 1)]]);
        let s = solve_all(&minus, &TrackerConfig::default()).unwrap();
        assert_eq!(s.finite.len(), 2);
        assert!(filter_real(&minus, &s, 1e-6).is_empty());
        assert!(s.is_conjugate_closed(1e-5));
    }

    #[test]
    fn deficient_system_sends_paths_to_infinity() {
        // {x*y - 1, x*y + x - 2}: one solution (1, 1) out of four paths
        let target = sys(vec![
            vec![Monomial::new(1.0, vec![1, 1]), Monomial::constant(-1.0, 2)],
            vec![Monomial::new(1.0, vec![1, 1]), Monomial::new(1.0, vec![1, 0]), Monomial::constant(-2.0, 2)],
        ]);
        let s = solve_all(&target, &TrackerConfig::default()).unwrap();
        assert_eq!(s.num_paths, 4);
        assert_eq!(s.finite.len(), 1);
        assert_eq!(s.finite.len() + s.num_at_infinity + s.num_singular + s.num_failed, 4);
        assert!(s.is_certified(), "{s:?}");
    }
}
