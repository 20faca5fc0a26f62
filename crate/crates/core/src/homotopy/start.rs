use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::polysys::{Monomial, PolynomialSystem};

/// Uniformly random point on the unit circle.
pub(crate) fn unit_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.random::<f64>() * TAU)
}

/// Total-degree start system `g_i = c_i (x_i^{d_i} − 1)` with random
/// unit-modulus `c_i`, and all `∏ d_i` of its roots.
///
/// Root `k` is the mixed-radix expansion of `k` over the degrees, picking
/// the corresponding roots of unity; the order is stable so path indices
/// are reproducible.
pub fn build_start_system(
    target: &PolynomialSystem,
    seed: u64,
) -> Result<(PolynomialSystem, Vec<Vec<Complex64>>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = target.num_vars();
    let degrees = target.degrees();
    let polys = degrees
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            let c = unit_complex(&mut rng);
            let mut exps = vec![0; n];
            exps[i] = d;
            vec![Monomial::new(c, exps), Monomial::constant(-c, n)]
        })
        .collect();
    let start = PolynomialSystem::new(n, polys, target.var_names().to_vec())?;

    let total = usize::try_from(target.total_degree()?).expect("path count fits in memory");
    let roots: Vec<Vec<Complex64>> = degrees
        .iter()
        .map(|&d| {
            (0..d)
                .map(|k| Complex64::from_polar(1.0, TAU * f64::from(k) / f64::from(d)))
                .collect()
        })
        .collect();
    let solutions = (0..total)
        .map(|mut k| {
            roots
                .iter()
                .map(|r| {
                    let z = r[k % r.len()];
                    k /= r.len();
                    z
                })
                .collect()
        })
        .collect();
    Ok((start, solutions))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(n: usize, shift: f64) -> PolynomialSystem {
        let polys = (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = 2;
                vec![Monomial::new(1.0, e), Monomial::constant(-shift, n)]
            })
            .collect();
        PolynomialSystem::with_default_names(n, polys).unwrap()
    }

    #[test]
    fn univariate_start_roots() {
        let (start, sols) = build_start_system(&quad(1, 3.0), 1).unwrap();
        assert_eq!(sols.len(), 2);
        let mut re: Vec<f64> = sols.iter().map(|s| s[0].re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] + 1.0).abs() < 1e-15 && (re[1] - 1.0).abs() < 1e-15);
        assert_eq!(start.degrees(), vec![2]);
    }

    #[test]
    fn sign_patterns_for_four_quadrics() {
        let (start, sols) = build_start_system(&quad(4, 1.0), 9).unwrap();
        assert_eq!(sols.len(), 16);
        let mut patterns: Vec<Vec<bool>> = sols
            .iter()
            .map(|s| s.iter().map(|z| z.re > 0.0).collect())
            .collect();
        patterns.sort();
        patterns.dedup();
        assert_eq!(patterns.len(), 16);
        for s in &sols {
            assert!(s.iter().all(|z| z.im.abs() < 1e-15 && (z.re.abs() - 1.0).abs() < 1e-15));
            assert!(start.residual_norm(s).unwrap() < 1e-14);
        }
    }

    #[test]
    fn mixed_degrees() {
        let sys = PolynomialSystem::with_default_names(
            2,
            vec![
                vec![Monomial::new(1.0, vec![3, 0]), Monomial::constant(2.0, 2)],
                vec![Monomial::new(1.0, vec![1, 1]), Monomial::new(1.0, vec![0, 1])],
            ],
        )
        .unwrap();
        let (start, sols) = build_start_system(&sys, 3).unwrap();
        assert_eq!(sols.len(), 6);
        for s in &sols {
            assert!(start.residual_norm(s).unwrap() < 1e-14);
        }
    }
}
