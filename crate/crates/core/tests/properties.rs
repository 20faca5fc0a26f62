mod common;

use num_complex::Complex64;
use pfroots::bounds::{kappa1, kappa2};
use pfroots::casegen::{generate_case, GenConfig};
use pfroots::cliques::{classify, maximal_cliques};
use pfroots::pfmodel::build_pf_system;
use proptest::prelude::*;

use common::{brute_force_cliques, graph_from_mask, jacobian_fd_error};

fn permutation(n: usize, mut key: u64) -> Vec<usize> {
    let mut pool: Vec<usize> = (1..=n).collect();
    let mut perm = Vec::with_capacity(n);
    while !pool.is_empty() {
        let radix = pool.len() as u64;
        perm.push(pool.remove((key % radix) as usize));
        key /= radix;
    }
    perm
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bron_kerbosch_matches_brute_force(n in 1usize..=9, mask in any::<u64>()) {
        let g = graph_from_mask(n, mask);
        let mut found = maximal_cliques(&g).cliques;
        found.sort();
        prop_assert_eq!(found, brute_force_cliques(&g));
    }

    #[test]
    fn classification_ignores_labels(n in 2usize..=8, mask in any::<u64>(), key in any::<u64>()) {
        let g = graph_from_mask(n, mask);
        prop_assume!(g.is_connected());
        let h = g.relabel(&permutation(n, key));
        prop_assert_eq!(classify(&g), classify(&h));
        prop_assert_eq!(maximal_cliques(&g).signature_key(), maximal_cliques(&h).signature_key());
    }

    #[test]
    fn kappa2_times_power_of_two_is_kappa1(sig in prop::collection::vec(2usize..=8, 1..6)) {
        let k1 = kappa1(&sig).unwrap();
        let k2 = kappa2(&sig).unwrap();
        prop_assert_eq!(k2 << (sig.len() - 1), k1);
    }

    #[test]
    fn jacobian_matches_finite_differences(n in 2usize..=5, seed in any::<u64>(), xs in prop::collection::vec(-1.5f64..1.5, 16)) {
        let net = generate_case(&GenConfig::new(n, seed)).unwrap();
        let sys = build_pf_system(&net).unwrap();
        let dim = sys.num_vars();
        let x: Vec<Complex64> = (0..dim).map(|i| Complex64::new(xs[2 * i], xs[2 * i + 1])).collect();
        prop_assert!(jacobian_fd_error(&sys, &x) < 1e-5);
    }
}
