//! Oracles shared by the integration test targets.
#![allow(dead_code)]

use num_complex::Complex64;
use pfroots::graph::Graph;
use pfroots::polysys::PolynomialSystem;

pub fn graph_from_mask(n: usize, mask: u64) -> Graph {
    let mut g = Graph::new(n);
    let mut k = 0;
    for u in 1..=n {
        for v in u + 1..=n {
            if mask >> k & 1 == 1 {
                g.add_edge(u, v);
            }
            k += 1;
        }
    }
    g
}

/// Maximal cliques by checking every node subset.
pub fn brute_force_cliques(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.num_nodes();
    let complete = |s: u32| {
        let nodes: Vec<usize> = (0..n).filter(|i| s >> i & 1 == 1).map(|i| i + 1).collect();
        nodes.iter().all(|&u| nodes.iter().all(|&v| u == v || g.has_edge(u, v)))
    };
    let mut out: Vec<Vec<usize>> = (1u32..1 << n)
        .filter(|&s| complete(s) && (0..n).all(|i| s >> i & 1 == 1 || !complete(s | 1 << i)))
        .map(|s| (0..n).filter(|i| s >> i & 1 == 1).map(|i| i + 1).collect())
        .collect();
    out.sort();
    out
}

/// Largest relative gap between the Jacobian and central differences.
pub fn jacobian_fd_error(sys: &PolynomialSystem, x: &[Complex64]) -> f64 {
    let jac = sys.jacobian(x).unwrap();
    let h = 1e-6;
    let mut worst = 0.0f64;
    for j in 0..x.len() {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[j] += h;
        xm[j] -= h;
        let (fp, fm) = (sys.evaluate(&xp).unwrap(), sys.evaluate(&xm).unwrap());
        for i in 0..x.len() {
            let fd = (fp[i] - fm[i]) / (2.0 * h);
            worst = worst.max((fd - jac[(i, j)]).norm() / jac[(i, j)].norm().max(1.0));
        }
    }
    worst
}
