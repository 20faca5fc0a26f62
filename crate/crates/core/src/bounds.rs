//! Closed-form solution-count bounds.
//!
//! * `kappa(n) = C(2n−2, n−1)` bounds the finite complex solutions of any
//!   n-bus network.
//! * `kappa1` multiplies `kappa` over the cliques. It is a proven bound for
//!   networks whose blocks are all cliques.
//! * `kappa2 = kappa1 / 2^(m−1)`. It is conjectured for clique trees whose
//!   cliques share two buses.
//!
//! Everything is exact `u64` arithmetic; overflow is an error, never a
//! rounded value.

use serde::{Deserialize, Serialize};

use crate::cliques::{class_of_blocks, decompose, maximal_cliques, signature_key, BlockKind, TopologyClass};
use crate::error::{Error, Result};
use crate::graph::Graph;

fn overflow(what: &str) -> Error {
    Error::Overflow(format!("{what} does not fit in u64"))
}

/// `C(2n−2, n−1)`.
pub fn kappa(n: usize) -> Result<u64> {
    if n == 0 {
        return Err(Error::Model("kappa needs n >= 1".into()));
    }
    let k = (n - 1) as u128;
    // C(k+i, i) stays integral at every step
    let mut c: u128 = 1;
    for i in 1..=k {
        c = c * (k + i) / i;
        if c > u128::from(u64::MAX) {
            return Err(overflow("kappa"));
        }
    }
    Ok(c as u64)
}

/// Bézout number `2^(2n−2)` of the n-bus system.
pub fn bezout(n: usize) -> Result<u64> {
    if n == 0 {
        return Err(Error::Model("bezout needs n >= 1".into()));
    }
    u32::try_from(2 * n - 2)
        .ok()
        .and_then(|e| 1u64.checked_shl(e))
        .filter(|_| 2 * n - 2 < 64)
        .ok_or_else(|| overflow("bezout number"))
}

pub fn kappa1(signature: &[usize]) -> Result<u64> {
    if signature.is_empty() {
        return Err(Error::Model("empty clique signature".into()));
    }
    signature.iter().try_fold(1u64, |acc, &s| {
        acc.checked_mul(kappa(s)?).ok_or_else(|| overflow("kappa1"))
    })
}

pub fn kappa2(signature: &[usize]) -> Result<u64> {
    if signature.contains(&1) {
        return Err(Error::Model("kappa2 is undefined for size-1 cliques".into()));
    }
    let product = kappa1(signature)?;
    let shift = signature.len() - 1;
    if shift >= 64 || product.trailing_zeros() < shift as u32 {
        return Err(Error::Model("kappa2 product not divisible by 2^(m-1)".into()));
    }
    Ok(product >> shift)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockFactor {
    pub signature_key: String,
    pub kind: BlockKind,
    pub factor: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bezout: u64,
    pub kappa_n: u64,
    pub topology_bound: Option<u64>,
    pub topology_class: TopologyClass,
    pub is_conjecture: bool,
    pub per_block_detail: Vec<BlockFactor>,
}

impl BoundReport {
    /// Tightest bound known to apply.
    pub fn best_bound(&self) -> u64 {
        self.topology_bound.map_or(self.kappa_n, |b| b.min(self.kappa_n))
    }
}

/// Bounds for a connected graph: the topology bound is the product over
/// blocks of `kappa1` (clique blocks) or `kappa2` (clique-tree blocks),
/// and absent when any block is irregular.
pub fn bound_for(g: &Graph) -> Result<BoundReport> {
    let n = g.num_nodes();
    if n < 2 || !g.is_connected() {
        return Err(Error::Model("bounds need a connected graph with at least two nodes".into()));
    }
    let cs = maximal_cliques(g);
    let blocks = decompose(g, &cs);
    let topology_class = class_of_blocks(&blocks);
    let per_block_detail = blocks
        .iter()
        .map(|b| {
            let sig = b.signature(&cs);
            let factor = match b.kind {
                BlockKind::Clique => Some(kappa1(&sig)?),
                BlockKind::CliqueTree => Some(kappa2(&sig)?),
                BlockKind::Irregular => None,
            };
            Ok(BlockFactor {
                signature_key: signature_key(&sig),
                kind: b.kind,
                factor,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut bound = Some(1u64);
    for b in &per_block_detail {
        bound = match (bound, b.factor) {
            (Some(acc), Some(f)) => Some(acc.checked_mul(f).ok_or_else(|| overflow("topology bound"))?),
            _ => None,
        };
    }
    Ok(BoundReport {
        bezout: bezout(n)?,
        kappa_n: kappa(n)?,
        topology_bound: bound,
        topology_class,
        is_conjecture: bound.is_some() && blocks.iter().any(|b| b.kind == BlockKind::CliqueTree),
        per_block_detail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_values() {
        let k: Vec<u64> = (1..=7).map(|n| kappa(n).unwrap()).collect();
        assert_eq!(k, vec![1, 2, 6, 20, 70, 252, 924]);
        assert!(kappa(0).is_err());
        assert!(kappa(40).is_err());
    }

    #[test]
    fn kappa_recurrence() {
        // kappa(n+1) · n² = kappa(n) · 2n(2n−1)
        for n in 1..30usize {
            let (a, b) = (u128::from(kappa(n).unwrap()), u128::from(kappa(n + 1).unwrap()));
            let n = n as u128;
            assert_eq!(b * n * n, a * 2 * n * (2 * n - 1));
        }
    }

    #[test]
    fn bezout_values() {
        assert_eq!(bezout(3).unwrap(), 16);
        assert_eq!(bezout(7).unwrap(), 4096);
        assert!(bezout(33).is_err());
    }

    #[test]
    fn product_bounds() {
        assert_eq!(kappa1(&[2, 2, 2, 2]).unwrap(), 16);
        assert_eq!(kappa1(&[3, 2]).unwrap(), 12);
        assert_eq!(kappa2(&[3, 3]).unwrap(), 18);
        assert_eq!(kappa2(&[4, 4, 3]).unwrap(), 600);
        assert_eq!(kappa2(&[5]).unwrap(), kappa(5).unwrap());
        assert!(kappa2(&[3, 1]).is_err());
        assert!(kappa1(&[]).is_err());
    }

    #[test]
    fn complete_graph_bound_is_kappa() {
        for n in 2..8 {
            let r = bound_for(&Graph::complete(n)).unwrap();
            assert_eq!(r.topology_bound, Some(r.kappa_n));
            assert_eq!(r.topology_class, TopologyClass::BlockNetwork);
            assert!(!r.is_conjecture);
        }
    }

    #[test]
    fn disconnected_graph_rejected() {
        let g = Graph::from_edges(4, &[(1, 2), (3, 4)]).unwrap();
        assert!(bound_for(&g).is_err());
    }
}
