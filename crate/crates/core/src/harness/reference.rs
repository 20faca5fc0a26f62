//! Reference topologies with known clique structure, class and bound.

use serde::{Deserialize, Serialize};

use crate::bounds::bound_for;
use crate::cliques::{maximal_cliques, TopologyClass};
use crate::graph::Graph;

#[derive(Clone, Debug)]
pub struct ReferenceTopology {
    pub name: &'static str,
    pub graph: Graph,
    pub signature_key: &'static str,
    pub class: TopologyClass,
    pub bound: Option<u64>,
    pub kappa_n: u64,
}

fn fixture(
    name: &'static str,
    n: usize,
    edges: &[(usize, usize)],
    signature_key: &'static str,
    class: TopologyClass,
    bound: Option<u64>,
    kappa_n: u64,
) -> ReferenceTopology {
    ReferenceTopology {
        name,
        graph: Graph::from_edges(n, edges).expect("fixture edges are valid"),
        signature_key,
        class,
        bound,
        kappa_n,
    }
}

pub fn reference_topologies() -> Vec<ReferenceTopology> {
    use TopologyClass::*;
    vec![
        fixture("star5", 5, &[(1, 2), (1, 3), (1, 4), (1, 5)], "2x2x2x2", BlockNetwork, Some(16), 70),
        fixture("triangle-pendant4", 4, &[(1, 2), (1, 3), (2, 3), (3, 4)], "3x2", BlockNetwork, Some(12), 20),
        fixture(
            "triangle-chain7",
            7,
            &[(1, 2), (1, 3), (2, 3), (3, 4), (3, 5), (4, 5), (5, 7), (5, 6), (6, 7)],
            "3x3x3",
            BlockNetwork,
            Some(216),
            924,
        ),
        fixture("diamond4", 4, &[(1, 2), (1, 3), (2, 3), (2, 4), (3, 4)], "3x3", EdgeSharedTree, Some(18), 20),
        fixture(
            "triangle-fan6",
            6,
            &[(1, 2), (1, 3), (2, 3), (2, 4), (3, 4), (3, 5), (4, 5), (4, 6), (2, 6)],
            "3x3x3x3",
            EdgeSharedTree,
            Some(162),
            252,
        ),
        fixture(
            "k4-k4-triangle7",
            7,
            &[
                (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4),
                (3, 5), (3, 6), (4, 5), (4, 6), (5, 6), (5, 7), (6, 7),
            ],
            "4x4x3",
            EdgeSharedTree,
            Some(600),
            924,
        ),
        fixture(
            "diamond-with-pendants7",
            7,
            &[(1, 2), (2, 3), (2, 7), (3, 4), (3, 5), (3, 7), (5, 6), (5, 7)],
            "3x3x2x2x2",
            MixedBlockEdgeTree,
            Some(144),
            924,
        ),
        fixture(
            "k5-minus-edge",
            5,
            &[(1, 2), (2, 3), (2, 4), (2, 5), (1, 4), (1, 5), (3, 4), (3, 5), (4, 5)],
            "4x4",
            Unclassified,
            None,
            70,
        ),
        fixture(
            "triangles-on-edge5",
            5,
            &[(1, 2), (1, 3), (2, 3), (2, 4), (3, 4), (3, 5), (2, 5)],
            "3x3x3",
            Unclassified,
            None,
            70,
        ),
        fixture(
            "wheel5",
            5,
            &[(1, 2), (1, 3), (2, 3), (3, 4), (3, 5), (4, 5), (1, 4), (2, 5)],
            "3x3x3x3",
            Unclassified,
            None,
            70,
        ),
    ]
}

pub fn reference_topology(name: &str) -> Option<ReferenceTopology> {
    reference_topologies().into_iter().find(|r| r.name == name)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceCheck {
    pub name: String,
    pub expected_signature: String,
    pub signature: String,
    pub expected_class: TopologyClass,
    pub class: TopologyClass,
    pub expected_bound: Option<u64>,
    pub bound: Option<u64>,
    pub is_conjecture: bool,
    pub kappa_n: u64,
    /// Empty when everything matches.
    pub mismatches: Vec<String>,
}

impl ReferenceCheck {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Recomputes cliques, class and bounds for every reference topology.
pub fn verify_reference_topologies() -> Vec<ReferenceCheck> {
    reference_topologies()
        .into_iter()
        .map(|r| {
            let cs = maximal_cliques(&r.graph);
            let mut mismatches = Vec::new();
            let (class, bound, is_conjecture, kappa_n) = match bound_for(&r.graph) {
                Ok(b) => (b.topology_class, b.topology_bound, b.is_conjecture, b.kappa_n),
                Err(e) => {
                    mismatches.push(format!("bound_for failed: {e}"));
                    (TopologyClass::Unclassified, None, false, 0)
                }
            };
            let signature = cs.signature_key();
            if signature != r.signature_key {
                mismatches.push(format!("signature {signature} != {}", r.signature_key));
            }
            if class != r.class {
                mismatches.push(format!("class {class} != {}", r.class));
            }
            if bound != r.bound {
                mismatches.push(format!("bound {bound:?} != {:?}", r.bound));
            }
            if kappa_n != r.kappa_n {
                mismatches.push(format!("kappa_n {kappa_n} != {}", r.kappa_n));
            }
            ReferenceCheck {
                name: r.name.to_string(),
                expected_signature: r.signature_key.to_string(),
                signature,
                expected_class: r.class,
                class,
                expected_bound: r.bound,
                bound,
                is_conjecture,
                kappa_n,
                mismatches,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cliques::clique_graph;

    #[test]
    fn all_reference_topologies_match() {
        for c in verify_reference_topologies() {
            assert!(c.passed(), "{}: {:?}", c.name, c.mismatches);
        }
    }

    #[test]
    fn conjecture_flags() {
        let checks = verify_reference_topologies();
        let conj: Vec<&str> = checks.iter().filter(|c| c.is_conjecture).map(|c| c.name.as_str()).collect();
        assert_eq!(conj, ["diamond4", "triangle-fan6", "k4-k4-triangle7", "diamond-with-pendants7"]);
    }

    #[test]
    fn shared_bus_labels() {
        let cs = maximal_cliques(&reference_topology("k5-minus-edge").unwrap().graph);
        assert_eq!(cs.cliques, vec![vec![1, 2, 4, 5], vec![2, 3, 4, 5]]);
        assert_eq!(clique_graph(&cs).shared(0, 1), 3);

        let cs = maximal_cliques(&reference_topology("diamond-with-pendants7").unwrap().graph);
        let cg = clique_graph(&cs);
        assert_eq!(cs.cliques[..2], [vec![2, 3, 7], vec![3, 5, 7]]);
        assert_eq!(cg.shared(0, 1), 2);
        let singles = cg.edges.iter().filter(|e| e.shared_buses == 1).count();
        assert!(cg.edges.iter().all(|e| e.shared_buses <= 2));
        assert_eq!(singles, cg.edges.len() - 1);

        let cs = maximal_cliques(&reference_topology("wheel5").unwrap().graph);
        let doubles = clique_graph(&cs).edges.iter().filter(|e| e.shared_buses == 2).count();
        assert_eq!(doubles, 4);
    }
}
