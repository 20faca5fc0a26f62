//! Maximal cliques, clique graphs and the block-wise topology classes that
//! select a solution-count bound.
//!
//! A block (biconnected component) is classified on its own:
//! * a clique block is itself a maximal clique;
//! * a clique-tree block has cliques pairwise sharing at most two buses,
//!   and the pairs sharing exactly two form a spanning tree of its cliques;
//! * anything else is irregular.
//!
//! Every maximal clique with at least two nodes lies in exactly one block.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::Graph;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CliqueStructure {
    /// Each clique sorted ascending; ordered by size descending, then
    /// lexicographically.
    pub cliques: Vec<Vec<usize>>,
    pub m: usize,
    /// Clique sizes, descending.
    pub signature: Vec<usize>,
    pub avg_size: f64,
}

impl CliqueStructure {
    fn from_cliques(mut cliques: Vec<Vec<usize>>) -> Self {
        for c in &mut cliques {
            c.sort_unstable();
        }
        cliques.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        let signature: Vec<usize> = cliques.iter().map(Vec::len).collect();
        let m = cliques.len();
        let avg_size = if m == 0 {
            0.0
        } else {
            signature.iter().sum::<usize>() as f64 / m as f64
        };
        Self {
            cliques,
            m,
            signature,
            avg_size,
        }
    }

    /// Clique sizes descending, joined by `x`, e.g. `3x3x2x2x2`.
    pub fn signature_key(&self) -> String {
        signature_key(&self.signature)
    }
}

pub fn signature_key(signature: &[usize]) -> String {
    let mut sizes = signature.to_vec();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes.iter().map(usize::to_string).collect::<Vec<_>>().join("x")
}

fn adjacency_matrix(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.num_nodes();
    let mut adj = vec![vec![false; n + 1]; n + 1];
    for (u, v) in g.edges() {
        adj[u][v] = true;
        adj[v][u] = true;
    }
    adj
}

/// All maximal cliques by Bron–Kerbosch with Tomita pivoting.
pub fn maximal_cliques(g: &Graph) -> CliqueStructure {
    let adj = adjacency_matrix(g);
    let mut out = Vec::new();
    let p: Vec<usize> = (1..=g.num_nodes()).collect();
    bron_kerbosch(&adj, &mut Vec::new(), p, Vec::new(), &mut out);
    CliqueStructure::from_cliques(out)
}

fn bron_kerbosch(
    adj: &[Vec<bool>],
    r: &mut Vec<usize>,
    p: Vec<usize>,
    mut x: Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() {
        if x.is_empty() {
            out.push(r.clone());
        }
        return;
    }
    // pivot maximizing |P ∩ N(u)| over P ∪ X
    let pivot = p
        .iter()
        .chain(&x)
        .copied()
        .max_by_key(|&u| p.iter().filter(|&&v| adj[u][v]).count())
        .expect("P is non-empty");
    let candidates: Vec<usize> = p.iter().copied().filter(|&v| !adj[pivot][v]).collect();
    let mut p = p;
    for v in candidates {
        let p_next = p.iter().copied().filter(|&w| adj[v][w]).collect();
        let x_next = x.iter().copied().filter(|&w| adj[v][w]).collect();
        r.push(v);
        bron_kerbosch(adj, r, p_next, x_next, out);
        r.pop();
        p.retain(|&w| w != v);
        x.push(v);
    }
}

/// Clique-graph edge between cliques `i < j` (0-based indices into
/// [`CliqueStructure::cliques`]).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueEdge {
    pub i: usize,
    pub j: usize,
    pub shared_buses: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueGraph {
    pub num_cliques: usize,
    pub edges: Vec<CliqueEdge>,
}

impl CliqueGraph {
    pub fn shared(&self, i: usize, j: usize) -> usize {
        let (i, j) = (i.min(j), i.max(j));
        self.edges
            .iter()
            .find(|e| e.i == i && e.j == j)
            .map_or(0, |e| e.shared_buses)
    }
}

fn intersection_size(a: &[usize], b: &[usize]) -> usize {
    a.iter().filter(|v| b.binary_search(v).is_ok()).count()
}

pub fn clique_graph(cs: &CliqueStructure) -> CliqueGraph {
    let mut edges = Vec::new();
    for i in 0..cs.m {
        for j in i + 1..cs.m {
            let shared = intersection_size(&cs.cliques[i], &cs.cliques[j]);
            if shared > 0 {
                edges.push(CliqueEdge {
                    i,
                    j,
                    shared_buses: shared,
                });
            }
        }
    }
    CliqueGraph {
        num_cliques: cs.m,
        edges,
    }
}

/// Node sets of the biconnected components, each sorted, in discovery
/// order. Isolated nodes belong to no block.
pub fn blocks(g: &Graph) -> Vec<Vec<usize>> {
    struct Dfs<'a> {
        adj: &'a [Vec<usize>],
        disc: Vec<usize>,
        low: Vec<usize>,
        time: usize,
        stack: Vec<(usize, usize)>,
        out: Vec<Vec<usize>>,
    }
    impl Dfs<'_> {
        fn visit(&mut self, u: usize, parent: usize) {
            self.time += 1;
            self.disc[u] = self.time;
            self.low[u] = self.time;
            for &v in &self.adj[u] {
                if self.disc[v] == 0 {
                    self.stack.push((u, v));
                    self.visit(v, u);
                    self.low[u] = self.low[u].min(self.low[v]);
                    if self.low[v] >= self.disc[u] {
                        let mut nodes = BTreeSet::new();
                        while let Some((a, b)) = self.stack.pop() {
                            nodes.insert(a);
                            nodes.insert(b);
                            if (a, b) == (u, v) {
                                break;
                            }
                        }
                        self.out.push(nodes.into_iter().collect());
                    }
                } else if v != parent && self.disc[v] < self.disc[u] {
                    self.stack.push((u, v));
                    self.low[u] = self.low[u].min(self.disc[v]);
                }
            }
        }
    }
    let adj = g.adjacency();
    let n = g.num_nodes();
    let mut dfs = Dfs {
        adj: &adj,
        disc: vec![0; n + 1],
        low: vec![0; n + 1],
        time: 0,
        stack: Vec::new(),
        out: Vec::new(),
    };
    for u in 1..=n {
        if dfs.disc[u] == 0 {
            dfs.visit(u, 0);
        }
    }
    dfs.out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockKind {
    Clique,
    CliqueTree,
    Irregular,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub nodes: Vec<usize>,
    /// Indices into [`CliqueStructure::cliques`].
    pub cliques: Vec<usize>,
    pub kind: BlockKind,
}

impl Block {
    pub fn signature(&self, cs: &CliqueStructure) -> Vec<usize> {
        self.cliques.iter().map(|&k| cs.cliques[k].len()).collect()
    }
}

fn block_kind(clique_ids: &[usize], cs: &CliqueStructure) -> BlockKind {
    let k = clique_ids.len();
    if k == 1 {
        return BlockKind::Clique;
    }
    let mut doubles = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            match intersection_size(&cs.cliques[clique_ids[a]], &cs.cliques[clique_ids[b]]) {
                0 | 1 => {}
                2 => doubles.push((a, b)),
                _ => return BlockKind::Irregular,
            }
        }
    }
    if doubles.len() != k - 1 {
        return BlockKind::Irregular;
    }
    // k − 1 edges form a spanning tree iff they connect all k cliques
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        parent[x] = r;
        r
    }
    for (a, b) in doubles {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            return BlockKind::Irregular;
        }
        parent[ra] = rb;
    }
    BlockKind::CliqueTree
}

/// Blocks of `g`, each with its cliques and kind.
pub fn decompose(g: &Graph, cs: &CliqueStructure) -> Vec<Block> {
    blocks(g)
        .into_iter()
        .map(|nodes| {
            let cliques: Vec<usize> = (0..cs.m)
                .filter(|&k| {
                    let c = &cs.cliques[k];
                    c.len() >= 2 && nodes.binary_search(&c[0]).is_ok() && nodes.binary_search(&c[1]).is_ok()
                })
                .collect();
            let kind = block_kind(&cliques, cs);
            Block { nodes, cliques, kind }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TopologyClass {
    /// Every block is a clique.
    BlockNetwork,
    /// A single block whose cliques form a shared-two-bus tree.
    EdgeSharedTree,
    /// Several blocks, each a clique or a clique tree, at least one a tree.
    MixedBlockEdgeTree,
    Unclassified,
}

impl TopologyClass {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::BlockNetwork => "BlockNetwork",
            Self::EdgeSharedTree => "EdgeSharedTree",
            Self::MixedBlockEdgeTree => "MixedBlockEdgeTree",
            Self::Unclassified => "Unclassified",
        }
    }
}

impl fmt::Display for TopologyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn class_of_blocks(blocks: &[Block]) -> TopologyClass {
    if blocks.iter().any(|b| b.kind == BlockKind::Irregular) {
        TopologyClass::Unclassified
    } else if blocks.iter().all(|b| b.kind == BlockKind::Clique) {
        TopologyClass::BlockNetwork
    } else if blocks.len() == 1 {
        TopologyClass::EdgeSharedTree
    } else {
        TopologyClass::MixedBlockEdgeTree
    }
}

pub fn classify(g: &Graph) -> TopologyClass {
    let cs = maximal_cliques(g);
    class_of_blocks(&decompose(g, &cs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::from_edges(n, edges).unwrap()
    }

    #[test]
    fn star_cliques() {
        let g = graph(5, &[(1, 2), (1, 3), (1, 4), (1, 5)]);
        let cs = maximal_cliques(&g);
        assert_eq!(cs.cliques, vec![vec![1, 2], vec![1, 3], vec![1, 4], vec![1, 5]]);
        assert_eq!(cs.signature_key(), "2x2x2x2");
        assert_eq!(cs.avg_size, 2.0);
        assert_eq!(classify(&g), TopologyClass::BlockNetwork);
    }

    #[test]
    fn complete_graph_is_one_clique() {
        for n in 2..8 {
            let cs = maximal_cliques(&Graph::complete(n));
            assert_eq!(cs.m, 1);
            assert_eq!(cs.avg_size, n as f64);
            assert_eq!(cs.signature_key(), n.to_string());
        }
    }

    #[test]
    fn diamond_shares_two_buses() {
        let g = graph(4, &[(1, 2), (1, 3), (2, 3), (2, 4), (3, 4)]);
        let cs = maximal_cliques(&g);
        assert_eq!(cs.cliques, vec![vec![1, 2, 3], vec![2, 3, 4]]);
        let cg = clique_graph(&cs);
        assert_eq!(cg.edges, vec![CliqueEdge { i: 0, j: 1, shared_buses: 2 }]);
        assert_eq!(classify(&g), TopologyClass::EdgeSharedTree);
    }

    #[test]
    fn articulated_graph_blocks() {
        // two triangles joined by a bridge 3-4
        let g = graph(6, &[(1, 2), (1, 3), (2, 3), (3, 4), (4, 5), (4, 6), (5, 6)]);
        let mut b = blocks(&g);
        b.sort();
        assert_eq!(b, vec![vec![1, 2, 3], vec![3, 4], vec![4, 5, 6]]);
        assert_eq!(classify(&g), TopologyClass::BlockNetwork);
    }

    #[test]
    fn four_cycle_is_unclassified() {
        let g = graph(4, &[(1, 2), (2, 3), (3, 4), (1, 4)]);
        let cs = maximal_cliques(&g);
        assert_eq!(cs.m, 4);
        assert!(clique_graph(&cs).edges.iter().all(|e| e.shared_buses == 1));
        assert_eq!(blocks(&g).len(), 1);
        assert_eq!(classify(&g), TopologyClass::Unclassified);
    }

    #[test]
    fn three_triangles_on_a_common_edge() {
        let g = graph(5, &[(1, 2), (1, 3), (2, 3), (2, 4), (3, 4), (3, 5), (2, 5)]);
        let cs = maximal_cliques(&g);
        assert_eq!(cs.signature_key(), "3x3x3");
        assert_eq!(classify(&g), TopologyClass::Unclassified);
    }

    #[test]
    fn tree_average_size_is_two() {
        let g = graph(6, &[(1, 2), (2, 3), (2, 4), (4, 5), (5, 6)]);
        let cs = maximal_cliques(&g);
        assert_eq!(cs.m, 5);
        assert_eq!(cs.avg_size, 2.0);
        assert_eq!(classify(&g), TopologyClass::BlockNetwork);
    }

    #[test]
    fn signature_key_sorts_descending() {
        assert_eq!(signature_key(&[2, 3, 2, 3, 2]), "3x3x2x2x2");
        assert_eq!(signature_key(&[4]), "4");
    }
}
