//! Simple undirected graphs on nodes `1..=n`.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Simple undirected graph. Edges are stored as `(u, v)` with `u < v`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Graph {
    num_nodes: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new(num_nodes: usize) -> Self {
        Self {
            num_nodes,
            edges: BTreeSet::new(),
        }
    }

    /// Builds a graph from 1-based edge pairs. Self-loops and out-of-range
    /// ids are rejected; duplicate edges collapse.
    pub fn from_edges(num_nodes: usize, edges: &[(usize, usize)]) -> Result<Self, Error> {
        let mut g = Self::new(num_nodes);
        for &(u, v) in edges {
            if u == v {
                return Err(Error::Model(format!("self-loop at node {u}")));
            }
            if u == 0 || v == 0 || u > num_nodes || v > num_nodes {
                return Err(Error::Model(format!(
                    "edge ({u}, {v}) outside node range 1..={num_nodes}"
                )));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::new(n);
        for u in 1..=n {
            for v in u + 1..=n {
                g.add_edge(u, v);
            }
        }
        g
    }

    /// Inserts an edge; returns false for self-loops and existing edges.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        debug_assert!(u >= 1 && v >= 1 && u <= self.num_nodes && v <= self.num_nodes);
        if u == v {
            return false;
        }
        self.edges.insert((u.min(v), u.max(v)))
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    /// Adjacency lists indexed by node id; index 0 is unused.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.num_nodes + 1];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        if self.num_nodes == 0 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.num_nodes + 1];
        let mut queue = VecDeque::from([1]);
        seen[1] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == self.num_nodes
    }

    /// Relabels nodes: node `i` becomes `perm[i - 1]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.num_nodes);
        let mut g = Self::new(self.num_nodes);
        for &(u, v) in &self.edges {
            g.add_edge(perm[u - 1], perm[v - 1]);
        }
        g
    }
}

/// Edge-list text: one `u v` pair per line, `#` comments, optional
/// `nodes N` header for isolated trailing nodes.
impl FromStr for Graph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let mut declared = None;
        let mut pairs = Vec::new();
        for (lineno, raw) in s.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()).collect();
            let bad = || Error::Model(format!("edge list line {}: cannot parse {raw:?}", lineno + 1));
            match toks.as_slice() {
                ["nodes", n] => declared = Some(n.parse::<usize>().map_err(|_| bad())?),
                [u, v] => pairs.push((
                    u.parse::<usize>().map_err(|_| bad())?,
                    v.parse::<usize>().map_err(|_| bad())?,
                )),
                _ => return Err(bad()),
            }
        }
        let max_id = pairs.iter().map(|&(u, v)| u.max(v)).max().unwrap_or(0);
        let n = declared.unwrap_or(max_id).max(max_id);
        Graph::from_edges(n, &pairs)
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "nodes {}", self.num_nodes)?;
        for (u, v) in self.edges() {
            writeln!(f, "{u} {v}")?;
        }
        Ok(())
    }
}
