//! Anonymous network topology: undirected connected graphs and the structural
//! metrics (distances, balls, diameter, cyclomatic upper bound, longest simple
//! path) that size the clock of the protocol.
//!
//! Processes are plain indices `0..n`. Indices exist for simulation
//! bookkeeping only; nothing in the protocol layer may branch on them.

use std::collections::VecDeque;

use thiserror::Error;

/// Default cap on exhaustive (exponential) graph searches.
pub const DEFAULT_EXHAUSTIVE_NODE_LIMIT: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TopologyError {
    #[error("graph is not connected")]
    Disconnected,
    #[error("self-loop on process {0}")]
    SelfLoop(usize),
    #[error("process index {0} out of range (n = {1})")]
    BadIndex(usize, usize),
    #[error("need at least 2 processes, got {0}")]
    TooFewProcesses(usize),
    #[error("edge list is empty")]
    EmptyEdgeList,
    #[error("graph too large for exhaustive search (n = {0}, limit = {1})")]
    TooLarge(usize, usize),
    #[error("bad edge-list input: {0}")]
    Parse(String),
}

/// An undirected connected graph over processes `0..n`, no self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, TopologyError> {
        if n < 2 {
            return Err(TopologyError::TooFewProcesses(n));
        }
        if edges.is_empty() {
            return Err(TopologyError::EmptyEdgeList);
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n {
                return Err(TopologyError::BadIndex(u, n));
            }
            if v >= n {
                return Err(TopologyError::BadIndex(v, n));
            }
            if u == v {
                return Err(TopologyError::SelfLoop(u));
            }
            if !adj[u].contains(&v) {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        for nb in &mut adj {
            nb.sort_unstable();
        }
        let edge_count = adj.iter().map(Vec::len).sum::<usize>() / 2;
        let g = Graph { n, adj, edge_count };
        if !g.is_connected() {
            return Err(TopologyError::Disconnected);
        }
        Ok(g)
    }

    /// Parses the flat text format: first line `n`, then one `u v` pair per line.
    pub fn parse_edge_list(text: &str) -> Result<Self, TopologyError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let n: usize = lines
            .next()
            .ok_or_else(|| TopologyError::Parse("empty input".into()))?
            .trim()
            .parse()
            .map_err(|e| TopologyError::Parse(format!("bad process count: {e}")))?;
        let mut edges = Vec::new();
        for line in lines {
            let mut it = line.split_whitespace();
            let u: usize = it
                .next()
                .ok_or_else(|| TopologyError::Parse(format!("short line: {line:?}")))?
                .parse()
                .map_err(|e| TopologyError::Parse(format!("bad index in {line:?}: {e}")))?;
            let v: usize = it
                .next()
                .ok_or_else(|| TopologyError::Parse(format!("short line: {line:?}")))?
                .parse()
                .map_err(|e| TopologyError::Parse(format!("bad index in {line:?}: {e}")))?;
            if it.next().is_some() {
                return Err(TopologyError::Parse(format!("trailing tokens in {line:?}")));
            }
            edges.push((u, v));
        }
        Graph::from_edges(n, &edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, p: usize) -> &[usize] {
        &self.adj[p]
    }

    pub fn degree(&self, p: usize) -> usize {
        self.adj[p].len()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for u in 0..self.n {
            for &v in &self.adj[u] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    fn is_connected(&self) -> bool {
        self.bfs_distances(0).iter().all(|&d| d != usize::MAX)
    }

    /// BFS distances from `src` to every process.
    pub fn bfs_distances(&self, src: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        let mut queue = VecDeque::new();
        dist[src] = 0;
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn distance(&self, p: usize, q: usize) -> usize {
        self.bfs_distances(p)[q]
    }

    /// The ball `V(p, k)`: all processes within distance `k` of `p`.
    pub fn ball(&self, p: usize, k: usize) -> Vec<usize> {
        self.bfs_distances(p)
            .iter()
            .enumerate()
            .filter(|&(_, &d)| d <= k)
            .map(|(q, _)| q)
            .collect()
    }

    pub fn diameter(&self) -> usize {
        (0..self.n)
            .map(|p| *self.bfs_distances(p).iter().max().unwrap())
            .max()
            .unwrap()
    }

    pub fn is_tree(&self) -> bool {
        self.edge_count == self.n - 1
    }

    /// An upper bound on the cyclomatic characteristic: 2 for trees, otherwise
    /// the minimum over BFS spanning trees rooted at every vertex of the
    /// longest fundamental cycle closed by a non-tree edge.
    ///
    /// The exact characteristic minimizes over all cycle bases; fundamental
    /// BFS bases give a safe over-approximation, and the value never exceeds
    /// twice the diameter.
    pub fn cyclomatic_upper_bound(&self) -> usize {
        if self.is_tree() {
            return 2;
        }
        let mut best = usize::MAX;
        for root in 0..self.n {
            let (depth, parent) = self.bfs_tree(root);
            let mut longest = 0usize;
            for (u, v) in self.edges() {
                if parent[u] == Some(v) || parent[v] == Some(u) {
                    continue;
                }
                // Fundamental cycle length: walk both endpoints up to their
                // lowest common ancestor in the BFS tree.
                let mut a = u;
                let mut b = v;
                let mut len = 1;
                while a != b {
                    if depth[a] >= depth[b] {
                        a = parent[a].unwrap();
                        len += 1;
                    } else {
                        b = parent[b].unwrap();
                        len += 1;
                    }
                }
                longest = longest.max(len);
            }
            best = best.min(longest);
        }
        best
    }

    fn bfs_tree(&self, root: usize) -> (Vec<usize>, Vec<Option<usize>>) {
        let mut depth = vec![usize::MAX; self.n];
        let mut parent = vec![None; self.n];
        let mut queue = VecDeque::new();
        depth[root] = 0;
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if depth[v] == usize::MAX {
                    depth[v] = depth[u] + 1;
                    parent[v] = Some(u);
                    queue.push_back(v);
                }
            }
        }
        (depth, parent)
    }

    /// Maximum number of edges over repetition-free walks, by exhaustive DFS.
    pub fn longest_simple_path_length(&self, node_limit: usize) -> Result<usize, TopologyError> {
        if self.n > node_limit {
            return Err(TopologyError::TooLarge(self.n, node_limit));
        }
        let mut best = 0usize;
        let mut visited = vec![false; self.n];
        for start in 0..self.n {
            visited[start] = true;
            self.dfs_longest(start, 0, &mut visited, &mut best);
            visited[start] = false;
        }
        Ok(best)
    }

    fn dfs_longest(&self, u: usize, len: usize, visited: &mut Vec<bool>, best: &mut usize) {
        *best = (*best).max(len);
        for &v in &self.adj[u] {
            if !visited[v] {
                visited[v] = true;
                self.dfs_longest(v, len + 1, visited, best);
                visited[v] = false;
            }
        }
    }

    pub fn metrics(&self) -> GraphMetrics {
        GraphMetrics::compute(self)
    }
}

/// Precomputed structural metrics of a graph.
#[derive(Debug, Clone)]
pub struct GraphMetrics {
    pub diameter: usize,
    pub cg_upper: usize,
    /// Longest simple path length; `None` when the graph exceeds the
    /// exhaustive-search limit.
    pub lsp: Option<usize>,
    dist: Vec<Vec<usize>>,
}

impl GraphMetrics {
    pub fn compute(g: &Graph) -> Self {
        let dist: Vec<Vec<usize>> = (0..g.n()).map(|p| g.bfs_distances(p)).collect();
        let diameter = dist
            .iter()
            .map(|row| *row.iter().max().unwrap())
            .max()
            .unwrap();
        GraphMetrics {
            diameter,
            cg_upper: g.cyclomatic_upper_bound(),
            lsp: g
                .longest_simple_path_length(DEFAULT_EXHAUSTIVE_NODE_LIMIT)
                .ok(),
            dist,
        }
    }

    pub fn distance(&self, p: usize, q: usize) -> usize {
        self.dist[p][q]
    }
}

/// Standard graph families used by the simulator and the sweep command.
pub mod families {
    use super::Graph;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub fn ring(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges).expect("ring is connected")
    }

    pub fn path(n: usize) -> Graph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        Graph::from_edges(n, &edges).expect("path is connected")
    }

    /// A star: process 0 is the hub, `leaves` leaves around it.
    pub fn star(leaves: usize) -> Graph {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Graph::from_edges(leaves + 1, &edges).expect("star is connected")
    }

    pub fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Graph::from_edges(n, &edges).expect("complete graph is connected")
    }

    pub fn grid(rows: usize, cols: usize) -> Graph {
        let idx = |r: usize, c: usize| r * cols + c;
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                if c + 1 < cols {
                    edges.push((idx(r, c), idx(r, c + 1)));
                }
                if r + 1 < rows {
                    edges.push((idx(r, c), idx(r + 1, c)));
                }
            }
        }
        Graph::from_edges(rows * cols, &edges).expect("grid is connected")
    }

    /// A seeded random connected graph: random spanning tree plus extra edges.
    pub fn random_connected(n: usize, seed: u64) -> Graph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let mut edges = Vec::new();
        for i in 1..n {
            let j = rng.gen_range(0..i);
            edges.push((order[i], order[j]));
        }
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(0.2) {
                    edges.push((u, v));
                }
            }
        }
        Graph::from_edges(n, &edges).expect("tree backbone keeps it connected")
    }
}
