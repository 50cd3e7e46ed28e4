//! Undirected simple graphs: construction, random generators and edge-list I/O.
//!
//! Every constructor funnels through [`Graph::from_edges`], which drops self-loops,
//! collapses duplicates and symmetrizes, so the invariants below hold for any
//! `Graph` value:
//!
//! * `j ∈ N(i) ⇔ i ∈ N(j)`
//! * `i ∉ N(i)`
//! * neighbor lists are sorted ascending without duplicates

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("invalid graph parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed edge list at line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("edge list is empty")]
    Empty,
    #[error("edge ({0}, {1}) has no reverse edge; load with symmetrization enabled")]
    Asymmetric(u64, u64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Immutable undirected graph in compressed adjacency form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
}

impl Graph {
    /// Builds a graph on `node_count` nodes from an arbitrary edge iterator.
    ///
    /// Self-loops are dropped, both orientations of every edge are inserted and
    /// duplicates are collapsed.
    ///
    /// # Panics
    /// If an endpoint is `>= node_count`.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for (u, v) in edges {
            assert!(
                u < node_count && v < node_count,
                "edge ({u}, {v}) out of range for {node_count} nodes"
            );
            if u != v {
                pairs.push((u, v));
                pairs.push((v, u));
            }
        }
        pairs.sort_unstable();
        pairs.dedup();

        let mut offsets = vec![0usize; node_count + 1];
        for &(u, _) in &pairs {
            offsets[u + 1] += 1;
        }
        for i in 0..node_count {
            offsets[i + 1] += offsets[i];
        }
        let neighbors = pairs.into_iter().map(|(_, v)| v).collect();
        Graph { offsets, neighbors }
    }

    /// Graph with `node_count` nodes and no edges.
    pub fn empty(node_count: usize) -> Self {
        Graph::from_edges(node_count, std::iter::empty())
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    /// Sorted neighbor list of `node`.
    #[inline]
    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.neighbors[self.offsets[node]..self.offsets[node + 1]]
    }

    #[inline]
    pub fn degree(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.node_count())
            .map(|i| self.degree(i))
            .max()
            .unwrap_or(0)
    }

    pub fn mean_degree(&self) -> f64 {
        if self.node_count() == 0 {
            return 0.0;
        }
        2.0 * self.edge_count() as f64 / self.node_count() as f64
    }

    /// Edges as `(i, j)` pairs with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count()).flat_map(move |i| {
            self.neighbors(i)
                .iter()
                .copied()
                .filter(move |&j| j > i)
                .map(move |j| (i, j))
        })
    }

    /// Checks every structural invariant; used by tests and after loading.
    pub fn check_invariants(&self) -> Result<(), String> {
        for i in 0..self.node_count() {
            let nbrs = self.neighbors(i);
            if nbrs.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("neighbors of {i} not strictly ascending"));
            }
            for &j in nbrs {
                if j == i {
                    return Err(format!("self-loop at {i}"));
                }
                if !self.has_edge(j, i) {
                    return Err(format!("edge ({i}, {j}) missing its reverse"));
                }
            }
        }
        let degree_sum: usize = (0..self.node_count()).map(|i| self.degree(i)).sum();
        if degree_sum != 2 * self.edge_count() {
            return Err("degree sum is not twice the edge count".into());
        }
        Ok(())
    }

    /// Canonical edge-list text: a `#` header line, then one `i j` pair per line
    /// with `i < j`, sorted.
    pub fn to_edge_list_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# nodes {} edges {}",
            self.node_count(),
            self.edge_count()
        );
        for (i, j) in self.edges() {
            let _ = writeln!(out, "{i} {j}");
        }
        out
    }

    pub fn write_edge_list<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        writer.write_all(self.to_edge_list_string().as_bytes())
    }
}

/// How a Barabási–Albert process is started.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PaSeed {
    /// `m` isolated nodes; the first newcomer links to all of them.
    /// Produces exactly `(n - m) * m` edges.
    #[default]
    Isolated,
    /// Complete graph on `m + 1` nodes.
    Complete,
}

/// Erdős–Rényi `G(n, p)` with `p = avg_degree / (n - 1)`.
pub fn generate_er(n: usize, avg_degree: f64, seed: u64) -> Result<Graph, GraphError> {
    generate_er_with_rng(n, avg_degree, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn generate_er_with_rng<R: Rng + ?Sized>(
    n: usize,
    avg_degree: f64,
    rng: &mut R,
) -> Result<Graph, GraphError> {
    if n < 2 {
        return Err(GraphError::InvalidParameter(format!(
            "G(n, p) needs n >= 2, got {n}"
        )));
    }
    let p = avg_degree / (n - 1) as f64;
    if !(p > 0.0 && p <= 1.0) {
        return Err(GraphError::InvalidParameter(format!(
            "edge probability {p} outside (0, 1] (avg_degree {avg_degree}, n {n})"
        )));
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Ok(Graph::from_edges(n, edges))
}

/// Barabási–Albert preferential attachment with `m` edges per new node.
pub fn generate_pa(n: usize, m: usize, seed: u64) -> Result<Graph, GraphError> {
    generate_pa_with_rng(
        n,
        m,
        PaSeed::default(),
        &mut ChaCha8Rng::seed_from_u64(seed),
    )
}

pub fn generate_pa_with_rng<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    start: PaSeed,
    rng: &mut R,
) -> Result<Graph, GraphError> {
    if m < 1 || m >= n {
        return Err(GraphError::InvalidParameter(format!(
            "preferential attachment needs 1 <= m < n, got m={m}, n={n}"
        )));
    }
    let mut edges = Vec::with_capacity(n * m);
    // Each node appears here once per incident edge, so uniform draws are
    // degree-proportional.
    let mut repeated: Vec<usize> = Vec::with_capacity(2 * n * m);
    let (mut targets, mut source) = match start {
        PaSeed::Isolated => ((0..m).collect::<Vec<_>>(), m),
        PaSeed::Complete => {
            for i in 0..=m {
                for j in (i + 1)..=m {
                    edges.push((i, j));
                }
                repeated.extend(std::iter::repeat_n(i, m));
            }
            if m + 1 >= n {
                return Ok(Graph::from_edges(n, edges));
            }
            (distinct_sample(&repeated, m, rng), m + 1)
        }
    };
    while source < n {
        for &t in &targets {
            edges.push((source, t));
        }
        repeated.extend_from_slice(&targets);
        repeated.extend(std::iter::repeat_n(source, m));
        source += 1;
        if source < n {
            targets = distinct_sample(&repeated, m, rng);
        }
    }
    Ok(Graph::from_edges(n, edges))
}

fn distinct_sample<R: Rng + ?Sized>(pool: &[usize], m: usize, rng: &mut R) -> Vec<usize> {
    let mut picked = Vec::with_capacity(m);
    while picked.len() < m {
        let x = *pool.choose(rng).expect("non-empty attachment pool");
        if !picked.contains(&x) {
            picked.push(x);
        }
    }
    picked
}

/// Watts–Strogatz small world: ring lattice with `k` neighbors per node
/// (`k / 2` on each side), each lattice edge rewired with probability `p_rewire`.
pub fn generate_sw(n: usize, k: usize, p_rewire: f64, seed: u64) -> Result<Graph, GraphError> {
    generate_sw_with_rng(n, k, p_rewire, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn generate_sw_with_rng<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    p_rewire: f64,
    rng: &mut R,
) -> Result<Graph, GraphError> {
    if !k.is_multiple_of(2) {
        return Err(GraphError::InvalidParameter(format!(
            "ring degree k must be even, got {k}"
        )));
    }
    if k >= n {
        return Err(GraphError::InvalidParameter(format!(
            "ring degree k={k} must be below n={n}"
        )));
    }
    if !(0.0..=1.0).contains(&p_rewire) {
        return Err(GraphError::InvalidParameter(format!(
            "rewiring probability {p_rewire} outside [0, 1]"
        )));
    }
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for j in 1..=k / 2 {
        for u in 0..n {
            let v = (u + j) % n;
            adj[u].insert(v);
            adj[v].insert(u);
        }
    }
    for j in 1..=k / 2 {
        for u in 0..n {
            let v = (u + j) % n;
            if !rng.random_bool(p_rewire) {
                continue;
            }
            if adj[u].len() >= n - 1 {
                continue;
            }
            let mut w = rng.random_range(0..n);
            while w == u || adj[u].contains(&w) {
                w = rng.random_range(0..n);
            }
            // The lattice edge may already have been rewired away from v's side.
            if adj[u].remove(&v) {
                adj[v].remove(&u);
                adj[u].insert(w);
                adj[w].insert(u);
            }
        }
    }
    let edges = adj
        .iter()
        .enumerate()
        .flat_map(|(u, set)| set.iter().map(move |&v| (u, v)));
    Ok(Graph::from_edges(n, edges))
}

/// Reads a whitespace-separated integer edge list (SNAP style).
///
/// Lines starting with `#` and blank lines are skipped. Node ids are compacted to
/// `0..N` in ascending order of the original ids. With `undirected` set, every
/// line is an undirected edge; otherwise the file must list both orientations.
pub fn load_edge_list<R: BufRead>(source: R, undirected: bool) -> Result<Graph, GraphError> {
    let mut raw: Vec<(u64, u64)> = Vec::new();
    let mut ids: Vec<u64> = Vec::new();
    for (index, line) in source.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<u64, GraphError> {
            let tok = tok.ok_or_else(|| GraphError::Malformed {
                line: index + 1,
                reason: "expected two node ids".into(),
            })?;
            tok.parse::<u64>().map_err(|_| GraphError::Malformed {
                line: index + 1,
                reason: format!("non-integer token {tok:?}"),
            })
        };
        let u = parse(tokens.next())?;
        let v = parse(tokens.next())?;
        if let Some(extra) = tokens.next() {
            return Err(GraphError::Malformed {
                line: index + 1,
                reason: format!("unexpected trailing token {extra:?}"),
            });
        }
        ids.push(u);
        ids.push(v);
        raw.push((u, v));
    }
    if raw.is_empty() {
        return Err(GraphError::Empty);
    }
    ids.sort_unstable();
    ids.dedup();

    if !undirected {
        let mut directed: Vec<(u64, u64)> = raw.iter().copied().filter(|(u, v)| u != v).collect();
        directed.sort_unstable();
        directed.dedup();
        for &(u, v) in &directed {
            if directed.binary_search(&(v, u)).is_err() {
                return Err(GraphError::Asymmetric(u, v));
            }
        }
    }

    let index_of = |id: u64| ids.binary_search(&id).expect("id collected above");
    let edges: Vec<(usize, usize)> = raw
        .iter()
        .map(|&(u, v)| (index_of(u), index_of(v)))
        .collect();
    Ok(Graph::from_edges(ids.len(), edges))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str) -> Result<Graph, GraphError> {
        load_edge_list(text.as_bytes(), true)
    }

    #[test]
    fn er_two_nodes_is_forced_complete() {
        let g = generate_er(2, 1.0, 7).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn er_rejects_bad_parameters() {
        assert!(generate_er(1, 0.5, 0).is_err());
        assert!(generate_er(10, 0.0, 0).is_err());
        assert!(generate_er(10, 9.5, 0).is_err());
    }

    #[test]
    fn er_300_has_about_1200_edges() {
        let g = generate_er(300, 8.0, 11).unwrap();
        g.check_invariants().unwrap();
        // Binomial(44850, 8/299): sd ≈ 34.
        let e = g.edge_count() as f64;
        assert!((e - 1200.0).abs() < 5.0 * 34.2, "edges {e}");
    }

    #[test]
    fn pa_edge_count_and_triangle() {
        let g = generate_pa(300, 4, 3).unwrap();
        g.check_invariants().unwrap();
        assert_eq!(g.node_count(), 300);
        assert_eq!(g.edge_count(), (300 - 4) * 4);

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let tri = generate_pa_with_rng(3, 2, PaSeed::Complete, &mut rng).unwrap();
        assert_eq!(
            tri.edges().collect::<Vec<_>>(),
            vec![(0, 1), (0, 2), (1, 2)]
        );
    }

    #[test]
    fn pa_is_connected() {
        let g = generate_pa(200, 2, 5).unwrap();
        let mut seen = vec![false; g.node_count()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &v in g.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn pa_rejects_m_ge_n() {
        assert!(generate_pa(4, 4, 0).is_err());
        assert!(generate_pa(4, 0, 0).is_err());
    }

    #[test]
    fn sw_lattice_and_cycle() {
        let g = generate_sw(300, 8, 0.0, 1).unwrap();
        assert!((0..300).all(|i| g.degree(i) == 8));

        let c6 = generate_sw(6, 2, 0.0, 1).unwrap();
        let expected = vec![(0, 1), (0, 5), (1, 2), (2, 3), (3, 4), (4, 5)];
        assert_eq!(c6.edges().collect::<Vec<_>>(), expected);
    }

    #[test]
    fn sw_rewiring_preserves_edge_count() {
        for seed in 0..20 {
            let g = generate_sw(300, 8, 0.1, seed).unwrap();
            g.check_invariants().unwrap();
            assert_eq!(g.edge_count(), 1200);
            assert_eq!(g.mean_degree(), 8.0);
        }
    }

    #[test]
    fn sw_rejects_bad_parameters() {
        assert!(generate_sw(10, 3, 0.1, 0).is_err());
        assert!(generate_sw(10, 4, 1.5, 0).is_err());
        assert!(generate_sw(4, 4, 0.1, 0).is_err());
    }

    #[test]
    fn loader_collapses_duplicates_and_self_loops() {
        let g = load("0 1\n1 0\n").unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (2, 1));
        let g = load("0 0\n0 1\n").unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (2, 1));
    }

    #[test]
    fn loader_compacts_ids_and_keeps_isolated_nodes() {
        let g = load("# comment\n\n10 30\n30 20\n7 7\n").unwrap();
        assert_eq!(g.node_count(), 4);
        // 7 -> 0, 10 -> 1, 20 -> 2, 30 -> 3
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(1, 3), (2, 3)]);
        assert_eq!(g.degree(0), 0);
    }

    #[test]
    fn loader_errors() {
        assert!(matches!(
            load("0 x\n"),
            Err(GraphError::Malformed { line: 1, .. })
        ));
        assert!(matches!(load("0\n"), Err(GraphError::Malformed { .. })));
        assert!(matches!(load("0 1 2\n"), Err(GraphError::Malformed { .. })));
        assert!(matches!(load("# only comments\n"), Err(GraphError::Empty)));
        assert!(matches!(load(""), Err(GraphError::Empty)));
    }

    #[test]
    fn loader_directed_mode_requires_symmetry() {
        assert!(load_edge_list("0 1\n1 0\n".as_bytes(), false).is_ok());
        assert!(matches!(
            load_edge_list("0 1\n1 2\n2 1\n".as_bytes(), false),
            Err(GraphError::Asymmetric(0, 1))
        ));
    }

    #[test]
    fn canonical_text_round_trips() {
        let g = generate_er(40, 5.0, 9).unwrap();
        let text = g.to_edge_list_string();
        assert!(text.starts_with(&format!("# nodes 40 edges {}", g.edge_count())));
        let back = load(&text).unwrap();
        // Isolated nodes are lost by compaction, so compare on the non-isolated part.
        if (0..40).all(|i| g.degree(i) > 0) {
            assert_eq!(back, g);
        }
        assert_eq!(back.edge_count(), g.edge_count());
    }
}
