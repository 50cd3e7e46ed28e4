//! Binary node-state vector with incrementally maintained neighborhood counts.

use crate::graph::Graph;

const NOT_LISTED: usize = usize::MAX;

/// Node states `X` plus the caches every rate evaluation needs.
///
/// Invariants (checked by [`NetworkState::check_coherence`]):
/// `infected_neighbors(i) = Σ_{j ∈ N(i)} X_j` and `infected_count() = Σ_i X_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkState {
    states: Vec<bool>,
    infected_neighbors: Vec<u32>,
    degrees: Vec<u32>,
    /// Infected node ids in insertion order (swap-removed on recovery).
    infected: Vec<usize>,
    position: Vec<usize>,
}

impl NetworkState {
    pub fn new(graph: &Graph, states: &[bool]) -> Self {
        assert_eq!(states.len(), graph.node_count(), "state length mismatch");
        let n = graph.node_count();
        let mut state = NetworkState {
            states: vec![false; n],
            infected_neighbors: vec![0; n],
            degrees: (0..n).map(|i| graph.degree(i) as u32).collect(),
            infected: Vec::new(),
            position: vec![NOT_LISTED; n],
        };
        for (i, &s) in states.iter().enumerate() {
            if s {
                state.flip(graph, i);
            }
        }
        state
    }

    pub fn healthy(graph: &Graph) -> Self {
        NetworkState::new(graph, &vec![false; graph.node_count()])
    }

    pub fn from_infected(graph: &Graph, infected: &[usize]) -> Self {
        let mut states = vec![false; graph.node_count()];
        for &i in infected {
            states[i] = true;
        }
        NetworkState::new(graph, &states)
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.states.len()
    }

    #[inline]
    pub fn is_infected(&self, i: usize) -> bool {
        self.states[i]
    }

    #[inline]
    pub fn infected_neighbors(&self, i: usize) -> u32 {
        self.infected_neighbors[i]
    }

    #[inline]
    pub fn healthy_neighbors(&self, i: usize) -> u32 {
        self.degrees[i] - self.infected_neighbors[i]
    }

    #[inline]
    pub fn degree(&self, i: usize) -> u32 {
        self.degrees[i]
    }

    #[inline]
    pub fn infected_count(&self) -> usize {
        self.infected.len()
    }

    /// Infected nodes, in an order that depends only on the flip history.
    #[inline]
    pub fn infected(&self) -> &[usize] {
        &self.infected
    }

    pub fn states(&self) -> &[bool] {
        &self.states
    }

    /// Infected node ids in ascending order.
    pub fn infected_sorted(&self) -> Vec<usize> {
        let mut v = self.infected.clone();
        v.sort_unstable();
        v
    }

    /// Toggles node `i` and updates the neighbor caches in `O(d_i)`.
    pub fn flip(&mut self, graph: &Graph, i: usize) {
        let now_infected = !self.states[i];
        self.states[i] = now_infected;
        if now_infected {
            self.position[i] = self.infected.len();
            self.infected.push(i);
            for &j in graph.neighbors(i) {
                self.infected_neighbors[j] += 1;
            }
        } else {
            let pos = self.position[i];
            self.infected.swap_remove(pos);
            if let Some(&moved) = self.infected.get(pos) {
                self.position[moved] = pos;
            }
            self.position[i] = NOT_LISTED;
            for &j in graph.neighbors(i) {
                self.infected_neighbors[j] -= 1;
            }
        }
    }

    /// Recomputes every cache from scratch and compares.
    pub fn check_coherence(&self, graph: &Graph) -> Result<(), String> {
        for i in 0..self.node_count() {
            let n = graph
                .neighbors(i)
                .iter()
                .filter(|&&j| self.states[j])
                .count() as u32;
            if n != self.infected_neighbors[i] {
                return Err(format!(
                    "node {i}: cached {} infected neighbors, actual {n}",
                    self.infected_neighbors[i]
                ));
            }
            let listed = self.position[i] != NOT_LISTED;
            if listed != self.states[i] {
                return Err(format!("node {i}: infected list out of sync"));
            }
        }
        let total = self.states.iter().filter(|&&s| s).count();
        if total != self.infected.len() {
            return Err(format!("infected count {} != {total}", self.infected.len()));
        }
        Ok(())
    }
}
