//! Criticality scores for infected nodes.

use std::cmp::Ordering;

use crate::dynamics::{LinearSisParams, RateModel};
use crate::graph::Graph;
use crate::state::NetworkState;

/// gLRIE score of infected node `i`:
///
/// `S_i = −[(H_i + I_i) + Σ_j (X_j·ΔH_{j,i} − (1 − X_j)·ΔI_{j,i})]`
///
/// where `ΔH_{j,i}` / `ΔI_{j,i}` are the changes in node `j`'s recovery / infection
/// rate caused by counting `i` as healthy. Rates depend on `(n, d)` only, so every
/// non-neighbor term vanishes and the sum runs over `N(i)`.
pub fn glrie_score(graph: &Graph, state: &NetworkState, model: &RateModel, i: usize) -> f64 {
    debug_assert!(state.is_infected(i), "score requested for healthy node {i}");
    let n_i = state.infected_neighbors(i);
    let d_i = state.degree(i);
    let own = model.recovery(n_i, d_i) + model.infection(n_i, d_i);

    let mut neighborhood = 0.0;
    for &j in graph.neighbors(i) {
        let d = state.degree(j);
        // i is infected and adjacent to j, so n ≥ 1.
        let n = state.infected_neighbors(j);
        if state.is_infected(j) {
            let dh = model.recovery(n, d) - model.recovery(n - 1, d);
            debug_assert!(dh <= 0.0, "ΔH_{{{j},{i}}} = {dh} > 0");
            neighborhood += dh;
        } else {
            let di = model.infection(n, d) - model.infection(n - 1, d);
            debug_assert!(di >= 0.0, "ΔI_{{{j},{i}}} = {di} < 0");
            neighborhood -= di;
        }
    }
    -(own + neighborhood)
}

/// LRIE score: `β·(healthy neighbors − infected neighbors) − δ`.
#[inline]
pub fn lrie_score(state: &NetworkState, p: &LinearSisParams, i: usize) -> f64 {
    let healthy = f64::from(state.healthy_neighbors(i));
    let infected = f64::from(state.infected_neighbors(i));
    p.beta * (healthy - infected) - p.delta
}

/// Descending score, then ascending node id.
#[inline]
pub fn rank_cmp(a: (usize, f64), b: (usize, f64)) -> Ordering {
    b.1.total_cmp(&a.1).then(a.0.cmp(&b.0))
}

/// Scores of the infected nodes, kept in rank order.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    entries: Vec<(usize, f64)>,
}

impl ScoreVector {
    pub fn from_scores(mut entries: Vec<(usize, f64)>) -> Self {
        entries.sort_by(|&a, &b| rank_cmp(a, b));
        ScoreVector { entries }
    }

    /// `(node, score)` pairs, best first.
    pub fn ranked(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn ordering(&self) -> Vec<usize> {
        self.entries.iter().map(|&(i, _)| i).collect()
    }

    /// `None` for healthy nodes: their score is undefined, not zero.
    pub fn score(&self, node: usize) -> Option<f64> {
        self.entries.iter().find(|e| e.0 == node).map(|e| e.1)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn glrie_scores(graph: &Graph, state: &NetworkState, model: &RateModel) -> ScoreVector {
    ScoreVector::from_scores(
        state
            .infected()
            .iter()
            .map(|&i| (i, glrie_score(graph, state, model, i)))
            .collect(),
    )
}

pub fn lrie_scores(state: &NetworkState, p: &LinearSisParams) -> ScoreVector {
    ScoreVector::from_scores(
        state
            .infected()
            .iter()
            .map(|&i| (i, lrie_score(state, p, i)))
            .collect(),
    )
}
