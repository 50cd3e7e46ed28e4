//! Resource-allocation policies.
//!
//! Each policy ranks the currently infected nodes and treats the best
//! `min(b, N_I)` of them. gLRIE and LRIE rank dynamically by score, LRSR and MCM
//! follow a priority order computed once per graph, RAND samples uniformly.
//!
//! [`Allocator`] is the stateful form used inside the simulator: it keeps the
//! ranking of infected nodes up to date in `O(changed nodes · log N)` per flip
//! instead of rescoring the whole network.

mod arrangement;
mod score;
mod spectral;

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use arrangement::{
    fiedler_vector, improve_by_adjacent_swaps, maxcut, mcm_ordering, prefix_cuts, MCM_HEURISTIC,
};
pub use score::{glrie_score, glrie_scores, lrie_score, lrie_scores, rank_cmp, ScoreVector};
pub use spectral::{
    lrsr_ranking, principal_eigenvector, PrincipalEigen, POWER_MAX_ITERATIONS, POWER_TOLERANCE,
};

use crate::dynamics::{LinearSisParams, RateModel};
use crate::graph::Graph;
use crate::state::NetworkState;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StrategyError {
    #[error("unknown strategy {0:?} (expected glrie, lrie, lrsr, mcm or rand)")]
    Unknown(String),
    #[error(
        "power iteration did not converge after {iterations} iterations (residual {residual:e})"
    )]
    NoConvergence { iterations: usize, residual: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyKind {
    Glrie,
    Lrie,
    Lrsr,
    Mcm,
    Rand,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 5] = [
        StrategyKind::Glrie,
        StrategyKind::Lrie,
        StrategyKind::Lrsr,
        StrategyKind::Mcm,
        StrategyKind::Rand,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::Glrie => "glrie",
            StrategyKind::Lrie => "lrie",
            StrategyKind::Lrsr => "lrsr",
            StrategyKind::Mcm => "mcm",
            StrategyKind::Rand => "rand",
        }
    }

    /// Short description of how the ranking is obtained, for run metadata.
    pub fn method(self) -> &'static str {
        match self {
            StrategyKind::Glrie => "dynamic local score on the full rate model",
            StrategyKind::Lrie => {
                "dynamic score beta*(healthy-infected)-delta on the linearized model"
            }
            StrategyKind::Lrsr => {
                "static first-order eigen-drop u_i^2 (approximation, ignores finite rho)"
            }
            StrategyKind::Mcm => MCM_HEURISTIC,
            StrategyKind::Rand => "uniform resample of infected nodes at every reallocation",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = StrategyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "glrie" => Ok(StrategyKind::Glrie),
            "lrie" => Ok(StrategyKind::Lrie),
            "lrsr" => Ok(StrategyKind::Lrsr),
            "mcm" => Ok(StrategyKind::Mcm),
            "rand" => Ok(StrategyKind::Rand),
            _ => Err(StrategyError::Unknown(s.to_string())),
        }
    }
}

/// Set of treated nodes (`R_i = 1`) under budget `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResourceAllocation {
    /// Ascending node ids.
    pub targets: Vec<usize>,
    pub budget: usize,
}

impl ResourceAllocation {
    pub fn new(mut targets: Vec<usize>, budget: usize) -> Self {
        targets.sort_unstable();
        ResourceAllocation { targets, budget }
    }

    pub fn empty(budget: usize) -> Self {
        ResourceAllocation {
            targets: Vec::new(),
            budget,
        }
    }

    pub fn contains(&self, node: usize) -> bool {
        self.targets.binary_search(&node).is_ok()
    }

    /// Targets are all infected and there are exactly `min(b, N_I)` of them.
    pub fn validate(&self, state: &NetworkState) -> Result<(), String> {
        if let Some(&healthy) = self.targets.iter().find(|&&i| !state.is_infected(i)) {
            return Err(format!("target {healthy} is healthy"));
        }
        let expected = self.budget.min(state.infected_count());
        if self.targets.len() != expected {
            return Err(format!(
                "{} targets, expected min(b={}, N_I={}) = {expected}",
                self.targets.len(),
                self.budget,
                state.infected_count()
            ));
        }
        if self.targets.windows(2).any(|w| w[0] >= w[1]) {
            return Err("targets not strictly ascending".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct Ranked {
    score: f64,
    node: usize,
}

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ranked {}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        rank_cmp((self.node, self.score), (other.node, other.score))
    }
}

#[derive(Debug, Clone, Copy)]
enum Scorer {
    Glrie,
    Lrie(LinearSisParams),
}

#[derive(Debug, Clone)]
enum Ranking {
    Dynamic {
        scorer: Scorer,
        scores: Vec<Option<f64>>,
        order: BTreeSet<Ranked>,
        stamp: Vec<u32>,
        epoch: u32,
        dirty: Vec<usize>,
    },
    Static {
        position: Vec<usize>,
        order: BTreeSet<(usize, usize)>,
    },
    Random {
        rng: ChaCha8Rng,
    },
}

/// Stateful allocator tracking one simulation's infected set.
///
/// Call [`Allocator::sync`] once for an initial state, [`Allocator::on_flip`] after
/// every state change and [`Allocator::select`] whenever treatment is reassigned.
#[derive(Debug, Clone)]
pub struct Allocator {
    kind: StrategyKind,
    ranking: Ranking,
}

impl Allocator {
    /// Precomputes static rankings. `seed` drives RAND's sampling and MCM's
    /// Fiedler start vector.
    pub fn new(
        kind: StrategyKind,
        graph: &Graph,
        model: &RateModel,
        seed: u64,
    ) -> Result<Self, StrategyError> {
        let ranking = match kind {
            StrategyKind::Glrie => Self::dynamic(Scorer::Glrie, graph),
            StrategyKind::Lrie => Self::dynamic(Scorer::Lrie(model.linearized()), graph),
            StrategyKind::Lrsr => Self::from_priority(lrsr_ranking(graph)?),
            StrategyKind::Mcm => Self::from_priority(mcm_ordering(graph, seed)),
            StrategyKind::Rand => Ranking::Random {
                rng: ChaCha8Rng::seed_from_u64(seed),
            },
        };
        Ok(Allocator { kind, ranking })
    }

    /// Static allocator from an explicit priority order (first = treated first).
    pub fn with_priority(kind: StrategyKind, priority: Vec<usize>) -> Self {
        Allocator {
            kind,
            ranking: Self::from_priority(priority),
        }
    }

    fn dynamic(scorer: Scorer, graph: &Graph) -> Ranking {
        let n = graph.node_count();
        Ranking::Dynamic {
            scorer,
            scores: vec![None; n],
            order: BTreeSet::new(),
            stamp: vec![0; n],
            epoch: 0,
            dirty: Vec::new(),
        }
    }

    fn from_priority(priority: Vec<usize>) -> Ranking {
        let mut position = vec![0; priority.len()];
        for (p, &node) in priority.iter().enumerate() {
            position[node] = p;
        }
        Ranking::Static {
            position,
            order: BTreeSet::new(),
        }
    }

    pub fn kind(&self) -> StrategyKind {
        self.kind
    }

    /// Rebuilds the ranking for `state` from scratch.
    pub fn sync(&mut self, graph: &Graph, state: &NetworkState, model: &RateModel) {
        match &mut self.ranking {
            Ranking::Dynamic {
                scorer,
                scores,
                order,
                ..
            } => {
                order.clear();
                scores.iter_mut().for_each(|s| *s = None);
                for &i in state.infected() {
                    let s = evaluate(*scorer, graph, state, model, i);
                    scores[i] = Some(s);
                    order.insert(Ranked { score: s, node: i });
                }
            }
            Ranking::Static { position, order } => {
                order.clear();
                for &i in state.infected() {
                    order.insert((position[i], i));
                }
            }
            Ranking::Random { .. } => {}
        }
    }

    /// Updates the ranking after `node` flipped; `state` must already reflect it.
    pub fn on_flip(&mut self, graph: &Graph, state: &NetworkState, model: &RateModel, node: usize) {
        match &mut self.ranking {
            Ranking::Dynamic {
                scorer,
                scores,
                order,
                stamp,
                epoch,
                dirty,
            } => {
                *epoch = epoch.wrapping_add(1);
                if *epoch == 0 {
                    stamp.iter_mut().for_each(|s| *s = 0);
                    *epoch = 1;
                }
                dirty.clear();
                let mut mark = |i: usize, dirty: &mut Vec<usize>| {
                    if stamp[i] != *epoch {
                        stamp[i] = *epoch;
                        dirty.push(i);
                    }
                };
                mark(node, dirty);
                for &j in graph.neighbors(node) {
                    mark(j, dirty);
                    // gLRIE scores also read the neighbors' counts, so the change
                    // reaches two hops.
                    if let Scorer::Glrie = scorer {
                        for &k in graph.neighbors(j) {
                            mark(k, dirty);
                        }
                    }
                }
                for &i in dirty.iter() {
                    if let Some(old) = scores[i].take() {
                        order.remove(&Ranked {
                            score: old,
                            node: i,
                        });
                    }
                    if state.is_infected(i) {
                        let s = evaluate(*scorer, graph, state, model, i);
                        scores[i] = Some(s);
                        order.insert(Ranked { score: s, node: i });
                    }
                }
            }
            Ranking::Static { position, order } => {
                let key = (position[node], node);
                if state.is_infected(node) {
                    order.insert(key);
                } else {
                    order.remove(&key);
                }
            }
            Ranking::Random { .. } => {}
        }
    }

    /// Writes the `min(budget, N_I)` chosen nodes into `out`, best first.
    pub fn select(&mut self, state: &NetworkState, budget: usize, out: &mut Vec<usize>) {
        out.clear();
        match &mut self.ranking {
            Ranking::Dynamic { order, .. } => {
                out.extend(order.iter().take(budget).map(|r| r.node));
            }
            Ranking::Static { order, .. } => {
                out.extend(order.iter().take(budget).map(|&(_, node)| node));
            }
            Ranking::Random { rng } => {
                let infected = state.infected();
                let k = budget.min(infected.len());
                out.extend(
                    rand::seq::index::sample(rng, infected.len(), k)
                        .into_iter()
                        .map(|p| infected[p]),
                );
            }
        }
    }

    /// Current ranked scores (dynamic strategies only).
    pub fn scores(&self) -> Option<ScoreVector> {
        match &self.ranking {
            Ranking::Dynamic { order, .. } => Some(ScoreVector::from_scores(
                order.iter().map(|r| (r.node, r.score)).collect(),
            )),
            _ => None,
        }
    }
}

fn evaluate(
    scorer: Scorer,
    graph: &Graph,
    state: &NetworkState,
    model: &RateModel,
    i: usize,
) -> f64 {
    match scorer {
        Scorer::Glrie => glrie_score(graph, state, model, i),
        Scorer::Lrie(p) => lrie_score(state, &p, i),
    }
}

/// One-shot allocation for a single state.
pub fn allocate(
    kind: StrategyKind,
    graph: &Graph,
    state: &NetworkState,
    model: &RateModel,
    budget: usize,
    seed: u64,
) -> Result<ResourceAllocation, StrategyError> {
    let mut allocator = Allocator::new(kind, graph, model, seed)?;
    allocator.sync(graph, state, model);
    let mut targets = Vec::new();
    allocator.select(state, budget, &mut targets);
    Ok(ResourceAllocation::new(targets, budget))
}
