//! Exact event-driven simulation of the controlled two-state process.
//!
//! Gillespie direct method: the waiting time is exponential with the total
//! intensity `Λ = Σ_i λ_i` and node `i` flips with probability `λ_i / Λ`. Only the
//! flipped node and its neighbors change rate, so an event costs `O(d_i log N)`
//! plus the reallocation.

mod oracle;
mod rates;
mod trajectory;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use oracle::{estimate_infected_derivative, expected_infected_derivative, DerivativeEstimate};
pub use trajectory::{Event, Trajectory, TrajectoryError};

use crate::dynamics::{node_poisson_rate, RateError, RateModel};
use crate::graph::Graph;
use crate::seeding::{stream_rng, stream_seed, Stream};
use crate::state::NetworkState;
use crate::strategies::{Allocator, StrategyError, StrategyKind};
use rates::RateTree;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Rate(#[from] RateError),
}

/// How the initially infected set is chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialInfection {
    /// `round(f · N)` nodes (at least one) drawn uniformly without replacement.
    Fraction(f64),
    Nodes(Vec<usize>),
}

impl InitialInfection {
    pub fn draw<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<usize>, SimError> {
        let mut nodes = match self {
            InitialInfection::Fraction(f) => {
                if !(*f > 0.0 && *f <= 1.0) {
                    return Err(SimError::InvalidConfig(format!(
                        "initial fraction {f} outside (0, 1]"
                    )));
                }
                let k = ((f * n as f64).round() as usize).clamp(1, n.max(1)).min(n);
                rand::seq::index::sample(rng, n, k).into_vec()
            }
            InitialInfection::Nodes(list) => {
                if let Some(bad) = list.iter().find(|&&i| i >= n) {
                    return Err(SimError::InvalidConfig(format!(
                        "initial node {bad} out of range for {n} nodes"
                    )));
                }
                list.clone()
            }
        };
        nodes.sort_unstable();
        nodes.dedup();
        Ok(nodes)
    }
}

/// When treatment is reassigned.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reallocation {
    /// After every state change.
    EveryEvent,
    /// At times `0, Δ, 2Δ, …`; a treated node that heals in between frees its
    /// resource until the next reallocation.
    Interval(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub t_max: f64,
    pub budget: usize,
    pub rho: f64,
    pub initial: InitialInfection,
    pub seed: u64,
    pub reallocation: Reallocation,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            t_max: 20.0,
            budget: 10,
            rho: 0.0,
            initial: InitialInfection::Fraction(0.2),
            seed: 0,
            reallocation: Reallocation::EveryEvent,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(SimError::InvalidConfig(format!(
                "t_max {} must be positive",
                self.t_max
            )));
        }
        if !(self.rho >= 0.0 && self.rho.is_finite()) {
            return Err(SimError::InvalidConfig(format!(
                "rho {} must be non-negative",
                self.rho
            )));
        }
        if let InitialInfection::Fraction(f) = self.initial {
            if !(f > 0.0 && f <= 1.0) {
                return Err(SimError::InvalidConfig(format!(
                    "initial fraction {f} outside (0, 1]"
                )));
            }
        }
        if let Reallocation::Interval(dt) = self.reallocation {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(SimError::InvalidConfig(format!(
                    "reallocation interval {dt} must be positive"
                )));
            }
        }
        Ok(())
    }
}

/// Outcome of one Gillespie draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Step {
    Event {
        waiting_time: f64,
        node: usize,
    },
    /// `Λ = 0`: no transition can ever fire from the current state.
    Absorbed,
}

/// Mutable simulation state: node states, treatment and the intensity tree.
#[derive(Debug, Clone)]
pub struct Simulation<'a> {
    graph: &'a Graph,
    model: &'a RateModel,
    rho: f64,
    state: NetworkState,
    treated: Vec<bool>,
    treated_list: Vec<usize>,
    rates: RateTree,
}

impl<'a> Simulation<'a> {
    pub fn new(graph: &'a Graph, model: &'a RateModel, rho: f64, state: NetworkState) -> Self {
        let n = graph.node_count();
        let mut sim = Simulation {
            graph,
            model,
            rho,
            state,
            treated: vec![false; n],
            treated_list: Vec::new(),
            rates: RateTree::new(n),
        };
        for i in 0..n {
            sim.refresh(i);
        }
        sim
    }

    pub fn state(&self) -> &NetworkState {
        &self.state
    }

    pub fn treated(&self) -> &[usize] {
        &self.treated_list
    }

    pub fn total_rate(&self) -> f64 {
        self.rates.total()
    }

    pub fn node_rate(&self, i: usize) -> f64 {
        self.rates.get(i)
    }

    #[inline]
    fn refresh(&mut self, i: usize) {
        let rate = node_poisson_rate(&self.state, i, self.model, self.treated[i], self.rho)
            .expect("treatment is only ever held by infected nodes");
        self.rates.set(i, rate);
    }

    /// Replaces the treated set. Every target must be infected.
    pub fn set_treatment(&mut self, targets: &[usize]) -> Result<(), SimError> {
        if let Some(&i) = targets.iter().find(|&&i| !self.state.is_infected(i)) {
            return Err(RateError::ResourceOnHealthyNode(i).into());
        }
        let old = std::mem::take(&mut self.treated_list);
        for &i in &old {
            self.treated[i] = false;
        }
        for &i in targets {
            self.treated[i] = true;
        }
        for &i in old.iter().chain(targets) {
            self.refresh(i);
        }
        self.treated_list = targets.to_vec();
        Ok(())
    }

    /// Draws the next transition without applying it.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Step {
        let total = self.rates.total();
        if total <= 0.0 {
            return Step::Absorbed;
        }
        let unit: f64 = rng.sample(Exp1);
        let waiting_time = unit / total;
        let node = self.rates.find(rng.random::<f64>() * total);
        Step::Event { waiting_time, node }
    }

    /// Flips `node` and updates the intensities of it and its neighbors. A treated
    /// node that heals loses its resource.
    pub fn flip(&mut self, node: usize) {
        self.state.flip(self.graph, node);
        if self.treated[node] && !self.state.is_infected(node) {
            self.treated[node] = false;
            self.treated_list.retain(|&i| i != node);
        }
        self.refresh(node);
        let graph = self.graph;
        for &j in graph.neighbors(node) {
            self.refresh(j);
        }
    }

    /// One Gillespie step: sample and apply.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Step {
        let step = self.sample(rng);
        if let Step::Event { node, .. } = step {
            self.flip(node);
        }
        step
    }
}

/// Runs one controlled trajectory. Randomness is split from `cfg.seed` into
/// independent streams for the initial condition, the dynamics and the strategy.
pub fn run(
    graph: &Graph,
    model: &RateModel,
    strategy: StrategyKind,
    cfg: &SimConfig,
) -> Result<Trajectory, SimError> {
    cfg.validate()?;
    let initial = cfg.initial.draw(
        graph.node_count(),
        &mut stream_rng(cfg.seed, 0, Stream::InitialInfection),
    )?;
    let mut allocator = Allocator::new(
        strategy,
        graph,
        model,
        stream_seed(cfg.seed, 0, Stream::Strategy),
    )?;
    let mut rng = stream_rng(cfg.seed, 0, Stream::Dynamics);
    let mut traj = simulate(graph, model, &mut allocator, cfg, &initial, &mut rng)?;
    traj.metadata
        .insert(0, ("seed".into(), cfg.seed.to_string()));
    Ok(traj)
}

/// Simulation loop with a caller-provided allocator and dynamics generator.
///
/// Stops at extinction (`N_I = 0`, which is absorbing) or when the next event
/// would fall after `t_max`.
pub fn simulate(
    graph: &Graph,
    model: &RateModel,
    allocator: &mut Allocator,
    cfg: &SimConfig,
    initial: &[usize],
    rng: &mut ChaCha8Rng,
) -> Result<Trajectory, SimError> {
    cfg.validate()?;
    let state = NetworkState::from_infected(graph, initial);
    let initial_infected = state.infected_sorted();
    let mut sim = Simulation::new(graph, model, cfg.rho, state);
    allocator.sync(graph, sim.state(), model);

    let mut targets = Vec::with_capacity(cfg.budget);
    let mut max_treated = 0;
    let mut reallocate =
        |sim: &mut Simulation, allocator: &mut Allocator| -> Result<(), SimError> {
            allocator.select(sim.state(), cfg.budget, &mut targets);
            sim.set_treatment(&targets)?;
            max_treated = max_treated.max(targets.len());
            Ok(())
        };
    reallocate(&mut sim, allocator)?;

    let mut next_reallocation = match cfg.reallocation {
        Reallocation::EveryEvent => f64::INFINITY,
        Reallocation::Interval(dt) => dt,
    };
    let mut events = Vec::new();
    let mut time = 0.0;
    let final_time = loop {
        if sim.state().infected_count() == 0 {
            break time;
        }
        let (waiting_time, node) = match sim.sample(rng) {
            Step::Absorbed => break cfg.t_max,
            Step::Event { waiting_time, node } => (waiting_time, node),
        };
        if time + waiting_time > next_reallocation && next_reallocation <= cfg.t_max {
            // Memoryless: discard the draw, reassign treatment and redraw.
            time = next_reallocation;
            if let Reallocation::Interval(dt) = cfg.reallocation {
                next_reallocation += dt;
            }
            reallocate(&mut sim, allocator)?;
            continue;
        }
        if time + waiting_time > cfg.t_max {
            break cfg.t_max;
        }
        time += waiting_time;
        sim.flip(node);
        allocator.on_flip(graph, sim.state(), model, node);
        events.push(Event {
            time,
            node,
            infected: sim.state().is_infected(node),
        });
        #[cfg(debug_assertions)]
        if events.len() % 1000 == 0 {
            sim.state()
                .check_coherence(graph)
                .expect("neighbor-count cache diverged");
        }
        if cfg.reallocation == Reallocation::EveryEvent {
            reallocate(&mut sim, allocator)?;
            debug_assert!(sim.treated().len() <= cfg.budget);
        }
    };

    Ok(Trajectory {
        node_count: graph.node_count(),
        initial_infected,
        events,
        t_max: cfg.t_max,
        final_time,
        max_treated,
        metadata: vec![
            ("strategy".into(), allocator.kind().to_string()),
            ("budget".into(), cfg.budget.to_string()),
            ("rho".into(), cfg.rho.to_string()),
            ("model".into(), model.kind().to_string()),
        ],
    })
}
