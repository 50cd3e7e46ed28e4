//! First derivative of the expected infected count, analytic and Monte-Carlo.
//!
//! At a fixed state `X` and treatment `R`,
//! `d/du E[N_I(t+u)] at u=0 = −Σ_i H_i X_i − ρ Σ_i R_i X_i + Σ_i I_i (1 − X_i)`.
//! The estimator simulates many short horizons `h` from `X` and reports
//! `(E[N_I(h)] − N_I(0)) / h`, which converges to the same value as `h → 0`.

use rand::Rng;

use super::{Simulation, Step};
use crate::dynamics::RateModel;
use crate::graph::Graph;
use crate::state::NetworkState;

pub fn expected_infected_derivative(
    state: &NetworkState,
    model: &RateModel,
    treated: &[usize],
    rho: f64,
) -> f64 {
    let mut healing = 0.0;
    let mut infecting = 0.0;
    for i in 0..state.node_count() {
        let n = state.infected_neighbors(i);
        let d = state.degree(i);
        if state.is_infected(i) {
            healing += model.recovery(n, d);
        } else {
            infecting += model.infection(n, d);
        }
    }
    let treated_infected = treated.iter().filter(|&&i| state.is_infected(i)).count();
    -healing - rho * treated_infected as f64 + infecting
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub runs: usize,
}

/// Short-horizon Monte-Carlo estimate. Treatment stays on the initial targets for
/// the whole horizon (a target that heals drops out).
#[allow(clippy::too_many_arguments)]
pub fn estimate_infected_derivative<R: Rng + ?Sized>(
    graph: &Graph,
    state: &NetworkState,
    model: &RateModel,
    treated: &[usize],
    rho: f64,
    horizon: f64,
    runs: usize,
    rng: &mut R,
) -> DerivativeEstimate {
    let mut base = Simulation::new(graph, model, rho, state.clone());
    base.set_treatment(treated)
        .expect("treated nodes must be infected");
    let start = state.infected_count() as f64;

    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..runs {
        // Most short runs see no event at all; only clone the state when one fires.
        let delta = match base.sample(rng) {
            Step::Event { waiting_time, node } if waiting_time <= horizon => {
                let mut sim = base.clone();
                sim.flip(node);
                let mut time = waiting_time;
                loop {
                    match sim.sample(rng) {
                        Step::Event { waiting_time, node } if time + waiting_time <= horizon => {
                            time += waiting_time;
                            sim.flip(node);
                        }
                        _ => break,
                    }
                }
                sim.state().infected_count() as f64 - start
            }
            _ => 0.0,
        };
        let x = delta / horizon;
        sum += x;
        sum_sq += x * x;
    }
    let m = runs as f64;
    let mean = sum / m;
    let variance = if runs > 1 {
        ((sum_sq - m * mean * mean) / (m - 1.0)).max(0.0)
    } else {
        0.0
    };
    DerivativeEstimate {
        mean,
        std_error: (variance / m).sqrt(),
        runs,
    }
}
