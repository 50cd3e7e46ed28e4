//! Node transition-rate models.
//!
//! A healthy node becomes infected at rate `I(n, d)` and an infected node heals at
//! rate `H(n, d) + ρ·R`, where `n` is the number of infected neighbors and `d` the
//! degree. Every model shipped here depends on the network state only through
//! `(n, d)`, which is what makes incremental rate updates and neighborhood-local
//! scoring possible.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::state::NetworkState;

#[derive(Debug, Error, PartialEq)]
pub enum RateError {
    #[error("parameter {name} must be finite and non-negative, got {value}")]
    NegativeParameter { name: &'static str, value: f64 },
    #[error("resource assigned to healthy node {0}")]
    ResourceOnHealthyNode(usize),
}

/// Parameters of the saturating (sigmoid) rate family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmoidParams {
    /// Saturation of the infection rate.
    pub s_i: f64,
    /// Steepness of the infection rate, per infected neighbor.
    pub a_i: f64,
    /// Saturation of the recovery (positive diffusion) rate.
    pub s_h: f64,
    /// Steepness of the recovery rate, per healthy neighbor.
    pub a_h: f64,
    /// Self-recovery rate.
    pub delta: f64,
}

impl SigmoidParams {
    pub fn validate(&self) -> Result<(), RateError> {
        check_non_negative("s_i", self.s_i)?;
        check_non_negative("a_i", self.a_i)?;
        check_non_negative("s_h", self.s_h)?;
        check_non_negative("a_h", self.a_h)?;
        check_non_negative("delta", self.delta)
    }
}

/// Parameters of the standard SIS model: per-edge infection rate and self-recovery.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearSisParams {
    pub beta: f64,
    pub delta: f64,
}

impl LinearSisParams {
    pub fn validate(&self) -> Result<(), RateError> {
        check_non_negative("beta", self.beta)?;
        check_non_negative("delta", self.delta)
    }
}

fn check_non_negative(name: &'static str, value: f64) -> Result<(), RateError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(RateError::NegativeParameter { name, value })
    }
}

/// `s · [1 − 2 / (1 + exp(4·a·x))]`, i.e. `s · tanh(2·a·x)`.
#[inline]
fn saturating(s: f64, a: f64, x: f64) -> f64 {
    s * (1.0 - 2.0 / (1.0 + (4.0 * a * x).exp()))
}

/// Infection rate of a healthy node with `n` infected neighbors.
#[inline]
pub fn sigmoid_infection(n: u32, _d: u32, p: &SigmoidParams) -> f64 {
    saturating(p.s_i, p.a_i, f64::from(n))
}

/// Recovery rate of an infected node with `d − n` healthy neighbors, self-recovery included.
#[inline]
pub fn sigmoid_recovery(n: u32, d: u32, p: &SigmoidParams) -> f64 {
    debug_assert!(n <= d);
    saturating(p.s_h, p.a_h, f64::from(d - n)) + p.delta
}

/// `(β·n, δ)`.
#[inline]
pub fn linear_sis_rates(n: u32, _d: u32, p: &LinearSisParams) -> (f64, f64) {
    (p.beta * f64::from(n), p.delta)
}

pub type RateFn = Arc<dyn Fn(u32, u32) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    LinearSis,
    Sigmoid,
    Custom,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::LinearSis => "linear_sis",
            ModelKind::Sigmoid => "sigmoid",
            ModelKind::Custom => "custom",
        })
    }
}

/// Pair of node rate functions `(I, H)`.
///
/// Custom functions must satisfy the same contract as the built-in families:
/// non-negative, `I` nondecreasing and `H` nonincreasing in `n`.
#[derive(Clone)]
pub enum RateModel {
    LinearSis(LinearSisParams),
    Sigmoid(SigmoidParams),
    Custom { infection: RateFn, recovery: RateFn },
}

impl fmt::Debug for RateModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RateModel::LinearSis(p) => f.debug_tuple("LinearSis").field(p).finish(),
            RateModel::Sigmoid(p) => f.debug_tuple("Sigmoid").field(p).finish(),
            RateModel::Custom { .. } => f.write_str("Custom"),
        }
    }
}

impl RateModel {
    pub fn linear(beta: f64, delta: f64) -> Result<Self, RateError> {
        let p = LinearSisParams { beta, delta };
        p.validate()?;
        Ok(RateModel::LinearSis(p))
    }

    pub fn sigmoid(p: SigmoidParams) -> Result<Self, RateError> {
        p.validate()?;
        Ok(RateModel::Sigmoid(p))
    }

    pub fn custom<I, H>(infection: I, recovery: H) -> Self
    where
        I: Fn(u32, u32) -> f64 + Send + Sync + 'static,
        H: Fn(u32, u32) -> f64 + Send + Sync + 'static,
    {
        RateModel::Custom {
            infection: Arc::new(infection),
            recovery: Arc::new(recovery),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            RateModel::LinearSis(_) => ModelKind::LinearSis,
            RateModel::Sigmoid(_) => ModelKind::Sigmoid,
            RateModel::Custom { .. } => ModelKind::Custom,
        }
    }

    /// `I(n, d)`.
    #[inline]
    pub fn infection(&self, n: u32, d: u32) -> f64 {
        match self {
            RateModel::LinearSis(p) => linear_sis_rates(n, d, p).0,
            RateModel::Sigmoid(p) => sigmoid_infection(n, d, p),
            RateModel::Custom { infection, .. } => infection(n, d),
        }
    }

    /// `H(n, d)`, treatment excluded.
    #[inline]
    pub fn recovery(&self, n: u32, d: u32) -> f64 {
        match self {
            RateModel::LinearSis(p) => linear_sis_rates(n, d, p).1,
            RateModel::Sigmoid(p) => sigmoid_recovery(n, d, p),
            RateModel::Custom { recovery, .. } => recovery(n, d),
        }
    }

    /// Self-recovery rate `H(d, d)` for a node whose neighbors are all infected.
    pub fn recovery_floor(&self, d: u32) -> f64 {
        self.recovery(d, d)
    }

    /// Linear approximation used by rankers that only understand the standard SIS
    /// model: `β` is the slope of `I` at the origin and `δ` the recovery floor.
    pub fn linearized(&self) -> LinearSisParams {
        match self {
            RateModel::LinearSis(p) => *p,
            RateModel::Sigmoid(p) => LinearSisParams {
                beta: 2.0 * p.s_i * p.a_i,
                delta: p.delta,
            },
            RateModel::Custom {
                infection,
                recovery,
            } => LinearSisParams {
                beta: infection(1, 1) - infection(0, 1),
                delta: recovery(0, 0),
            },
        }
    }

    /// Infection rate of node `i` under the generic state-vector interface.
    pub fn infection_at(&self, graph: &Graph, states: &[bool], i: usize) -> f64 {
        let (n, d) = local_counts(graph, states, i);
        self.infection(n, d)
    }

    /// Recovery rate of node `i` under the generic state-vector interface.
    pub fn recovery_at(&self, graph: &Graph, states: &[bool], i: usize) -> f64 {
        let (n, d) = local_counts(graph, states, i);
        self.recovery(n, d)
    }
}

fn local_counts(graph: &Graph, states: &[bool], i: usize) -> (u32, u32) {
    let nbrs = graph.neighbors(i);
    let n = nbrs.iter().filter(|&&j| states[j]).count();
    (n as u32, nbrs.len() as u32)
}

/// Total transition intensity of node `i`:
/// `I(n_i, d_i)` when healthy, `H(n_i, d_i) + ρ·R_i` when infected.
pub fn node_poisson_rate(
    state: &NetworkState,
    i: usize,
    model: &RateModel,
    treated: bool,
    rho: f64,
) -> Result<f64, RateError> {
    let n = state.infected_neighbors(i);
    let d = state.degree(i);
    if state.is_infected(i) {
        let treatment = if treated { rho } else { 0.0 };
        Ok(model.recovery(n, d) + treatment)
    } else if treated {
        Err(RateError::ResourceOnHealthyNode(i))
    } else {
        Ok(model.infection(n, d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2() -> SigmoidParams {
        SigmoidParams {
            s_i: 13.0,
            a_i: 5.0,
            s_h: 2.0,
            a_h: 0.5,
            delta: 0.0,
        }
    }

    #[test]
    fn infection_is_zero_without_infected_neighbors() {
        for d in 0..10 {
            assert_eq!(sigmoid_infection(0, d, &fig2()), 0.0);
        }
    }

    #[test]
    fn sigmoid_reference_values() {
        let p = SigmoidParams { a_i: 1.0, ..fig2() };
        let expected = 13.0 * (1.0 - 2.0 / (1.0 + 4f64.exp()));
        assert!((sigmoid_infection(1, 4, &p) - expected).abs() < 1e-12);
        assert!((sigmoid_infection(1, 4, &p) - 12.5324).abs() < 5e-5);

        for n in 2..20 {
            assert!((sigmoid_infection(n, 20, &fig2()) - 13.0).abs() < 1e-9);
        }

        // d − n = 1 with s_H = 2, a_H = 0.5, δ = 0.
        let h = sigmoid_recovery(3, 4, &fig2());
        assert!((h - 2.0 * (1.0 - 2.0 / (1.0 + 2f64.exp()))).abs() < 1e-12);
        assert!((h - 1.5232).abs() < 5e-5);
    }

    #[test]
    fn recovery_floor_is_delta() {
        let p = SigmoidParams {
            delta: 0.7,
            ..fig2()
        };
        for d in 0..12 {
            assert_eq!(sigmoid_recovery(d, d, &p), 0.7);
        }
        let no_positive = SigmoidParams {
            s_h: 0.0,
            delta: 1.0,
            ..fig2()
        };
        for d in 0..12 {
            for n in 0..=d {
                assert_eq!(sigmoid_recovery(n, d, &no_positive), 1.0);
            }
        }
    }

    #[test]
    fn linear_rates() {
        let p = LinearSisParams {
            beta: 1.0,
            delta: 0.3,
        };
        assert_eq!(linear_sis_rates(3, 5, &p).0, 3.0);
        assert_eq!(linear_sis_rates(0, 5, &p).0, 0.0);
        let p = LinearSisParams {
            beta: 0.5,
            delta: 1.0,
        };
        assert_eq!(linear_sis_rates(2, 5, &p), (1.0, 1.0));
    }

    #[test]
    fn linear_limit_of_sigmoid() {
        // With 2·s·a = β fixed and a → 0, I(n)/(β n) → 1.
        let beta = 0.8;
        let a = 1e-4;
        let p = SigmoidParams {
            s_i: beta / (2.0 * a),
            a_i: a,
            s_h: 0.0,
            a_h: 0.0,
            delta: 0.0,
        };
        for n in 1..=5 {
            let ratio = sigmoid_infection(n, 10, &p) / (beta * f64::from(n));
            assert!((ratio - 1.0).abs() < 1e-3, "n={n} ratio={ratio}");
        }
    }

    #[test]
    fn negative_parameters_rejected() {
        assert!(RateModel::linear(-1.0, 0.0).is_err());
        assert!(RateModel::sigmoid(SigmoidParams {
            a_h: -0.1,
            ..fig2()
        })
        .is_err());
        assert!(RateModel::linear(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn poisson_rate_cases() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]);
        let model = RateModel::sigmoid(SigmoidParams {
            s_i: 13.0,
            a_i: 3.0,
            s_h: 2.0,
            a_h: 0.5,
            delta: 1.0,
        })
        .unwrap();

        let healthy = NetworkState::new(&g, &[false, false, false]);
        assert_eq!(
            node_poisson_rate(&healthy, 1, &model, false, 0.0).unwrap(),
            0.0
        );

        let all = NetworkState::new(&g, &[true, true, true]);
        assert_eq!(
            node_poisson_rate(&all, 1, &model, false, 120.0).unwrap(),
            1.0
        );

        let isolated = Graph::empty(1);
        let linear = RateModel::linear(2.0, 1.0).unwrap();
        let x = NetworkState::new(&isolated, &[true]);
        assert_eq!(
            node_poisson_rate(&x, 0, &linear, true, 120.0).unwrap(),
            121.0
        );

        let x = NetworkState::new(&g, &[true, false, false]);
        assert_eq!(
            node_poisson_rate(&x, 1, &model, true, 1.0),
            Err(RateError::ResourceOnHealthyNode(1))
        );
    }

    #[test]
    fn generic_adapter_matches_local_counts() {
        let g = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (2, 3)]);
        let x = [false, true, true, false];
        let m = RateModel::sigmoid(fig2()).unwrap();
        assert_eq!(m.infection_at(&g, &x, 0), m.infection(2, 3));
        assert_eq!(m.recovery_at(&g, &x, 2), m.recovery(0, 2));
    }
}
