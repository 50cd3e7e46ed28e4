//! Exact simulation and greedy control of competing two-state diffusion on networks.
//!
//! * [`graph`]: undirected graphs, random generators, edge-list ingestion
//! * [`dynamics`]: infection / recovery rate models
//! * [`strategies`]: gLRIE and the LRIE, LRSR, MCM and RAND baselines
//! * [`simulator`]: Gillespie engine with per-event reallocation
//! * [`metrics`]: AUC, final infection size, extinction time, batch statistics
//! * [`experiments`]: config-driven scenario and heatmap runners

pub mod dynamics;
pub mod experiments;
pub mod graph;
pub mod metrics;
pub mod seeding;
pub mod simulator;
pub mod state;
pub mod strategies;

pub use dynamics::{LinearSisParams, RateModel, SigmoidParams};
pub use graph::Graph;
pub use state::NetworkState;
pub use strategies::{ResourceAllocation, StrategyKind};
