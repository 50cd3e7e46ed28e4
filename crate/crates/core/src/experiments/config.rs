//! TOML experiment configuration.
//!
//! ```toml
//! name = "fig2-er"
//! seed = 7
//! runs = 100                       # M, runs per strategy or per heatmap cell
//! strategies = ["glrie", "lrie", "lrsr", "mcm", "rand"]
//! grid_points = 201                # time grid for mean curves
//! ci = "gaussian"                  # or "bootstrap" (see bootstrap_resamples)
//! resample_graph = true            # fresh generated graph per run index
//! write_trajectories = false
//!
//! [graph]
//! kind = "er"                      # er | pa | sw | edge_list
//! n = 100
//! avg_degree = 8.0                 # er; pa uses m, sw uses k and p_rewire,
//!                                  # edge_list uses path and undirected
//!
//! [model]
//! kind = "sigmoid"                 # sigmoid | linear_sis
//! s_i = 13.0
//! a_i = 5.0
//! s_h = 2.0
//! a_h = 0.5
//! delta = 1.0
//!
//! [sim]
//! rho = 155.0
//! budget = 10
//! t_max = 20.0
//! initial_fraction = 0.2           # or initial_nodes = [..]
//! # reallocation_interval = 0.5    # default: after every event
//!
//! [sweep]                          # only read by the heatmap runner
//! competitor = "lrie"
//! s_i = [1.0, 4.0, 7.0, 10.0, 13.0]
//! a_i = [0.01, 1.0, 2.0, 3.0, 5.0]
//! s_h = [0.0, 2.0]                 # optional, defaults to [model.s_h]
//! a_h = [0.5]                      # optional, defaults to [model.a_h]
//! ```
//!
//! Relative edge-list paths are resolved against the config file's directory.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::dynamics::{RateModel, SigmoidParams};
use crate::metrics::CiMethod;
use crate::simulator::{InitialInfection, Reallocation, SimConfig};
use crate::strategies::StrategyKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default = "default_strategies")]
    pub strategies: Vec<StrategyKind>,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default)]
    pub ci: CiKind,
    #[serde(default = "default_resamples")]
    pub bootstrap_resamples: usize,
    #[serde(default = "default_true")]
    pub resample_graph: bool,
    #[serde(default)]
    pub write_trajectories: bool,
    pub graph: GraphSpec,
    pub model: ModelSpec,
    pub sim: SimSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CiKind {
    #[default]
    Gaussian,
    Bootstrap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSpec {
    Er {
        n: usize,
        avg_degree: f64,
    },
    Pa {
        n: usize,
        m: usize,
    },
    Sw {
        n: usize,
        k: usize,
        p_rewire: f64,
    },
    EdgeList {
        path: PathBuf,
        #[serde(default = "default_true")]
        undirected: bool,
    },
}

impl GraphSpec {
    pub fn is_generated(&self) -> bool {
        !matches!(self, GraphSpec::EdgeList { .. })
    }

    /// Node count of generated graphs (unknown for edge lists until loaded).
    pub fn node_count(&self) -> Option<usize> {
        match *self {
            GraphSpec::Er { n, .. } | GraphSpec::Pa { n, .. } | GraphSpec::Sw { n, .. } => Some(n),
            GraphSpec::EdgeList { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Sigmoid {
        s_i: f64,
        a_i: f64,
        #[serde(default)]
        s_h: f64,
        #[serde(default)]
        a_h: f64,
        #[serde(default = "default_delta")]
        delta: f64,
    },
    LinearSis {
        beta: f64,
        #[serde(default = "default_delta")]
        delta: f64,
    },
}

impl ModelSpec {
    pub fn build(&self) -> Result<RateModel, ExperimentError> {
        let model = match *self {
            ModelSpec::Sigmoid {
                s_i,
                a_i,
                s_h,
                a_h,
                delta,
            } => RateModel::sigmoid(SigmoidParams {
                s_i,
                a_i,
                s_h,
                a_h,
                delta,
            }),
            ModelSpec::LinearSis { beta, delta } => RateModel::linear(beta, delta),
        };
        model.map_err(|e| ExperimentError::Config(format!("model: {e}")))
    }

    /// Copy with the sigmoid parameters of one heatmap cell.
    pub fn with_cell(&self, cell: &Cell) -> Result<ModelSpec, ExperimentError> {
        match *self {
            ModelSpec::Sigmoid { delta, .. } => Ok(ModelSpec::Sigmoid {
                s_i: cell.s_i,
                a_i: cell.a_i,
                s_h: cell.s_h,
                a_h: cell.a_h,
                delta,
            }),
            ModelSpec::LinearSis { .. } => Err(ExperimentError::Config(
                "a sweep needs a sigmoid model".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSpec {
    pub rho: f64,
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_initial_fraction")]
    pub initial_fraction: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_nodes: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reallocation_interval: Option<f64>,
}

impl SimSpec {
    pub fn to_sim_config(&self, seed: u64) -> SimConfig {
        SimConfig {
            t_max: self.t_max,
            budget: self.budget,
            rho: self.rho,
            initial: match &self.initial_nodes {
                Some(nodes) => InitialInfection::Nodes(nodes.clone()),
                None => InitialInfection::Fraction(self.initial_fraction),
            },
            seed,
            reallocation: match self.reallocation_interval {
                Some(dt) => Reallocation::Interval(dt),
                None => Reallocation::EveryEvent,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default = "default_competitor")]
    pub competitor: StrategyKind,
    pub s_i: Vec<f64>,
    pub a_i: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_h: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_h: Option<Vec<f64>>,
}

/// One heatmap cell's sigmoid parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub s_h: f64,
    pub a_h: f64,
    pub s_i: f64,
    pub a_i: f64,
}

fn default_name() -> String {
    "experiment".into()
}
fn default_runs() -> usize {
    100
}
fn default_strategies() -> Vec<StrategyKind> {
    StrategyKind::ALL.to_vec()
}
fn default_grid_points() -> usize {
    201
}
fn default_resamples() -> usize {
    1000
}
fn default_true() -> bool {
    true
}
fn default_delta() -> f64 {
    1.0
}
fn default_budget() -> usize {
    10
}
fn default_t_max() -> f64 {
    20.0
}
fn default_initial_fraction() -> f64 {
    0.2
}
fn default_competitor() -> StrategyKind {
    StrategyKind::Lrie
}

impl ExperimentConfig {
    /// Reads, resolves and validates a config file.
    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path).map_err(|source| ExperimentError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_toml_str(&text, base)
    }

    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self, ExperimentError> {
        let mut cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))?;
        if let GraphSpec::EdgeList { path, .. } = &mut cfg.graph {
            if path.is_relative() {
                *path = base_dir.join(&*path);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String, ExperimentError> {
        toml::to_string(self).map_err(|e| ExperimentError::Config(e.to_string()))
    }

    pub fn ci_method(&self) -> CiMethod {
        match self.ci {
            CiKind::Gaussian => CiMethod::Gaussian,
            CiKind::Bootstrap => CiMethod::Bootstrap {
                resamples: self.bootstrap_resamples,
                seed: self.seed,
            },
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |msg: String| Err(ExperimentError::Config(msg));
        if self.runs == 0 {
            return bad("runs must be at least 1".into());
        }
        if self.strategies.is_empty() {
            return bad("strategy list is empty".into());
        }
        if self.grid_points < 2 {
            return bad(format!(
                "grid_points must be at least 2, got {}",
                self.grid_points
            ));
        }
        if self.ci == CiKind::Bootstrap && self.bootstrap_resamples == 0 {
            return bad("bootstrap_resamples must be positive".into());
        }
        if let GraphSpec::EdgeList { path, .. } = &self.graph {
            if !path.is_file() {
                return bad(format!("edge list {} does not exist", path.display()));
            }
        }
        self.model.build()?;
        self.sim
            .to_sim_config(self.seed)
            .validate()
            .map_err(|e| ExperimentError::Config(e.to_string()))?;
        if let (Some(nodes), Some(n)) = (&self.sim.initial_nodes, self.graph.node_count()) {
            if let Some(bad_node) = nodes.iter().find(|&&i| i >= n) {
                return bad(format!(
                    "initial node {bad_node} out of range for {n} nodes"
                ));
            }
        }
        if let Some(sweep) = &self.sweep {
            let axes = [
                ("s_i", Some(&sweep.s_i)),
                ("a_i", Some(&sweep.a_i)),
                ("s_h", sweep.s_h.as_ref()),
                ("a_h", sweep.a_h.as_ref()),
            ];
            for (name, values) in axes {
                let Some(values) = values else { continue };
                if values.is_empty() {
                    return bad(format!("sweep axis {name} is empty"));
                }
                if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                    return bad(format!("sweep axis {name} has invalid value {v}"));
                }
            }
            for cell in self.cells()? {
                self.model.with_cell(&cell)?.build()?;
            }
        }
        Ok(())
    }

    /// Heatmap cells in output order: `s_h`, `a_h`, `s_i`, `a_i`, last varying fastest.
    pub fn cells(&self) -> Result<Vec<Cell>, ExperimentError> {
        let sweep = self
            .sweep
            .as_ref()
            .ok_or_else(|| ExperimentError::Config("missing [sweep] section".into()))?;
        let ModelSpec::Sigmoid { s_h, a_h, .. } = self.model else {
            return Err(ExperimentError::Config(
                "a sweep needs a sigmoid model".into(),
            ));
        };
        let s_h_axis = sweep.s_h.clone().unwrap_or_else(|| vec![s_h]);
        let a_h_axis = sweep.a_h.clone().unwrap_or_else(|| vec![a_h]);
        let mut cells = Vec::new();
        for &s_h in &s_h_axis {
            for &a_h in &a_h_axis {
                for &s_i in &sweep.s_i {
                    for &a_i in &sweep.a_i {
                        cells.push(Cell { s_h, a_h, s_i, a_i });
                    }
                }
            }
        }
        Ok(cells)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        [graph]
        kind = "er"
        n = 50
        avg_degree = 4.0

        [model]
        kind = "sigmoid"
        s_i = 13.0
        a_i = 3.0

        [sim]
        rho = 10.0
    "#;

    #[test]
    fn defaults_are_filled() {
        let cfg = ExperimentConfig::from_toml_str(MINIMAL, Path::new(".")).unwrap();
        assert_eq!(cfg.runs, 100);
        assert_eq!(cfg.strategies.len(), 5);
        assert_eq!(cfg.sim.t_max, 20.0);
        assert_eq!(cfg.sim.budget, 10);
        assert_eq!(cfg.sim.initial_fraction, 0.2);
        assert!(
            matches!(cfg.model, ModelSpec::Sigmoid { delta, s_h, .. } if delta == 1.0 && s_h == 0.0)
        );
    }

    #[test]
    fn serialized_config_round_trips() {
        let text =
            format!("{MINIMAL}\n[sweep]\ns_i = [1.0, 13.0]\na_i = [0.01]\ns_h = [0.0, 2.0]\n");
        let cfg = ExperimentConfig::from_toml_str(&text, Path::new(".")).unwrap();
        let echoed = cfg.to_toml_string().unwrap();
        let back = ExperimentConfig::from_toml_str(&echoed, Path::new(".")).unwrap();
        assert_eq!(back, cfg);
        let cells = cfg.cells().unwrap();
        assert_eq!(cells.len(), 4);
        assert_eq!(
            cells[0],
            Cell {
                s_h: 0.0,
                a_h: 0.0,
                s_i: 1.0,
                a_i: 0.01
            }
        );
        assert_eq!(cells[3].s_h, 2.0);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let cases = [
            MINIMAL.replace("kind = \"er\"", "kind = \"lattice\""),
            format!("strategies = [\"greedy\"]\n{MINIMAL}"),
            format!("strategies = []\n{MINIMAL}"),
            format!("runs = 0\n{MINIMAL}"),
            MINIMAL.replace("rho = 10.0", "rho = -1.0"),
            MINIMAL.replace("s_i = 13.0", "s_i = -13.0"),
            format!("{MINIMAL}\n[sweep]\ns_i = []\na_i = [1.0]\n"),
            format!("{MINIMAL}\ninitial_nodes = [50]\n"),
            format!("{MINIMAL}\ncolour = 3\n"),
        ];
        for text in &cases {
            assert!(
                ExperimentConfig::from_toml_str(text, Path::new(".")).is_err(),
                "accepted:\n{text}"
            );
        }
    }

    #[test]
    fn missing_edge_list_is_rejected_at_load() {
        let text = MINIMAL.replace(
            "kind = \"er\"\n        n = 50\n        avg_degree = 4.0",
            "kind = \"edge_list\"\n        path = \"no-such-file.txt\"",
        );
        let err = ExperimentConfig::from_toml_str(&text, Path::new("/nonexistent")).unwrap_err();
        assert!(err.to_string().contains("does not exist"), "{err}");
    }
}
