//! Config-driven scenario runs and parameter-grid heatmaps.
//!
//! Jobs (one per run index, or per heatmap cell and run index) run on a rayon
//! pool and are collected by index, so every output file is identical for any
//! worker count.
//!
//! Seeds per run index `r` under master seed `s`:
//! * graph: `stream_seed(s, r, Graph)`, or run 0's when `resample_graph = false`
//!   or the graph is an edge list
//! * environment: `stream_seed(s, r, Run)`, shared by every strategy, from which
//!   the initial infection, the dynamics and the strategy streams are derived

mod config;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

pub use config::{Cell, CiKind, ExperimentConfig, GraphSpec, ModelSpec, SimSpec, SweepSpec};

use crate::dynamics::RateModel;
use crate::graph::{self, Graph, GraphError};
use crate::metrics::{
    time_grid, AucRatio, BatchSummary, Estimate, MetricsError, RunMetrics, RunRecord,
};
use crate::seeding::{stream_rng, stream_seed, Stream};
use crate::simulator::{simulate, SimError, Trajectory};
use crate::strategies::{lrsr_ranking, mcm_ordering, Allocator, StrategyError, StrategyKind};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("worker pool: {0}")]
    Pool(String),
}

/// A graph instance with the static rankings it needs.
#[derive(Debug)]
pub struct PreparedGraph {
    pub graph: Graph,
    pub seed: u64,
    lrsr: Option<Vec<usize>>,
    mcm: Option<Vec<usize>>,
}

impl PreparedGraph {
    pub fn new(
        graph: Graph,
        seed: u64,
        strategies: &[StrategyKind],
    ) -> Result<Self, StrategyError> {
        let lrsr = if strategies.contains(&StrategyKind::Lrsr) {
            Some(lrsr_ranking(&graph)?)
        } else {
            None
        };
        let mcm = strategies
            .contains(&StrategyKind::Mcm)
            .then(|| mcm_ordering(&graph, stream_seed(seed, 0, Stream::Strategy)));
        Ok(PreparedGraph {
            graph,
            seed,
            lrsr,
            mcm,
        })
    }

    fn allocator(
        &self,
        kind: StrategyKind,
        model: &RateModel,
        strategy_seed: u64,
    ) -> Result<Allocator, StrategyError> {
        match (kind, &self.lrsr, &self.mcm) {
            (StrategyKind::Lrsr, Some(p), _) | (StrategyKind::Mcm, _, Some(p)) => {
                Ok(Allocator::with_priority(kind, p.clone()))
            }
            _ => Allocator::new(kind, &self.graph, model, strategy_seed),
        }
    }
}

pub fn build_graph(spec: &GraphSpec, seed: u64) -> Result<Graph, ExperimentError> {
    let g = match spec {
        GraphSpec::Er { n, avg_degree } => graph::generate_er(*n, *avg_degree, seed)?,
        GraphSpec::Pa { n, m } => graph::generate_pa(*n, *m, seed)?,
        GraphSpec::Sw { n, k, p_rewire } => graph::generate_sw(*n, *k, *p_rewire, seed)?,
        GraphSpec::EdgeList { path, undirected } => {
            let file = File::open(path).map_err(|source| ExperimentError::Io {
                path: path.clone(),
                source,
            })?;
            graph::load_edge_list(BufReader::new(file), *undirected)?
        }
    };
    Ok(g)
}

/// Seeds used by run index `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RunSeeds {
    pub run: usize,
    pub environment: u64,
    pub graph: u64,
}

pub fn run_seeds(cfg: &ExperimentConfig) -> Vec<RunSeeds> {
    let shared_graph = !(cfg.resample_graph && cfg.graph.is_generated());
    (0..cfg.runs)
        .map(|r| RunSeeds {
            run: r,
            environment: stream_seed(cfg.seed, r as u64, Stream::Run),
            graph: stream_seed(
                cfg.seed,
                if shared_graph { 0 } else { r as u64 },
                Stream::Graph,
            ),
        })
        .collect()
}

/// One graph per distinct graph seed, in run order; `index[r]` points into it.
struct GraphPool {
    graphs: Vec<Arc<PreparedGraph>>,
    index: Vec<usize>,
}

impl GraphPool {
    fn build(
        cfg: &ExperimentConfig,
        seeds: &[RunSeeds],
        strategies: &[StrategyKind],
    ) -> Result<Self, ExperimentError> {
        let mut distinct: Vec<u64> = Vec::new();
        let mut index = Vec::with_capacity(seeds.len());
        for s in seeds {
            match distinct.iter().position(|&g| g == s.graph) {
                Some(p) => index.push(p),
                None => {
                    index.push(distinct.len());
                    distinct.push(s.graph);
                }
            }
        }
        let graphs = distinct
            .par_iter()
            .map(|&seed| {
                let g = build_graph(&cfg.graph, seed)?;
                Ok(Arc::new(PreparedGraph::new(g, seed, strategies)?))
            })
            .collect::<Result<Vec<_>, ExperimentError>>()?;
        if let (Some(nodes), Some(g)) = (&cfg.sim.initial_nodes, graphs.first()) {
            let n = g.graph.node_count();
            if let Some(bad) = nodes.iter().find(|&&i| i >= n) {
                return Err(ExperimentError::Config(format!(
                    "initial node {bad} out of range for {n} nodes"
                )));
            }
        }
        Ok(GraphPool { graphs, index })
    }

    fn get(&self, run: usize) -> &PreparedGraph {
        &self.graphs[self.index[run]]
    }
}

/// One seeded run of one strategy. Every strategy sees the same initial set and
/// dynamics stream for a given environment seed.
pub fn run_single(
    prepared: &PreparedGraph,
    model: &RateModel,
    kind: StrategyKind,
    sim: &SimSpec,
    seeds: RunSeeds,
) -> Result<Trajectory, ExperimentError> {
    let cfg = sim.to_sim_config(seeds.environment);
    let graph = &prepared.graph;
    let initial = cfg.initial.draw(
        graph.node_count(),
        &mut stream_rng(cfg.seed, 0, Stream::InitialInfection),
    )?;
    let mut allocator =
        prepared.allocator(kind, model, stream_seed(cfg.seed, 0, Stream::Strategy))?;
    let mut rng = stream_rng(cfg.seed, 0, Stream::Dynamics);
    let mut traj = simulate(graph, model, &mut allocator, &cfg, &initial, &mut rng)?;
    if traj.max_treated > cfg.budget {
        return Err(ExperimentError::Sim(SimError::InvalidConfig(format!(
            "{kind} treated {} nodes with budget {}",
            traj.max_treated, cfg.budget
        ))));
    }
    traj.metadata
        .insert(0, ("seed".into(), seeds.environment.to_string()));
    traj.metadata
        .insert(0, ("run".into(), seeds.run.to_string()));
    Ok(traj)
}

fn with_pool<T: Send>(
    workers: usize,
    job: impl FnOnce() -> Result<T, ExperimentError> + Send,
) -> Result<T, ExperimentError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| ExperimentError::Pool(e.to_string()))?
        .install(job)
}

#[derive(Debug, Clone)]
pub struct StrategyBatch {
    pub strategy: StrategyKind,
    pub summary: BatchSummary,
    pub max_treated: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub node_count: usize,
    pub seeds: Vec<RunSeeds>,
    pub batches: Vec<StrategyBatch>,
}

impl ScenarioOutcome {
    pub fn batch(&self, kind: StrategyKind) -> Option<&BatchSummary> {
        self.batches
            .iter()
            .find(|b| b.strategy == kind)
            .map(|b| &b.summary)
    }
}

struct RunOutput {
    record: RunRecord,
    max_treated: usize,
    log: Option<String>,
}

/// `M` seeded runs per strategy. With `out = Some(dir)` the results are written
/// there (see [`write_scenario`]).
pub fn run_scenario(
    cfg: &ExperimentConfig,
    out: Option<&Path>,
    workers: usize,
) -> Result<ScenarioOutcome, ExperimentError> {
    cfg.validate()?;
    let model = cfg.model.build()?;
    let seeds = run_seeds(cfg);
    let grid = time_grid(cfg.sim.t_max, cfg.grid_points)?;

    let (node_count, per_run) = with_pool(workers, || {
        let pool = GraphPool::build(cfg, &seeds, &cfg.strategies)?;
        let per_run = seeds
            .par_iter()
            .map(|&s| {
                let prepared = pool.get(s.run);
                cfg.strategies
                    .iter()
                    .map(|&kind| {
                        let traj = run_single(prepared, &model, kind, &cfg.sim, s)?;
                        Ok(RunOutput {
                            record: RunRecord::new(&traj, &grid),
                            max_treated: traj.max_treated,
                            log: cfg.write_trajectories.then(|| traj.to_log_string()),
                        })
                    })
                    .collect::<Result<Vec<_>, ExperimentError>>()
            })
            .collect::<Result<Vec<_>, ExperimentError>>()?;
        Ok((pool.get(0).graph.node_count(), per_run))
    })?;

    let mut batches = Vec::with_capacity(cfg.strategies.len());
    for (k, &strategy) in cfg.strategies.iter().enumerate() {
        let records: Vec<RunRecord> = per_run.iter().map(|r| r[k].record.clone()).collect();
        let summary = BatchSummary::from_records(
            &records,
            node_count,
            cfg.sim.t_max,
            grid.clone(),
            cfg.ci_method(),
        )?;
        batches.push(StrategyBatch {
            strategy,
            summary,
            max_treated: per_run.iter().map(|r| r[k].max_treated).collect(),
        });
    }
    let outcome = ScenarioOutcome {
        node_count,
        seeds,
        batches,
    };

    if let Some(dir) = out {
        write_scenario(cfg, &outcome, dir)?;
        if cfg.write_trajectories {
            let traj_dir = dir.join("trajectories");
            create_dir(&traj_dir)?;
            for (r, outputs) in per_run.iter().enumerate() {
                for (k, o) in outputs.iter().enumerate() {
                    if let Some(log) = &o.log {
                        let name = format!("{}_{r:04}.log", cfg.strategies[k]);
                        write_file(&traj_dir.join(name), log)?;
                    }
                }
            }
        }
    }
    Ok(outcome)
}

fn create_dir(dir: &Path) -> Result<(), ExperimentError> {
    std::fs::create_dir_all(dir).map_err(|source| ExperimentError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), ExperimentError> {
    std::fs::write(path, contents).map_err(|source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

/// Writes `config.toml`, `manifest.toml`, `runs.csv`, `batch.csv` and one
/// `summary_<strategy>.csv` per strategy.
pub fn write_scenario(
    cfg: &ExperimentConfig,
    outcome: &ScenarioOutcome,
    dir: &Path,
) -> Result<(), ExperimentError> {
    create_dir(dir)?;
    write_file(&dir.join("config.toml"), &cfg.to_toml_string()?)?;
    write_file(
        &dir.join("manifest.toml"),
        &manifest(cfg, "run", &cfg.strategies, &outcome.seeds)?,
    )?;

    let mut runs = String::from("run,seed,strategy,auc,fis,eet,censored,max_treated\n");
    for (r, s) in outcome.seeds.iter().enumerate() {
        for b in &outcome.batches {
            let m = b.summary.runs[r];
            let _ = writeln!(
                runs,
                "{r},{},{},{},{},{},{},{}",
                s.environment,
                b.strategy,
                m.auc,
                m.fis,
                opt(m.eet),
                m.eet.is_none() as u8,
                b.max_treated[r]
            );
        }
    }
    write_file(&dir.join("runs.csv"), &runs)?;

    let mut batch = String::from(
        "strategy,runs,auc_mean,auc_std,auc_ci95,fis_mean,fis_std,fis_ci95,eet_mean,censored\n",
    );
    for b in &outcome.batches {
        let s = &b.summary;
        let _ = writeln!(
            batch,
            "{},{},{},{},{},{},{},{},{},{}",
            b.strategy,
            s.run_count(),
            s.auc.mean,
            s.auc.std,
            s.auc.ci_half_width,
            s.fis.mean,
            s.fis.std,
            s.fis.ci_half_width,
            opt(s.eet_mean),
            s.censored
        );
        let mut curve = String::from("time,mean_fraction,ci95_half_width\n");
        for ((t, m), w) in s.times.iter().zip(&s.mean_fraction).zip(&s.ci_half_width) {
            let _ = writeln!(curve, "{t},{m},{w}");
        }
        write_file(&dir.join(format!("summary_{}.csv", b.strategy)), &curve)?;
    }
    write_file(&dir.join("batch.csv"), &batch)
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    name: &'a str,
    master_seed: u64,
    /// `config.toml` next to this file reproduces every output when passed to
    /// the same command.
    config_file: &'a str,
    defaults: BTreeMap<&'a str, String>,
    strategies: BTreeMap<String, &'a str>,
    seeds: &'a [RunSeeds],
}

fn manifest(
    cfg: &ExperimentConfig,
    command: &str,
    kinds: &[StrategyKind],
    seeds: &[RunSeeds],
) -> Result<String, ExperimentError> {
    let mut defaults = BTreeMap::new();
    defaults.insert("runs", cfg.runs.to_string());
    defaults.insert("t_max", cfg.sim.t_max.to_string());
    defaults.insert("budget", cfg.sim.budget.to_string());
    defaults.insert("initial_fraction", cfg.sim.initial_fraction.to_string());
    let delta = match cfg.model {
        ModelSpec::Sigmoid { delta, .. } | ModelSpec::LinearSis { delta, .. } => delta,
    };
    defaults.insert("delta", delta.to_string());
    let strategies = kinds.iter().map(|k| (k.to_string(), k.method())).collect();
    let m = Manifest {
        command,
        version: env!("CARGO_PKG_VERSION"),
        name: &cfg.name,
        master_seed: cfg.seed,
        config_file: "config.toml",
        defaults,
        strategies,
        seeds,
    };
    toml::to_string(&m).map_err(|e| ExperimentError::Config(e.to_string()))
}

/// Mean AUC, final infected fraction and extinction share over a cell's runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellStats {
    pub auc: Estimate,
    pub fis_fraction: f64,
    pub extinct_fraction: f64,
}

impl CellStats {
    fn from_runs(runs: &[RunMetrics], node_count: usize) -> Self {
        let aucs: Vec<f64> = runs.iter().map(|m| m.auc).collect();
        let m = runs.len() as f64;
        CellStats {
            auc: Estimate::gaussian(&aucs),
            fis_fraction: runs.iter().map(|r| r.fis as f64).sum::<f64>() / (m * node_count as f64),
            extinct_fraction: runs.iter().filter(|r| r.eet.is_some()).count() as f64 / m,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatmapCell {
    pub cell: Cell,
    pub glrie: CellStats,
    pub competitor: CellStats,
    /// `AUC(gLRIE) / AUC(competitor)`.
    pub ratio: AucRatio,
}

#[derive(Debug, Clone)]
pub struct HeatmapOutcome {
    pub competitor: StrategyKind,
    pub node_count: usize,
    pub seeds: Vec<RunSeeds>,
    pub cells: Vec<HeatmapCell>,
}

/// gLRIE against `competitor` (default: the config's `[sweep] competitor`) on
/// every `(s_H, a_H, s_I, a_I)` cell, `M` runs each. The same graphs, initial
/// sets and dynamics seeds are reused in every cell.
pub fn run_heatmap(
    cfg: &ExperimentConfig,
    competitor: Option<StrategyKind>,
    out: Option<&Path>,
    workers: usize,
) -> Result<HeatmapOutcome, ExperimentError> {
    cfg.validate()?;
    let cells = cfg.cells()?;
    let competitor = competitor
        .or(cfg.sweep.as_ref().map(|s| s.competitor))
        .unwrap_or(StrategyKind::Lrie);
    let models = cells
        .iter()
        .map(|c| cfg.model.with_cell(c)?.build())
        .collect::<Result<Vec<_>, _>>()?;
    let seeds = run_seeds(cfg);
    let pair = [StrategyKind::Glrie, competitor];
    let runs = cfg.runs;

    let (node_count, results) = with_pool(workers, || {
        let pool = GraphPool::build(cfg, &seeds, &pair)?;
        let results = (0..cells.len() * runs)
            .into_par_iter()
            .map(|job| {
                let (c, r) = (job / runs, job % runs);
                let prepared = pool.get(r);
                let glrie = run_single(prepared, &models[c], pair[0], &cfg.sim, seeds[r])?;
                let other = if competitor == StrategyKind::Glrie {
                    glrie.clone()
                } else {
                    run_single(prepared, &models[c], competitor, &cfg.sim, seeds[r])?
                };
                Ok((RunMetrics::of(&glrie), RunMetrics::of(&other)))
            })
            .collect::<Result<Vec<_>, ExperimentError>>()?;
        Ok((pool.get(0).graph.node_count(), results))
    })?;

    let cells = cells
        .iter()
        .enumerate()
        .map(|(c, &cell)| {
            let chunk = &results[c * runs..(c + 1) * runs];
            let g: Vec<RunMetrics> = chunk.iter().map(|p| p.0).collect();
            let o: Vec<RunMetrics> = chunk.iter().map(|p| p.1).collect();
            let glrie = CellStats::from_runs(&g, node_count);
            let competitor = CellStats::from_runs(&o, node_count);
            HeatmapCell {
                cell,
                glrie,
                competitor,
                ratio: AucRatio::new(glrie.auc.mean, competitor.auc.mean),
            }
        })
        .collect();
    let outcome = HeatmapOutcome {
        competitor,
        node_count,
        seeds,
        cells,
    };
    if let Some(dir) = out {
        create_dir(dir)?;
        write_file(&dir.join("config.toml"), &cfg.to_toml_string()?)?;
        write_file(
            &dir.join("manifest.toml"),
            &manifest(cfg, "sweep", &pair, &outcome.seeds)?,
        )?;
        write_file(
            &dir.join(format!("heatmap_{competitor}.csv")),
            &heatmap_csv(&outcome),
        )?;
    }
    Ok(outcome)
}

pub fn heatmap_csv(outcome: &HeatmapOutcome) -> String {
    let mut csv = String::from(
        "s_h,a_h,s_i,a_i,ratio,glrie_fis,competitor_fis,glrie_auc,competitor_auc,\
         glrie_auc_ci95,competitor_auc_ci95,glrie_extinct,competitor_extinct\n",
    );
    for h in &outcome.cells {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            h.cell.s_h,
            h.cell.a_h,
            h.cell.s_i,
            h.cell.a_i,
            h.ratio,
            h.glrie.fis_fraction,
            h.competitor.fis_fraction,
            h.glrie.auc.mean,
            h.competitor.auc.mean,
            h.glrie.auc.ci_half_width,
            h.competitor.auc.ci_half_width,
            h.glrie.extinct_fraction,
            h.competitor.extinct_fraction
        );
    }
    csv
}
