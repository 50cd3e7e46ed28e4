use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use epicontrol::experiments::{run_heatmap, run_scenario, ExperimentConfig, GraphSpec};
use epicontrol::graph::{generate_er, generate_pa, generate_sw};
use epicontrol::metrics::{sample_curve, time_grid, RunMetrics};
use epicontrol::simulator::Trajectory;
use epicontrol::StrategyKind;

#[derive(Parser)]
#[command(
    name = "epicontrol",
    version,
    about = "Simulate competing two-state diffusion on networks and compare treatment strategies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random graph and write it as an edge list.
    GenerateGraph {
        #[arg(long, value_enum)]
        kind: GraphKind,
        #[arg(long)]
        n: usize,
        /// Mean degree (er).
        #[arg(long, default_value_t = 8.0)]
        avg_degree: f64,
        /// Edges per new node (pa).
        #[arg(long, default_value_t = 4)]
        m: usize,
        /// Ring degree (sw).
        #[arg(long, default_value_t = 8)]
        k: usize,
        /// Rewiring probability (sw).
        #[arg(long, default_value_t = 0.1)]
        p_rewire: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one scenario: M seeded runs per strategy.
    ///
    /// Edge-list graphs with thousands of nodes (e.g. Gnutella) are slow.
    Run {
        #[command(flatten)]
        common: Common,
        /// Restrict to these strategies (repeatable).
        #[arg(long)]
        strategy: Vec<StrategyKind>,
    },
    /// gLRIE vs a competitor over the config's [sweep] grid (heatmap CSV).
    ///
    /// Edge-list graphs with thousands of nodes (e.g. Gnutella) are slow.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Competitor strategy; overrides [sweep] competitor.
        #[arg(long)]
        strategy: Option<StrategyKind>,
    },
    /// Print metrics of a stored trajectory log.
    Replay {
        log: PathBuf,
        /// Also write the sampled infected-count curve to this CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 201)]
        grid_points: usize,
    },
}

#[derive(clap::Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    workers: Option<usize>,
    /// Master seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphKind {
    Er,
    Pa,
    Sw,
}

impl Common {
    fn load(&self) -> Result<(ExperimentConfig, usize)> {
        let mut cfg = ExperimentConfig::load(&self.config)
            .with_context(|| format!("loading {}", self.config.display()))?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let GraphSpec::EdgeList { path, .. } = &cfg.graph {
            eprintln!(
                "note: loading {}; large edge-list graphs are slow to simulate",
                path.display()
            );
        }
        let workers = self
            .workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        Ok((cfg, workers))
    }
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::GenerateGraph {
            kind,
            n,
            avg_degree,
            m,
            k,
            p_rewire,
            seed,
            out,
        } => {
            let g = match kind {
                GraphKind::Er => generate_er(n, avg_degree, seed)?,
                GraphKind::Pa => generate_pa(n, m, seed)?,
                GraphKind::Sw => generate_sw(n, k, p_rewire, seed)?,
            };
            match out {
                Some(path) => {
                    let file = File::create(&path)
                        .with_context(|| format!("creating {}", path.display()))?;
                    g.write_edge_list(BufWriter::new(file))?;
                }
                None => g.write_edge_list(std::io::stdout().lock())?,
            }
            eprintln!("{} nodes, {} edges", g.node_count(), g.edge_count());
        }
        Command::Run { common, strategy } => {
            let (mut cfg, workers) = common.load()?;
            if !strategy.is_empty() {
                cfg.strategies = strategy;
            }
            let outcome = run_scenario(&cfg, Some(&common.out), workers)?;
            for b in &outcome.batches {
                println!(
                    "{:<6} auc {:.3} ± {:.3}  fis {:.2}  censored {}/{}",
                    b.strategy.to_string(),
                    b.summary.auc.mean,
                    b.summary.auc.ci_half_width,
                    b.summary.fis.mean,
                    b.summary.censored,
                    b.summary.run_count()
                );
            }
            println!("results in {}", common.out.display());
        }
        Command::Sweep { common, strategy } => {
            let (cfg, workers) = common.load()?;
            if cfg.sweep.is_none() {
                bail!("{} has no [sweep] section", common.config.display());
            }
            let outcome = run_heatmap(&cfg, strategy, Some(&common.out), workers)?;
            println!(
                "{} cells, gLRIE vs {}; results in {}",
                outcome.cells.len(),
                outcome.competitor,
                common.out.display()
            );
        }
        Command::Replay {
            log,
            out,
            grid_points,
        } => {
            let text = std::fs::read_to_string(&log)
                .with_context(|| format!("reading {}", log.display()))?;
            let traj = Trajectory::parse_log(&text)?;
            let m = RunMetrics::of(&traj);
            println!("nodes {}", traj.node_count);
            println!("events {}", traj.events.len());
            println!("auc {}", m.auc);
            println!("fis {}", m.fis);
            match m.eet {
                Some(t) => println!("eet {t}"),
                None => println!("eet censored at {}", traj.t_max),
            }
            if let Some(path) = out {
                let grid = time_grid(traj.t_max, grid_points)?;
                let curve = sample_curve(&traj, &grid);
                let mut w = BufWriter::new(
                    File::create(&path).with_context(|| format!("creating {}", path.display()))?,
                );
                writeln!(w, "time,infected")?;
                for (t, c) in grid.iter().zip(curve) {
                    writeln!(w, "{t},{c}")?;
                }
                w.flush()?;
            }
        }
    }
    Ok(())
}
