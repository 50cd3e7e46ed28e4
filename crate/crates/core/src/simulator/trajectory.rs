//! Event log of a single run and its line-oriented text form.
//!
//! ```text
//! # trajectory v1
//! # nodes 100
//! # t_max 20
//! # final_time 20
//! # max_treated 10
//! # meta strategy glrie
//! # initial 3 17 42
//! # columns time node new_state
//! 0.0132 17 0
//! ```
//!
//! Times are written in Rust's shortest round-trip form, so parsing a log gives
//! back bit-identical values.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrajectoryError {
    #[error("trajectory log line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("trajectory log is missing the {0} header")]
    MissingHeader(&'static str),
    #[error("inconsistent trajectory: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub time: f64,
    pub node: usize,
    /// New state of `node`: `true` = infected.
    pub infected: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub node_count: usize,
    /// Ascending ids of the nodes infected at time 0.
    pub initial_infected: Vec<usize>,
    pub events: Vec<Event>,
    pub t_max: f64,
    /// `t_max`, or the extinction time when the infection died out first.
    pub final_time: f64,
    /// Largest number of simultaneously treated nodes seen during the run.
    pub max_treated: usize,
    /// Free-form `key value` pairs echoed into the log header.
    pub metadata: Vec<(String, String)>,
}

impl Trajectory {
    pub fn initial_count(&self) -> usize {
        self.initial_infected.len()
    }

    /// Step function of the infected count: `(t, N_I)` at time 0 and after each event.
    pub fn infected_counts(&self) -> impl Iterator<Item = (f64, usize)> + '_ {
        let mut count = self.initial_count();
        std::iter::once((0.0, count)).chain(self.events.iter().map(move |e| {
            if e.infected {
                count += 1;
            } else {
                count -= 1;
            }
            (e.time, count)
        }))
    }

    pub fn final_count(&self) -> usize {
        self.infected_counts().last().map_or(0, |(_, c)| c)
    }

    /// State vector after replaying every event.
    pub fn final_state(&self) -> Vec<bool> {
        let mut x = vec![false; self.node_count];
        for &i in &self.initial_infected {
            x[i] = true;
        }
        for e in &self.events {
            x[e.node] = e.infected;
        }
        x
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Replays the log and checks time ordering and that every event really flips
    /// its node.
    pub fn validate(&self) -> Result<(), TrajectoryError> {
        let mut x = vec![false; self.node_count];
        for &i in &self.initial_infected {
            if i >= self.node_count {
                return Err(TrajectoryError::Inconsistent(format!(
                    "initial node {i} out of range"
                )));
            }
            x[i] = true;
        }
        let mut last = 0.0;
        for (k, e) in self.events.iter().enumerate() {
            if e.node >= self.node_count {
                return Err(TrajectoryError::Inconsistent(format!(
                    "event {k}: node out of range"
                )));
            }
            let ordered = if k == 0 { e.time >= 0.0 } else { e.time > last };
            if !ordered {
                return Err(TrajectoryError::Inconsistent(format!(
                    "event {k}: time {} not after {last}",
                    e.time
                )));
            }
            if x[e.node] == e.infected {
                return Err(TrajectoryError::Inconsistent(format!(
                    "event {k}: node {} already in state {}",
                    e.node, e.infected as u8
                )));
            }
            x[e.node] = e.infected;
            last = e.time;
        }
        if last > self.final_time || self.final_time > self.t_max {
            return Err(TrajectoryError::Inconsistent(
                "final time out of order".into(),
            ));
        }
        Ok(())
    }

    pub fn to_log_string(&self) -> String {
        let mut out = String::with_capacity(64 + self.events.len() * 24);
        out.push_str("# trajectory v1\n");
        let _ = writeln!(out, "# nodes {}", self.node_count);
        let _ = writeln!(out, "# t_max {}", self.t_max);
        let _ = writeln!(out, "# final_time {}", self.final_time);
        let _ = writeln!(out, "# max_treated {}", self.max_treated);
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# meta {k} {v}");
        }
        out.push_str("# initial");
        for i in &self.initial_infected {
            let _ = write!(out, " {i}");
        }
        out.push('\n');
        out.push_str("# columns time node new_state\n");
        for e in &self.events {
            let _ = writeln!(out, "{} {} {}", e.time, e.node, e.infected as u8);
        }
        out
    }

    pub fn parse_log(text: &str) -> Result<Trajectory, TrajectoryError> {
        let mut node_count = None;
        let mut t_max = None;
        let mut final_time = None;
        let mut max_treated = 0;
        let mut initial = None;
        let mut metadata = Vec::new();
        let mut events = Vec::new();

        for (index, raw) in text.lines().enumerate() {
            let line = index + 1;
            let err = |reason: String| TrajectoryError::Parse { line, reason };
            let trimmed = raw.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(header) = trimmed.strip_prefix('#') {
                let header = header.trim();
                let (key, rest) = header.split_once(' ').unwrap_or((header, ""));
                match key {
                    "nodes" => node_count = Some(rest.parse().map_err(|e| err(format!("{e}")))?),
                    "t_max" => t_max = Some(rest.parse().map_err(|e| err(format!("{e}")))?),
                    "final_time" => {
                        final_time = Some(rest.parse().map_err(|e| err(format!("{e}")))?)
                    }
                    "max_treated" => max_treated = rest.parse().map_err(|e| err(format!("{e}")))?,
                    "meta" => {
                        let (k, v) = rest.split_once(' ').unwrap_or((rest, ""));
                        metadata.push((k.to_string(), v.to_string()));
                    }
                    "initial" => {
                        let ids: Result<Vec<usize>, _> =
                            rest.split_whitespace().map(str::parse).collect();
                        initial = Some(ids.map_err(|e| err(format!("{e}")))?);
                    }
                    _ => {}
                }
                continue;
            }
            let mut tokens = trimmed.split_whitespace();
            let mut next = |what: &str| tokens.next().ok_or_else(|| err(format!("missing {what}")));
            let time: f64 = next("time")?
                .parse()
                .map_err(|e| err(format!("time: {e}")))?;
            let node: usize = next("node")?
                .parse()
                .map_err(|e| err(format!("node: {e}")))?;
            let infected = match next("new_state")? {
                "0" => false,
                "1" => true,
                other => return Err(err(format!("state must be 0 or 1, got {other:?}"))),
            };
            events.push(Event {
                time,
                node,
                infected,
            });
        }

        let traj = Trajectory {
            node_count: node_count.ok_or(TrajectoryError::MissingHeader("nodes"))?,
            initial_infected: initial.ok_or(TrajectoryError::MissingHeader("initial"))?,
            events,
            t_max: t_max.ok_or(TrajectoryError::MissingHeader("t_max"))?,
            final_time: final_time.ok_or(TrajectoryError::MissingHeader("final_time"))?,
            max_treated,
            metadata,
        };
        traj.validate()?;
        Ok(traj)
    }
}
