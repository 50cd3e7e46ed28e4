use std::path::Path;
use std::process::{Command, Output};

fn epicontrol(args: &[&str], dir: &Path) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_epicontrol"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

const SINGLE_RUN: &str = r#"
name = "single"
seed = 11
runs = 1
strategies = ["rand"]
write_trajectories = true

[graph]
kind = "edge_list"
path = "ring.txt"

[model]
kind = "linear_sis"
beta = 0.5

[sim]
rho = 2.0
budget = 2
t_max = 3.0
initial_nodes = [0, 3]
"#;

#[test]
fn single_run_writes_one_trajectory_and_replays() {
    let dir = tempfile::tempdir().unwrap();
    let ring: String = (0..8).map(|i| format!("{i} {}\n", (i + 1) % 8)).collect();
    std::fs::write(dir.path().join("ring.txt"), ring).unwrap();
    std::fs::write(dir.path().join("single.toml"), SINGLE_RUN).unwrap();
    epicontrol(
        &["run", "--config", "single.toml", "--out", "out"],
        dir.path(),
    );

    let logs: Vec<_> = std::fs::read_dir(dir.path().join("out/trajectories"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert_eq!(logs, ["rand_0000.log"]);

    let runs = std::fs::read_to_string(dir.path().join("out/runs.csv")).unwrap();
    let row: Vec<&str> = runs.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(runs.lines().count(), 2);
    assert_eq!(row[2], "rand");

    let replay = epicontrol(&["replay", "out/trajectories/rand_0000.log"], dir.path());
    let text = String::from_utf8(replay.stdout).unwrap();
    assert!(
        text.lines().any(|l| l == format!("auc {}", row[3])),
        "{text}"
    );
    assert!(
        text.lines().any(|l| l == format!("fis {}", row[4])),
        "{text}"
    );
}

#[test]
fn written_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("scenario.toml"),
        "name = \"repro\"\nseed = 3\nruns = 4\nstrategies = [\"glrie\", \"mcm\"]\n\
         [graph]\nkind = \"pa\"\nn = 40\nm = 2\n\
         [model]\nkind = \"sigmoid\"\ns_i = 6.0\na_i = 1.0\n\
         [sim]\nrho = 10.0\nbudget = 3\nt_max = 4.0\n",
    )
    .unwrap();
    epicontrol(
        &["run", "--config", "scenario.toml", "--out", "first"],
        dir.path(),
    );
    epicontrol(
        &["run", "--config", "first/config.toml", "--out", "second"],
        dir.path(),
    );
    for file in [
        "runs.csv",
        "batch.csv",
        "summary_glrie.csv",
        "summary_mcm.csv",
        "config.toml",
    ] {
        let a = std::fs::read(dir.path().join("first").join(file)).unwrap();
        let b = std::fs::read(dir.path().join("second").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs");
    }
}

#[test]
fn generate_graph_reports_size() {
    let dir = tempfile::tempdir().unwrap();
    let out = epicontrol(
        &[
            "generate-graph",
            "--kind",
            "pa",
            "--n",
            "300",
            "--m",
            "4",
            "--out",
            "pa.txt",
        ],
        dir.path(),
    );
    assert_eq!(
        String::from_utf8_lossy(&out.stderr).trim(),
        "300 nodes, 1184 edges"
    );
    let text = std::fs::read_to_string(dir.path().join("pa.txt")).unwrap();
    let g = epicontrol::graph::load_edge_list(text.as_bytes(), true).unwrap();
    assert_eq!((g.node_count(), g.edge_count()), (300, 1184));
}
