use epicontrol::graph::{generate_er, generate_pa, generate_sw, load_edge_list, Graph};
use proptest::prelude::*;

#[test]
fn er_mean_degree_over_many_seeds() {
    let samples: Vec<f64> = (0..1000)
        .map(|seed| generate_er(50, 4.0, seed).unwrap().mean_degree())
        .collect();
    let m = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / m;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    let se = (var / m).sqrt();
    assert!((mean - 4.0).abs() < 3.0 * se, "mean degree {mean} ± {se}");
}

#[test]
fn pa_degree_distribution_is_heavy_tailed() {
    let seeds = 200;
    let heavy = (0..seeds)
        .filter(|&seed| {
            let g = generate_pa(1000, 4, seed).unwrap();
            g.max_degree() as f64 > 4.0 * g.mean_degree()
        })
        .count();
    assert!(
        heavy as f64 / seeds as f64 > 0.95,
        "{heavy}/{seeds} heavy-tailed"
    );
}

#[test]
fn generators_are_deterministic_byte_for_byte() {
    let pairs = [
        (
            generate_er(80, 5.0, 9).unwrap(),
            generate_er(80, 5.0, 9).unwrap(),
        ),
        (
            generate_pa(80, 3, 9).unwrap(),
            generate_pa(80, 3, 9).unwrap(),
        ),
        (
            generate_sw(80, 6, 0.2, 9).unwrap(),
            generate_sw(80, 6, 0.2, 9).unwrap(),
        ),
    ];
    for (a, b) in pairs {
        assert_eq!(a.to_edge_list_string(), b.to_edge_list_string());
    }
}

fn assert_graph_invariants(g: &Graph) {
    g.check_invariants().unwrap();
    let degree_sum: usize = (0..g.node_count()).map(|i| g.degree(i)).sum();
    assert_eq!(degree_sum, 2 * g.edge_count());
    for i in 0..g.node_count() {
        let nbrs = g.neighbors(i);
        assert!(nbrs.windows(2).all(|w| w[0] < w[1]));
        assert!(!nbrs.contains(&i));
        for &j in nbrs {
            assert!(g.neighbors(j).contains(&i));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generated_graphs_satisfy_invariants(
        seed in any::<u64>(),
        n in 12usize..120,
        p in 0.0f64..=1.0,
    ) {
        assert_graph_invariants(&generate_er(n, 3.0, seed).unwrap());
        assert_graph_invariants(&generate_pa(n, 3, seed).unwrap());
        let sw = generate_sw(n, 4, p, seed).unwrap();
        assert_graph_invariants(&sw);
        prop_assert_eq!(sw.edge_count(), n * 2);
    }

    #[test]
    fn loaded_graphs_satisfy_invariants(
        pairs in proptest::collection::vec((0u64..40, 0u64..40), 1..120),
    ) {
        let text: String = pairs.iter().map(|(a, b)| format!("{a} {b}\n")).collect();
        let g = load_edge_list(text.as_bytes(), true).unwrap();
        assert_graph_invariants(&g);
        let mut ids: Vec<u64> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
        ids.sort_unstable();
        ids.dedup();
        prop_assert_eq!(g.node_count(), ids.len());
    }
}

/// Set `GNUTELLA_EDGE_LIST` to a p2p-Gnutella05 file to check the ingested size.
#[test]
#[ignore = "needs an external data file"]
fn gnutella_snapshot_size() {
    let path = std::env::var("GNUTELLA_EDGE_LIST").expect("GNUTELLA_EDGE_LIST not set");
    let file = std::fs::File::open(&path).unwrap();
    let g = load_edge_list(std::io::BufReader::new(file), true).unwrap();
    assert_eq!((g.node_count(), g.edge_count()), (8846, 31839));
}
