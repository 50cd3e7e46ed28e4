//! Static ranking by first-order eigen-drop of the adjacency spectral radius.
//!
//! Removing node `i` lowers the spectral radius by roughly `λ·u_i²` where `u` is the
//! unit principal eigenvector, so nodes are ranked by `u_i²`. The ranking ignores
//! the finite treatment strength; it is the static approximation of the spectral
//! strategy.

use super::StrategyError;
use crate::graph::Graph;

pub const POWER_TOLERANCE: f64 = 1e-10;
pub const POWER_MAX_ITERATIONS: usize = 100_000;

#[derive(Debug, Clone)]
pub struct PrincipalEigen {
    pub vector: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

/// Power iteration on `A + I`; the shift keeps bipartite graphs from oscillating
/// between `±λ`.
pub fn principal_eigenvector(
    graph: &Graph,
    tolerance: f64,
    max_iterations: usize,
) -> Result<PrincipalEigen, StrategyError> {
    let n = graph.node_count();
    if n == 0 {
        return Ok(PrincipalEigen {
            vector: Vec::new(),
            value: 0.0,
            iterations: 0,
        });
    }
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut next = vec![0.0; n];
    for iteration in 1..=max_iterations {
        for i in 0..n {
            next[i] = v[i] + graph.neighbors(i).iter().map(|&j| v[j]).sum::<f64>();
        }
        let norm = next.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut change: f64 = 0.0;
        for i in 0..n {
            next[i] /= norm;
            change = change.max((next[i] - v[i]).abs());
        }
        std::mem::swap(&mut v, &mut next);
        if change < tolerance {
            return Ok(PrincipalEigen {
                value: rayleigh(graph, &v),
                vector: v,
                iterations: iteration,
            });
        }
    }
    let value = rayleigh(graph, &v);
    Err(StrategyError::NoConvergence {
        iterations: max_iterations,
        residual: residual(graph, &v, value),
    })
}

fn apply_adjacency(graph: &Graph, v: &[f64]) -> Vec<f64> {
    (0..graph.node_count())
        .map(|i| graph.neighbors(i).iter().map(|&j| v[j]).sum())
        .collect()
}

fn rayleigh(graph: &Graph, v: &[f64]) -> f64 {
    apply_adjacency(graph, v)
        .iter()
        .zip(v)
        .map(|(a, b)| a * b)
        .sum()
}

fn residual(graph: &Graph, v: &[f64], value: f64) -> f64 {
    apply_adjacency(graph, v)
        .iter()
        .zip(v)
        .map(|(a, b)| (a - value * b).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// All nodes ordered by descending `u_i²`, ties by ascending id.
pub fn lrsr_ranking(graph: &Graph) -> Result<Vec<usize>, StrategyError> {
    let eigen = principal_eigenvector(graph, POWER_TOLERANCE, POWER_MAX_ITERATIONS)?;
    let drop: Vec<f64> = eigen.vector.iter().map(|u| u * u).collect();
    let mut order: Vec<usize> = (0..graph.node_count()).collect();
    order.sort_by(|&a, &b| drop[b].total_cmp(&drop[a]).then(a.cmp(&b)));
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_center_first() {
        let k = 7;
        let g = Graph::from_edges(k + 1, (1..=k).map(|leaf| (leaf, 0)));
        let e = principal_eigenvector(&g, POWER_TOLERANCE, POWER_MAX_ITERATIONS).unwrap();
        assert!((e.vector[0].powi(2) - 0.5).abs() < 1e-9);
        assert!((e.vector[1].powi(2) - 1.0 / (2.0 * k as f64)).abs() < 1e-9);
        assert!((e.value - (k as f64).sqrt()).abs() < 1e-9);
        assert_eq!(lrsr_ranking(&g).unwrap()[0], 0);
    }

    #[test]
    fn complete_graph_ties_by_id() {
        let n = 6;
        let g = Graph::from_edges(n, (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))));
        assert_eq!(lrsr_ranking(&g).unwrap(), (0..n).collect::<Vec<_>>());
    }

    #[test]
    fn path_middle_first() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]);
        let e = principal_eigenvector(&g, POWER_TOLERANCE, POWER_MAX_ITERATIONS).unwrap();
        let expected = [0.5, std::f64::consts::FRAC_1_SQRT_2, 0.5];
        for (u, x) in e.vector.iter().zip(expected) {
            assert!((u - x).abs() < 1e-9);
        }
        assert_eq!(lrsr_ranking(&g).unwrap(), vec![1, 0, 2]);
    }

    #[test]
    fn non_convergence_reports_residual() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]);
        match principal_eigenvector(&g, 1e-300, 3) {
            Err(StrategyError::NoConvergence {
                iterations,
                residual,
            }) => {
                assert_eq!(iterations, 3);
                assert!(residual > 0.0);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn edgeless_graph() {
        assert_eq!(lrsr_ranking(&Graph::empty(3)).unwrap(), vec![0, 1, 2]);
    }
}
