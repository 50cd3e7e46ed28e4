//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use epicontrol::graph::Graph;
use epicontrol::RateModel;

/// gLRIE scores from the full state vector: every `j ≠ i` is visited and its
/// rates are re-evaluated with `X_i` set to 0.
pub fn brute_force_glrie(graph: &Graph, states: &[bool], model: &RateModel) -> Vec<(usize, f64)> {
    let n = graph.node_count();
    let mut out = Vec::new();
    for i in (0..n).filter(|&i| states[i]) {
        let own = model.recovery_at(graph, states, i) + model.infection_at(graph, states, i);
        let mut flipped = states.to_vec();
        flipped[i] = false;
        let mut sum = 0.0;
        for j in (0..n).filter(|&j| j != i) {
            let x_j = if states[j] { 1.0 } else { 0.0 };
            let dh = model.recovery_at(graph, states, j) - model.recovery_at(graph, &flipped, j);
            let di = model.infection_at(graph, states, j) - model.infection_at(graph, &flipped, j);
            sum += x_j * dh - (1.0 - x_j) * di;
        }
        out.push((i, -(own + sum)));
    }
    out
}

/// Graph whose edges are the set bits of `mask` over the pairs `i < j` in
/// lexicographic order.
pub fn graph_from_mask(n: usize, mask: u64) -> Graph {
    let mut edges = Vec::new();
    let mut bit = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            if mask >> bit & 1 == 1 {
                edges.push((i, j));
            }
            bit += 1;
        }
    }
    Graph::from_edges(n, edges)
}

pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

pub type Mat4 = [[f64; 4]; 4];

fn matmul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut c = [[0.0; 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            for j in 0..4 {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    c
}

/// `exp(Q t)` by scaling and squaring of a truncated Taylor series.
pub fn expm(q: &Mat4, t: f64) -> Mat4 {
    let norm = q
        .iter()
        .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
        * t;
    let mut squarings = 0;
    while norm / f64::powi(2.0, squarings) > 0.25 {
        squarings += 1;
    }
    let scale = t / f64::powi(2.0, squarings);
    let mut a = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            a[i][j] = q[i][j] * scale;
        }
    }
    let mut result = [[0.0; 4]; 4];
    let mut term = [[0.0; 4]; 4];
    for i in 0..4 {
        result[i][i] = 1.0;
        term[i][i] = 1.0;
    }
    for k in 1..30 {
        term = matmul(&term, &a);
        for row in term.iter_mut() {
            for x in row.iter_mut() {
                *x /= k as f64;
            }
        }
        for i in 0..4 {
            for j in 0..4 {
                result[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        result = matmul(&result, &result);
    }
    result
}
