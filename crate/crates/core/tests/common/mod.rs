#![allow(dead_code)]

pub mod dense;

use falqon_core::graphs::Graph;
use rand::Rng;

/// Random simple graph on `n` vertices with edge probability `p` and
/// weights in `(0, 1]` (or all 1 when `weighted` is false).
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64, weighted: bool) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                let w = if weighted { 1.0 - rng.random::<f64>() } else { 1.0 };
                edges.push((i, j, w));
            }
        }
    }
    Graph::new(format!("rand_n{n}"), n, edges).unwrap()
}

pub fn path3() -> Graph {
    Graph::unweighted("path3", 3, [(0, 1), (1, 2)]).unwrap()
}
