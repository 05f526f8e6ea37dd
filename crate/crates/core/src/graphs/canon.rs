//! Canonical labeling by color refinement plus individualization.
//!
//! The search tree is explored exhaustively except that interchangeable
//! twins (vertices with identical neighborhoods apart from each other) are
//! tried once per target cell. Weights are ignored: two graphs share a
//! canonical form exactly when their edge structures are isomorphic.

use super::Graph;

/// Isomorphism certificate: the adjacency matrix under the canonical labeling.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    n: usize,
    bits: Vec<u64>,
}

impl CanonicalForm {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges of the canonically relabeled graph, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                let b = i * self.n + j;
                if (self.bits[b / 64] >> (b % 64)) & 1 == 1 {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// Canonical form of `g` together with the labeling that produces it:
/// `labels[v]` is the canonical position of vertex `v`.
pub fn canonical_form(g: &Graph) -> (CanonicalForm, Vec<usize>) {
    let n = g.n();
    let adj = g.adjacency();
    let mut matrix = vec![vec![false; n]; n];
    for e in g.edges() {
        matrix[e.i][e.j] = true;
        matrix[e.j][e.i] = true;
    }
    let search = Search {
        n,
        adj: &adj,
        matrix: &matrix,
    };
    let mut colors = vec![0; n];
    search.refine(&mut colors);
    let mut best = None;
    search.descend(colors, &mut best);
    best.unwrap_or_else(|| {
        (
            CanonicalForm {
                n,
                bits: Vec::new(),
            },
            Vec::new(),
        )
    })
}

struct Search<'a> {
    n: usize,
    adj: &'a [Vec<usize>],
    matrix: &'a [Vec<bool>],
}

impl Search<'_> {
    /// Refines to the coarsest equitable partition. A color is the position
    /// of its cell in the ordered partition, so it never depends on labels.
    fn refine(&self, colors: &mut [usize]) {
        let n = self.n;
        let mut cells = count_cells(colors);
        loop {
            let sigs: Vec<(usize, Vec<usize>)> = (0..n)
                .map(|v| {
                    let mut nb: Vec<usize> = self.adj[v].iter().map(|&u| colors[u]).collect();
                    nb.sort_unstable();
                    (colors[v], nb)
                })
                .collect();
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| sigs[a].cmp(&sigs[b]));
            let mut start = 0;
            for (pos, &v) in order.iter().enumerate() {
                if pos > 0 && sigs[v] != sigs[order[pos - 1]] {
                    start = pos;
                }
                colors[v] = start;
            }
            let now = count_cells(colors);
            if now == cells {
                break;
            }
            cells = now;
        }
    }

    fn descend(&self, colors: Vec<usize>, best: &mut Option<(CanonicalForm, Vec<usize>)>) {
        let n = self.n;
        let mut sizes = vec![0usize; n];
        for &c in &colors {
            sizes[c] += 1;
        }
        let Some(target) = (0..n).find(|&c| sizes[c] > 1) else {
            let form = self.certificate(&colors);
            if best.as_ref().is_none_or(|(b, _)| form < *b) {
                *best = Some((form, colors));
            }
            return;
        };
        let members: Vec<usize> = (0..n).filter(|&v| colors[v] == target).collect();
        let mut tried: Vec<usize> = Vec::new();
        for &v in &members {
            if tried.iter().any(|&u| self.twins(u, v)) {
                continue;
            }
            tried.push(v);
            let mut next = colors.clone();
            for &u in &members {
                if u != v {
                    next[u] = target + 1;
                }
            }
            self.refine(&mut next);
            self.descend(next, best);
        }
    }

    fn twins(&self, u: usize, v: usize) -> bool {
        (0..self.n)
            .filter(|&x| x != u && x != v)
            .all(|x| self.matrix[u][x] == self.matrix[v][x])
    }

    fn certificate(&self, labels: &[usize]) -> CanonicalForm {
        let n = self.n;
        let mut bits = vec![0u64; (n * n).div_ceil(64)];
        for (v, nb) in self.adj.iter().enumerate() {
            for &u in nb {
                let (a, b) = (labels[v], labels[u]);
                if a < b {
                    let idx = a * n + b;
                    bits[idx / 64] |= 1 << (idx % 64);
                }
            }
        }
        CanonicalForm { n, bits }
    }
}

fn count_cells(colors: &[usize]) -> usize {
    let mut seen = vec![false; colors.len()];
    let mut count = 0;
    for &c in colors {
        if !seen[c] {
            seen[c] = true;
            count += 1;
        }
    }
    count
}
