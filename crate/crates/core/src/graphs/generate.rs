//! Connected regular benchmark graphs, pairwise nonisomorphic.
//!
//! `Count::All` enumerates every isomorphism class exhaustively; a finite
//! count samples the pairing (configuration) model and rejects loops,
//! multi-edges, disconnected samples and isomorphs. Either way the output is
//! a pure function of the spec, seed included.

use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{canonical_form, CanonicalForm, Graph};
use crate::error::{Error, Result};

/// Consecutive duplicate samples after which random generation gives up.
const STALE_LIMIT: usize = 5_000;
const ATTEMPT_LIMIT: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Count {
    All,
    Exactly(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularSpec {
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    pub count: Count,
    pub weighted: bool,
}

#[derive(Debug, Clone)]
pub struct GeneratedCorpus {
    pub graphs: Vec<Graph>,
    /// How many instances short of the requested count generation fell.
    pub shortfall: Option<usize>,
}

fn check_feasible(n: usize, d: usize) -> Result<()> {
    if d >= n {
        return Err(Error::InfeasibleRegular {
            n,
            d,
            reason: "degree must be below the vertex count",
        });
    }
    if (n * d) % 2 == 1 {
        return Err(Error::InfeasibleRegular {
            n,
            d,
            reason: "n*d is odd",
        });
    }
    Ok(())
}

pub fn generate_regular(spec: &RegularSpec) -> Result<GeneratedCorpus> {
    let RegularSpec {
        n,
        d,
        seed,
        count,
        weighted,
    } = *spec;
    check_feasible(n, d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (forms, shortfall) = match count {
        Count::Exactly(0) => {
            return Err(Error::InvalidConfig("instance count must be at least 1".into()))
        }
        Count::All => (enumerate_regular(n, d)?, None),
        Count::Exactly(k) => {
            let forms = sample_regular(n, d, k, &mut rng);
            let short = (forms.len() < k).then(|| k - forms.len());
            (forms, short)
        }
    };
    let prefix = if weighted { "wreg" } else { "reg" };
    let graphs = forms
        .iter()
        .enumerate()
        .map(|(idx, form)| {
            let name = format!("{prefix}{d}_n{n}_{idx:03}");
            let edges: Vec<(usize, usize, f64)> = form
                .edges()
                .into_iter()
                .map(|(i, j)| {
                    let w = if weighted {
                        rng.sample(rand::distr::Open01)
                    } else {
                        1.0
                    };
                    (i, j, w)
                })
                .collect();
            Graph::new(name, n, edges)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GeneratedCorpus { graphs, shortfall })
}

/// Every connected `d`-regular graph on `n` vertices up to isomorphism,
/// sorted by canonical form.
///
/// Graphs are built in breadth-first labeling: vertex `v` is completed before
/// `v + 1`, and vertices it discovers take the next unused labels. Every
/// connected graph has such a labeling, so each class is reached.
pub fn enumerate_regular(n: usize, d: usize) -> Result<Vec<CanonicalForm>> {
    check_feasible(n, d)?;
    let mut state = Enumerator {
        n,
        d,
        deg: vec![0; n],
        adj: vec![vec![false; n]; n],
        edges: Vec::new(),
        found: BTreeMap::new(),
    };
    state.fill(0, 1);
    Ok(state.found.into_keys().collect())
}

struct Enumerator {
    n: usize,
    d: usize,
    deg: Vec<usize>,
    adj: Vec<Vec<bool>>,
    edges: Vec<(usize, usize)>,
    found: BTreeMap<CanonicalForm, ()>,
}

impl Enumerator {
    fn fill(&mut self, v: usize, fresh: usize) {
        if v == self.n {
            if fresh == self.n {
                let g = Graph::unweighted("", self.n, self.edges.iter().copied())
                    .expect("enumerator builds simple graphs");
                self.found.insert(canonical_form(&g).0, ());
            }
            return;
        }
        if v >= fresh {
            // v was never reached from vertex 0
            return;
        }
        let need = self.d - self.deg[v];
        let candidates: Vec<usize> = (v + 1..fresh)
            .filter(|&w| self.deg[w] < self.d && !self.adj[v][w])
            .collect();
        for new in 0..=need.min(self.n - fresh) {
            let old = need - new;
            if old > candidates.len() {
                continue;
            }
            let mut chosen = Vec::with_capacity(need);
            self.choose(v, fresh, new, &candidates, 0, old, &mut chosen);
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn choose(
        &mut self,
        v: usize,
        fresh: usize,
        new: usize,
        candidates: &[usize],
        from: usize,
        left: usize,
        chosen: &mut Vec<usize>,
    ) {
        if left == 0 {
            let targets: Vec<usize> = chosen.iter().copied().chain(fresh..fresh + new).collect();
            for &w in &targets {
                self.link(v, w, true);
            }
            self.fill(v + 1, fresh + new);
            for &w in &targets {
                self.link(v, w, false);
            }
            return;
        }
        for idx in from..candidates.len() {
            if candidates.len() - idx < left {
                break;
            }
            chosen.push(candidates[idx]);
            self.choose(v, fresh, new, candidates, idx + 1, left - 1, chosen);
            chosen.pop();
        }
    }

    fn link(&mut self, a: usize, b: usize, add: bool) {
        self.adj[a][b] = add;
        self.adj[b][a] = add;
        if add {
            self.deg[a] += 1;
            self.deg[b] += 1;
            self.edges.push((a, b));
        } else {
            self.deg[a] -= 1;
            self.deg[b] -= 1;
            self.edges.pop();
        }
    }
}

/// Pairing-model sampling with rejection; classes in order of first discovery.
fn sample_regular(n: usize, d: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<CanonicalForm> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut stale = 0;
    let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    for _ in 0..ATTEMPT_LIMIT {
        if out.len() == count || stale >= STALE_LIMIT {
            break;
        }
        points.shuffle(rng);
        let Some(g) = pair_up(n, &points) else {
            continue;
        };
        if !g.is_connected() {
            continue;
        }
        let form = canonical_form(&g).0;
        if seen.insert(form.clone()) {
            out.push(form);
            stale = 0;
        } else {
            stale += 1;
        }
    }
    out
}

fn pair_up(n: usize, points: &[usize]) -> Option<Graph> {
    let mut seen = HashSet::new();
    let mut edges = Vec::with_capacity(points.len() / 2);
    for pair in points.chunks_exact(2) {
        let (a, b) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
        if a == b || !seen.insert((a, b)) {
            return None;
        }
        edges.push((a, b));
    }
    Graph::unweighted("", n, edges).ok()
}
