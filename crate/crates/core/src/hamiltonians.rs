//! MaxCut problem Hamiltonian, transverse-field mixer, and the commutator
//! observable `i[H_d, H_p]` as a weighted list of two-qubit Pauli strings.
//!
//! Bit convention, used throughout the crate: bit `i` of a basis index `z`
//! is the state of qubit `i` (`0` for Z = +1, `1` for Z = -1).

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{cut_energy, Edge, Graph, GroundStateSet};

/// Default memory cap on qubit count for dense objects.
pub const DEFAULT_QUBIT_CAP: usize = 26;

pub(crate) fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::QubitCap { n, cap })
    } else {
        Ok(())
    }
}

/// `H_p = -sum_{(i,j,w)} (w/2)(1 - Z_i Z_j)`, stored as its diagonal.
#[derive(Debug, Clone)]
pub struct ProblemHamiltonian {
    n: usize,
    diag: Vec<f64>,
    terms: Vec<Edge>,
}

impl ProblemHamiltonian {
    pub fn build(g: &Graph) -> Result<Self> {
        Self::build_with_cap(g, DEFAULT_QUBIT_CAP)
    }

    pub fn build_with_cap(g: &Graph, cap: usize) -> Result<Self> {
        check_cap(g.n(), cap)?;
        let edges = g.edges();
        let diag = (0..1usize << g.n())
            .into_par_iter()
            .map(|z| cut_energy(edges, z))
            .collect();
        Ok(Self {
            n: g.n(),
            diag,
            terms: edges.to_vec(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn terms(&self) -> &[Edge] {
        &self.terms
    }

    /// Ground energy and degenerate ground states read off the diagonal.
    pub fn ground_states(&self) -> GroundStateSet {
        GroundStateSet::from_energies(&self.diag)
    }
}

/// `H_d = sum_j X_j`. Never materialized; the simulator applies its
/// exponential qubit by qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MixerHamiltonian {
    pub n: usize,
}

impl MixerHamiltonian {
    /// Lowest eigenvalue, attained by the all-minus product state.
    pub fn ground_energy(&self) -> f64 {
        -(self.n as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

/// Tensor product of single-qubit Paulis on distinct qubits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    factors: Vec<(usize, Pauli)>,
}

impl PauliString {
    pub fn new(factors: impl IntoIterator<Item = (usize, Pauli)>) -> Result<Self> {
        let mut factors: Vec<_> = factors.into_iter().collect();
        factors.sort_by_key(|&(q, _)| q);
        if factors.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidPauli(format!(
                "repeated qubit in {}",
                Self { factors }
            )));
        }
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[(usize, Pauli)] {
        &self.factors
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        match self.factors.iter().find(|&&(q, _)| q >= n) {
            Some(&(q, _)) => Err(Error::InvalidPauli(format!(
                "{self} acts on qubit {q} of a {n}-qubit register"
            ))),
            None => Ok(()),
        }
    }

    /// Bit masks `(x, z, y_count)` with `P|b> = i^y (-1)^{popcount(b & z)} |b ^ x>`.
    pub(crate) fn masks(&self) -> (usize, usize, u32) {
        let (mut x, mut z, mut y) = (0, 0, 0);
        for &(q, p) in &self.factors {
            match p {
                Pauli::X => x |= 1 << q,
                Pauli::Z => z |= 1 << q,
                Pauli::Y => {
                    x |= 1 << q;
                    z |= 1 << q;
                    y += 1;
                }
            }
        }
        (x, z, y)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "I");
        }
        for (k, (q, p)) in self.factors.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{p:?}{q}")?;
        }
        Ok(())
    }
}

/// `i[H_d, H_p] = sum_{(i,j,w)} w (Y_i Z_j + Z_i Y_j)`.
#[derive(Debug, Clone)]
pub struct CommutatorObservable {
    n: usize,
    terms: Vec<(PauliString, f64)>,
    /// For each qubit `q`, the `(z_qubit, coefficient)` of every `Y_q Z_j` term.
    y_groups: Vec<Vec<(usize, f64)>>,
}

impl CommutatorObservable {
    pub fn build(g: &Graph) -> Self {
        let n = g.n();
        let mut terms = Vec::with_capacity(2 * g.edge_count());
        let mut y_groups = vec![Vec::new(); n];
        for e in g.edges() {
            for (y, z) in [(e.i, e.j), (e.j, e.i)] {
                let p = PauliString::new([(y, Pauli::Y), (z, Pauli::Z)])
                    .expect("edge endpoints are distinct");
                terms.push((p, e.w));
                y_groups[y].push((z, e.w));
            }
        }
        Self { n, terms, y_groups }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(PauliString, f64)] {
        &self.terms
    }

    /// Number of Pauli strings measured per layer.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Generic bound `n(n-1)` on the string count for MaxCut.
    pub fn term_bound(&self) -> usize {
        self.n * self.n.saturating_sub(1)
    }

    pub(crate) fn y_groups(&self) -> &[Vec<(usize, f64)>] {
        &self.y_groups
    }
}
