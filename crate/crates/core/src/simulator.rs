//! Dense statevector engine.
//!
//! Every kernel is a linear pass over the amplitude array. Large arrays are
//! split into fixed-size chunks processed with rayon; reductions collect
//! per-chunk partial sums in chunk order, so results do not depend on the
//! thread count.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graphs::GroundStateSet;
use crate::hamiltonians::{
    check_cap, CommutatorObservable, PauliString, ProblemHamiltonian, DEFAULT_QUBIT_CAP,
};

/// Amplitudes per parallel work item.
const CHUNK: usize = 1 << 14;

/// Norm tolerance accepted by [`StateVector::from_amplitudes`].
pub const NORM_TOL: f64 = 1e-10;

fn chunked_sum<F>(amps: &[Complex64], f: F) -> f64
where
    F: Fn(usize, &[Complex64]) -> f64 + Sync,
{
    if amps.len() <= CHUNK {
        return f(0, amps);
    }
    let parts: Vec<f64> = amps
        .par_chunks(CHUNK)
        .enumerate()
        .map(|(c, chunk)| f(c * CHUNK, chunk))
        .collect();
    parts.iter().sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|->^n`, the ground state of `sum_j X_j`:
    /// `amps[z] = (-1)^{popcount(z)} / 2^{n/2}`.
    pub fn mixer_ground(n: usize) -> Result<Self> {
        Self::mixer_ground_with_cap(n, DEFAULT_QUBIT_CAP)
    }

    pub fn mixer_ground_with_cap(n: usize, cap: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("register needs at least one qubit".into()));
        }
        check_cap(n, cap)?;
        let a = (0.5f64).powf(n as f64 / 2.0);
        let amps = (0..1usize << n)
            .into_par_iter()
            .map(|z| {
                if z.count_ones() % 2 == 0 {
                    Complex64::new(a, 0.0)
                } else {
                    Complex64::new(-a, 0.0)
                }
            })
            .collect();
        Ok(Self { n, amps })
    }

    /// Computational basis state `|z>`.
    pub fn basis(n: usize, z: usize) -> Result<Self> {
        check_cap(n, DEFAULT_QUBIT_CAP)?;
        if z >> n != 0 {
            return Err(Error::InvalidConfig(format!("basis index {z} needs more than {n} qubits")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[z] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if !len.is_power_of_two() || len < 2 {
            return Err(Error::DimensionMismatch {
                expected: len.next_power_of_two().max(2),
                found: len,
            });
        }
        let state = Self {
            n: len.trailing_zeros() as usize,
            amps,
        };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(state)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        chunked_sum(&self.amps, |_, c| c.iter().map(|a| a.norm_sqr()).sum())
    }

    fn check_dim(&self, expected: usize) -> Result<()> {
        if self.amps.len() == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected,
                found: self.amps.len(),
            })
        }
    }

    /// `|psi> <- exp(-i H_p dt) |psi>`.
    pub fn apply_problem_phase(&mut self, hp: &ProblemHamiltonian, dt: f64) -> Result<()> {
        self.check_dim(hp.dim())?;
        let diag = hp.diag();
        self.amps
            .par_chunks_mut(CHUNK)
            .zip(diag.par_chunks(CHUNK))
            .for_each(|(amps, d)| {
                for (a, &e) in amps.iter_mut().zip(d) {
                    *a *= Complex64::cis(-e * dt);
                }
            });
        Ok(())
    }

    /// Same as [`apply_problem_phase`](Self::apply_problem_phase) with the
    /// phases precomputed.
    pub fn apply_phase_table(&mut self, table: &PhaseTable) -> Result<()> {
        self.check_dim(table.phases.len())?;
        self.amps
            .par_chunks_mut(CHUNK)
            .zip(table.phases.par_chunks(CHUNK))
            .for_each(|(amps, p)| {
                for (a, &ph) in amps.iter_mut().zip(p) {
                    *a *= ph;
                }
            });
        Ok(())
    }

    /// `|psi> <- prod_j exp(-i angle X_j) |psi>`. The `X_j` commute, so the
    /// product is the exact exponential of `-i angle H_d`.
    pub fn apply_mixer(&mut self, angle: f64) {
        if angle == 0.0 {
            return;
        }
        let (s, c) = angle.sin_cos();
        let ms = Complex64::new(0.0, -s);
        for q in 0..self.n {
            let stride = 1usize << q;
            let block = 2 * stride;
            self.amps
                .par_chunks_mut(block.max(CHUNK))
                .for_each(|chunk| {
                    for pair in chunk.chunks_exact_mut(block) {
                        let (lo, hi) = pair.split_at_mut(stride);
                        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                            let (x, y) = (*a, *b);
                            *a = x * c + y * ms;
                            *b = x * ms + y * c;
                        }
                    }
                });
        }
    }

    pub fn with_problem_phase(&self, hp: &ProblemHamiltonian, dt: f64) -> Result<Self> {
        let mut out = self.clone();
        out.apply_problem_phase(hp, dt)?;
        Ok(out)
    }

    pub fn with_mixer(&self, angle: f64) -> Self {
        let mut out = self.clone();
        out.apply_mixer(angle);
        out
    }

    /// `<psi|H_p|psi>`.
    pub fn expect_hp(&self, hp: &ProblemHamiltonian) -> Result<f64> {
        self.check_dim(hp.dim())?;
        let diag = hp.diag();
        Ok(chunked_sum(&self.amps, |off, c| {
            c.iter()
                .zip(&diag[off..off + c.len()])
                .map(|(a, &e)| e * a.norm_sqr())
                .sum()
        }))
    }

    /// `<psi| i[H_d, H_p] |psi>`.
    ///
    /// Terms sharing their `Y` qubit `q` are fused into one pass over the
    /// amplitude pairs `(z0, z0 | 1<<q)`: each such pair contributes
    /// `-2 Im(conj(psi[z1]) psi[z0]) * sum_j w_j s_j(z0)` where `s_j` is the
    /// Z eigenvalue of qubit `j`.
    pub fn expect_commutator(&self, comm: &CommutatorObservable) -> Result<f64> {
        self.check_dim(1 << comm.n())?;
        let mut total = 0.0;
        for (q, group) in comm.y_groups().iter().enumerate() {
            if group.is_empty() {
                continue;
            }
            total += self.y_pass(q, group);
        }
        Ok(total)
    }

    fn y_pass(&self, q: usize, group: &[(usize, f64)]) -> f64 {
        let stride = 1usize << q;
        let block = 2 * stride;
        let width = block.max(CHUNK);
        let pass = |off: usize, chunk: &[Complex64]| -> f64 {
            let mut acc = 0.0;
            for (b, pair) in chunk.chunks_exact(block).enumerate() {
                let base = off + b * block;
                let (lo, hi) = pair.split_at(stride);
                for (t, (a0, a1)) in lo.iter().zip(hi).enumerate() {
                    let z0 = base + t;
                    let im = a1.re * a0.im - a1.im * a0.re;
                    let mut field = 0.0;
                    for &(j, w) in group {
                        if (z0 >> j) & 1 == 0 {
                            field += w;
                        } else {
                            field -= w;
                        }
                    }
                    acc += im * field;
                }
            }
            -2.0 * acc
        };
        if self.amps.len() <= width {
            return pass(0, &self.amps);
        }
        let parts: Vec<f64> = self
            .amps
            .par_chunks(width)
            .enumerate()
            .map(|(c, chunk)| pass(c * width, chunk))
            .collect();
        parts.iter().sum()
    }

    /// `<psi|P|psi>` for a single Pauli string.
    pub fn expect_pauli(&self, p: &PauliString) -> Result<f64> {
        p.validate(self.n)?;
        let (x, zmask, y) = p.masks();
        let amps = &self.amps;
        let value = chunked_sum(amps, |off, c| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (t, a) in c.iter().enumerate() {
                let b = off + t;
                let term = amps[b ^ x].conj() * a;
                if (b & zmask).count_ones() % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            // i^y rotates the accumulated sum; only the real part survives.
            match y % 4 {
                0 => acc.re,
                1 => -acc.im,
                2 => -acc.re,
                _ => acc.im,
            }
        });
        Ok(value)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Total probability on the given ground states.
    pub fn ground_overlap(&self, ground: &GroundStateSet) -> f64 {
        ground
            .states
            .iter()
            .map(|&z| self.amps.get(z).map_or(0.0, |a| a.norm_sqr()))
            .sum()
    }

    /// I.i.d. computational-basis samples drawn from `|amps|^2`.
    pub fn sample_bitstrings(&self, shots: usize, seed: u64) -> Result<Vec<usize>> {
        self.sample_with(shots, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, shots: usize, rng: &mut R) -> Result<Vec<usize>> {
        if shots == 0 {
            return Err(Error::ZeroShots);
        }
        let mut cdf = Vec::with_capacity(self.amps.len());
        let mut acc = 0.0;
        for a in &self.amps {
            acc += a.norm_sqr();
            cdf.push(acc);
        }
        let last = cdf.len() - 1;
        Ok((0..shots)
            .map(|_| {
                let u = rng.random::<f64>() * acc;
                cdf.partition_point(|&c| c <= u).min(last)
            })
            .collect())
    }
}

/// Precomputed `exp(-i diag[z] dt)` for repeated problem layers.
#[derive(Debug, Clone)]
pub struct PhaseTable {
    dt: f64,
    phases: Vec<Complex64>,
}

impl PhaseTable {
    pub fn new(hp: &ProblemHamiltonian, dt: f64) -> Self {
        let phases = hp
            .diag()
            .par_iter()
            .map(|&e| Complex64::cis(-e * dt))
            .collect();
        Self { dt, phases }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }
}
