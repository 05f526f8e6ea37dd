use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonians::CommutatorObservable;
use crate::simulator::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShotEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples_used: u64,
}

pub fn estimate_commutator_shots(
    psi: &StateVector,
    comm: &CommutatorObservable,
    shots: u64,
    seed: u64,
) -> Result<ShotEstimate> {
    estimate_commutator_shots_with(psi, comm, shots, &mut super::stream_rng(seed, 0))
}

/// Finite-sample estimate of `sum_j alpha_j <P_j>`.
///
/// Each string is measured independently: the number of `+1` outcomes is
/// binomial with `p = (1 + <P_j>) / 2`. Strings that would share a
/// measurement basis on hardware are still sampled independently.
pub fn estimate_commutator_shots_with<R: Rng + ?Sized>(
    psi: &StateVector,
    comm: &CommutatorObservable,
    shots: u64,
    rng: &mut R,
) -> Result<ShotEstimate> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let m = shots as f64;
    let mut value = 0.0;
    let mut variance = 0.0;
    for (p, alpha) in comm.terms() {
        let exact = psi.expect_pauli(p)?;
        let prob = ((1.0 + exact) / 2.0).clamp(0.0, 1.0);
        let plus = Binomial::new(shots, prob)
            .expect("probability clamped to [0, 1]")
            .sample(rng) as f64;
        let mean = 2.0 * plus / m - 1.0;
        // Sample variance of the +-1 outcomes.
        let var = if shots > 1 {
            (1.0 - mean * mean) * m / (m - 1.0)
        } else {
            1.0 - mean * mean
        };
        value += alpha * mean;
        variance += alpha * alpha * var / m;
    }
    Ok(ShotEstimate {
        value,
        stderr: variance.sqrt(),
        samples_used: shots * comm.term_count() as u64,
    })
}
