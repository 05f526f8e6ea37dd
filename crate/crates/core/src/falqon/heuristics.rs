//! Variants for instances where the control stalls before the ground state
//! is reached: random kicks, a reference offset on the control, and
//! iterative refinement of that offset.

use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use serde::Serialize;

use super::{derive_seed, run_core, FeedbackRun, KickConfig, ReferenceSchedule, RunConfig, Variant};
use crate::error::{Error, Result};
use crate::graphs::GroundStateSet;
use crate::hamiltonians::{CommutatorObservable, ProblemHamiltonian};
use crate::simulator::StateVector;

/// `|beta_l|` below which an iteration counts as having settled.
pub const BETA_TAIL_TOL: f64 = 1e-3;

/// `amp * sin^2(pi k / (2 l) - pi / 2)`, written as
/// `amp * sin^2(pi (l - k) / (2 l))` so that it is exactly zero at `k = l`.
pub fn kick_alpha(k: usize, ell: usize, amp: f64) -> f64 {
    let s = (FRAC_PI_2 * (ell as f64 - k as f64) / ell as f64).sin();
    amp * s * s
}

/// Probability that layer `k` is kicked to `beta_c`.
pub fn kick_probability(beta: f64, k: usize, ell: usize, cfg: &KickConfig) -> f64 {
    if beta < cfg.beta_c {
        ((1.0 - beta) * kick_alpha(k, ell, cfg.amp)).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

pub fn kick_transform<R: Rng + ?Sized>(
    beta: f64,
    k: usize,
    ell: usize,
    cfg: &KickConfig,
    rng: &mut R,
) -> f64 {
    let p = kick_probability(beta, k, ell, cfg);
    if p > 0.0 && rng.random::<f64>() < p {
        cfg.beta_c
    } else {
        beta
    }
}

/// Per-layer offsets `lambda_1..lambda_l` for a schedule.
pub fn reference_schedule(schedule: &ReferenceSchedule, ell: usize) -> Result<Vec<f64>> {
    match schedule {
        ReferenceSchedule::Alpha { amp } => Ok((1..=ell).map(|k| kick_alpha(k, ell, *amp)).collect()),
        ReferenceSchedule::Explicit(values) => {
            if values.len() < ell {
                Err(Error::ScheduleTooShort {
                    needed: ell,
                    found: values.len(),
                })
            } else {
                Ok(values.clone())
            }
        }
    }
}

/// Runs with mixer angle `(lambda_k + beta_k) dt`; feedback is unchanged
/// since `H_d` commutes with itself.
pub fn run_with_reference(
    hp: &ProblemHamiltonian,
    comm: &CommutatorObservable,
    ground: &GroundStateSet,
    cfg: &RunConfig,
    lambda: &[f64],
) -> Result<FeedbackRun> {
    let psi0 = StateVector::mixer_ground(hp.n())?;
    run_core(hp, comm, ground, cfg, Some(lambda), psi0, |_| false)
}

#[derive(Debug, Clone)]
pub struct QlcIteration {
    pub run: FeedbackRun,
    /// Offset schedule this iteration ran with.
    pub reference: Vec<f64>,
    /// Last applied coefficient `beta_l`.
    pub beta_tail: f64,
    pub precondition_met: bool,
}

#[derive(Debug, Clone)]
pub struct IterativeQlc {
    pub iterations: Vec<QlcIteration>,
}

#[derive(Debug, Clone, Serialize)]
pub struct QlcSummary {
    pub final_energies: Vec<f64>,
    pub beta_tails: Vec<f64>,
    pub precondition_met: Vec<bool>,
}

impl IterativeQlc {
    pub fn final_energies(&self) -> Vec<f64> {
        self.iterations.iter().map(|it| it.run.final_energy()).collect()
    }

    /// Iterations `i >= 1` whose predecessors all settled (`|beta_l|` small).
    /// Only these carry the improvement guarantee.
    pub fn guaranteed(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut all_settled = true;
        for i in 1..self.iterations.len() {
            all_settled &= self.iterations[i - 1].precondition_met;
            if all_settled {
                out.push(i);
            }
        }
        out
    }

    /// Guaranteed iterations whose final energy rose above the previous one.
    pub fn regressions(&self, tol: f64) -> Vec<usize> {
        let e = self.final_energies();
        self.guaranteed()
            .into_iter()
            .filter(|&i| e[i] > e[i - 1] + tol)
            .collect()
    }

    pub fn summary(&self) -> QlcSummary {
        QlcSummary {
            final_energies: self.final_energies(),
            beta_tails: self.iterations.iter().map(|it| it.beta_tail).collect(),
            precondition_met: self.iterations.iter().map(|it| it.precondition_met).collect(),
        }
    }
}

/// Iteration 0 is standard feedback; iteration `i` runs with offset
/// `lambda^(i) = lambda^(i-1) + beta^(i-1)`. Early stopping is disabled so
/// every iteration spans the full `max_layers`.
pub fn run_iterative_qlc(
    hp: &ProblemHamiltonian,
    comm: &CommutatorObservable,
    ground: &GroundStateSet,
    cfg: &RunConfig,
    iterations: usize,
) -> Result<IterativeQlc> {
    if iterations == 0 {
        return Err(Error::InvalidConfig("iterative QLC needs at least one iteration".into()));
    }
    if !matches!(cfg.variant, Variant::Standard) {
        return Err(Error::InvalidConfig(
            "iterative QLC starts from the standard variant".into(),
        ));
    }
    let ell = cfg.max_layers;
    let mut lambda = vec![0.0; ell];
    let mut out = Vec::with_capacity(iterations);
    for i in 0..iterations {
        let seed = if i == 0 { cfg.seed } else { derive_seed(cfg.seed, &[i as u64]) };
        let run_cfg = RunConfig {
            stop: None,
            seed,
            variant: if i == 0 {
                Variant::Standard
            } else {
                Variant::Reference(ReferenceSchedule::Explicit(lambda.clone()))
            },
            ..cfg.clone()
        };
        let psi0 = StateVector::mixer_ground(hp.n())?;
        let run = run_core(hp, comm, ground, &run_cfg, Some(&lambda), psi0, |_| false)?;
        let betas = run.applied_betas();
        let beta_tail = *betas.last().expect("at least one layer");
        let reference = lambda.clone();
        for (l, b) in lambda.iter_mut().zip(&betas) {
            *l += b;
        }
        out.push(QlcIteration {
            run,
            reference,
            beta_tail,
            precondition_met: beta_tail.abs() <= BETA_TAIL_TOL,
        });
    }
    Ok(IterativeQlc { iterations: out })
}
