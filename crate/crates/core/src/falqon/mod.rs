//! The measurement-feedback loop.
//!
//! Layer `k` applies `U_d(beta_k) U_p` to the previous state, measures
//! `A_k = <i[H_d, H_p]>` and sets `beta_{k+1} = -w f(A_k)`. The first
//! coefficient is a seed (zero by default). Layer 0 of every trace is the
//! initial state before any layer runs.

mod heuristics;
mod shots;
mod trace;

pub use heuristics::{
    kick_alpha, kick_probability, kick_transform, reference_schedule, run_iterative_qlc,
    run_with_reference, IterativeQlc, QlcIteration, QlcSummary, BETA_TAIL_TOL,
};
pub use shots::{estimate_commutator_shots, estimate_commutator_shots_with, ShotEstimate};
pub use trace::{write_trace_csv, RunMetadata, TRACE_COLUMNS, TRACE_SCHEMA};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{bitstring, Graph, GroundStateSet};
use crate::hamiltonians::{CommutatorObservable, ProblemHamiltonian};
use crate::simulator::{PhaseTable, StateVector};

/// Energy increase tolerated before a layer counts as a monotonicity violation.
pub const MONOTONE_TOL: f64 = 1e-12;

/// Shape `f` in `beta = -w f(A)`. Any shape must satisfy `f(0) = 0` and
/// `A f(A) > 0` for `A != 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[non_exhaustive]
pub enum FeedbackShape {
    #[default]
    Identity,
}

impl FeedbackShape {
    pub fn eval(self, a: f64) -> f64 {
        match self {
            FeedbackShape::Identity => a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeedbackLaw {
    pub gain: f64,
    pub shape: FeedbackShape,
}

impl Default for FeedbackLaw {
    fn default() -> Self {
        Self {
            gain: 1.0,
            shape: FeedbackShape::Identity,
        }
    }
}

impl FeedbackLaw {
    /// Next control coefficient from a measured commutator expectation.
    pub fn next_beta(&self, a: f64) -> f64 {
        -self.gain * self.shape.eval(a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    #[default]
    Exact,
    /// `shots` samples per Pauli string. With `estimate_energy`, one extra
    /// computational-basis circuit of `shots` samples per layer estimates
    /// `<H_p>` as well.
    Shots { shots: u64, estimate_energy: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KickConfig {
    pub beta_c: f64,
    pub amp: f64,
}

impl Default for KickConfig {
    fn default() -> Self {
        Self {
            beta_c: 1.0,
            amp: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceSchedule {
    /// `lambda_k = amp * sin^2(pi k / (2 l) - pi / 2)`, the kick envelope.
    Alpha { amp: f64 },
    /// One entry per layer, starting at layer 1.
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    #[default]
    Standard,
    Kicks(KickConfig),
    Reference(ReferenceSchedule),
    IterativeQlc { iterations: usize },
}

/// Stop once `|beta_k + lambda_k| < eps` for `patience` consecutive layers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopRule {
    pub eps: f64,
    pub patience: usize,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            eps: 1e-6,
            patience: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub dt: f64,
    pub max_layers: usize,
    pub estimator: Estimator,
    pub variant: Variant,
    pub beta_1: f64,
    pub stop: Option<StopRule>,
    pub law: FeedbackLaw,
    pub seed: u64,
    /// Samples drawn from the final state to pick a candidate cut; 0 disables.
    pub final_shots: usize,
}

impl RunConfig {
    pub fn new(dt: f64, max_layers: usize) -> Self {
        Self {
            dt,
            max_layers,
            estimator: Estimator::Exact,
            variant: Variant::Standard,
            beta_1: 0.0,
            stop: Some(StopRule::default()),
            law: FeedbackLaw::default(),
            seed: 0,
            final_shots: 1024,
        }
    }

    /// Feedback delay: one problem step plus one mixer step.
    pub fn tau(&self) -> f64 {
        2.0 * self.dt
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if self.max_layers == 0 {
            return Err(Error::InvalidConfig("max_layers must be at least 1".into()));
        }
        if !(self.law.gain > 0.0 && self.law.gain.is_finite()) {
            return Err(Error::InvalidConfig("feedback gain must be positive".into()));
        }
        if !self.beta_1.is_finite() {
            return Err(Error::InvalidConfig("beta_1 must be finite".into()));
        }
        if let Estimator::Shots { shots: 0, .. } = self.estimator {
            return Err(Error::ZeroShots);
        }
        if let Some(stop) = self.stop {
            if stop.patience == 0 || stop.eps.is_nan() || stop.eps < 0.0 {
                return Err(Error::InvalidConfig("stop rule needs eps >= 0 and patience >= 1".into()));
            }
        }
        match &self.variant {
            Variant::Kicks(k) if !(k.amp.is_finite() && k.beta_c.is_finite()) => {
                Err(Error::InvalidConfig("kick parameters must be finite".into()))
            }
            Variant::IterativeQlc { iterations: 0 } => {
                Err(Error::InvalidConfig("iterative QLC needs at least one iteration".into()))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerRecord {
    pub layer: usize,
    /// Coefficient applied in this layer (after any kick); 0 for layer 0.
    pub beta: f64,
    /// Reference offset added to `beta` in the mixer angle.
    pub lambda: f64,
    /// Commutator expectation fed back from this layer (estimated in shot mode).
    pub a: f64,
    pub a_stderr: Option<f64>,
    /// Exact `<H_p>`, also in shot mode.
    pub energy: f64,
    pub energy_estimate: Option<f64>,
    pub r_a: f64,
    pub phi: f64,
    pub cumulative_samples: u64,
    pub kicked: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CostLedger {
    pub strings_per_layer: u64,
    pub shots_per_string: u64,
    pub layers_measured: u64,
    pub commutator_samples: u64,
    pub energy_samples: u64,
}

impl CostLedger {
    pub fn total_samples(&self) -> u64 {
        self.commutator_samples + self.energy_samples
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "reason")]
pub enum StopReason {
    LayerCap,
    Converged { layer: usize },
    Halted { layer: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub state: usize,
    pub bitstring: String,
    pub energy: f64,
}

#[derive(Debug, Clone)]
pub struct FeedbackRun {
    pub config: RunConfig,
    pub min_energy: f64,
    /// Number of ground states `phi` sums over.
    pub degeneracy: usize,
    pub layers: Vec<LayerRecord>,
    pub final_state: StateVector,
    pub cost: CostLedger,
    pub monotone_violations: Vec<usize>,
    pub stop: StopReason,
    pub candidate: Option<Candidate>,
}

impl FeedbackRun {
    /// Layers executed, not counting the initial record.
    pub fn layers_executed(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn betas(&self) -> Vec<f64> {
        self.layers.iter().map(|l| l.beta).collect()
    }

    pub fn a_values(&self) -> Vec<f64> {
        self.layers.iter().map(|l| l.a).collect()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.layers.iter().map(|l| l.energy).collect()
    }

    pub fn r_a(&self) -> Vec<f64> {
        self.layers.iter().map(|l| l.r_a).collect()
    }

    pub fn phi(&self) -> Vec<f64> {
        self.layers.iter().map(|l| l.phi).collect()
    }

    pub fn final_energy(&self) -> f64 {
        self.layers.last().map_or(f64::NAN, |l| l.energy)
    }

    /// Coefficients applied in layers `1..=executed`.
    pub fn applied_betas(&self) -> Vec<f64> {
        self.layers[1..].iter().map(|l| l.beta).collect()
    }
}

/// Graph plus everything derived from it that a run needs.
#[derive(Debug, Clone)]
pub struct Instance {
    pub graph: Graph,
    pub hp: ProblemHamiltonian,
    pub comm: CommutatorObservable,
    pub ground: GroundStateSet,
}

impl Instance {
    pub fn new(graph: Graph) -> Result<Self> {
        let hp = ProblemHamiltonian::build(&graph)?;
        let comm = CommutatorObservable::build(&graph);
        let ground = hp.ground_states();
        Ok(Self {
            graph,
            hp,
            comm,
            ground,
        })
    }

    pub fn name(&self) -> &str {
        self.graph.name()
    }

    pub fn run(&self, cfg: &RunConfig) -> Result<FeedbackRun> {
        run_falqon(&self.hp, &self.comm, &self.ground, cfg)
    }
}

/// Mixes a master seed with stream identifiers (splitmix64 finalizer).
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    let mut x = master;
    for &p in parts {
        x = x.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(p);
        x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        x ^= x >> 31;
    }
    x
}

pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

const STREAM_KICKS: u64 = 1;
const STREAM_COMMUTATOR: u64 = 2;
const STREAM_ENERGY: u64 = 3;
const STREAM_FINAL: u64 = 4;

/// Runs the standard loop, or the kick / reference variant when configured.
pub fn run_falqon(
    hp: &ProblemHamiltonian,
    comm: &CommutatorObservable,
    ground: &GroundStateSet,
    cfg: &RunConfig,
) -> Result<FeedbackRun> {
    run_falqon_until(hp, comm, ground, cfg, |_| false)
}

/// Like [`run_falqon`], but stops after the first layer for which `halt`
/// returns true.
pub fn run_falqon_until(
    hp: &ProblemHamiltonian,
    comm: &CommutatorObservable,
    ground: &GroundStateSet,
    cfg: &RunConfig,
    halt: impl FnMut(&LayerRecord) -> bool,
) -> Result<FeedbackRun> {
    let lambda = match &cfg.variant {
        Variant::Standard | Variant::Kicks(_) => None,
        Variant::Reference(schedule) => Some(reference_schedule(schedule, cfg.max_layers)?),
        Variant::IterativeQlc { .. } => {
            return Err(Error::InvalidConfig(
                "iterative QLC yields one run per iteration; use run_iterative_qlc".into(),
            ))
        }
    };
    let psi0 = StateVector::mixer_ground(hp.n())?;
    run_core(hp, comm, ground, cfg, lambda.as_deref(), psi0, halt)
}

/// Runs any variant; iterative QLC returns one run per iteration.
pub fn run_variant(
    hp: &ProblemHamiltonian,
    comm: &CommutatorObservable,
    ground: &GroundStateSet,
    cfg: &RunConfig,
) -> Result<Vec<FeedbackRun>> {
    match cfg.variant {
        Variant::IterativeQlc { iterations } => {
            let base = RunConfig {
                variant: Variant::Standard,
                ..cfg.clone()
            };
            Ok(run_iterative_qlc(hp, comm, ground, &base, iterations)?
                .iterations
                .into_iter()
                .map(|it| it.run)
                .collect())
        }
        _ => Ok(vec![run_falqon(hp, comm, ground, cfg)?]),
    }
}

pub(crate) fn run_core(
    hp: &ProblemHamiltonian,
    comm: &CommutatorObservable,
    ground: &GroundStateSet,
    cfg: &RunConfig,
    lambda: Option<&[f64]>,
    mut psi: StateVector,
    mut halt: impl FnMut(&LayerRecord) -> bool,
) -> Result<FeedbackRun> {
    cfg.validate()?;
    let dim = hp.dim();
    if comm.n() != hp.n() || psi.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: if psi.dim() != dim { psi.dim() } else { 1 << comm.n() },
        });
    }
    if let Some(&z) = ground.states.iter().find(|&&z| z >= dim) {
        return Err(Error::InvalidConfig(format!("ground state index {z} exceeds dimension {dim}")));
    }
    if let Some(l) = lambda {
        if l.len() < cfg.max_layers {
            return Err(Error::ScheduleTooShort {
                needed: cfg.max_layers,
                found: l.len(),
            });
        }
    }

    let kicks = match cfg.variant {
        Variant::Kicks(k) => Some(k),
        _ => None,
    };
    // Kicks can revive a stalled control, so convergence is not declared.
    let stop_rule = if kicks.is_some() { None } else { cfg.stop };
    let mut kick_rng = stream_rng(cfg.seed, STREAM_KICKS);
    let mut comm_rng = stream_rng(cfg.seed, STREAM_COMMUTATOR);
    let mut energy_rng = stream_rng(cfg.seed, STREAM_ENERGY);

    let min_energy = ground.min_energy;
    let ratio = |e: f64| if min_energy == 0.0 { f64::NAN } else { e / min_energy };
    let mut cost = CostLedger {
        strings_per_layer: comm.term_count() as u64,
        shots_per_string: match cfg.estimator {
            Estimator::Exact => 0,
            Estimator::Shots { shots, .. } => shots,
        },
        ..CostLedger::default()
    };

    let energy0 = psi.expect_hp(hp)?;
    let mut layers = Vec::with_capacity(cfg.max_layers + 1);
    layers.push(LayerRecord {
        layer: 0,
        beta: 0.0,
        lambda: 0.0,
        a: psi.expect_commutator(comm)?,
        a_stderr: None,
        energy: energy0,
        energy_estimate: None,
        r_a: ratio(energy0),
        phi: psi.ground_overlap(ground),
        cumulative_samples: 0,
        kicked: false,
    });

    let phases = PhaseTable::new(hp, cfg.dt);
    let mut beta = cfg.beta_1;
    let mut quiet = 0;
    let mut violations = Vec::new();
    let mut stop = StopReason::LayerCap;

    for k in 1..=cfg.max_layers {
        let mut kicked = false;
        if let Some(kc) = &kicks {
            let next = kick_transform(beta, k, cfg.max_layers, kc, &mut kick_rng);
            kicked = next != beta;
            beta = next;
        }
        let lam = lambda.map_or(0.0, |l| l[k - 1]);

        psi.apply_phase_table(&phases)?;
        psi.apply_mixer((beta + lam) * cfg.dt);

        let (a, a_stderr, energy_estimate) = match cfg.estimator {
            Estimator::Exact => (psi.expect_commutator(comm)?, None, None),
            Estimator::Shots {
                shots,
                estimate_energy,
            } => {
                let est = estimate_commutator_shots_with(&psi, comm, shots, &mut comm_rng)?;
                cost.commutator_samples += est.samples_used;
                let e_hat = if estimate_energy {
                    let samples = psi.sample_with(shots as usize, &mut energy_rng)?;
                    cost.energy_samples += shots;
                    let diag = hp.diag();
                    Some(samples.iter().map(|&z| diag[z]).sum::<f64>() / shots as f64)
                } else {
                    None
                };
                (est.value, Some(est.stderr), e_hat)
            }
        };
        cost.layers_measured += 1;

        let energy = psi.expect_hp(hp)?;
        let prev = layers.last().map_or(energy, |l: &LayerRecord| l.energy);
        if energy > prev + MONOTONE_TOL {
            violations.push(k);
        }
        let record = LayerRecord {
            layer: k,
            beta,
            lambda: lam,
            a,
            a_stderr,
            energy,
            energy_estimate,
            r_a: ratio(energy),
            phi: psi.ground_overlap(ground),
            cumulative_samples: cost.total_samples(),
            kicked,
        };
        let halted = halt(&record);
        layers.push(record);

        if let Some(rule) = stop_rule {
            if (beta + lam).abs() < rule.eps {
                quiet += 1;
            } else {
                quiet = 0;
            }
            if quiet >= rule.patience {
                stop = StopReason::Converged { layer: k };
                break;
            }
        }
        if halted {
            stop = StopReason::Halted { layer: k };
            break;
        }
        beta = cfg.law.next_beta(a);
    }

    let candidate = if cfg.final_shots > 0 {
        let samples = psi.sample_with(cfg.final_shots, &mut stream_rng(cfg.seed, STREAM_FINAL))?;
        let diag = hp.diag();
        samples
            .into_iter()
            .min_by(|&x, &y| diag[x].total_cmp(&diag[y]).then(x.cmp(&y)))
            .map(|z| Candidate {
                state: z,
                bitstring: bitstring(z, hp.n()),
                energy: diag[z],
            })
    } else {
        None
    };

    Ok(FeedbackRun {
        config: cfg.clone(),
        min_energy,
        degeneracy: ground.degeneracy(),
        layers,
        final_state: psi,
        cost,
        monotone_violations: violations,
        stop,
        candidate,
    })
}
