//! Corpus-level studies: critical time step, layers needed to reach the
//! reference figures of merit, QAOA circuit evaluation, sampling cost, and
//! per-layer aggregates of feedback traces.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::falqon::{
    run_falqon_until, FeedbackRun, Instance, LayerRecord, RunConfig, MONOTONE_TOL,
};
use crate::graphs::Graph;
use crate::hamiltonians::ProblemHamiltonian;
use crate::simulator::StateVector;

/// Best guaranteed classical approximation ratio, used as a reference.
pub const RA_TARGET: f64 = 0.932;
/// Ground-state probability at which four repetitions suffice on average.
pub const PHI_TARGET: f64 = 0.25;

/// Exact estimator, no early stop, no final sampling: the setting used for
/// corpus studies.
pub fn exact_config(dt: f64, layers: usize) -> RunConfig {
    RunConfig {
        stop: None,
        final_shots: 0,
        ..RunConfig::new(dt, layers)
    }
}

/// First layer (if any) at which the energy rises by more than
/// [`MONOTONE_TOL`] within `layers` exact layers.
pub fn first_violation(inst: &Instance, dt: f64, layers: usize) -> Result<Option<usize>> {
    let mut prev = f64::INFINITY;
    let mut hit = None;
    run_falqon_until(&inst.hp, &inst.comm, &inst.ground, &exact_config(dt, layers), |l| {
        if l.energy > prev + MONOTONE_TOL {
            hit = Some(l.layer);
            return true;
        }
        prev = l.energy;
        false
    })?;
    Ok(hit)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DtProbe {
    pub dt: f64,
    pub passed: bool,
    /// `(instance, first violating layer)` pairs.
    pub violations: Vec<(String, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalDtReport {
    pub n: Option<usize>,
    pub instances: usize,
    pub layers: usize,
    pub lo: f64,
    pub hi: f64,
    pub resolution: f64,
    pub dt_c: f64,
    /// Monotone already at `hi`; the true critical step may be larger.
    pub unbounded: bool,
    /// Whether `dt_c + resolution` violates monotonicity (None when unbounded).
    pub fails_above: Option<bool>,
    pub probes: Vec<DtProbe>,
}

fn probe(instances: &[Instance], dt: f64, layers: usize) -> Result<DtProbe> {
    let hits: Vec<Option<usize>> = instances
        .par_iter()
        .map(|inst| first_violation(inst, dt, layers))
        .collect::<Result<_>>()?;
    let violations: Vec<(String, usize)> = instances
        .iter()
        .zip(hits)
        .filter_map(|(inst, h)| h.map(|k| (inst.name().to_string(), k)))
        .collect();
    Ok(DtProbe {
        dt,
        passed: violations.is_empty(),
        violations,
    })
}

fn common_n(instances: &[Instance]) -> Option<usize> {
    let n = instances.first()?.hp.n();
    instances.iter().all(|i| i.hp.n() == n).then_some(n)
}

/// Bisection for the largest `dt` at which no instance's energy increases
/// over `layers` layers.
pub fn find_critical_dt(
    instances: &[Instance],
    layers: usize,
    lo: f64,
    hi: f64,
    resolution: f64,
) -> Result<CriticalDtReport> {
    if !(lo > 0.0 && lo < hi && hi.is_finite()) {
        return Err(Error::InvalidConfig(format!("need 0 < lo < hi, got [{lo}, {hi}]")));
    }
    if !(resolution > 0.0) {
        return Err(Error::InvalidConfig("resolution must be positive".into()));
    }
    if instances.is_empty() {
        return Err(Error::InvalidConfig("no instances".into()));
    }
    let mut probes = Vec::new();
    let mut record = |p: DtProbe| {
        let passed = p.passed;
        probes.push(p);
        passed
    };
    if !record(probe(instances, lo, layers)?) {
        return Err(Error::NoPassingDt { lo });
    }
    let mut report = CriticalDtReport {
        n: common_n(instances),
        instances: instances.len(),
        layers,
        lo,
        hi,
        resolution,
        dt_c: hi,
        unbounded: false,
        fails_above: None,
        probes: Vec::new(),
    };
    if record(probe(instances, hi, layers)?) {
        report.unbounded = true;
        report.probes = probes;
        return Ok(report);
    }
    let (mut good, mut bad) = (lo, hi);
    while bad - good > resolution {
        let mid = 0.5 * (good + bad);
        if record(probe(instances, mid, layers)?) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    let above = good + resolution;
    let fails = if above == bad {
        true
    } else {
        !record(probe(instances, above, layers)?)
    };
    report.dt_c = good;
    report.fails_above = Some(fails);
    report.probes = probes;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceThreshold {
    pub name: String,
    /// First layer with `r_A >= RA_TARGET`, or `ell_max + 1` when censored.
    pub layers_to_ra: usize,
    pub ra_censored: bool,
    pub layers_to_phi: usize,
    pub phi_censored: bool,
    pub final_r_a: f64,
    pub final_phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rejection {
    pub name: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub n: Option<usize>,
    pub dt: f64,
    pub ell_max: usize,
    pub ra_target: f64,
    pub phi_target: f64,
    pub instances: Vec<InstanceThreshold>,
    pub mean_layers_ra: f64,
    pub std_layers_ra: f64,
    pub mean_layers_phi: f64,
    pub std_layers_phi: f64,
    pub censored_ra: usize,
    pub censored_phi: usize,
    pub rejected: Vec<Rejection>,
    pub warnings: usize,
}

/// Mean and population standard deviation; NaN for an empty slice.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Layers needed by one instance; censored crossings read `ell_max + 1`.
pub fn instance_threshold(inst: &Instance, dt: f64, ell_max: usize) -> Result<InstanceThreshold> {
    if inst.ground.min_energy == 0.0 {
        return Err(Error::UndefinedRatio(inst.name().to_string()));
    }
    let mut ra_at = None;
    let mut phi_at = None;
    let mut note = |l: &LayerRecord| {
        if ra_at.is_none() && l.r_a >= RA_TARGET {
            ra_at = Some(l.layer);
        }
        if phi_at.is_none() && l.phi >= PHI_TARGET {
            phi_at = Some(l.layer);
        }
        ra_at.is_some() && phi_at.is_some()
    };
    // Layer 0 is the initial state and may already qualify.
    let psi0 = StateVector::mixer_ground(inst.hp.n())?;
    let e0 = psi0.expect_hp(&inst.hp)?;
    let start = LayerRecord {
        layer: 0,
        beta: 0.0,
        lambda: 0.0,
        a: 0.0,
        a_stderr: None,
        energy: e0,
        energy_estimate: None,
        r_a: e0 / inst.ground.min_energy,
        phi: psi0.ground_overlap(&inst.ground),
        cumulative_samples: 0,
        kicked: false,
    };
    let (final_r_a, final_phi) = if note(&start) {
        (start.r_a, start.phi)
    } else {
        let run = run_falqon_until(&inst.hp, &inst.comm, &inst.ground, &exact_config(dt, ell_max), note)?;
        let last = run.layers.last().expect("initial record");
        (last.r_a, last.phi)
    };
    Ok(InstanceThreshold {
        name: inst.name().to_string(),
        layers_to_ra: ra_at.unwrap_or(ell_max + 1),
        ra_censored: ra_at.is_none(),
        layers_to_phi: phi_at.unwrap_or(ell_max + 1),
        phi_censored: phi_at.is_none(),
        final_r_a,
        final_phi,
    })
}

pub fn layers_to_threshold(corpus: &[Instance], dt: f64, ell_max: usize) -> Result<ThresholdReport> {
    if !(dt > 0.0) || ell_max == 0 {
        return Err(Error::InvalidConfig("need dt > 0 and ell_max >= 1".into()));
    }
    let outcomes: Vec<Result<InstanceThreshold>> = corpus
        .par_iter()
        .map(|inst| instance_threshold(inst, dt, ell_max))
        .collect();
    let mut instances = Vec::new();
    let mut rejected = Vec::new();
    for (inst, outcome) in corpus.iter().zip(outcomes) {
        match outcome {
            Ok(t) => instances.push(t),
            Err(e @ Error::UndefinedRatio(_)) => rejected.push(Rejection {
                name: inst.name().to_string(),
                reason: e.to_string(),
            }),
            Err(e) => return Err(e),
        }
    }
    let ra: Vec<f64> = instances.iter().map(|t| t.layers_to_ra as f64).collect();
    let phi: Vec<f64> = instances.iter().map(|t| t.layers_to_phi as f64).collect();
    let (mean_layers_ra, std_layers_ra) = mean_std(&ra);
    let (mean_layers_phi, std_layers_phi) = mean_std(&phi);
    let censored_ra = instances.iter().filter(|t| t.ra_censored).count();
    let censored_phi = instances.iter().filter(|t| t.phi_censored).count();
    Ok(ThresholdReport {
        n: common_n(corpus),
        dt,
        ell_max,
        ra_target: RA_TARGET,
        phi_target: PHI_TARGET,
        warnings: rejected.len() + censored_ra + censored_phi,
        instances,
        mean_layers_ra,
        std_layers_ra,
        mean_layers_phi,
        std_layers_phi,
        censored_ra,
        censored_phi,
        rejected,
    })
}

/// Angles of a layered circuit `U_d(beta_l) U_p(gamma_l) ... U_d(beta_1) U_p(gamma_1)`
/// with `U_p(gamma) = exp(-i gamma H_p)` and `U_d(beta) = exp(-i beta H_d)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaParameters {
    gammas: Vec<f64>,
    betas: Vec<f64>,
}

impl QaoaParameters {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        if gammas.len() != betas.len() {
            return Err(Error::LengthMismatch {
                gammas: gammas.len(),
                betas: betas.len(),
            });
        }
        Ok(Self { gammas, betas })
    }

    /// The circuit a feedback run executed: `gamma_k = dt`, mixer angle
    /// `(beta_k + lambda_k) dt`.
    pub fn from_run(run: &FeedbackRun) -> Self {
        let dt = run.config.dt;
        let layers = &run.layers[1..];
        Self {
            gammas: vec![dt; layers.len()],
            betas: layers.iter().map(|l| (l.beta + l.lambda) * dt).collect(),
        }
    }

    pub fn depth(&self) -> usize {
        self.gammas.len()
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }
}

/// `<H_p>` after the layered circuit acts on `psi0`. Evaluation only.
pub fn evaluate_qaoa(
    hp: &ProblemHamiltonian,
    params: &QaoaParameters,
    psi0: &StateVector,
) -> Result<f64> {
    let mut psi = psi0.clone();
    for (&g, &b) in params.gammas.iter().zip(&params.betas) {
        psi.apply_problem_phase(hp, g)?;
        psi.apply_mixer(b);
    }
    psi.expect_hp(hp)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub instance: String,
    pub n: usize,
    pub edges: usize,
    pub degree: Option<usize>,
    pub strings_per_layer: u64,
    pub shots_per_string: u64,
    pub layers_executed: u64,
    pub commutator_samples: u64,
    pub energy_samples: u64,
    pub total_samples: u64,
    /// `commutator_samples == m * 2|E| * layers`.
    pub identity_holds: bool,
    /// Generic `n(n-1)` bound on strings per layer.
    pub string_bound: u64,
    pub scaling: &'static str,
    pub qaoa_gradient: &'static str,
    pub qaoa_gradient_free: &'static str,
}

/// Sampling cost of a run. `shots` overrides the run's shots per string
/// (needed for exact runs, which record none).
pub fn cost_report(run: &FeedbackRun, graph: &Graph, shots: Option<u64>) -> CostReport {
    let ledger = run.cost;
    let strings = 2 * graph.edge_count() as u64;
    let layers = ledger.layers_measured;
    let (m, commutator, energy) = match shots {
        Some(m) => {
            let energy_per_layer = if ledger.shots_per_string > 0 {
                ledger.energy_samples / layers.max(1) / ledger.shots_per_string * m
            } else {
                0
            };
            (m, m * ledger.strings_per_layer * layers, energy_per_layer * layers)
        }
        None => (
            ledger.shots_per_string,
            ledger.commutator_samples,
            ledger.energy_samples,
        ),
    };
    let n = graph.n() as u64;
    CostReport {
        instance: graph.name().to_string(),
        n: graph.n(),
        edges: graph.edge_count(),
        degree: graph.regular_degree(),
        strings_per_layer: ledger.strings_per_layer,
        shots_per_string: m,
        layers_executed: layers,
        commutator_samples: commutator,
        energy_samples: energy,
        total_samples: commutator + energy,
        identity_holds: commutator == m * strings * layers,
        string_bound: n * n.saturating_sub(1),
        scaling: "N_s = m * 2|E| * l = m * d * n * l for d-regular graphs, i.e. O(m d l) per vertex",
        qaoa_gradient: "O(m q(l) l), q(l) optimizer iterations",
        qaoa_gradient_free: "O(m q(l))",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub n: usize,
    pub layer: usize,
    pub runs: usize,
    pub mean_beta: f64,
    pub std_beta: f64,
    pub mean_r_a: f64,
    pub mean_phi: f64,
}

/// Per-layer mean/std across runs; a layer includes every run that reached it.
pub fn aggregate_traces(runs: &[FeedbackRun]) -> Vec<AggregateRow> {
    let Some(n) = runs.first().map(|r| r.final_state.n()) else {
        return Vec::new();
    };
    let depth = runs.iter().map(|r| r.layers.len()).max().unwrap_or(0);
    (0..depth)
        .map(|k| {
            let at: Vec<&LayerRecord> = runs.iter().filter_map(|r| r.layers.get(k)).collect();
            let betas: Vec<f64> = at.iter().map(|l| l.beta).collect();
            let (mean_beta, std_beta) = mean_std(&betas);
            let ra: Vec<f64> = at.iter().map(|l| l.r_a).collect();
            let phi: Vec<f64> = at.iter().map(|l| l.phi).collect();
            AggregateRow {
                n,
                layer: k,
                runs: at.len(),
                mean_beta,
                std_beta,
                mean_r_a: mean_std(&ra).0,
                mean_phi: mean_std(&phi).0,
            }
        })
        .collect()
}

pub fn write_aggregate_csv<W: Write>(rows: &[AggregateRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "n,layer,runs,mean_beta,std_beta,mean_rA,mean_phi")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.n, r.layer, r.runs, r.mean_beta, r.std_beta, r.mean_r_a, r.mean_phi
        )?;
    }
    Ok(())
}
