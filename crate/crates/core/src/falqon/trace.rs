use std::io::Write;

use serde::Serialize;

use super::{Candidate, CostLedger, FeedbackRun, LayerRecord, RunConfig, StopReason};
use crate::graphs::Graph;

/// Version tag for the trace CSV layout, recorded in run metadata.
pub const TRACE_SCHEMA: &str = "falqon-trace/1";
pub const TRACE_COLUMNS: [&str; 7] = [
    "layer",
    "beta",
    "A",
    "energy",
    "r_A",
    "phi",
    "cumulative_samples",
];

/// One row per executed layer; the initial state lives in [`RunMetadata`].
/// Floats use the shortest representation that parses back to the same value.
pub fn write_trace_csv<W: Write>(run: &FeedbackRun, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{}", TRACE_COLUMNS.join(","))?;
    for l in &run.layers[1..] {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            l.layer, l.beta, l.a, l.energy, l.r_a, l.phi, l.cumulative_samples
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct RunMetadata {
    pub trace_schema: &'static str,
    pub instance: String,
    pub n: usize,
    pub edges: usize,
    pub config: RunConfig,
    pub tau: f64,
    pub layers_executed: usize,
    pub stop: StopReason,
    pub min_energy: f64,
    pub ground_states: usize,
    /// Record for the state before the first layer.
    pub initial: LayerRecord,
    pub final_energy: f64,
    pub final_r_a: f64,
    pub final_phi: f64,
    pub monotone_violations: Vec<usize>,
    pub cost: CostLedger,
    pub total_samples: u64,
    pub candidate: Option<Candidate>,
}

impl RunMetadata {
    pub fn new(run: &FeedbackRun, graph: &Graph) -> Self {
        let last = run.layers.last().expect("trace has the initial record");
        Self {
            trace_schema: TRACE_SCHEMA,
            instance: graph.name().to_string(),
            n: graph.n(),
            edges: graph.edge_count(),
            config: run.config.clone(),
            tau: run.config.tau(),
            layers_executed: run.layers_executed(),
            stop: run.stop,
            min_energy: run.min_energy,
            ground_states: run.degeneracy,
            initial: run.layers[0].clone(),
            final_energy: last.energy,
            final_r_a: last.r_a,
            final_phi: last.phi,
            monotone_violations: run.monotone_violations.clone(),
            cost: run.cost,
            total_samples: run.cost.total_samples(),
            candidate: run.candidate.clone(),
        }
    }
}
