use std::collections::HashSet;
use std::path::{Path, PathBuf};

use anyhow::Context;
use falqon_core::experiments::{
    aggregate_traces, cost_report, exact_config, find_critical_dt, layers_to_threshold,
    write_aggregate_csv,
};
use falqon_core::falqon::{
    derive_seed, run_iterative_qlc, write_trace_csv, Estimator, KickConfig, QlcSummary,
    ReferenceSchedule, RunMetadata, StopRule, Variant,
};
use falqon_core::graphs::{generate_regular, write_graph, Count, RegularSpec};
use falqon_core::{FeedbackRun, Instance, RunConfig};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{CostArgs, DtcArgs, GenerateArgs, OutArg, RunArgs, ThresholdArgs, VariantName};
use crate::config::ConfigFile;
use crate::corpus::{
    ensure_dir, load_instances, write_file, write_json, CorpusEntry, CorpusManifest, Loaded,
    Versions, DEFAULT_OUT, MANIFEST,
};
use crate::failure::{CliResult, Failure};

/// Horizon used by the corpus studies when none is configured.
pub const DEFAULT_SWEEP_LAYERS: usize = 300;
const DEFAULT_DT_LO: f64 = 0.005;
const DEFAULT_DT_HI: f64 = 0.3;
const DEFAULT_RESOLUTION: f64 = 5e-4;
const DEFAULT_SHOTS: u64 = 1024;
const DEFAULT_QLC_ITERATIONS: usize = 3;

fn out_dir(arg: &OutArg, file: &ConfigFile) -> PathBuf {
    arg.out
        .clone()
        .or_else(|| file.out.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn required<T>(value: Option<T>, flag: &str) -> CliResult<T> {
    value.ok_or_else(|| Failure::usage(format!("{flag} is required (flag or config file)")))
}

fn instances_of(loaded: Vec<Loaded>) -> CliResult<Vec<Instance>> {
    let mut seen = HashSet::new();
    loaded
        .into_iter()
        .map(|l| {
            if !seen.insert(l.graph.name().to_string()) {
                return Err(Failure::usage(format!(
                    "duplicate instance name '{}' ({})",
                    l.graph.name(),
                    l.path.display()
                )));
            }
            Ok(Instance::new(l.graph)?)
        })
        .collect()
}

pub fn generate(args: GenerateArgs, file: &ConfigFile) -> CliResult {
    let defaults = &file.generate;
    let n = required(args.n.or(defaults.n), "--n")?;
    let d = required(args.d.or(defaults.d), "--d")?;
    let count = if args.all { None } else { args.count.or(defaults.count) };
    let seed = args.seed.or(defaults.seed).unwrap_or(0);
    let weighted = args.weighted || defaults.weighted;
    let out = out_dir(&args.out, file);

    let occupied = out
        .read_dir()
        .map(|mut entries| entries.next().is_some())
        .unwrap_or(false);
    if occupied && !args.force {
        return Err(Failure::usage(format!(
            "{} is not empty; pass --force to write into it",
            out.display()
        )));
    }

    let corpus = generate_regular(&RegularSpec {
        n,
        d,
        seed,
        count: count.map_or(Count::All, Count::Exactly),
        weighted,
    })?;
    ensure_dir(&out)?;
    let mut entries = Vec::with_capacity(corpus.graphs.len());
    for g in &corpus.graphs {
        let file = format!("{}.json", g.name());
        write_graph(g, out.join(&file)).with_context(|| format!("writing {file}"))?;
        entries.push(CorpusEntry {
            name: g.name().to_string(),
            file,
        });
    }
    let manifest = CorpusManifest {
        kind: "regular-corpus".into(),
        n,
        d,
        seed,
        count,
        weighted,
        shortfall: corpus.shortfall,
        instances: entries,
        versions: Versions::current(),
    };
    write_json(&out.join(MANIFEST), &manifest)?;
    if let Some(short) = corpus.shortfall {
        eprintln!(
            "warning: only {} distinct graphs found ({short} short of the request)",
            corpus.graphs.len()
        );
    }
    println!("wrote {} instances to {}", corpus.graphs.len(), out.display());
    Ok(())
}

fn parse_estimator(text: &str, estimate_energy: bool) -> CliResult<Estimator> {
    if text == "exact" {
        return Ok(Estimator::Exact);
    }
    let shots = text
        .strip_prefix("shots:")
        .and_then(|m| m.parse::<u64>().ok())
        .ok_or_else(|| Failure::usage(format!("estimator must be 'exact' or 'shots:M', got '{text}'")))?;
    if shots == 0 {
        return Err(falqon_core::Error::ZeroShots.into());
    }
    Ok(Estimator::Shots {
        shots,
        estimate_energy,
    })
}

fn variant_id(v: VariantName) -> u64 {
    match v {
        VariantName::Standard => 0,
        VariantName::Kicks => 1,
        VariantName::Reference => 2,
        VariantName::Iterative => 3,
    }
}

#[derive(Debug, Serialize)]
struct RunEntry {
    name: String,
    source: String,
    seed: u64,
    outputs: Vec<String>,
}

/// Everything needed to reproduce the files in a run directory.
#[derive(Debug, Serialize)]
struct RunManifest {
    command: &'static str,
    config_path: Option<String>,
    master_seed: u64,
    variant: Variant,
    /// Shared configuration; each instance runs with its own derived seed.
    config: RunConfig,
    instances: Vec<RunEntry>,
    output_dir: String,
    versions: Versions,
}

#[derive(Debug, Serialize)]
struct QlcReport<'a> {
    instance: &'a str,
    iterations: usize,
    #[serde(flatten)]
    summary: QlcSummary,
    guaranteed: Vec<usize>,
    regressions: Vec<usize>,
}

enum Outcome {
    Single(FeedbackRun),
    Iterative(falqon_core::falqon::IterativeQlc),
}

pub fn run(args: RunArgs, file: &ConfigFile, config_path: Option<&Path>) -> CliResult {
    let f = &file.run;
    let dt = required(args.dt.or(f.dt), "--dt")?;
    let layers = required(args.layers.or(f.layers), "--layers")?;
    let name = args.variant.or(f.variant).unwrap_or(VariantName::Standard);
    let estimator = parse_estimator(
        args.estimator.as_deref().or(f.estimator.as_deref()).unwrap_or("exact"),
        args.estimate_energy || f.estimate_energy,
    )?;
    let master = args.seed.or(f.seed).unwrap_or(0);
    let variant = match name {
        VariantName::Standard => Variant::Standard,
        VariantName::Kicks => {
            let d = KickConfig::default();
            Variant::Kicks(KickConfig {
                beta_c: args.beta_c.or(f.beta_c).unwrap_or(d.beta_c),
                amp: args.kick_amp.or(f.kick_amp).unwrap_or(d.amp),
            })
        }
        VariantName::Reference => match args.ref_schedule.as_ref().or(f.ref_schedule.as_ref()) {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
                let values: Vec<f64> = serde_json::from_str(&text).map_err(|e| {
                    Failure::usage(format!("{} must hold a JSON array of numbers: {e}", path.display()))
                })?;
                Variant::Reference(ReferenceSchedule::Explicit(values))
            }
            None => Variant::Reference(ReferenceSchedule::Alpha {
                amp: args.ref_amp.or(f.ref_amp).unwrap_or(KickConfig::default().amp),
            }),
        },
        VariantName::Iterative => Variant::IterativeQlc {
            iterations: args.iters.or(f.iters).unwrap_or(DEFAULT_QLC_ITERATIONS),
        },
    };

    let mut base = RunConfig::new(dt, layers);
    base.estimator = estimator;
    base.variant = variant.clone();
    base.seed = master;
    if let Some(gain) = args.gain.or(f.gain) {
        base.law.gain = gain;
    }
    if args.no_early_stop || f.no_early_stop {
        base.stop = None;
    }
    if let Some(shots) = args.final_shots.or(f.final_shots) {
        base.final_shots = shots;
    }
    base.validate()?;

    let loaded = load_instances(&args.instances)?;
    let sources: Vec<String> = loaded.iter().map(|l| l.path.display().to_string()).collect();
    let instances = instances_of(loaded)?;
    let out = out_dir(&args.out, file);

    let outcomes: Vec<CliResult<(u64, Outcome)>> = instances
        .par_iter()
        .enumerate()
        .map(|(idx, inst)| {
            let seed = derive_seed(master, &[idx as u64, variant_id(name)]);
            let cfg = RunConfig {
                seed,
                ..base.clone()
            };
            let outcome = match variant {
                Variant::IterativeQlc { iterations } => {
                    let cfg = RunConfig {
                        variant: Variant::Standard,
                        ..cfg
                    };
                    Outcome::Iterative(run_iterative_qlc(
                        &inst.hp,
                        &inst.comm,
                        &inst.ground,
                        &cfg,
                        iterations,
                    )?)
                }
                _ => Outcome::Single(inst.run(&cfg)?),
            };
            Ok((seed, outcome))
        })
        .collect();

    ensure_dir(&out)?;
    let mut entries = Vec::with_capacity(instances.len());
    for ((inst, source), result) in instances.iter().zip(sources).zip(outcomes) {
        let (seed, outcome) = result?;
        let name = inst.name();
        let mut outputs = Vec::new();
        let mut emit = |stem: String, run: &FeedbackRun| -> CliResult {
            let mut csv = Vec::new();
            write_trace_csv(run, &mut csv).context("formatting trace")?;
            write_file(&out.join(format!("{stem}.csv")), &csv)?;
            write_json(&out.join(format!("{stem}.json")), &RunMetadata::new(run, &inst.graph))?;
            outputs.push(format!("{stem}.csv"));
            outputs.push(format!("{stem}.json"));
            println!("{}", summary_line(&stem, run));
            Ok(())
        };
        match &outcome {
            Outcome::Single(run) => emit(name.to_string(), run)?,
            Outcome::Iterative(qlc) => {
                for (i, it) in qlc.iterations.iter().enumerate() {
                    emit(format!("{name}.iter{i}"), &it.run)?;
                }
                let report = QlcReport {
                    instance: name,
                    iterations: qlc.iterations.len(),
                    summary: qlc.summary(),
                    guaranteed: qlc.guaranteed(),
                    regressions: qlc.regressions(falqon_core::falqon::MONOTONE_TOL),
                };
                if report.guaranteed.len() + 1 < report.iterations {
                    eprintln!(
                        "note: {name}: |beta_l| did not settle below {} in every iteration; \
                         improvement across iterations is not guaranteed",
                        falqon_core::falqon::BETA_TAIL_TOL
                    );
                }
                write_json(&out.join(format!("{name}.qlc.json")), &report)?;
                outputs.push(format!("{name}.qlc.json"));
            }
        }
        entries.push(RunEntry {
            name: name.to_string(),
            source,
            seed,
            outputs,
        });
    }

    let manifest = RunManifest {
        command: "run",
        config_path: config_path.map(|p| p.display().to_string()),
        master_seed: master,
        variant,
        config: base,
        instances: entries,
        output_dir: out.display().to_string(),
        versions: Versions::current(),
    };
    write_json(&out.join(MANIFEST), &manifest)
}

fn summary_line(stem: &str, run: &FeedbackRun) -> String {
    let last = run.layers.last().expect("initial record");
    format!(
        "{stem}: {} layers, energy {:.6} (min {:.6}), r_A {:.4}, phi {:.4}, stop {:?}",
        run.layers_executed(),
        last.energy,
        run.min_energy,
        last.r_a,
        last.phi,
        run.stop
    )
}

fn suffix(instances: &[Instance]) -> String {
    match instances.first().map(|i| i.graph.n()) {
        Some(n) if instances.iter().all(|i| i.graph.n() == n) => format!("_n{n}"),
        _ => String::new(),
    }
}

pub fn sweep_dtc(args: DtcArgs, file: &ConfigFile) -> CliResult {
    let s = &file.sweep;
    let instances = instances_of(load_instances(&args.corpus)?)?;
    let layers = args.layers.or(s.layers).unwrap_or(DEFAULT_SWEEP_LAYERS);
    let lo = args.lo.or(s.lo).unwrap_or(DEFAULT_DT_LO);
    let hi = args.hi.or(s.hi).unwrap_or(DEFAULT_DT_HI);
    let resolution = args.resolution.or(s.resolution).unwrap_or(DEFAULT_RESOLUTION);
    let report = find_critical_dt(&instances, layers, lo, hi, resolution)?;
    let out = out_dir(&args.out, file);
    ensure_dir(&out)?;
    let path = out.join(format!("dtc{}.json", suffix(&instances)));
    write_json(&path, &report)?;
    println!(
        "dt_c = {} over {} instances, {layers} layers{}{} -> {}",
        report.dt_c,
        report.instances,
        if report.unbounded { " (unbounded: passes at hi)" } else { "" },
        match report.fails_above {
            Some(false) => " (note: passes again at dt_c + resolution)",
            _ => "",
        },
        path.display()
    );
    Ok(())
}

pub fn sweep_thresholds(args: ThresholdArgs, file: &ConfigFile) -> CliResult {
    let s = &file.sweep;
    let instances = instances_of(load_instances(&args.corpus)?)?;
    let dt = required(args.dt.or(s.dt), "--dt")?;
    let layers = args.layers.or(s.layers).unwrap_or(DEFAULT_SWEEP_LAYERS);
    let report = layers_to_threshold(&instances, dt, layers)?;
    let out = out_dir(&args.out, file);
    ensure_dir(&out)?;
    let tag = suffix(&instances);
    let path = out.join(format!("thresholds{tag}.json"));
    write_json(&path, &report)?;
    for r in &report.rejected {
        eprintln!("warning: {} rejected: {}", r.name, r.reason);
    }
    if args.aggregate {
        let runs = instances
            .par_iter()
            .filter(|i| i.ground.min_energy != 0.0)
            .map(|i| i.run(&exact_config(dt, layers)))
            .collect::<Result<Vec<_>, _>>()?;
        let mut csv = Vec::new();
        write_aggregate_csv(&aggregate_traces(&runs), &mut csv).context("formatting aggregate")?;
        write_file(&out.join(format!("aggregate{tag}.csv")), &csv)?;
    }
    println!(
        "layers to r_A >= {}: mean {:.2} (std {:.2}, {} censored); to phi >= {}: mean {:.2} (std {:.2}, {} censored); \
         {} warnings -> {}",
        report.ra_target,
        report.mean_layers_ra,
        report.std_layers_ra,
        report.censored_ra,
        report.phi_target,
        report.mean_layers_phi,
        report.std_layers_phi,
        report.censored_phi,
        report.warnings,
        path.display()
    );
    Ok(())
}

pub fn cost(args: CostArgs, file: &ConfigFile) -> CliResult {
    let c = &file.cost;
    let dt = required(args.dt.or(c.dt), "--dt")?;
    let layers = required(args.layers.or(c.layers), "--layers")?;
    let shots = args.shots.or(c.shots).unwrap_or(DEFAULT_SHOTS);
    if shots == 0 {
        return Err(falqon_core::Error::ZeroShots.into());
    }
    let mut loaded = load_instances(std::slice::from_ref(&args.instance))?;
    if loaded.len() != 1 {
        return Err(Failure::usage("cost takes a single instance file"));
    }
    let graph = loaded.remove(0).graph;
    let inst = Instance::new(graph)?;
    let mut cfg = RunConfig::new(dt, layers);
    cfg.stop = Some(StopRule::default());
    cfg.estimator = Estimator::Shots {
        shots,
        estimate_energy: args.estimate_energy || c.estimate_energy,
    };
    cfg.seed = args.seed.or(c.seed).unwrap_or(0);
    let run = inst.run(&cfg)?;
    let report = cost_report(&run, &inst.graph, None);
    let out = out_dir(&args.out, file);
    ensure_dir(&out)?;
    let path = out.join(format!("{}.cost.json", inst.name()));
    write_json(&path, &report)?;
    println!(
        "{}: N_s = {} ({} shots x {} strings x {} layers{}) -> {}",
        inst.name(),
        report.total_samples,
        report.shots_per_string,
        report.strings_per_layer,
        report.layers_executed,
        if report.energy_samples > 0 {
            format!(" + {} energy samples", report.energy_samples)
        } else {
            String::new()
        },
        path.display()
    );
    Ok(())
}
