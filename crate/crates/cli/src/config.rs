//! Optional TOML file mirroring the command-line flags, one table per
//! command. A flag given on the command line always wins.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::args::VariantName;
use crate::failure::{CliResult, Failure};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub generate: GenerateFile,
    #[serde(default)]
    pub run: RunFile,
    #[serde(default)]
    pub sweep: SweepFile,
    #[serde(default)]
    pub cost: CostFile,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateFile {
    pub n: Option<usize>,
    pub d: Option<usize>,
    pub count: Option<usize>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub weighted: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunFile {
    pub dt: Option<f64>,
    pub layers: Option<usize>,
    pub variant: Option<VariantName>,
    pub iters: Option<usize>,
    pub estimator: Option<String>,
    #[serde(default)]
    pub estimate_energy: bool,
    pub seed: Option<u64>,
    pub beta_c: Option<f64>,
    pub kick_amp: Option<f64>,
    pub ref_amp: Option<f64>,
    pub ref_schedule: Option<PathBuf>,
    pub gain: Option<f64>,
    #[serde(default)]
    pub no_early_stop: bool,
    pub final_shots: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub layers: Option<usize>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub resolution: Option<f64>,
    pub dt: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostFile {
    pub dt: Option<f64>,
    pub layers: Option<usize>,
    pub shots: Option<u64>,
    #[serde(default)]
    pub estimate_energy: bool,
    pub seed: Option<u64>,
}

pub fn load(path: Option<&Path>) -> CliResult<ConfigFile> {
    let Some(path) = path else {
        return Ok(ConfigFile::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::usage(format!("config {}: {e}", path.display())))
}
