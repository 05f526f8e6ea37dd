//! Reading instance files and writing outputs with their manifests.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use falqon_core::falqon::TRACE_SCHEMA;
use falqon_core::graphs::{read_graph, Graph};
use serde::{Deserialize, Serialize};

use crate::failure::{CliResult, Failure};

pub const MANIFEST: &str = "manifest.json";
pub const DEFAULT_OUT: &str = "falqon-out";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Versions {
    pub falqon_core: String,
    pub falqon_cli: String,
    pub trace_schema: String,
}

impl Versions {
    pub fn current() -> Self {
        Self {
            falqon_core: falqon_core::VERSION.to_string(),
            falqon_cli: env!("CARGO_PKG_VERSION").to_string(),
            trace_schema: TRACE_SCHEMA.to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub name: String,
    pub file: String,
}

/// Written next to generated instance files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub kind: String,
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    /// `null` for the complete enumeration.
    pub count: Option<usize>,
    pub weighted: bool,
    pub shortfall: Option<usize>,
    pub instances: Vec<CorpusEntry>,
    pub versions: Versions,
}

/// Loaded instance and where it came from.
pub struct Loaded {
    pub graph: Graph,
    pub path: PathBuf,
}

/// Expands files and directories into instances. A directory with a
/// manifest lists its instances in manifest order; otherwise every `.json`
/// file in it is read in name order.
pub fn load_instances(paths: &[PathBuf]) -> CliResult<Vec<Loaded>> {
    if paths.is_empty() {
        return Err(Failure::usage("no instances given"));
    }
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            files.extend(instance_files(p)?);
        } else if p.exists() {
            files.push(p.clone());
        } else {
            return Err(Failure::usage(format!("no such file or directory: {}", p.display())));
        }
    }
    files
        .into_iter()
        .map(|path| {
            let graph = read_graph(&path)
                .with_context(|| format!("reading instance {}", path.display()))?;
            Ok(Loaded { graph, path })
        })
        .collect()
}

fn instance_files(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let manifest = dir.join(MANIFEST);
    if manifest.exists() {
        let text = fs::read_to_string(&manifest)
            .with_context(|| format!("reading {}", manifest.display()))?;
        let m: CorpusManifest = serde_json::from_str(&text)
            .with_context(|| format!("parsing {}", manifest.display()))?;
        return Ok(m.instances.iter().map(|e| dir.join(&e.file)).collect());
    }
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Failure::usage(format!("no instance files in {}", dir.display())));
    }
    Ok(files)
}

pub fn ensure_dir(dir: &Path) -> CliResult {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult {
    let mut text = serde_json::to_string_pretty(value).context("serializing output")?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn write_file(path: &Path, bytes: &[u8]) -> CliResult {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
