//! Result files: CSV tables, SVG figures and the run manifest.
//!
//! Nothing written here depends on the clock or the host, so the same
//! invocation always produces the same bytes.

use std::fs;
use std::path::{Path, PathBuf};

use cluster_innovation::harness::ExperimentSpec;
use cluster_innovation::table::Table;
use serde_json::{json, Value};

use crate::config;
use crate::error::CliError;

/// Version of the output layout recorded in every manifest.
pub const SCHEMA_VERSION: u32 = 1;
pub const MANIFEST: &str = "manifest.json";

/// Creates `dir` (and parents) when missing.
pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Writes each `(stem, table)` pair to `<out_dir>/<stem>.csv` and returns
/// the file names in order. An empty table gives a header-only file.
pub fn write_results(tables: &[(&str, Table)], out_dir: &Path) -> Result<Vec<String>, CliError> {
    ensure_dir(out_dir)?;
    let mut names = Vec::with_capacity(tables.len());
    for (stem, table) in tables {
        let name = format!("{stem}.csv");
        write_file(&out_dir.join(&name), &table.to_csv_string())?;
        names.push(name);
    }
    Ok(names)
}

/// What a manifest records beyond the resolved configuration.
#[derive(Clone, Debug, Default)]
pub struct ManifestInfo {
    pub preset: Option<String>,
    pub scale: Option<String>,
    pub files: Vec<String>,
}

pub fn manifest(spec: &ExperimentSpec, info: &ManifestInfo) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "tool": env!("CARGO_PKG_NAME"),
        "tool_version": env!("CARGO_PKG_VERSION"),
        "experiment": spec.kind().name(),
        "preset": info.preset,
        "scale": info.scale,
        "estimated_runs": spec.estimated_runs(),
        "seeds": {
            "experiment": spec.seed(),
            "landscape": spec.base().landscape_seed,
        },
        "files": info.files,
        "config": config::to_json(spec),
    })
}

pub fn write_manifest(spec: &ExperimentSpec, info: &ManifestInfo, out_dir: &Path) -> Result<PathBuf, CliError> {
    let path = out_dir.join(MANIFEST);
    let mut text = serde_json::to_string_pretty(&manifest(spec, info)).expect("manifest serializes");
    text.push('\n');
    write_file(&path, &text)?;
    Ok(path)
}
