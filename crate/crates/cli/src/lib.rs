//! Command-line driver for the firm-cluster innovation model.
//!
//! Each experiment subcommand resolves a JSON configuration on top of a
//! preset, runs it through the experiment engine and writes CSV tables,
//! SVG figures and a `manifest.json` into the output directory.

pub mod config;
pub mod error;
pub mod output;
pub mod plot;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use cluster_innovation::harness::{
    convergence_experiment, grid_experiment, gsa_experiment, optimize_experiment, ExperimentKind, ExperimentSpec,
    PresetScale,
};
use cluster_innovation::model::run;
use cluster_innovation::table::Table;

pub use error::CliError;
use output::ManifestInfo;
use plot::{NumericTable, PlotKind};

#[derive(Debug, Parser)]
#[command(name = "clusterinno", version, about = "Simulate innovation in firm clusters and run experiments on the model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One simulation run; writes the indicator series.
    Run(ExperimentArgs),
    /// Replicated Latin hypercube points with Sharpe ratios and separations.
    Convergence(ExperimentArgs),
    /// Sobol sensitivity indices of the final indicators.
    Gsa(ExperimentArgs),
    /// Replicated full factorial grid.
    Grid(ExperimentArgs),
    /// Fitness/diversity trade-off by multi-objective optimization.
    Optimize(ExperimentArgs),
    /// Draws an SVG figure from a result table.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// JSON configuration applied on top of the preset.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory, created when missing.
    #[arg(long, default_value = "results")]
    pub out: PathBuf,
    /// Experiment seed, overriding the configuration.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads, overriding the configuration.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Preset size.
    #[arg(long, default_value = "desk", value_parser = ["desk", "paper"])]
    pub scale: String,
    /// Named preset; must belong to the subcommand.
    #[arg(long, value_parser = ["fig1", "table1", "fig2", "convergence"])]
    pub preset: Option<String>,
    /// Required to start a paper-scale experiment.
    #[arg(long)]
    pub confirm: bool,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// CSV table written by `grid` (summary or raw) or `optimize` (archive).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_parser = ["fitness_vs_dE", "diversity_vs_dE", "pareto_front"])]
    pub kind: String,
    /// Output directory; the figure is written as `<kind>.svg`.
    #[arg(long, default_value = "results")]
    pub out: PathBuf,
}

/// Resolves the experiment an invocation describes without running it.
pub fn resolve_spec(kind: ExperimentKind, args: &ExperimentArgs) -> Result<ExperimentSpec, CliError> {
    let scale = PresetScale::parse(&args.scale).ok_or_else(|| CliError::Config(format!("unknown scale `{}`", args.scale)))?;
    if let Some(name) = &args.preset {
        let preset_kind = ExperimentSpec::preset_kind(name)
            .ok_or_else(|| CliError::Config(format!("unknown preset `{name}`")))?;
        if preset_kind != kind {
            return Err(CliError::Config(format!(
                "preset `{name}` configures `{}`, not `{}`",
                preset_kind.name(),
                kind.name()
            )));
        }
    }
    let mut spec = match &args.config {
        Some(path) => config::load(path, kind, scale)?,
        None => ExperimentSpec::preset(kind, scale),
    };
    if let Some(seed) = args.seed {
        spec.set_seed(seed);
        spec.base_mut().seed = seed;
    }
    if let Some(workers) = args.workers {
        spec.set_workers(workers);
    }
    spec.validate().map_err(|e| CliError::Config(e.to_string()))?;
    if scale == PresetScale::Paper {
        let runs = spec.estimated_runs();
        if !args.confirm {
            return Err(CliError::Config(format!(
                "paper scale performs about {runs} model runs; pass --confirm to start"
            )));
        }
        eprintln!("paper scale: about {runs} model runs");
    }
    Ok(spec)
}

/// Runs `spec` and writes every result file into `out_dir`.
pub fn run_experiment(spec: &ExperimentSpec, out_dir: &Path, mut info: ManifestInfo) -> Result<(), CliError> {
    log::info!("{}: about {} model runs", spec.kind().name(), spec.estimated_runs());
    let mut figures: Vec<(PlotKind, Table)> = Vec::new();
    let tables: Vec<(&str, Table)> = match spec {
        ExperimentSpec::Run(p) => vec![("run", run::<f64>(p)?.to_table())],
        ExperimentSpec::Convergence(c) => {
            let r = convergence_experiment(c)?;
            vec![
                ("design", r.design.to_table()),
                ("raw", r.raw_table()),
                ("points", r.points_table()),
                ("quartiles", r.quartiles_table()),
            ]
        }
        ExperimentSpec::Gsa(c) => {
            let r = gsa_experiment(c)?;
            for ind in &r.degenerate {
                log::warn!("{} has no variance across the design; its indices are reported as 0", ind.name());
            }
            vec![("runs", r.runs_table()), ("indices", r.indices.to_table())]
        }
        ExperimentSpec::Grid(c) => {
            let r = grid_experiment(c)?;
            let summary = r.summary_table();
            if summary.column_index("d_E").is_some() {
                figures.push((PlotKind::FitnessVsDe, summary.clone()));
                figures.push((PlotKind::DiversityVsDe, summary.clone()));
            }
            vec![("raw", r.raw_table()), ("summary", summary)]
        }
        ExperimentSpec::Optimize(c) => {
            let r = optimize_experiment(c)?;
            let archive = r.archive_table();
            figures.push((PlotKind::ParetoFront, archive.clone()));
            vec![("archive", archive), ("compromise", r.compromise_table())]
        }
    };
    info.files = output::write_results(&tables, out_dir)?;
    for (kind, table) in figures {
        let name = format!("{}.svg", kind.name());
        plot::plot_static(&NumericTable::from_table(&table), kind, &out_dir.join(&name))?;
        info.files.push(name);
    }
    output::write_manifest(spec, &info, out_dir)?;
    Ok(())
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    let (kind, args) = match &cli.command {
        Command::Run(a) => (ExperimentKind::Run, a),
        Command::Convergence(a) => (ExperimentKind::Convergence, a),
        Command::Gsa(a) => (ExperimentKind::Gsa, a),
        Command::Grid(a) => (ExperimentKind::Grid, a),
        Command::Optimize(a) => (ExperimentKind::Optimize, a),
        Command::Plot(p) => {
            let kind = PlotKind::parse(&p.kind).ok_or_else(|| CliError::Config(format!("unknown plot kind `{}`", p.kind)))?;
            let table = NumericTable::read_csv(&p.input)?;
            let svg = plot::render(&table, kind)?;
            output::ensure_dir(&p.out)?;
            return output::write_file(&p.out.join(format!("{}.svg", kind.name())), &svg);
        }
    };
    let spec = resolve_spec(kind, args)?;
    output::ensure_dir(&args.out)?;
    let info = ManifestInfo {
        preset: args.preset.clone(),
        scale: Some(args.scale.clone()),
        files: Vec::new(),
    };
    run_experiment(&spec, &args.out, info)
}
