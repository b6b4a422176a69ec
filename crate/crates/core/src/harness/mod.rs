//! Replicated model runs over experiment designs, and the statistics
//! computed from them.
//!
//! Every run gets its seed from its position in the design (point index,
//! replication index), never from scheduling, so outputs do not depend on
//! the worker count.

mod convergence;
mod grid;
mod gsa;
mod optimize;
mod replication;
mod spec;

pub use convergence::{convergence_experiment, ConvergenceConfig, ConvergenceResult, QuartileRow};
pub use grid::{fig1_axes, grid_experiment, GridConfig, GridResult};
pub use gsa::{gsa_experiment, GsaConfig, GsaResult};
pub use optimize::{
    optimize_experiment, optimize_experiment_with, ModelProblem, OptimizeConfig, OptimizeResult,
};
pub use replication::{
    run_replications, run_replications_with_seeds, separation_distance, IndicatorStats, Replications,
    ReplicationStats,
};
pub use spec::{ExperimentKind, ExperimentSpec, PresetScale};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::indicators::Indicator;
use crate::landscape::{FitnessLandscape, RastriginLandscape};
use crate::model::{run_with_landscape, ModelParams};
use crate::rng::{derive_seed, seed_from_unit};
use crate::sampling::SEED_DIMENSION;

/// Final-tick indicators of one run, in [`Indicator::ALL`] order.
pub type IndicatorRow = [f64; 5];

/// Salt separating run seeds from design and bootstrap seeds drawn from
/// the same experiment seed.
const RUN_STREAM: u64 = 0x52_554E_5300;

pub(crate) fn point_seed(experiment_seed: u64, point: usize) -> u64 {
    derive_seed(experiment_seed ^ RUN_STREAM, point as u64)
}

/// Applies `f` to `0..n`, on `workers` threads when more than one, and
/// returns the results in index order.
pub(crate) fn par_map<R, F>(n: usize, workers: usize, f: F) -> Result<Vec<R>>
where
    R: Send,
    F: Fn(usize) -> Result<R> + Sync + Send,
{
    if workers <= 1 || n <= 1 {
        return (0..n).map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Evaluation(format!("cannot start worker pool: {e}")))?;
    pool.install(|| (0..n).into_par_iter().map(f).collect())
}

/// Runs the model once and returns its final-tick indicators. The shared
/// landscape is used when its genome size matches `params`.
pub(crate) fn final_indicators(params: &ModelParams, shared: &RastriginLandscape<f64>) -> Result<IndicatorRow> {
    let result = if shared.genome_size() == params.genome_size && shared.landscape_seed() == params.landscape_seed {
        run_with_landscape::<f64, _>(params, shared)?
    } else {
        let own = RastriginLandscape::new(params.genome_size, params.landscape_seed)?;
        run_with_landscape::<f64, _>(params, &own)?
    };
    Ok(result.final_indicators().to_array())
}

/// `base` with the design row applied. A `seed` column sets the run seed
/// through [`seed_from_unit`] under `seed_base`.
pub(crate) fn params_for_row(base: &ModelParams, names: &[String], row: &[f64], seed_base: u64) -> Result<ModelParams> {
    let mut p = base.clone();
    for (name, &v) in names.iter().zip(row) {
        if name == SEED_DIMENSION {
            p.seed = seed_from_unit(seed_base, v);
        } else {
            p.set_value(name, v)?;
        }
    }
    p.validate()?;
    Ok(p)
}

pub(crate) fn check_workers(workers: usize) -> Result<()> {
    if workers == 0 {
        Err(Error::param("workers", "must be at least 1"))
    } else {
        Ok(())
    }
}

pub(crate) fn indicator_names() -> impl Iterator<Item = String> {
    Indicator::ALL.iter().map(|i| i.name().to_owned())
}
