use super::{check_workers, params_for_row};
use crate::error::Result;
use crate::indicators::Indicator;
use crate::landscape::RastriginLandscape;
use crate::model::{run_with_landscape, ModelParams};
use crate::nsga2::{
    compromise_filter, optimize, CompromiseSummary, CompromiseThresholds, Nsga2Config, ParetoArchive, Problem,
};
use crate::sampling::ParamSpace;
use crate::table::{Cell, Table};

/// Fitness/diversity trade-off of the model as a stochastic minimization
/// problem: one evaluation is one run, scored `(-avg_fitness, -diversity)`
/// at the final tick.
pub struct ModelProblem {
    base: ModelParams,
    names: Vec<String>,
    landscape: RastriginLandscape<f64>,
}

impl ModelProblem {
    pub fn new(base: ModelParams, space: &ParamSpace) -> Result<Self> {
        base.validate()?;
        let landscape = RastriginLandscape::new(base.genome_size, base.landscape_seed)?;
        Ok(ModelProblem {
            base,
            names: space.names(),
            landscape,
        })
    }
}

impl Problem for ModelProblem {
    fn n_objectives(&self) -> usize {
        2
    }

    fn evaluate(&self, params: &[f64], seed: u64) -> std::result::Result<Vec<f64>, String> {
        let p = params_for_row(&self.base, &self.names, params, seed)
            .map_err(|e| e.to_string())?
            .with_seed(seed);
        let run = run_with_landscape::<f64, _>(&p, &self.landscape).map_err(|e| e.to_string())?;
        let last = run.final_indicators();
        Ok(vec![-last.get(Indicator::AvgFitness), -last.get(Indicator::Diversity)])
    }

    fn is_stochastic(&self) -> bool {
        true
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizeConfig {
    pub space: ParamSpace,
    pub base: ModelParams,
    /// Optimizer settings; `nsga.seed` and `nsga.workers` are the
    /// experiment seed and worker count.
    pub nsga: Nsga2Config,
    pub thresholds: CompromiseThresholds,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        OptimizeConfig {
            space: ParamSpace::model_default(),
            base: ModelParams::default(),
            nsga: Nsga2Config {
                population: 32,
                generations: 2000,
                ..Nsga2Config::default()
            },
            thresholds: CompromiseThresholds::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizeResult {
    pub archive: ParetoArchive,
    pub compromise: CompromiseSummary,
}

impl OptimizeResult {
    /// Final population: parameter columns, `mean_f`, `mean_d`,
    /// `n_samples`, `rank`. The objective columns hold the maximized
    /// quantities (negated back from the minimized objectives).
    pub fn archive_table(&self) -> Table {
        let mut header = self.archive.names.clone();
        header.extend(["mean_f", "mean_d", "n_samples", "rank"].map(String::from));
        let mut t = Table::new(header);
        for e in &self.archive.entries {
            let mut row: Vec<Cell> = e.params.iter().map(|&v| Cell::Num(v)).collect();
            row.extend([Cell::Num(-e.objectives[0]), Cell::Num(-e.objectives[1])]);
            row.extend([Cell::from(e.n_samples), Cell::from(e.rank)]);
            t.push(row);
        }
        t
    }

    pub fn compromise_table(&self) -> Table {
        self.compromise.to_table()
    }
}

/// Optimizes the model's average fitness and diversity over `space`, then
/// filters compromise points from the final population.
pub fn optimize_experiment(config: &OptimizeConfig) -> Result<OptimizeResult> {
    let problem = ModelProblem::new(config.base.clone(), &config.space)?;
    optimize_experiment_with(&problem, config)
}

/// [`optimize_experiment`] with another two-objective problem in place of
/// the model.
pub fn optimize_experiment_with<P: Problem + ?Sized>(problem: &P, config: &OptimizeConfig) -> Result<OptimizeResult> {
    check_workers(config.nsga.workers)?;
    let archive = optimize(problem, &config.space, &config.nsga)?;
    let compromise = compromise_filter(&archive, &config.thresholds);
    Ok(OptimizeResult { archive, compromise })
}
