use super::convergence::ConvergenceConfig;
use super::grid::{fig1_axes, GridConfig};
use super::gsa::GsaConfig;
use super::optimize::OptimizeConfig;
use super::{check_workers, params_for_row};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::nsga2::Nsga2Config;
use crate::sampling::{grid_design, GridAxis, ParamSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKind {
    Run,
    Convergence,
    Gsa,
    Grid,
    Optimize,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::Run,
        ExperimentKind::Convergence,
        ExperimentKind::Gsa,
        ExperimentKind::Grid,
        ExperimentKind::Optimize,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Run => "run",
            ExperimentKind::Convergence => "convergence",
            ExperimentKind::Gsa => "gsa",
            ExperimentKind::Grid => "grid",
            ExperimentKind::Optimize => "optimize",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

/// Size of a preset experiment: `Desk` runs on a laptop in minutes,
/// `Paper` reproduces the full published protocol.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PresetScale {
    #[default]
    Desk,
    Paper,
}

impl PresetScale {
    pub fn name(self) -> &'static str {
        match self {
            PresetScale::Desk => "desk",
            PresetScale::Paper => "paper",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "desk" => Some(PresetScale::Desk),
            "paper" => Some(PresetScale::Paper),
            _ => None,
        }
    }
}

/// A fully resolved experiment.
#[derive(Clone, Debug, PartialEq)]
pub enum ExperimentSpec {
    Run(ModelParams),
    Convergence(ConvergenceConfig),
    Gsa(GsaConfig),
    Grid(GridConfig),
    Optimize(OptimizeConfig),
}

impl ExperimentSpec {
    /// Preset names and the experiment kind each one configures.
    pub const PRESETS: [(&'static str, ExperimentKind); 4] = [
        ("convergence", ExperimentKind::Convergence),
        ("table1", ExperimentKind::Gsa),
        ("fig1", ExperimentKind::Grid),
        ("fig2", ExperimentKind::Optimize),
    ];

    pub fn preset_kind(name: &str) -> Option<ExperimentKind> {
        Self::PRESETS.iter().find(|(n, _)| *n == name).map(|(_, k)| *k)
    }

    /// Default experiment of `kind` at `scale`.
    ///
    /// | kind        | desk                                      | paper                     |
    /// |-------------|-------------------------------------------|---------------------------|
    /// | convergence | 20 points x 200 reps                      | 100 points x 1000 reps    |
    /// | gsa         | base size 1024                            | base size 10000           |
    /// | grid        | `p_E` in {1e-7, 1e-4}, 11 `d_E`, 30 reps  | 528 points x 100 reps     |
    /// | optimize    | population 32, 2000 iterations            | population 200, 10000     |
    pub fn preset(kind: ExperimentKind, scale: PresetScale) -> Self {
        let paper = scale == PresetScale::Paper;
        match kind {
            ExperimentKind::Run => ExperimentSpec::Run(ModelParams::default()),
            ExperimentKind::Convergence => ExperimentSpec::Convergence(ConvergenceConfig {
                n_points: if paper { 100 } else { 20 },
                n_reps: if paper { 1000 } else { 200 },
                ..ConvergenceConfig::default()
            }),
            ExperimentKind::Gsa => ExperimentSpec::Gsa(GsaConfig {
                n_base: if paper { 10_000 } else { 1024 },
                ..GsaConfig::default()
            }),
            ExperimentKind::Grid => {
                let axes = if paper {
                    fig1_axes()
                } else {
                    let d_e: Vec<f64> = (0..11).map(|i| 1.0 + 10.0 * i as f64).collect();
                    vec![GridAxis::log10("p_E", &[-7.0, -4.0]), GridAxis::linear("d_E", &d_e)]
                };
                ExperimentSpec::Grid(GridConfig {
                    axes,
                    base: ModelParams {
                        mutation_prob: 0.01,
                        mutation_amplitude: 1.0,
                        product_share: 0.5,
                        crossover_prob: 0.5,
                        crossover_share: 0.5,
                        size_hierarchy: 0.1,
                        ..ModelParams::default()
                    },
                    n_reps: if paper { 100 } else { 30 },
                    seed: 0,
                    workers: 1,
                })
            }
            ExperimentKind::Optimize => ExperimentSpec::Optimize(OptimizeConfig {
                nsga: Nsga2Config {
                    population: if paper { 200 } else { 32 },
                    generations: if paper { 10_000 } else { 2000 },
                    ..Nsga2Config::default()
                },
                ..OptimizeConfig::default()
            }),
        }
    }

    /// Checks every setting without running anything, naming the offending
    /// key on failure. Design dimensions must be model parameters (or
    /// `seed`) whose whole range is admissible.
    pub fn validate(&self) -> Result<()> {
        check_workers(self.workers())?;
        self.base().validate()?;
        match self {
            ExperimentSpec::Run(_) => Ok(()),
            ExperimentSpec::Convergence(c) => {
                if c.n_points < 2 {
                    return Err(Error::param("n_points", "must be at least 2"));
                }
                if c.n_reps < 2 {
                    return Err(Error::param("replications", "must be at least 2"));
                }
                check_space(&c.space, &c.base)
            }
            ExperimentSpec::Gsa(c) => {
                if c.n_base < 64 {
                    return Err(Error::param("n_base", "must be at least 64"));
                }
                if c.n_boot == 0 {
                    return Err(Error::param("n_boot", "must be at least 1"));
                }
                if !(c.confidence > 0.0 && c.confidence < 1.0) {
                    return Err(Error::param("confidence", format!("{} is outside (0, 1)", c.confidence)));
                }
                check_space(&c.space, &c.base)
            }
            ExperimentSpec::Grid(c) => {
                if c.n_reps == 0 {
                    return Err(Error::param("replications", "must be at least 1"));
                }
                let design = grid_design(&c.axes)?;
                for row in &design.rows {
                    params_for_row(&c.base, &design.names, row, 0)?;
                }
                Ok(())
            }
            ExperimentSpec::Optimize(c) => {
                c.nsga.validate()?;
                for (name, v) in [("fitness_threshold", c.thresholds.fitness), ("diversity_threshold", c.thresholds.diversity)] {
                    if !v.is_finite() {
                        return Err(Error::param(name, "must be finite"));
                    }
                }
                check_space(&c.space, &c.base)
            }
        }
    }

    pub fn kind(&self) -> ExperimentKind {
        match self {
            ExperimentSpec::Run(_) => ExperimentKind::Run,
            ExperimentSpec::Convergence(_) => ExperimentKind::Convergence,
            ExperimentSpec::Gsa(_) => ExperimentKind::Gsa,
            ExperimentSpec::Grid(_) => ExperimentKind::Grid,
            ExperimentSpec::Optimize(_) => ExperimentKind::Optimize,
        }
    }

    /// Number of model runs the experiment performs (for the optimizer,
    /// initial population plus iterations).
    pub fn estimated_runs(&self) -> u64 {
        match self {
            ExperimentSpec::Run(_) => 1,
            ExperimentSpec::Convergence(c) => (c.n_points * c.n_reps) as u64,
            ExperimentSpec::Gsa(c) => (c.n_base * (c.space.len() + 2)) as u64,
            ExperimentSpec::Grid(c) => {
                c.axes.iter().map(|a| a.values.len() as u64).product::<u64>() * c.n_reps as u64
            }
            ExperimentSpec::Optimize(c) => (c.nsga.population + c.nsga.generations) as u64,
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            ExperimentSpec::Run(p) => p.seed,
            ExperimentSpec::Convergence(c) => c.seed,
            ExperimentSpec::Gsa(c) => c.seed,
            ExperimentSpec::Grid(c) => c.seed,
            ExperimentSpec::Optimize(c) => c.nsga.seed,
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        match self {
            ExperimentSpec::Run(p) => p.seed = seed,
            ExperimentSpec::Convergence(c) => c.seed = seed,
            ExperimentSpec::Gsa(c) => c.seed = seed,
            ExperimentSpec::Grid(c) => c.seed = seed,
            ExperimentSpec::Optimize(c) => c.nsga.seed = seed,
        }
    }

    /// Worker count; a single run always uses one.
    pub fn workers(&self) -> usize {
        match self {
            ExperimentSpec::Run(_) => 1,
            ExperimentSpec::Convergence(c) => c.workers,
            ExperimentSpec::Gsa(c) => c.workers,
            ExperimentSpec::Grid(c) => c.workers,
            ExperimentSpec::Optimize(c) => c.nsga.workers,
        }
    }

    pub fn set_workers(&mut self, workers: usize) {
        match self {
            ExperimentSpec::Run(_) => {}
            ExperimentSpec::Convergence(c) => c.workers = workers,
            ExperimentSpec::Gsa(c) => c.workers = workers,
            ExperimentSpec::Grid(c) => c.workers = workers,
            ExperimentSpec::Optimize(c) => c.nsga.workers = workers,
        }
    }

    /// Model parameters shared by every run (design parameters aside).
    pub fn base(&self) -> &ModelParams {
        match self {
            ExperimentSpec::Run(p) => p,
            ExperimentSpec::Convergence(c) => &c.base,
            ExperimentSpec::Gsa(c) => &c.base,
            ExperimentSpec::Grid(c) => &c.base,
            ExperimentSpec::Optimize(c) => &c.base,
        }
    }

    pub fn base_mut(&mut self) -> &mut ModelParams {
        match self {
            ExperimentSpec::Run(p) => p,
            ExperimentSpec::Convergence(c) => &mut c.base,
            ExperimentSpec::Gsa(c) => &mut c.base,
            ExperimentSpec::Grid(c) => &mut c.base,
            ExperimentSpec::Optimize(c) => &mut c.base,
        }
    }
}

fn check_space(space: &ParamSpace, base: &ModelParams) -> Result<()> {
    let names = space.names();
    for corner in [0.0, 1.0] {
        let row = space.from_unit(&vec![corner; space.len()]);
        params_for_row(base, &names, &row, 0)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::Dimension;

    #[test]
    fn run_counts() {
        let count = |k, s| ExperimentSpec::preset(k, s).estimated_runs();
        assert_eq!(count(ExperimentKind::Grid, PresetScale::Paper), 52_800);
        assert_eq!(count(ExperimentKind::Grid, PresetScale::Desk), 660);
        assert_eq!(count(ExperimentKind::Convergence, PresetScale::Desk), 4000);
        assert_eq!(count(ExperimentKind::Convergence, PresetScale::Paper), 100_000);
        assert_eq!(count(ExperimentKind::Gsa, PresetScale::Desk), 1024 * 11);
        assert_eq!(count(ExperimentKind::Optimize, PresetScale::Desk), 2032);
    }

    #[test]
    fn names_round_trip() {
        for k in ExperimentKind::ALL {
            assert_eq!(ExperimentKind::parse(k.name()), Some(k));
            assert_eq!(ExperimentSpec::preset(k, PresetScale::Desk).kind(), k);
        }
        assert_eq!(ExperimentSpec::preset_kind("fig1"), Some(ExperimentKind::Grid));
        assert_eq!(PresetScale::parse("paper"), Some(PresetScale::Paper));
    }

    #[test]
    fn seed_and_workers_are_settable() {
        for k in ExperimentKind::ALL {
            let mut spec = ExperimentSpec::preset(k, PresetScale::Desk);
            spec.set_seed(99);
            assert_eq!(spec.seed(), 99);
            spec.set_workers(3);
            assert_eq!(spec.workers(), if k == ExperimentKind::Run { 1 } else { 3 });
        }
    }

    #[test]
    fn presets_validate() {
        for k in ExperimentKind::ALL {
            for s in [PresetScale::Desk, PresetScale::Paper] {
                ExperimentSpec::preset(k, s).validate().unwrap();
            }
        }
    }

    #[test]
    fn validation_names_the_key() {
        let name_of = |spec: ExperimentSpec| match spec.validate() {
            Err(Error::InvalidParameter { name, .. }) => name,
            other => panic!("{other:?}"),
        };
        let mut spec = ExperimentSpec::preset(ExperimentKind::Gsa, PresetScale::Desk);
        if let ExperimentSpec::Gsa(c) = &mut spec {
            c.n_base = 10;
        }
        assert_eq!(name_of(spec), "n_base");
        let mut spec = ExperimentSpec::preset(ExperimentKind::Convergence, PresetScale::Desk);
        if let ExperimentSpec::Convergence(c) = &mut spec {
            c.space = ParamSpace::new(vec![Dimension::linear("p_C", 0.0, 2.0)]).unwrap();
        }
        assert_eq!(name_of(spec), "p_C");
        let mut spec = ExperimentSpec::preset(ExperimentKind::Grid, PresetScale::Desk);
        if let ExperimentSpec::Grid(c) = &mut spec {
            c.axes.push(GridAxis::linear("bogus", &[1.0]));
        }
        assert_eq!(name_of(spec), "bogus");
        let mut spec = ExperimentSpec::preset(ExperimentKind::Optimize, PresetScale::Desk);
        spec.set_workers(0);
        assert_eq!(name_of(spec), "workers");
    }
}
