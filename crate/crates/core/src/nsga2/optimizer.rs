use log::warn;
use rand::Rng;
use rayon::prelude::*;

use super::dominance::{crowding_distance, non_dominated_sort, pareto_filter};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed, SimRng};
use crate::sampling::ParamSpace;
use crate::stats::{mean, sample_std};
use crate::table::{Cell, Table};

/// Objective function to minimize over a box.
pub trait Problem: Sync {
    fn n_objectives(&self) -> usize;

    /// Objective values at `params` (in the problem's own units). `seed`
    /// drives any randomness of a stochastic problem.
    fn evaluate(&self, params: &[f64], seed: u64) -> std::result::Result<Vec<f64>, String>;

    /// Stochastic problems get repeated evaluations, and their sample count
    /// becomes an extra objective.
    fn is_stochastic(&self) -> bool {
        false
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Nsga2Config {
    pub population: usize,
    /// Steady-state iterations; each one evaluates the problem once.
    pub generations: usize,
    pub seed: u64,
    /// Probability that an iteration re-evaluates an existing individual
    /// instead of breeding (stochastic problems only).
    pub resample_prob: f64,
    /// Per-individual cap on the number of evaluations.
    pub max_samples: usize,
    pub crossover_prob: f64,
    pub crossover_eta: f64,
    pub mutation_eta: f64,
    /// Per-coordinate mutation probability; `None` means `1 / k`.
    pub mutation_rate: Option<f64>,
    /// Evaluations run concurrently in batches of this size. Results are
    /// reproducible for a fixed seed and worker count.
    pub workers: usize,
}

impl Default for Nsga2Config {
    fn default() -> Self {
        Nsga2Config {
            population: 200,
            generations: 10_000,
            seed: 0,
            resample_prob: 0.1,
            max_samples: 100,
            crossover_prob: 0.9,
            crossover_eta: 2.0,
            mutation_eta: 20.0,
            mutation_rate: None,
            workers: 1,
        }
    }
}

impl Nsga2Config {
    pub fn validate(&self) -> Result<()> {
        if self.population < 4 {
            return Err(Error::param("population", "must be at least 4"));
        }
        if self.generations < 1 {
            return Err(Error::param("generations", "must be at least 1"));
        }
        for (name, p) in [("resample_prob", self.resample_prob), ("crossover_prob", self.crossover_prob)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::param(name, format!("{p} is outside [0, 1]")));
            }
        }
        if let Some(rate) = self.mutation_rate {
            if !(0.0..=1.0).contains(&rate) {
                return Err(Error::param("mutation_rate", format!("{rate} is outside [0, 1]")));
            }
        }
        if self.max_samples < 1 {
            return Err(Error::param("max_samples", "must be at least 1"));
        }
        if self.workers < 1 {
            return Err(Error::param("workers", "must be at least 1"));
        }
        Ok(())
    }
}

/// A population member with its running objective means.
#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    id: u64,
    /// Coordinates in the unit box.
    unit: Vec<f64>,
    pub params: Vec<f64>,
    pub objectives: Vec<f64>,
    pub n_samples: usize,
    pub rank: usize,
    pub crowding: f64,
}

impl Individual {
    fn add_sample(&mut self, values: &[f64]) {
        let n = (self.n_samples + 1) as f64;
        for (m, &v) in self.objectives.iter_mut().zip(values) {
            *m += (v - *m) / n;
        }
        self.n_samples += 1;
    }

    /// Vector ranked by the optimizer: objective means, then `-n_samples`
    /// when sample counts are optimized too.
    fn ranking_vector(&self, with_samples: bool) -> Vec<f64> {
        let mut v = self.objectives.clone();
        if with_samples {
            v.push(-(self.n_samples as f64));
        }
        v
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArchiveEntry {
    pub params: Vec<f64>,
    /// Mean of each minimized objective over `n_samples` evaluations.
    pub objectives: Vec<f64>,
    pub n_samples: usize,
    /// Front index in the final population, 1 for the first front.
    pub rank: usize,
}

/// Final population of an optimization run.
#[derive(Clone, Debug, PartialEq)]
pub struct ParetoArchive {
    pub names: Vec<String>,
    pub entries: Vec<ArchiveEntry>,
    pub evaluations: usize,
    pub failed_evaluations: usize,
}

impl ParetoArchive {
    /// Entries whose mean objectives no other entry dominates.
    pub fn non_dominated(&self) -> Vec<&ArchiveEntry> {
        let points: Vec<&[f64]> = self.entries.iter().map(|e| e.objectives.as_slice()).collect();
        pareto_filter(&points).into_iter().map(|i| &self.entries[i]).collect()
    }

    /// Parameter columns, one `objective_<i>` column per minimized mean,
    /// then `n_samples` and `rank`.
    pub fn to_table(&self) -> Table {
        let n_obj = self.entries.first().map_or(0, |e| e.objectives.len());
        let mut header = self.names.clone();
        header.extend((0..n_obj).map(|i| format!("objective_{i}")));
        header.extend(["n_samples".to_owned(), "rank".to_owned()]);
        let mut t = Table::new(header);
        for e in &self.entries {
            let mut row: Vec<Cell> = e.params.iter().map(|&v| Cell::Num(v)).collect();
            row.extend(e.objectives.iter().map(|&v| Cell::Num(v)));
            row.push(e.n_samples.into());
            row.push(e.rank.into());
            t.push(row);
        }
        t
    }
}

enum Task {
    Offspring(Vec<f64>),
    Resample(u64),
}

struct Engine<'a, P: Problem + ?Sized> {
    problem: &'a P,
    space: &'a ParamSpace,
    config: &'a Nsga2Config,
    rng: SimRng,
    population: Vec<Individual>,
    next_id: u64,
    evaluations: usize,
    failures: usize,
    stochastic: bool,
}

impl<P: Problem + ?Sized> Engine<'_, P> {
    fn eval_seed(&self, counter: usize) -> u64 {
        derive_seed(self.config.seed ^ 0xE7A1_0000_0000_0000, counter as u64)
    }

    fn evaluate_batch(&mut self, points: &[Vec<f64>]) -> Vec<std::result::Result<Vec<f64>, String>> {
        let seeds: Vec<u64> = (0..points.len()).map(|i| self.eval_seed(self.evaluations + i)).collect();
        self.evaluations += points.len();
        let n_obj = self.problem.n_objectives();
        let run = |(params, seed): (&Vec<f64>, &u64)| {
            self.problem.evaluate(params, *seed).and_then(|v| {
                if v.len() != n_obj {
                    Err(format!("expected {n_obj} objectives, got {}", v.len()))
                } else if v.iter().any(|x| !x.is_finite()) {
                    Err(format!("non-finite objective {v:?}"))
                } else {
                    Ok(v)
                }
            })
        };
        let results: Vec<_> = if points.len() > 1 {
            points.par_iter().zip(seeds.par_iter()).map(run).collect()
        } else {
            points.iter().zip(seeds.iter()).map(run).collect()
        };
        for (params, r) in points.iter().zip(&results) {
            if let Err(e) = r {
                self.failures += 1;
                warn!("evaluation at {params:?} failed, discarding: {e}");
            }
        }
        results
    }

    fn insert(&mut self, unit: Vec<f64>, objectives: Vec<f64>) {
        let params = self.space.from_unit(&unit);
        self.population.push(Individual {
            id: self.next_id,
            unit,
            params,
            objectives,
            n_samples: 1,
            rank: 0,
            crowding: 0.0,
        });
        self.next_id += 1;
    }

    /// Recomputes ranks and crowding distances of the whole population.
    fn rank(&mut self) {
        let vectors: Vec<Vec<f64>> = self
            .population
            .iter()
            .map(|i| i.ranking_vector(self.stochastic))
            .collect();
        for (r, front) in non_dominated_sort(&vectors).iter().enumerate() {
            let members: Vec<&Vec<f64>> = front.iter().map(|&i| &vectors[i]).collect();
            let crowding = crowding_distance(&members);
            for (&i, c) in front.iter().zip(crowding) {
                self.population[i].rank = r;
                self.population[i].crowding = c;
            }
        }
    }

    /// Drops the most crowded member of the worst front until the
    /// population is back to size.
    fn truncate(&mut self) {
        while self.population.len() > self.config.population {
            self.rank();
            let worst = (0..self.population.len())
                .max_by(|&a, &b| {
                    let (x, y) = (&self.population[a], &self.population[b]);
                    x.rank
                        .cmp(&y.rank)
                        .then(y.crowding.total_cmp(&x.crowding))
                        .then(a.cmp(&b))
                })
                .expect("population is not empty");
            self.population.remove(worst);
        }
        self.rank();
    }

    fn better(&self, a: usize, b: usize) -> usize {
        let (x, y) = (&self.population[a], &self.population[b]);
        if (x.rank, -x.crowding) <= (y.rank, -y.crowding) {
            a
        } else {
            b
        }
    }

    fn tournament(&mut self, candidates: &[usize]) -> usize {
        let a = candidates[self.rng.random_range(0..candidates.len())];
        let b = candidates[self.rng.random_range(0..candidates.len())];
        self.better(a, b)
    }

    fn breed(&mut self) -> Vec<f64> {
        let all: Vec<usize> = (0..self.population.len()).collect();
        let p1 = self.tournament(&all);
        let p2 = self.tournament(&all);
        let (a, b) = (self.population[p1].unit.clone(), self.population[p2].unit.clone());
        let mut child = if self.rng.random_bool(self.config.crossover_prob) {
            sbx_crossover(&mut self.rng, &a, &b, self.config.crossover_eta)
        } else {
            a
        };
        let rate = self.config.mutation_rate.unwrap_or(1.0 / child.len() as f64);
        polynomial_mutation(&mut self.rng, &mut child, rate, self.config.mutation_eta);
        child
    }

    fn next_task(&mut self) -> Task {
        if self.stochastic && self.rng.random_bool(self.config.resample_prob) {
            let open: Vec<usize> = (0..self.population.len())
                .filter(|&i| self.population[i].n_samples < self.config.max_samples)
                .collect();
            if !open.is_empty() {
                let pick = self.tournament(&open);
                return Task::Resample(self.population[pick].id);
            }
        }
        Task::Offspring(self.breed())
    }

    fn initialize(&mut self) {
        let k = self.space.len();
        let mut attempts = 0;
        while self.population.len() < self.config.population && attempts < 10 * self.config.population {
            let missing = self.config.population - self.population.len();
            let units: Vec<Vec<f64>> = (0..missing)
                .map(|_| (0..k).map(|_| self.rng.random::<f64>()).collect())
                .collect();
            attempts += missing;
            let points: Vec<Vec<f64>> = units.iter().map(|u| self.space.from_unit(u)).collect();
            for (unit, r) in units.into_iter().zip(self.evaluate_batch(&points)) {
                if let Ok(objectives) = r {
                    self.insert(unit, objectives);
                }
            }
        }
        self.rank();
    }

    fn iterate(&mut self, count: usize) {
        let tasks: Vec<Task> = (0..count).map(|_| self.next_task()).collect();
        let points: Vec<Vec<f64>> = tasks
            .iter()
            .filter_map(|t| match t {
                Task::Offspring(unit) => Some(self.space.from_unit(unit)),
                Task::Resample(id) => self
                    .population
                    .iter()
                    .find(|i| i.id == *id)
                    .map(|i| i.params.clone()),
            })
            .collect();
        let results = self.evaluate_batch(&points);
        for (task, result) in tasks.into_iter().zip(results) {
            let Ok(values) = result else { continue };
            match task {
                Task::Offspring(unit) => {
                    self.insert(unit, values);
                    self.truncate();
                }
                Task::Resample(id) => {
                    if let Some(ind) = self.population.iter_mut().find(|i| i.id == id) {
                        ind.add_sample(&values);
                    }
                    self.rank();
                }
            }
        }
    }

    fn archive(&self) -> ParetoArchive {
        ParetoArchive {
            names: self.space.names(),
            entries: self
                .population
                .iter()
                .map(|i| ArchiveEntry {
                    params: i.params.clone(),
                    objectives: i.objectives.clone(),
                    n_samples: i.n_samples,
                    rank: i.rank + 1,
                })
                .collect(),
            evaluations: self.evaluations,
            failed_evaluations: self.failures,
        }
    }
}

/// Steady-state NSGA2.
///
/// Starts from `population` uniform random points. Each iteration either
/// re-evaluates an existing individual (stochastic problems, probability
/// `resample_prob`, individuals below `max_samples`) or breeds one
/// offspring by binary tournament, simulated binary crossover and
/// polynomial mutation, evaluates it once, and drops the most crowded
/// member of the worst front. Failed evaluations are logged and discarded.
pub fn optimize<P: Problem + ?Sized>(problem: &P, space: &ParamSpace, config: &Nsga2Config) -> Result<ParetoArchive> {
    optimize_with_observer(problem, space, config, |_, _| {})
}

/// [`optimize`], calling `observer(iteration, population)` after
/// initialization (iteration 0) and after every batch.
pub fn optimize_with_observer<P: Problem + ?Sized>(
    problem: &P,
    space: &ParamSpace,
    config: &Nsga2Config,
    mut observer: impl FnMut(usize, &[Individual]),
) -> Result<ParetoArchive> {
    config.validate()?;
    let mut engine = Engine {
        problem,
        space,
        config,
        rng: rng_from_seed(config.seed),
        population: Vec::with_capacity(config.population + config.workers),
        next_id: 0,
        evaluations: 0,
        failures: 0,
        stochastic: problem.is_stochastic(),
    };
    engine.initialize();
    if engine.population.is_empty() {
        return Err(Error::Evaluation("every initial evaluation failed".into()));
    }
    observer(0, &engine.population);
    let mut done = 0;
    while done < config.generations {
        let batch = config.workers.min(config.generations - done);
        engine.iterate(batch);
        done += batch;
        observer(done, &engine.population);
    }
    Ok(engine.archive())
}

/// Bounded simulated binary crossover on the unit box; returns one child.
fn sbx_crossover(rng: &mut SimRng, a: &[f64], b: &[f64], eta: f64) -> Vec<f64> {
    let exponent = 1.0 / (eta + 1.0);
    a.iter()
        .zip(b)
        .map(|(&x1, &x2)| {
            if !rng.random_bool(0.5) || (x1 - x2).abs() < 1e-14 {
                return x1;
            }
            let (lo, hi) = (x1.min(x2), x1.max(x2));
            let u: f64 = rng.random();
            let spread = |beta: f64| {
                let alpha = 2.0 - beta.powf(-(eta + 1.0));
                if u <= 1.0 / alpha {
                    (u * alpha).powf(exponent)
                } else {
                    (1.0 / (2.0 - u * alpha)).powf(exponent)
                }
            };
            let beta_lo = 1.0 + 2.0 * lo / (hi - lo);
            let beta_hi = 1.0 + 2.0 * (1.0 - hi) / (hi - lo);
            let c1 = 0.5 * ((lo + hi) - spread(beta_lo) * (hi - lo));
            let c2 = 0.5 * ((lo + hi) + spread(beta_hi) * (hi - lo));
            let child = if rng.random_bool(0.5) { c1 } else { c2 };
            child.clamp(0.0, 1.0)
        })
        .collect()
}

/// Bounded polynomial mutation on the unit box.
fn polynomial_mutation(rng: &mut SimRng, x: &mut [f64], rate: f64, eta: f64) {
    let exponent = 1.0 / (eta + 1.0);
    for y in x.iter_mut() {
        if !rng.random_bool(rate) {
            continue;
        }
        let u: f64 = rng.random();
        let delta = if u < 0.5 {
            let xy = 1.0 - *y;
            let val = 2.0 * u + (1.0 - 2.0 * u) * xy.powf(eta + 1.0);
            val.powf(exponent) - 1.0
        } else {
            let xy = *y;
            let val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * xy.powf(eta + 1.0);
            1.0 - val.powf(exponent)
        };
        *y = (*y + delta).clamp(0.0, 1.0);
    }
}

/// Thresholds selecting compromise points of a fitness/diversity front.
#[derive(Clone, Debug, PartialEq)]
pub struct CompromiseThresholds {
    pub fitness: f64,
    pub diversity: f64,
    pub min_samples: usize,
}

impl Default for CompromiseThresholds {
    fn default() -> Self {
        CompromiseThresholds {
            fitness: 400.0,
            diversity: 0.4,
            min_samples: 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParameterSummary {
    pub name: String,
    pub mean: f64,
    /// Sample standard deviation; `None` with fewer than two points.
    pub std: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompromiseSummary {
    pub points: Vec<ArchiveEntry>,
    /// Empty when no point passes the thresholds.
    pub parameters: Vec<ParameterSummary>,
}

impl CompromiseSummary {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Columns `parameter, mean, std`; header only when empty.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["parameter", "mean", "std"]);
        for p in &self.parameters {
            t.push(vec![p.name.as_str().into(), Cell::Num(p.mean), p.std.into()]);
        }
        t
    }
}

/// Keeps archive points with at least `min_samples` evaluations, mean
/// fitness above `fitness` and mean diversity above `diversity`.
///
/// The archive objectives are the minimized negatives `(-fitness,
/// -diversity)`.
pub fn compromise_filter(archive: &ParetoArchive, thresholds: &CompromiseThresholds) -> CompromiseSummary {
    let points: Vec<ArchiveEntry> = archive
        .entries
        .iter()
        .filter(|e| {
            e.n_samples >= thresholds.min_samples
                && -e.objectives[0] > thresholds.fitness
                && -e.objectives[1] > thresholds.diversity
        })
        .cloned()
        .collect();
    let parameters = if points.is_empty() {
        Vec::new()
    } else {
        archive
            .names
            .iter()
            .enumerate()
            .map(|(i, name)| {
                let values: Vec<f64> = points.iter().map(|p| p.params[i]).collect();
                ParameterSummary {
                    name: name.clone(),
                    mean: mean(&values).expect("non-empty"),
                    std: sample_std(&values),
                }
            })
            .collect()
    };
    CompromiseSummary { points, parameters }
}
