use super::{check_workers, final_indicators, indicator_names, par_map, IndicatorRow};
use crate::error::{Error, Result};
use crate::indicators::Indicator;
use crate::landscape::RastriginLandscape;
use crate::model::ModelParams;
use crate::rng::derive_seed;
use crate::stats::{mean, sample_std};
use crate::table::{Cell, Table};

/// Mean, sample deviation and Sharpe ratio of one indicator over
/// replications.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IndicatorStats {
    pub mean: f64,
    /// `None` below two replications.
    pub std: Option<f64>,
    /// `mean / std`; `None` when the deviation is missing or zero.
    pub sharpe: Option<f64>,
    pub n: usize,
}

impl IndicatorStats {
    pub fn from_values(values: &[f64]) -> Option<Self> {
        let m = mean(values)?;
        let std = sample_std(values);
        Some(IndicatorStats {
            mean: m,
            std,
            sharpe: std.filter(|&s| s > 0.0).map(|s| m / s),
            n: values.len(),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReplicationStats {
    pub indicators: [IndicatorStats; 5],
}

impl ReplicationStats {
    /// Statistics over the rows of a raw indicator matrix; `None` when it
    /// is empty.
    pub fn from_raw(raw: &[IndicatorRow]) -> Option<Self> {
        if raw.is_empty() {
            return None;
        }
        let column = |i: usize| -> Vec<f64> { raw.iter().map(|r| r[i]).collect() };
        Some(ReplicationStats {
            indicators: std::array::from_fn(|i| IndicatorStats::from_values(&column(i)).expect("non-empty")),
        })
    }

    pub fn get(&self, indicator: Indicator) -> &IndicatorStats {
        &self.indicators[indicator.index()]
    }

    pub fn n(&self) -> usize {
        self.indicators[0].n
    }
}

/// Raw final-tick indicators of a set of replications and their statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct Replications {
    pub seeds: Vec<u64>,
    pub raw: Vec<IndicatorRow>,
    pub stats: ReplicationStats,
}

impl Replications {
    /// One row per replication: `rep, seed` and the five indicators.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["rep".to_owned(), "seed".to_owned()].into_iter().chain(indicator_names()));
        for (r, (seed, row)) in self.seeds.iter().zip(&self.raw).enumerate() {
            let mut cells = vec![Cell::from(r), Cell::from(*seed)];
            cells.extend(row.iter().map(|&v| Cell::Num(v)));
            t.push(cells);
        }
        t
    }

    /// One row per indicator: `indicator, n, mean, std, sharpe`.
    pub fn summary_table(&self) -> Table {
        let mut t = Table::new(["indicator", "n", "mean", "std", "sharpe"]);
        for ind in Indicator::ALL {
            let s = self.stats.get(ind);
            t.push(vec![ind.name().into(), s.n.into(), Cell::Num(s.mean), s.std.into(), s.sharpe.into()]);
        }
        t
    }
}

/// Runs `params` `n` times; replication `r` uses seed
/// `derive_seed(base_seed, r)`.
pub fn run_replications(params: &ModelParams, n: usize, base_seed: u64, workers: usize) -> Result<Replications> {
    if n == 0 {
        return Err(Error::param("replications", "must be at least 1"));
    }
    let seeds: Vec<u64> = (0..n as u64).map(|r| derive_seed(base_seed, r)).collect();
    run_replications_with_seeds(params, &seeds, workers)
}

/// Runs `params` once per listed seed, in order.
pub fn run_replications_with_seeds(params: &ModelParams, seeds: &[u64], workers: usize) -> Result<Replications> {
    check_workers(workers)?;
    if seeds.is_empty() {
        return Err(Error::param("replications", "must be at least 1"));
    }
    params.validate()?;
    let landscape = RastriginLandscape::new(params.genome_size, params.landscape_seed)?;
    let raw = par_map(seeds.len(), workers, |r| {
        final_indicators(&params.clone().with_seed(seeds[r]), &landscape)
    })?;
    Ok(Replications {
        seeds: seeds.to_vec(),
        stats: ReplicationStats::from_raw(&raw).expect("at least one replication"),
        raw,
    })
}

/// `2 |mu_i - mu_j| / (sigma_i + sigma_j)`; `None` when a deviation is
/// missing or both are zero.
pub fn separation_distance(a: &IndicatorStats, b: &IndicatorStats) -> Option<f64> {
    let denom = a.std? + b.std?;
    if denom > 0.0 {
        Some(2.0 * (a.mean - b.mean).abs() / denom)
    } else {
        None
    }
}
