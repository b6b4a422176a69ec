use super::replication::{separation_distance, ReplicationStats, Replications};
use super::{check_workers, final_indicators, indicator_names, par_map, params_for_row, point_seed};
use crate::error::{Error, Result};
use crate::indicators::Indicator;
use crate::landscape::RastriginLandscape;
use crate::model::ModelParams;
use crate::rng::derive_seed;
use crate::sampling::{lhs_sample, Design, ParamSpace};
use crate::stats::quartiles;
use crate::table::{Cell, Table};

/// Latin hypercube of parameter points, each replicated `n_reps` times.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceConfig {
    pub space: ParamSpace,
    /// Values of the parameters outside `space`.
    pub base: ModelParams,
    pub n_points: usize,
    pub n_reps: usize,
    pub seed: u64,
    pub workers: usize,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        ConvergenceConfig {
            space: ParamSpace::model_default(),
            base: ModelParams::default(),
            n_points: 20,
            n_reps: 200,
            seed: 0,
            workers: 1,
        }
    }
}

/// Quartiles of one statistic of one indicator across points (Sharpe
/// ratios) or across point pairs (separation distances). Missing values
/// are left out; `quartiles` is `None` when none remain.
#[derive(Clone, Debug, PartialEq)]
pub struct QuartileRow {
    pub indicator: Indicator,
    pub statistic: &'static str,
    pub count: usize,
    pub quartiles: Option<[f64; 3]>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceResult {
    pub design: Design,
    pub points: Vec<Replications>,
    pub quartiles: Vec<QuartileRow>,
}

impl ConvergenceResult {
    pub fn sharpe_ratios(&self, indicator: Indicator) -> Vec<Option<f64>> {
        self.points.iter().map(|p| p.stats.get(indicator).sharpe).collect()
    }

    /// Separation distances over all unordered point pairs `(i, j)`, `i < j`.
    pub fn separations(&self, indicator: Indicator) -> Vec<Option<f64>> {
        let stats: Vec<&ReplicationStats> = self.points.iter().map(|p| &p.stats).collect();
        let mut out = Vec::new();
        for i in 0..stats.len() {
            for j in i + 1..stats.len() {
                out.push(separation_distance(stats[i].get(indicator), stats[j].get(indicator)));
            }
        }
        out
    }

    pub fn quartile(&self, indicator: Indicator, statistic: &str) -> Option<&QuartileRow> {
        self.quartiles
            .iter()
            .find(|q| q.indicator == indicator && q.statistic == statistic)
    }

    /// `point, rep, seed`, the design parameters, then the indicators.
    pub fn raw_table(&self) -> Table {
        let header = ["point".to_owned(), "rep".to_owned(), "seed".to_owned()]
            .into_iter()
            .chain(self.design.names.iter().cloned())
            .chain(indicator_names());
        let mut t = Table::new(header);
        for (p, (reps, row)) in self.points.iter().zip(&self.design.rows).enumerate() {
            for (r, (seed, values)) in reps.seeds.iter().zip(&reps.raw).enumerate() {
                let mut cells = vec![Cell::from(p), Cell::from(r), Cell::from(*seed)];
                cells.extend(row.iter().map(|&v| Cell::Num(v)));
                cells.extend(values.iter().map(|&v| Cell::Num(v)));
                t.push(cells);
            }
        }
        t
    }

    /// `point`, the design parameters, `n`, then `<indicator>_mean`,
    /// `<indicator>_std` and `<indicator>_sharpe` for each indicator.
    pub fn points_table(&self) -> Table {
        let mut header: Vec<String> = vec!["point".into()];
        header.extend(self.design.names.iter().cloned());
        header.push("n".into());
        for name in indicator_names() {
            header.extend([format!("{name}_mean"), format!("{name}_std"), format!("{name}_sharpe")]);
        }
        let mut t = Table::new(header);
        for (p, (reps, row)) in self.points.iter().zip(&self.design.rows).enumerate() {
            let mut cells = vec![Cell::from(p)];
            cells.extend(row.iter().map(|&v| Cell::Num(v)));
            cells.push(reps.stats.n().into());
            for s in &reps.stats.indicators {
                cells.extend([Cell::Num(s.mean), s.std.into(), s.sharpe.into()]);
            }
            t.push(cells);
        }
        t
    }

    /// `indicator, statistic, count, q1, median, q3`.
    pub fn quartiles_table(&self) -> Table {
        let mut t = Table::new(["indicator", "statistic", "count", "q1", "median", "q3"]);
        for q in &self.quartiles {
            let [q1, q2, q3] = q.quartiles.map_or([None; 3], |v| v.map(Some));
            t.push(vec![
                q.indicator.name().into(),
                q.statistic.into(),
                q.count.into(),
                q1.into(),
                q2.into(),
                q3.into(),
            ]);
        }
        t
    }
}

fn quartile_row(indicator: Indicator, statistic: &'static str, values: &[Option<f64>]) -> QuartileRow {
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    QuartileRow {
        indicator,
        statistic,
        count: present.len(),
        quartiles: quartiles(&present),
    }
}

/// Samples `n_points` parameter points by Latin hypercube, runs `n_reps`
/// replications of each, and summarizes the Sharpe ratios per point and
/// the separation distances between points.
///
/// Replication `r` of point `p` uses seed `derive_seed(s_p, r)` where
/// `s_p` is derived from the experiment seed and `p`.
pub fn convergence_experiment(config: &ConvergenceConfig) -> Result<ConvergenceResult> {
    check_workers(config.workers)?;
    if config.n_points < 2 {
        return Err(Error::param("n_points", "must be at least 2"));
    }
    if config.n_reps < 2 {
        return Err(Error::param("replications", "must be at least 2"));
    }
    config.base.validate()?;
    let design = lhs_sample(&config.space, config.n_points, config.seed)?;
    let params: Vec<ModelParams> = design
        .rows
        .iter()
        .enumerate()
        .map(|(p, row)| params_for_row(&config.base, &design.names, row, point_seed(config.seed, p)))
        .collect::<Result<_>>()?;
    let landscape = RastriginLandscape::new(config.base.genome_size, config.base.landscape_seed)?;
    let n_reps = config.n_reps;
    let seed_of = |p: usize, r: usize| derive_seed(point_seed(config.seed, p), r as u64);
    let raw = par_map(config.n_points * n_reps, config.workers, |task| {
        let (p, r) = (task / n_reps, task % n_reps);
        final_indicators(&params[p].clone().with_seed(seed_of(p, r)), &landscape)
    })?;
    let points: Vec<Replications> = raw
        .chunks(n_reps)
        .enumerate()
        .map(|(p, rows)| Replications {
            seeds: (0..n_reps).map(|r| seed_of(p, r)).collect(),
            raw: rows.to_vec(),
            stats: ReplicationStats::from_raw(rows).expect("n_reps >= 2"),
        })
        .collect();
    let mut result = ConvergenceResult {
        design,
        points,
        quartiles: Vec::new(),
    };
    for ind in Indicator::ALL {
        let sharpe = quartile_row(ind, "sharpe", &result.sharpe_ratios(ind));
        let separation = quartile_row(ind, "separation", &result.separations(ind));
        result.quartiles.extend([sharpe, separation]);
    }
    Ok(result)
}
