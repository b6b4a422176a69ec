use super::replication::{ReplicationStats, Replications};
use super::{check_workers, final_indicators, indicator_names, par_map, params_for_row, point_seed};
use crate::error::{Error, Result};
use crate::landscape::RastriginLandscape;
use crate::model::ModelParams;
use crate::rng::derive_seed;
use crate::sampling::{grid_design, Design, GridAxis};
use crate::table::{Cell, Table};

#[derive(Clone, Debug, PartialEq)]
pub struct GridConfig {
    pub axes: Vec<GridAxis>,
    /// Values of the parameters without an axis.
    pub base: ModelParams,
    pub n_reps: usize,
    pub seed: u64,
    pub workers: usize,
}

/// Axes of the distance-decay study: 2 x 2 x 3 x 4 x 11 = 528 points with
/// `d_E` varying fastest.
pub fn fig1_axes() -> Vec<GridAxis> {
    let d_e: Vec<f64> = (0..11).map(|i| 1.0 + 10.0 * i as f64).collect();
    vec![
        GridAxis::linear("s_C", &[0.25, 0.5]),
        GridAxis::linear("p_C", &[0.25, 0.5]),
        GridAxis::linear("alpha_S", &[0.1, 1.0, 2.0]),
        GridAxis::log10("p_E", &[-7.0, -6.0, -5.0, -4.0]),
        GridAxis::linear("d_E", &d_e),
    ]
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridResult {
    pub design: Design,
    pub points: Vec<Replications>,
}

impl GridResult {
    /// Index of the grid point whose coordinates equal `values` (axis
    /// order) up to a relative `1e-12`.
    pub fn find_point(&self, values: &[f64]) -> Option<usize> {
        self.design.rows.iter().position(|row| {
            row.len() == values.len()
                && row
                    .iter()
                    .zip(values)
                    .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300))
        })
    }

    /// `point, rep, seed`, the axis values, then the indicators.
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

    /// `point`, the axis values, `n`, then `<indicator>_mean` and
    /// `<indicator>_std` for each indicator.
    pub fn summary_table(&self) -> Table {
        let mut header: Vec<String> = vec!["point".into()];
        header.extend(self.design.names.iter().cloned());
        header.push("n".into());
        for name in indicator_names() {
            header.extend([format!("{name}_mean"), format!("{name}_std")]);
        }
        let mut t = Table::new(header);
        for (p, (reps, row)) in self.points.iter().zip(&self.design.rows).enumerate() {
            let mut cells = vec![Cell::from(p)];
            cells.extend(row.iter().map(|&v| Cell::Num(v)));
            cells.push(reps.stats.n().into());
            for s in &reps.stats.indicators {
                cells.extend([Cell::Num(s.mean), s.std.into()]);
            }
            t.push(cells);
        }
        t
    }
}

/// Runs `n_reps` replications at every point of the factorial grid.
///
/// Replication `r` of point `p` uses seed `derive_seed(s_p, r)` where `s_p`
/// is derived from the experiment seed and `p`, so points use independent
/// seed streams.
pub fn grid_experiment(config: &GridConfig) -> Result<GridResult> {
    check_workers(config.workers)?;
    if config.n_reps == 0 {
        return Err(Error::param("replications", "must be at least 1"));
    }
    config.base.validate()?;
    let design = grid_design(&config.axes)?;
    let params: Vec<ModelParams> = design
        .rows
        .iter()
        .enumerate()
        .map(|(p, row)| params_for_row(&config.base, &design.names, row, point_seed(config.seed, p)))
        .collect::<Result<_>>()?;
    let landscape = RastriginLandscape::new(config.base.genome_size, config.base.landscape_seed)?;
    let n_reps = config.n_reps;
    let seed_of = |p: usize, r: usize| derive_seed(point_seed(config.seed, p), r as u64);
    let raw = par_map(design.len() * n_reps, config.workers, |task| {
        let (p, r) = (task / n_reps, task % n_reps);
        final_indicators(&params[p].clone().with_seed(seed_of(p, r)), &landscape)
    })?;
    let points = raw
        .chunks(n_reps)
        .enumerate()
        .map(|(p, rows)| Replications {
            seeds: (0..n_reps).map(|r| seed_of(p, r)).collect(),
            raw: rows.to_vec(),
            stats: ReplicationStats::from_raw(rows).expect("n_reps >= 1"),
        })
        .collect();
    Ok(GridResult { design, points })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig1_has_528_points() {
        assert_eq!(grid_design(&fig1_axes()).unwrap().len(), 528);
    }

    #[test]
    fn one_point_three_reps() {
        let config = GridConfig {
            axes: vec![GridAxis::linear("d_E", &[20.0])],
            base: ModelParams {
                n_firms: 3,
                largest_firm_size: 8,
                t_final: 5,
                ..ModelParams::default()
            },
            n_reps: 3,
            seed: 1,
            workers: 1,
        };
        let r = grid_experiment(&config).unwrap();
        assert_eq!(r.raw_table().rows.len(), 3);
        assert_eq!(r.summary_table().rows.len(), 1);
        assert_eq!(r.find_point(&[20.0]), Some(0));
        assert_eq!(r.find_point(&[21.0]), None);
    }

    #[test]
    fn invalid_axis_value_names_the_key() {
        let config = GridConfig {
            axes: vec![GridAxis::linear("p_C", &[1.5])],
            base: ModelParams::default(),
            n_reps: 1,
            seed: 0,
            workers: 1,
        };
        let err = grid_experiment(&config).unwrap_err();
        assert!(err.to_string().contains("p_C"), "{err}");
    }
}
