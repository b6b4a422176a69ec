use super::{check_workers, final_indicators, indicator_names, par_map, params_for_row, IndicatorRow, RUN_STREAM};
use crate::error::{Error, Result};
use crate::indicators::Indicator;
use crate::landscape::RastriginLandscape;
use crate::model::ModelParams;
use crate::rng::derive_seed;
use crate::sampling::{saltelli_design, BaseSampler, Design, DesignKind, ParamSpace};
use crate::sobol::{bootstrap_significance, IndexTable, SaltelliOutputs};
use crate::table::{Cell, Table};

/// Global sensitivity analysis of the final-tick indicators.
///
/// Each design row is run once. When the space holds a `seed` column, that
/// column is hashed to the run seed, so the seed is analysed like any other
/// parameter; without it every run uses `base.seed`.
#[derive(Clone, Debug, PartialEq)]
pub struct GsaConfig {
    pub space: ParamSpace,
    pub base: ModelParams,
    pub n_base: usize,
    pub seed: u64,
    pub n_boot: usize,
    pub confidence: f64,
    pub sampler: BaseSampler,
    pub workers: usize,
}

impl Default for GsaConfig {
    fn default() -> Self {
        GsaConfig {
            space: ParamSpace::with_seed_default(),
            base: ModelParams::default(),
            n_base: 1024,
            seed: 0,
            n_boot: 200,
            confidence: 0.95,
            sampler: BaseSampler::Sobol,
            workers: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GsaResult {
    pub design: Design,
    /// Run seeds in design order.
    pub seeds: Vec<u64>,
    /// Final-tick indicators in design order.
    pub outputs: Vec<IndicatorRow>,
    pub indices: IndexTable,
    /// Indicators whose outputs had no variance; all their indices are 0.
    pub degenerate: Vec<Indicator>,
}

impl GsaResult {
    /// One row per model run: `row, block, seed`, the design parameters and
    /// the indicators. `block` is `A`, `B` or `AB_<parameter>`.
    pub fn runs_table(&self) -> Table {
        let header = ["row".to_owned(), "block".to_owned(), "run_seed".to_owned()]
            .into_iter()
            .chain(self.design.names.iter().map(|n| if n == "seed" { "seed_unit".to_owned() } else { n.clone() }))
            .chain(indicator_names());
        let DesignKind::Saltelli { n_base } = self.design.kind else {
            unreachable!("GSA designs are Saltelli designs")
        };
        let mut t = Table::new(header);
        for (i, ((row, out), seed)) in self.design.rows.iter().zip(&self.outputs).zip(&self.seeds).enumerate() {
            let block = match i / n_base {
                0 => "A".to_owned(),
                1 => "B".to_owned(),
                b => format!("AB_{}", self.design.names[b - 2]),
            };
            let mut cells = vec![Cell::from(i), Cell::Text(block), Cell::from(*seed)];
            cells.extend(row.iter().map(|&v| Cell::Num(v)));
            cells.extend(out.iter().map(|&v| Cell::Num(v)));
            t.push(cells);
        }
        t
    }
}

/// Builds the Saltelli design, runs the model once per row, and estimates
/// first- and total-order indices with bootstrap intervals for each of the
/// five indicators.
pub fn gsa_experiment(config: &GsaConfig) -> Result<GsaResult> {
    check_workers(config.workers)?;
    if config.n_base < 64 {
        return Err(Error::param("n_base", "must be at least 64"));
    }
    config.base.validate()?;
    let design = saltelli_design(&config.space, config.n_base, config.seed, config.sampler)?;
    let run_seed_base = config.seed ^ RUN_STREAM;
    let params: Vec<ModelParams> = design
        .rows
        .iter()
        .map(|row| params_for_row(&config.base, &design.names, row, run_seed_base))
        .collect::<Result<_>>()?;
    let landscape = RastriginLandscape::new(config.base.genome_size, config.base.landscape_seed)?;
    let outputs = par_map(params.len(), config.workers, |i| final_indicators(&params[i], &landscape))?;

    let mut indices = IndexTable::default();
    let mut degenerate = Vec::new();
    for ind in Indicator::ALL {
        let column: Vec<f64> = outputs.iter().map(|r| r[ind.index()]).collect();
        let blocks = SaltelliOutputs::from_design_order(&column, config.n_base)?;
        let boot_seed = derive_seed(config.seed, 0xB0_0700 + ind.index() as u64);
        let result = bootstrap_significance(&blocks, config.n_boot, config.confidence, boot_seed)?;
        if result.degenerate {
            degenerate.push(ind);
        }
        indices.push_indicator(ind.name(), &design.names, &result);
    }
    Ok(GsaResult {
        seeds: params.iter().map(|p| p.seed).collect(),
        design,
        outputs,
        indices,
        degenerate,
    })
}
