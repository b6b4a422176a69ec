use serde::Serialize;

use super::params::ModelParams;
use super::state::ModelState;
use crate::error::Result;
use crate::indicators::{Indicator, IndicatorVector};
use crate::landscape::{FitnessLandscape, RastriginLandscape};
use crate::scalar::Scalar;
use crate::table::{Cell, Table};

/// Indicator series of one seeded run, `t_final + 1` entries from `t = 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationResult<T> {
    pub params: ModelParams,
    pub series: Vec<IndicatorVector<T>>,
}

impl<T: Scalar> SimulationResult<T> {
    pub fn final_indicators(&self) -> IndicatorVector<T> {
        *self.series.last().expect("series holds at least t = 0")
    }

    pub fn column(&self, indicator: Indicator) -> Vec<T> {
        self.series.iter().map(|v| v.get(indicator)).collect()
    }

    /// One row per tick: `t` and the five indicators.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(std::iter::once("t").chain(Indicator::ALL.iter().map(|i| i.name())));
        for (tick, v) in self.series.iter().enumerate() {
            let mut row = vec![Cell::from(tick)];
            row.extend(v.to_array().iter().map(|x| Cell::Num(x.to_f64().expect("finite scalar"))));
            t.push(row);
        }
        t
    }
}

/// Runs the model on the Rastrigin landscape drawn from `params.landscape_seed`.
pub fn run<T: Scalar>(params: &ModelParams) -> Result<SimulationResult<T>> {
    params.validate()?;
    let landscape = RastriginLandscape::<T>::new(params.genome_size, params.landscape_seed)?;
    run_with_landscape(params, &landscape)
}

pub fn run_with_landscape<T: Scalar, L: FitnessLandscape<T> + ?Sized>(
    params: &ModelParams,
    landscape: &L,
) -> Result<SimulationResult<T>> {
    run_to_end(params, landscape).map(|(result, _)| result)
}

/// Like [`run_with_landscape`], also returning the final state.
pub fn run_to_end<T: Scalar, L: FitnessLandscape<T> + ?Sized>(
    params: &ModelParams,
    landscape: &L,
) -> Result<(SimulationResult<T>, ModelState<T>)> {
    let mut state = ModelState::init(params, landscape)?;
    let mut series = Vec::with_capacity(params.t_final as usize + 1);
    series.push(IndicatorVector::of_state(&state));
    while state.time < params.t_final {
        state.step(params, landscape)?;
        series.push(IndicatorVector::of_state(&state));
    }
    Ok((
        SimulationResult {
            params: params.clone(),
            series,
        },
        state,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_horizon_gives_initial_indicators_only() {
        let p = ModelParams {
            t_final: 0,
            ..ModelParams::default()
        };
        let r = run::<f64>(&p).unwrap();
        assert_eq!(r.series.len(), 1);
    }

    #[test]
    fn same_seed_same_result() {
        let p = ModelParams {
            t_final: 20,
            interaction_prob: 1e-4,
            seed: 5,
            ..ModelParams::default()
        };
        let a = run::<f64>(&p).unwrap();
        let b = run::<f64>(&p).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.series.len(), 21);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        let table = a.to_table();
        assert_eq!(table.header.join(","), "t,best_fitness,avg_fitness,rel_diff,entropy,diversity");
        assert_eq!(table.rows.len(), 21);
        let c = run::<f64>(&p.clone().with_seed(6)).unwrap();
        assert_ne!(a.series, c.series);
    }

    #[test]
    fn single_precision_runs() {
        let p = ModelParams {
            t_final: 10,
            ..ModelParams::default()
        };
        let r = run::<f32>(&p).unwrap();
        assert!(r.series.iter().all(|v| v.best_fitness >= v.avg_fitness));
    }

    #[test]
    fn invalid_params_propagate() {
        let p = ModelParams {
            mutation_prob: -0.1,
            ..ModelParams::default()
        };
        assert!(run::<f64>(&p).is_err());
    }
}
