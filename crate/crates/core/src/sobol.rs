//! First- and total-order Sobol indices from outputs on a Saltelli design,
//! with percentile-bootstrap significance.
//!
//! With `f_A`, `f_B` the outputs on the base blocks and `f_ABi` the outputs
//! on the radial block of parameter `i`:
//!
//! * `V_i = 1/N sum_j f_B[j] (f_ABi[j] - f_A[j])`, `S_i = V_i / V`
//! * `E_i = 1/(2N) sum_j (f_A[j] - f_ABi[j])^2`, `T_i = E_i / V`
//!
//! where `V` is the sample variance of the pooled `A` and `B` outputs. All
//! sums run in row order so that results do not depend on scheduling.

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use crate::scalar::Scalar;
use crate::stats::quantile_sorted;
use crate::table::{Cell, Table};

/// Model outputs split by Saltelli block.
#[derive(Clone, Debug, PartialEq)]
pub struct SaltelliOutputs<T> {
    pub a: Vec<T>,
    pub b: Vec<T>,
    /// `radial[i][j]`: output on row `j` of the block where column `i`
    /// comes from `B`.
    pub radial: Vec<Vec<T>>,
}

impl<T: Scalar> SaltelliOutputs<T> {
    pub fn new(a: Vec<T>, b: Vec<T>, radial: Vec<Vec<T>>) -> Result<Self> {
        let n = a.len();
        if n < 2 {
            return Err(Error::Design("Sobol estimation needs at least 2 base rows".into()));
        }
        if b.len() != n || radial.iter().any(|r| r.len() != n) {
            return Err(Error::Design("Saltelli blocks have inconsistent lengths".into()));
        }
        if radial.is_empty() {
            return Err(Error::Design("no radial block".into()));
        }
        Ok(SaltelliOutputs { a, b, radial })
    }

    /// Splits outputs listed in design order `[A; B; A_B^(1); ...; A_B^(k)]`.
    pub fn from_design_order(outputs: &[T], n_base: usize) -> Result<Self> {
        if n_base == 0 || outputs.len() % n_base != 0 || outputs.len() / n_base < 3 {
            return Err(Error::Design(format!(
                "{} outputs do not form a Saltelli design of base size {n_base}",
                outputs.len()
            )));
        }
        let mut blocks = outputs.chunks_exact(n_base).map(<[T]>::to_vec);
        let a = blocks.next().expect("checked");
        let b = blocks.next().expect("checked");
        Self::new(a, b, blocks.collect())
    }

    pub fn n_base(&self) -> usize {
        self.a.len()
    }

    pub fn n_params(&self) -> usize {
        self.radial.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SobolEstimate<T> {
    pub first_order: Vec<T>,
    pub total_order: Vec<T>,
    pub variance: T,
    /// Output variance is zero (to rounding); every index is reported as 0.
    pub degenerate: bool,
}

/// Point estimates on all base rows.
pub fn sobol_indices<T: Scalar>(outputs: &SaltelliOutputs<T>) -> SobolEstimate<T> {
    let rows: Vec<usize> = (0..outputs.n_base()).collect();
    estimate_on_rows(outputs, &rows)
}

fn estimate_on_rows<T: Scalar>(outputs: &SaltelliOutputs<T>, rows: &[usize]) -> SobolEstimate<T> {
    let k = outputs.n_params();
    let n = T::of(rows.len() as f64);
    let pooled = T::of(2.0 * rows.len() as f64);
    let mut sum = T::zero();
    let mut scale = T::zero();
    for &j in rows {
        sum = sum + outputs.a[j] + outputs.b[j];
        scale = scale.max(outputs.a[j].abs()).max(outputs.b[j].abs());
    }
    let mean = sum / pooled;
    let mut ss = T::zero();
    for &j in rows {
        let (da, db) = (outputs.a[j] - mean, outputs.b[j] - mean);
        ss = ss + da * da + db * db;
    }
    let variance = ss / (pooled - T::one());
    let noise_floor = scale * T::epsilon() * T::of(1e3);
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(variance > noise_floor * noise_floor) {
        return SobolEstimate {
            first_order: vec![T::zero(); k],
            total_order: vec![T::zero(); k],
            variance,
            degenerate: true,
        };
    }
    let mut first_order = Vec::with_capacity(k);
    let mut total_order = Vec::with_capacity(k);
    for radial in &outputs.radial {
        let (mut vi, mut ei) = (T::zero(), T::zero());
        for &j in rows {
            let diff = radial[j] - outputs.a[j];
            vi = vi + outputs.b[j] * diff;
            ei = ei + diff * diff;
        }
        first_order.push(vi / n / variance);
        total_order.push(ei / (T::of(2.0) * n) / variance);
    }
    SobolEstimate {
        first_order,
        total_order,
        variance,
        degenerate: false,
    }
}

/// One parameter's indices after bootstrap filtering.
#[derive(Clone, Debug, PartialEq)]
pub struct IndexEstimate {
    pub first_order: f64,
    pub total_order: f64,
    pub first_interval: (f64, f64),
    pub total_interval: (f64, f64),
    pub first_significant: bool,
    pub total_significant: bool,
}

impl IndexEstimate {
    pub fn first_half_width(&self) -> f64 {
        (self.first_interval.1 - self.first_interval.0) / 2.0
    }

    pub fn total_half_width(&self) -> f64 {
        (self.total_interval.1 - self.total_interval.0) / 2.0
    }

    /// Index values with non-significant entries replaced by 0.
    pub fn reported(&self) -> (f64, f64) {
        (
            if self.first_significant { self.first_order } else { 0.0 },
            if self.total_significant { self.total_order } else { 0.0 },
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BootstrapResult {
    pub indices: Vec<IndexEstimate>,
    pub degenerate: bool,
}

/// Resamples base rows with replacement `n_boot` times, recomputes both
/// indices, and forms percentile intervals at `level`. An index whose
/// interval contains 0 is not significant.
pub fn bootstrap_significance<T: Scalar>(
    outputs: &SaltelliOutputs<T>,
    n_boot: usize,
    level: f64,
    seed: u64,
) -> Result<BootstrapResult> {
    if n_boot == 0 {
        return Err(Error::param("n_boot", "needs at least one resample"));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::param("level", format!("{level} is outside (0, 1)")));
    }
    let point = sobol_indices(outputs);
    let k = outputs.n_params();
    let n = outputs.n_base();
    if point.degenerate {
        let zero = IndexEstimate {
            first_order: 0.0,
            total_order: 0.0,
            first_interval: (0.0, 0.0),
            total_interval: (0.0, 0.0),
            first_significant: false,
            total_significant: false,
        };
        return Ok(BootstrapResult {
            indices: vec![zero; k],
            degenerate: true,
        });
    }

    let mut rng = rng_from_seed(seed);
    let mut first = vec![Vec::with_capacity(n_boot); k];
    let mut total = vec![Vec::with_capacity(n_boot); k];
    let mut rows = vec![0; n];
    for _ in 0..n_boot {
        rows.iter_mut().for_each(|r| *r = rng.random_range(0..n));
        let e = estimate_on_rows(outputs, &rows);
        for i in 0..k {
            first[i].push(e.first_order[i].as_f64());
            total[i].push(e.total_order[i].as_f64());
        }
    }
    let tail = (1.0 - level) / 2.0;
    let interval = |samples: &mut Vec<f64>| -> (f64, f64) {
        samples.sort_by(f64::total_cmp);
        (quantile_sorted(samples, tail), quantile_sorted(samples, 1.0 - tail))
    };
    let indices = (0..k)
        .map(|i| {
            let fi = interval(&mut first[i]);
            let ti = interval(&mut total[i]);
            IndexEstimate {
                first_order: point.first_order[i].as_f64(),
                total_order: point.total_order[i].as_f64(),
                first_interval: fi,
                total_interval: ti,
                first_significant: !(fi.0 <= 0.0 && 0.0 <= fi.1),
                total_significant: !(ti.0 <= 0.0 && 0.0 <= ti.1),
            }
        })
        .collect();
    Ok(BootstrapResult {
        indices,
        degenerate: false,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndexRow {
    pub indicator: String,
    pub parameter: String,
    pub estimate: IndexEstimate,
}

/// Sensitivity indices for every (indicator, parameter) pair.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IndexTable {
    pub rows: Vec<IndexRow>,
}

impl IndexTable {
    pub fn push_indicator(&mut self, indicator: &str, parameters: &[String], result: &BootstrapResult) {
        for (name, estimate) in parameters.iter().zip(&result.indices) {
            self.rows.push(IndexRow {
                indicator: indicator.to_owned(),
                parameter: name.clone(),
                estimate: estimate.clone(),
            });
        }
    }

    pub fn get(&self, indicator: &str, parameter: &str) -> Option<&IndexEstimate> {
        self.rows
            .iter()
            .find(|r| r.indicator == indicator && r.parameter == parameter)
            .map(|r| &r.estimate)
    }

    pub fn for_indicator<'a>(&'a self, indicator: &'a str) -> impl Iterator<Item = &'a IndexRow> + 'a {
        self.rows.iter().filter(move |r| r.indicator == indicator)
    }

    /// Columns `indicator, parameter, first_order, first_ci, total_order,
    /// total_ci, significant`. Index values are zero-assimilated, the CI
    /// columns hold interval half-widths, and `significant` is true when at
    /// least one of the two indices survived.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new([
            "indicator",
            "parameter",
            "first_order",
            "first_ci",
            "total_order",
            "total_ci",
            "significant",
        ]);
        for row in &self.rows {
            let e = &row.estimate;
            let (first, total) = e.reported();
            t.push(vec![
                row.indicator.as_str().into(),
                row.parameter.as_str().into(),
                Cell::Num(first),
                Cell::Num(e.first_half_width()),
                Cell::Num(total),
                Cell::Num(e.total_half_width()),
                (e.first_significant || e.total_significant).into(),
            ]);
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{saltelli_design, BaseSampler, Dimension, ParamSpace};

    fn unit_space(k: usize) -> ParamSpace {
        ParamSpace::new((0..k).map(|i| Dimension::linear(&format!("x{i}"), 0.0, 1.0)).collect()).unwrap()
    }

    fn evaluate(k: usize, n: usize, seed: u64, f: impl Fn(&[f64]) -> f64) -> SaltelliOutputs<f64> {
        let d = saltelli_design(&unit_space(k), n, seed, BaseSampler::Sobol).unwrap();
        let y: Vec<f64> = d.rows.iter().map(|r| f(r)).collect();
        SaltelliOutputs::from_design_order(&y, n).unwrap()
    }

    #[test]
    fn shape_checks() {
        assert!(SaltelliOutputs::<f64>::from_design_order(&[1.0; 10], 4).is_err());
        assert!(SaltelliOutputs::<f64>::from_design_order(&[1.0; 8], 4).is_err());
        assert!(SaltelliOutputs::new(vec![1.0], vec![1.0], vec![vec![1.0]]).is_err());
        let o = SaltelliOutputs::<f64>::from_design_order(&[1.0; 16], 4).unwrap();
        assert_eq!((o.n_base(), o.n_params()), (4, 2));
    }

    #[test]
    fn constant_output_is_degenerate() {
        let o = evaluate(3, 64, 1, |_| 0.1);
        let e = sobol_indices(&o);
        assert!(e.degenerate);
        assert!(e.first_order.iter().chain(&e.total_order).all(|&v| v == 0.0));
        let b = bootstrap_significance(&o, 100, 0.95, 1).unwrap();
        assert!(b.degenerate);
        assert!(b.indices.iter().all(|i| i.reported() == (0.0, 0.0)));
    }

    #[test]
    fn coordinate_projection() {
        let o = evaluate(2, 8192, 2, |x| x[0]);
        let e = sobol_indices(&o);
        assert!((e.first_order[0] - 1.0).abs() < 0.02);
        assert!((e.total_order[0] - 1.0).abs() < 0.02);
        assert!(e.first_order[1].abs() < 0.02);
        assert!(e.total_order[1].abs() < 0.02);
        let b = bootstrap_significance(&o, 200, 0.95, 3).unwrap();
        assert!(b.indices[0].first_significant);
        assert!(b.indices[0].first_interval.0 > 0.0);
    }

    #[test]
    fn additive_function_has_matching_indices() {
        let o = evaluate(3, 8192, 4, |x| x[0] + 2.0 * x[1] * x[1] + (6.0 * x[2]).sin());
        let e = sobol_indices(&o);
        for i in 0..3 {
            assert!((e.total_order[i] - e.first_order[i]).abs() < 0.03, "parameter {i}");
        }
    }

    #[test]
    fn single_precision_estimates() {
        let d = saltelli_design(&unit_space(2), 1024, 9, BaseSampler::Sobol).unwrap();
        let y: Vec<f32> = d.rows.iter().map(|r| r[0] as f32).collect();
        let e = sobol_indices(&SaltelliOutputs::from_design_order(&y, 1024).unwrap());
        assert!((e.first_order[0] - 1.0).abs() < 0.05);
    }

    #[test]
    fn permuting_parameters_permutes_indices() {
        let f = |x: &[f64]| x[0] + 0.5 * x[1] * x[2];
        let o = evaluate(3, 512, 5, f);
        let perm = [2, 0, 1];
        let permuted = SaltelliOutputs::new(
            o.a.clone(),
            o.b.clone(),
            perm.iter().map(|&i| o.radial[i].clone()).collect(),
        )
        .unwrap();
        let (x, y) = (
            bootstrap_significance(&o, 100, 0.95, 8).unwrap(),
            bootstrap_significance(&permuted, 100, 0.95, 8).unwrap(),
        );
        for (slot, &i) in perm.iter().enumerate() {
            assert_eq!(y.indices[slot], x.indices[i]);
        }
    }

    #[test]
    fn bootstrap_is_seeded() {
        let o = evaluate(2, 256, 6, |x| x[0] * x[1]);
        assert_eq!(
            bootstrap_significance(&o, 100, 0.9, 1).unwrap(),
            bootstrap_significance(&o, 100, 0.9, 1).unwrap()
        );
        assert!(bootstrap_significance(&o, 0, 0.9, 1).is_err());
        assert!(bootstrap_significance(&o, 100, 1.0, 1).is_err());
    }

    #[test]
    fn table_schema() {
        let o = evaluate(2, 64, 7, |x| x[0]);
        let b = bootstrap_significance(&o, 100, 0.95, 1).unwrap();
        let mut t = IndexTable::default();
        t.push_indicator("y", &["x0".into(), "x1".into()], &b);
        let csv = t.to_table().to_csv_string();
        assert!(csv.starts_with("indicator,parameter,first_order,first_ci,total_order,total_ci,significant\n"));
        assert_eq!(csv.lines().count(), 3);
        assert!(t.get("y", "x1").is_some());
    }
}
