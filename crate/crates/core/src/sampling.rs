//! Experiment designs: Latin hypercube samples, Saltelli sensitivity
//! designs and full factorial grids.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, splitmix64};
use crate::table::{Cell, Table};

/// Name of the synthetic design column mapped to the run seed.
pub const SEED_DIMENSION: &str = "seed";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    /// Uniform in `log10` space.
    Log10,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dimension {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    #[serde(default)]
    pub scale: Scale,
}

impl Dimension {
    pub fn linear(name: &str, lower: f64, upper: f64) -> Self {
        Dimension {
            name: name.to_owned(),
            lower,
            upper,
            scale: Scale::Linear,
        }
    }

    /// Maps a unit-interval coordinate onto the dimension.
    pub fn from_unit(&self, u: f64) -> f64 {
        let v = match self.scale {
            Scale::Linear => self.lower + u * (self.upper - self.lower),
            Scale::Log10 => {
                let (lo, hi) = (self.lower.log10(), self.upper.log10());
                10f64.powf(lo + u * (hi - lo))
            }
        };
        v.clamp(self.lower, self.upper)
    }

    pub fn to_unit(&self, v: f64) -> f64 {
        let u = match self.scale {
            Scale::Linear => (v - self.lower) / (self.upper - self.lower),
            Scale::Log10 => {
                let (lo, hi) = (self.lower.log10(), self.upper.log10());
                (v.log10() - lo) / (hi - lo)
            }
        };
        u.clamp(0.0, 1.0)
    }

    fn validate(&self) -> Result<()> {
        if !(self.lower.is_finite() && self.upper.is_finite() && self.lower < self.upper) {
            return Err(Error::param(
                &self.name,
                format!("bounds [{}, {}] must satisfy lower < upper", self.lower, self.upper),
            ));
        }
        if self.scale == Scale::Log10 && self.lower <= 0.0 {
            return Err(Error::param(&self.name, "log10 scale needs a positive lower bound"));
        }
        Ok(())
    }
}

/// Ordered box of free parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParamSpace {
    dims: Vec<Dimension>,
}

impl ParamSpace {
    pub fn new(dims: Vec<Dimension>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Design("parameter space has no dimension".into()));
        }
        for (i, d) in dims.iter().enumerate() {
            d.validate()?;
            if dims[..i].iter().any(|o| o.name == d.name) {
                return Err(Error::param(&d.name, "duplicate dimension"));
            }
        }
        Ok(ParamSpace { dims })
    }

    /// The eight free model parameters with their study ranges.
    pub fn model_default() -> Self {
        ParamSpace::new(vec![
            Dimension::linear("alpha_S", 0.1, 2.0),
            Dimension::linear("p_C", 0.0, 1.0),
            Dimension::linear("s_C", 0.0, 1.0),
            Dimension::linear("p_M", 0.0, 1.0),
            Dimension::linear("x_M", 0.0, 2.0),
            Dimension::linear("s_P", 0.0, 1.0),
            Dimension::linear("p_E", 0.0, 1e-4),
            Dimension::linear("d_E", 1.0, 100.0),
        ])
        .expect("static space is valid")
    }

    /// [`model_default`](Self::model_default) plus the unit-interval seed column.
    pub fn with_seed_default() -> Self {
        let mut space = Self::model_default();
        space.dims.push(Dimension::linear(SEED_DIMENSION, 0.0, 1.0));
        space
    }

    pub fn dims(&self) -> &[Dimension] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.dims.iter().map(|d| d.name.clone()).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.dims.iter().position(|d| d.name == name)
    }

    pub fn from_unit(&self, unit: &[f64]) -> Vec<f64> {
        self.dims.iter().zip(unit).map(|(d, &u)| d.from_unit(u)).collect()
    }

    pub fn to_unit(&self, values: &[f64]) -> Vec<f64> {
        self.dims.iter().zip(values).map(|(d, &v)| d.to_unit(v)).collect()
    }

    pub fn contains(&self, row: &[f64]) -> bool {
        row.len() == self.dims.len()
            && self.dims.iter().zip(row).all(|(d, &v)| v >= d.lower && v <= d.upper)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DesignKind {
    Lhs,
    /// Rows `[A; B; A_B^(1); ...; A_B^(k)]`, each block `n_base` rows.
    Saltelli { n_base: usize },
    Grid,
}

impl DesignKind {
    pub fn name(self) -> &'static str {
        match self {
            DesignKind::Lhs => "lhs",
            DesignKind::Saltelli { .. } => "saltelli",
            DesignKind::Grid => "grid",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SaltelliBlock {
    A,
    B,
    /// `A` with column `i` taken from `B`.
    Radial(usize),
}

/// Base matrix generator for Saltelli designs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseSampler {
    /// Owen-scrambled Sobol sequence over `2k` dimensions; `A` takes the
    /// first `k`, `B` the next `k`.
    #[default]
    Sobol,
    /// Independent uniforms from the seeded generator.
    Uniform,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Design {
    pub kind: DesignKind,
    pub names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Design {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.names.iter().position(|n| n == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Rows of one Saltelli block; `None` for other design kinds or an
    /// out-of-range radial index.
    pub fn saltelli_block(&self, block: SaltelliBlock) -> Option<&[Vec<f64>]> {
        let DesignKind::Saltelli { n_base } = self.kind else {
            return None;
        };
        let start = match block {
            SaltelliBlock::A => 0,
            SaltelliBlock::B => 1,
            SaltelliBlock::Radial(i) if i < self.names.len() => 2 + i,
            SaltelliBlock::Radial(_) => return None,
        } * n_base;
        Some(&self.rows[start..start + n_base])
    }

    /// One row per sample, header = parameter names.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(self.names.iter().cloned());
        for row in &self.rows {
            t.push(row.iter().map(|&v| Cell::Num(v)).collect());
        }
        t
    }
}

/// Latin hypercube sample: in every dimension the `n` points occupy the `n`
/// equal-width strata once each, uniformly inside the stratum, with strata
/// permuted independently per dimension.
pub fn lhs_sample(space: &ParamSpace, n: usize, seed: u64) -> Result<Design> {
    if n == 0 {
        return Err(Error::Design("LHS needs at least one point".into()));
    }
    let mut rng = rng_from_seed(seed);
    let k = space.len();
    let mut unit = vec![vec![0.0; k]; n];
    let mut strata: Vec<usize> = (0..n).collect();
    for d in 0..k {
        strata.shuffle(&mut rng);
        for (row, &s) in unit.iter_mut().zip(&strata) {
            row[d] = (s as f64 + rng.random::<f64>()) / n as f64;
        }
    }
    Ok(Design {
        kind: DesignKind::Lhs,
        names: space.names(),
        rows: unit.iter().map(|u| space.from_unit(u)).collect(),
    })
}

/// Saltelli design with `n_base * (k + 2)` rows ordered `[A; B; A_B^(1..k)]`.
pub fn saltelli_design(
    space: &ParamSpace,
    n_base: usize,
    seed: u64,
    sampler: BaseSampler,
) -> Result<Design> {
    if n_base < 2 {
        return Err(Error::Design("Saltelli base size must be at least 2".into()));
    }
    let k = space.len();
    let (a, b) = match sampler {
        BaseSampler::Sobol => {
            if 2 * k > sobol_burley::NUM_DIMENSIONS as usize {
                return Err(Error::Design(format!(
                    "{k} dimensions exceed the Sobol generator's {} / 2",
                    sobol_burley::NUM_DIMENSIONS
                )));
            }
            if n_base > u32::MAX as usize {
                return Err(Error::Design("base size too large for the Sobol generator".into()));
            }
            let scramble = (splitmix64(seed) >> 32) as u32;
            let point = |i: usize, offset: usize| -> Vec<f64> {
                (0..k)
                    .map(|d| sobol_burley::sample(i as u32, (offset + d) as u32, scramble) as f64)
                    .collect()
            };
            (
                (0..n_base).map(|i| point(i, 0)).collect::<Vec<_>>(),
                (0..n_base).map(|i| point(i, k)).collect::<Vec<_>>(),
            )
        }
        BaseSampler::Uniform => {
            let mut rng = rng_from_seed(seed);
            let mut block = || -> Vec<Vec<f64>> {
                (0..n_base)
                    .map(|_| (0..k).map(|_| rng.random::<f64>()).collect())
                    .collect()
            };
            let a = block();
            (a, block())
        }
    };
    let mut rows = Vec::with_capacity(n_base * (k + 2));
    rows.extend(a.iter().map(|u| space.from_unit(u)));
    rows.extend(b.iter().map(|u| space.from_unit(u)));
    for i in 0..k {
        for (ra, rb) in a.iter().zip(&b) {
            let mut u = ra.clone();
            u[i] = rb[i];
            rows.push(space.from_unit(&u));
        }
    }
    Ok(Design {
        kind: DesignKind::Saltelli { n_base },
        names: space.names(),
        rows,
    })
}

/// One axis of a factorial grid. On a `log10` axis the listed values are
/// exponents and the design holds `10^v`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridAxis {
    pub name: String,
    pub values: Vec<f64>,
    #[serde(default)]
    pub scale: Scale,
}

impl GridAxis {
    pub fn linear(name: &str, values: &[f64]) -> Self {
        GridAxis {
            name: name.to_owned(),
            values: values.to_vec(),
            scale: Scale::Linear,
        }
    }

    pub fn log10(name: &str, exponents: &[f64]) -> Self {
        GridAxis {
            name: name.to_owned(),
            values: exponents.to_vec(),
            scale: Scale::Log10,
        }
    }

    pub fn resolved_values(&self) -> Vec<f64> {
        match self.scale {
            Scale::Linear => self.values.clone(),
            Scale::Log10 => self.values.iter().map(|&e| 10f64.powf(e)).collect(),
        }
    }
}

/// Full Cartesian product, row-major over the axes as listed (last axis
/// varies fastest).
pub fn grid_design(axes: &[GridAxis]) -> Result<Design> {
    if axes.is_empty() {
        return Err(Error::Design("grid needs at least one axis".into()));
    }
    if let Some(a) = axes.iter().find(|a| a.values.is_empty()) {
        return Err(Error::param(&a.name, "grid axis has no value"));
    }
    let values: Vec<Vec<f64>> = axes.iter().map(GridAxis::resolved_values).collect();
    let total: usize = values.iter().map(Vec::len).product();
    let mut rows = Vec::with_capacity(total);
    for mut flat in 0..total {
        let mut row = vec![0.0; axes.len()];
        for (slot, axis) in row.iter_mut().zip(&values).rev() {
            *slot = axis[flat % axis.len()];
            flat /= axis.len();
        }
        rows.push(row);
    }
    Ok(Design {
        kind: DesignKind::Grid,
        names: axes.iter().map(|a| a.name.clone()).collect(),
        rows,
    })
}
