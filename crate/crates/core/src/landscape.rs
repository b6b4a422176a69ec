//! Genotype to fitness mappings.
//!
//! [`FitnessLandscape`] is the only thing the model kernel knows about
//! fitness: a genome length and a pure evaluation function. The concrete
//! instance used throughout is [`RastriginLandscape`], a negated Rastrigin
//! function whose coordinates are weighted by a random static matrix.

use std::f64::consts::PI;
use std::ops::{Deref, DerefMut};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use crate::scalar::Scalar;

/// Landscape seed used when a configuration does not set one, so that all
/// runs of an experiment share one landscape.
pub const DEFAULT_LANDSCAPE_SEED: u64 = 0x1A5D_5CA9_E000_0001;

/// A vector of idea coordinates.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Genome<T>(pub Vec<T>);

impl<T> Genome<T> {
    pub fn new(values: Vec<T>) -> Self {
        Genome(values)
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }
}

impl<T> Deref for Genome<T> {
    type Target = [T];

    fn deref(&self) -> &[T] {
        &self.0
    }
}

impl<T> DerefMut for Genome<T> {
    fn deref_mut(&mut self) -> &mut [T] {
        &mut self.0
    }
}

impl<T> From<Vec<T>> for Genome<T> {
    fn from(values: Vec<T>) -> Self {
        Genome(values)
    }
}

pub trait FitnessLandscape<T: Scalar>: Send + Sync {
    fn genome_size(&self) -> usize;

    /// Fitness of `genome`. The caller guarantees `genome.len() == genome_size()`.
    fn fitness(&self, genome: &[T]) -> T;

    /// Length-checked evaluation.
    fn evaluate(&self, genome: &[T]) -> Result<T> {
        if genome.len() != self.genome_size() {
            return Err(Error::Dimension {
                expected: self.genome_size(),
                actual: genome.len(),
            });
        }
        Ok(self.fitness(genome))
    }
}

/// `y(x) = -sum_{i,j} m_ij [x_i^2 - 10 cos(2 pi x_i)]` with `m` a `G x G`
/// matrix of independent uniform weights on `[0, 1]`.
///
/// The bracket only depends on the row index, so evaluation uses the
/// precomputed row sums of `m`; [`evaluate_double_sum`] keeps the literal
/// double sum for cross-checking.
///
/// [`evaluate_double_sum`]: RastriginLandscape::evaluate_double_sum
#[derive(Clone, Debug, PartialEq)]
pub struct RastriginLandscape<T> {
    genome_size: usize,
    landscape_seed: u64,
    weights: Vec<T>,
    row_sums: Vec<T>,
}

impl<T: Scalar> RastriginLandscape<T> {
    /// Draws the weight matrix row by row from a generator seeded with
    /// `landscape_seed`. Draws are made in `f64` and then converted, so the
    /// `f32` and `f64` landscapes of one seed agree up to rounding.
    pub fn new(genome_size: usize, landscape_seed: u64) -> Result<Self> {
        if genome_size == 0 {
            return Err(Error::param("G", "genome size must be at least 1"));
        }
        let mut rng = rng_from_seed(landscape_seed);
        let weights = (0..genome_size * genome_size)
            .map(|_| T::of(rng.random_range(0.0..=1.0)))
            .collect();
        Self::from_weights(genome_size, landscape_seed, weights)
    }

    /// Builds a landscape from an explicit row-major weight matrix.
    pub fn from_weights(genome_size: usize, landscape_seed: u64, weights: Vec<T>) -> Result<Self> {
        if genome_size == 0 {
            return Err(Error::param("G", "genome size must be at least 1"));
        }
        if weights.len() != genome_size * genome_size {
            return Err(Error::Dimension {
                expected: genome_size * genome_size,
                actual: weights.len(),
            });
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= T::zero() && **w <= T::one())) {
            return Err(Error::param(
                "weights",
                format!("entry {w} outside [0, 1]"),
            ));
        }
        let row_sums = weights
            .chunks_exact(genome_size)
            .map(|row| row.iter().copied().sum())
            .collect();
        Ok(RastriginLandscape {
            genome_size,
            landscape_seed,
            weights,
            row_sums,
        })
    }

    pub fn landscape_seed(&self) -> u64 {
        self.landscape_seed
    }

    /// Row-major weight matrix.
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn weight(&self, row: usize, col: usize) -> T {
        self.weights[row * self.genome_size + col]
    }

    pub fn row_sums(&self) -> &[T] {
        &self.row_sums
    }

    /// `10 * sum_{i,j} m_ij`, the fitness of the zero genome and the
    /// global maximum of the landscape.
    pub fn max_fitness(&self) -> T {
        T::of(10.0) * self.row_sums.iter().copied().sum::<T>()
    }

    /// Literal double-sum form of the fitness.
    pub fn evaluate_double_sum(&self, genome: &[T]) -> Result<T> {
        if genome.len() != self.genome_size {
            return Err(Error::Dimension {
                expected: self.genome_size,
                actual: genome.len(),
            });
        }
        let mut total = T::zero();
        for (i, &x) in genome.iter().enumerate() {
            for j in 0..self.genome_size {
                total = total + self.weight(i, j) * rastrigin_term(x);
            }
        }
        Ok(-total)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(LandscapeDocument::from(self)).expect("landscape serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let doc: LandscapeDocument<T> = serde_json::from_value(value.clone())
            .map_err(|e| Error::param("landscape", e.to_string()))?;
        Self::from_weights(doc.genome_size, doc.landscape_seed, doc.weights)
    }
}

#[inline]
fn rastrigin_term<T: Scalar>(x: T) -> T {
    x * x - T::of(10.0) * (T::of(2.0 * PI) * x).cos()
}

impl<T: Scalar> FitnessLandscape<T> for RastriginLandscape<T> {
    fn genome_size(&self) -> usize {
        self.genome_size
    }

    #[inline]
    fn fitness(&self, genome: &[T]) -> T {
        debug_assert_eq!(genome.len(), self.genome_size);
        let mut total = T::zero();
        for (&x, &r) in genome.iter().zip(&self.row_sums) {
            total = total + r * rastrigin_term(x);
        }
        -total
    }
}

/// Serialized form: `{genome_size, landscape_seed, weights}` with weights
/// in row-major order.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LandscapeDocument<T> {
    genome_size: usize,
    landscape_seed: u64,
    weights: Vec<T>,
}

impl<T: Scalar> From<&RastriginLandscape<T>> for LandscapeDocument<T> {
    fn from(l: &RastriginLandscape<T>) -> Self {
        LandscapeDocument {
            genome_size: l.genome_size,
            landscape_seed: l.landscape_seed,
            weights: l.weights.clone(),
        }
    }
}
