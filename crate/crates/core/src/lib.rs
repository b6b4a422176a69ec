//! Agent-based model of innovation in geographical firm clusters.
//!
//! Employees carry real-valued idea genomes that evolve through crossover
//! within firms, mutation, product selection, and distance-decayed informal
//! exchange between firms. The crate also contains the experiment engine
//! used to study the model: Latin hypercube, Saltelli and grid designs,
//! Sobol indices, a steady-state NSGA2 and replication statistics.
//!
//! Genome and fitness arithmetic is generic over [`Scalar`] (`f32`, `f64`);
//! the aliases below fix the scalar for the common cases.

pub mod error;
pub mod harness;
pub mod indicators;
pub mod landscape;
pub mod model;
pub mod nsga2;
pub mod rng;
pub mod sampling;
pub mod scalar;
pub mod sobol;
pub mod stats;
pub mod table;

pub use error::{Error, Result};
pub use indicators::{Indicator, IndicatorVector};
pub use landscape::{FitnessLandscape, Genome, RastriginLandscape, DEFAULT_LANDSCAPE_SEED};
pub use model::{InteractionSampling, ModelParams};
pub use scalar::Scalar;

pub type Landscape = RastriginLandscape<f64>;
pub type Landscape32 = RastriginLandscape<f32>;
pub type ModelState = model::ModelState<f64>;
pub type ModelState32 = model::ModelState<f32>;
pub type SimulationResult = model::SimulationResult<f64>;
pub type SimulationResult32 = model::SimulationResult<f32>;
pub type Indicators = IndicatorVector<f64>;
