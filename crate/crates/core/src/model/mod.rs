//! Firm and employee dynamics.
//!
//! One tick applies, in order: within-firm crossover, mutation, product
//! selection, and distance-decayed exchange between firms.

mod params;
mod run;
mod state;

pub use params::{rank_size_sizes, InteractionSampling, KeyKind, ModelParams};
pub use run::{run, run_to_end, run_with_landscape, SimulationResult};
pub use state::{
    Firm, FirmSnapshot, InteractionTally, ModelState, StateSnapshot, AREA_SIDE, INITIAL_GENE_BOUND,
};
