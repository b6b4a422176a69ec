//! Multi-objective optimization with a steady-state NSGA2.

mod dominance;
mod optimizer;

pub use dominance::{crowding_distance, dominates, hypervolume_2d, non_dominated_sort, pareto_filter};
pub use optimizer::{
    compromise_filter, optimize, optimize_with_observer, ArchiveEntry, CompromiseSummary, CompromiseThresholds,
    Individual, Nsga2Config, ParameterSummary, ParetoArchive, Problem,
};
