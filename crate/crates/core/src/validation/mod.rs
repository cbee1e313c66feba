//! Independent checks: closed-form solutions, particle simulation, root search
//! and comparison metrics.

mod analytic;
mod metrics;
mod particles;
mod rootsearch;

pub use analytic::{analytic_solution, AnalyticFamily, AnalyticSolution};
pub use metrics::{
    coefficient_decay_report, histogram_compare, DecayReport, HistogramComparison, MeasureCdf,
};
pub use particles::{
    particle_simulate, particle_step, particle_support_guess, InitialDistribution, ParticleState,
    SimulationConfig, SwarmSupport, MIN_SEPARATION,
};
pub use rootsearch::{root_search_measure, RootSearchOptions, RootSearchResult};
