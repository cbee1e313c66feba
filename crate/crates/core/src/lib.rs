// negated float comparisons are deliberate: they reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chebyshev;
pub mod error;
pub mod operators;
pub mod optimize;
pub mod quadrature;
pub mod solver;
pub mod special;
pub mod support;
pub mod ultraspherical;
pub mod validation;

pub use error::{Error, Result};
pub use operators::{KernelPower, LambdaPolicy, OperatorOptions, PowerLawOperator};
pub use solver::{
    EquilibriumSolution, ExternalPotential, ProblemSpec, SingleIntervalSolver, SolutionRecord,
    SolveMethod, SOLUTION_SCHEMA,
};
pub use support::{
    optimize_interval, optimize_radius, optimize_two_interval, GapScanDefaults, GapScanResult,
    OptimizeConfig, OptimizerMethod, SupportVerdict, TwoIntervalOptions, GAP_SCAN_SCHEMA,
};
pub use ultraspherical::{BasisParam, Interval, SupportSpec, WeightedExpansion};
