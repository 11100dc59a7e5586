//! Pareto- and Lorenz-optimal tradeoffs of discounted multiobjective MDPs,
//! approximated by ε-coverings.
//!
//! The pieces, bottom up:
//!
//! - [`vector`]: value and Lorenz vectors, dominance relations, filters.
//! - [`momdp`]: models, policies, occupation measures, policy evaluation.
//! - [`lp`]: a dense simplex and a branch-and-bound for 0/1 programs.
//! - [`models`]: LP/MIP formulations over occupation measures.
//! - [`backend`]: threshold and Restrict queries over LPs or explicit sets.
//! - [`grid`]: grid-scan coverings (direct Lorenz, Pareto, two-phase).
//! - [`greedy`]: minimal coverings for two objectives.
//! - [`oracle`]: exhaustive ground truth and cover verification.
//! - [`instance`]: instance files and generators.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod backend;
pub mod error;
pub mod greedy;
pub mod grid;
pub mod instance;
pub mod lp;
pub mod models;
pub mod momdp;
pub mod oracle;
pub mod vector;

pub use backend::{Candidate, FeasibilityBackend, LpBackend, Progression, Threshold, ValueSet};
pub use error::{Error, ResourceKind, Result};
pub use greedy::{greedy_min_cover, restrict, GreedyStatus, GreedyTrace, StepKind, TraceStep};
pub use grid::{
    enumerate_cells, lorenz_grid_cover, lorenz_grid_cover_with, pareto_grid_cover,
    pareto_grid_cover_with, phi_index, psi_index, two_phase_lorenz_cover,
    two_phase_lorenz_cover_with, CellIndex, CellScan, CoverEntry, CoverSet, CoverStats, GridConfig,
    ScanOptions,
};
pub use instance::{parse_instance, random_instance, write_instance, InstanceFile};
pub use lp::{LpModel, LpSolution, LpStatus, MipModel, SolverConfig};
pub use models::Space;
pub use momdp::{
    evaluate_policy, occupation_to_policy, occupation_value, policy_value, Momdp,
    OccupationMeasure, Policy,
};
pub use oracle::{
    enumerate_deterministic_values, example1_values, example2_values, min_cover_bruteforce,
    verify_cover, CoverVerdict, ExactFrontier,
};
pub use vector::{
    eps_lorenz_dominates, eps_pareto_dominates, lnd_filter, lorenz_dominates, lorenz_vector,
    pareto_dominates, pigou_dalton_transfer, pnd_filter, LorenzVector, ValueVector,
};
