//! Exact solvers, kernels and instance generators for conflict-free fair
//! allocation: give every agent a conflict-free bundle of jobs worth at
//! least η to it, with bundles pairwise disjoint.

pub mod bench;
pub mod budget;
pub mod colorcoding;
pub mod error;
pub mod generators;
pub mod graph;
pub mod instance;
pub mod kernel;
pub mod matching;
pub mod hwpoly;
pub mod oracle;
pub mod perfect_hash;
pub mod portfolio;
pub mod sbmwis;
pub mod structured;

pub use budget::Budget;
pub use error::{CffaError, Result};
pub use graph::Graph;
pub use instance::{
    parse_instance, verify_assignment, write_instance, write_result, Answer, Assignment,
    Completeness, Instance, SolveResult, Variant,
};
