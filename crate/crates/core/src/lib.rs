//! Nearest-neighbor estimators of mutual information and conditional mutual
//! information for datasets that mix continuous, discrete and categorical
//! columns.

pub mod bench;
pub mod cli;
pub mod data;
pub mod error;
pub mod estimators;
pub mod io;
pub mod knn;
pub mod numerics;
pub mod selftest;
pub mod simulators;

pub use data::{Column, ColumnKind, Dataset, MixedValue, RoleAssignment};
pub use error::{Error, Result};
pub use estimators::{estimate, EstimateParams, EstimateResult, EstimatorKind};
pub use knn::{NeighborProfile, SearchStrategy};
pub use simulators::{Scenario, ScenarioSpec, ScenarioTruth};
