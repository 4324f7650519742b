// Copyright 2026 ness-lab contributors
// SPDX-License-Identifier: Apache-2.0

pub mod analysis;
pub mod collision;
pub mod divisibility;
pub mod error;
pub mod generators;
pub mod observables;
pub mod qops;

pub use analysis::{OptimizationResult, OptimizerConfig, RegionSample, SearchBox};
pub use collision::ModelParams;
pub use divisibility::{BlochMap, DivisibilityReport};
pub use generators::{GeneratorKind, GkslGenerator};
pub use observables::SteadyStateReport;
pub use error::{Error, Result};
pub use qops::{CMatrix, CVector, DensityMatrix, Operator, Superoperator, C64};
