// Copyright 2026 ness-lab contributors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors produced by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("numerical range exceeded: {0}")]
    NumericalRange(String),

    #[error("steady state is not unique: {0}")]
    NonUniqueSteadyState(String),

    #[error("no convergence: {0}")]
    Convergence(String),

    #[error("unexpected matrix shape: {0}")]
    Shape(String),
}

impl Error {
    /// True for failures of a numerical solver, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NumericalRange(_) | Error::NonUniqueSteadyState(_) | Error::Convergence(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
