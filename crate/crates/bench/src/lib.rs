// Copyright 2026 ness-lab contributors
// SPDX-License-Identifier: Apache-2.0

//! Fixtures shared by the benchmarks.

use ness_core::ModelParams;

/// Memoryless couplings at the thermal-bath reference point.
pub fn memoryless() -> ModelParams {
    ModelParams::memoryless(0.0, -1.0, 2.0, 2.0)
}

/// Full memory near the concurrence optimum for inverted baths.
pub fn full_memory() -> ModelParams {
    ModelParams::with_memory(-1.0, 1.0, 4.6, 4.6, 2.3, 2.3, 1.0)
}

/// Partial memory, where every term of the generator is active.
pub fn partial_memory() -> ModelParams {
    ModelParams::with_memory(0.2, -0.8, 1.5, 0.7, 1.1, 0.9, 0.5)
}
