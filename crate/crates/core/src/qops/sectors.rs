// Copyright 2026 ness-lab contributors
// SPDX-License-Identifier: Apache-2.0

//! Coherence-order sectors of Liouville space.
//!
//! Excitation-number-conserving generators map `|a⟩⟨b|` only onto
//! `|a'⟩⟨b'|` with the same `n(a) − n(b)`, so their superoperators are
//! block diagonal in these sectors.

/// Number of excited qubits in computational basis state `index`.
/// Excited is bit value 0.
pub fn excitations(index: usize, n_qubits: usize) -> usize {
    n_qubits - (index & ((1 << n_qubits) - 1)).count_ones() as usize
}

/// Column-major vectorized indices `a + D·b` of all `|a⟩⟨b|` with
/// `n(a) − n(b) = order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sector {
    pub order: i32,
    pub indices: Vec<usize>,
}

impl Sector {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Positions within `indices` of the diagonal entries `|a⟩⟨a|`.
    pub fn diagonal_positions(&self, dim: usize) -> Vec<usize> {
        self.indices
            .iter()
            .enumerate()
            .filter(|(_, &v)| v % dim == v / dim)
            .map(|(i, _)| i)
            .collect()
    }
}

/// All sectors of an `n_qubits` register, ordered by coherence order.
pub fn coherence_sectors(n_qubits: usize) -> Vec<Sector> {
    let dim = 1usize << n_qubits;
    let n = n_qubits as i32;
    (-n..=n)
        .map(|order| {
            let mut indices = Vec::new();
            for b in 0..dim {
                for a in 0..dim {
                    let q = excitations(a, n_qubits) as i32 - excitations(b, n_qubits) as i32;
                    if q == order {
                        indices.push(a + dim * b);
                    }
                }
            }
            Sector { order, indices }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sector_sizes_four_qubits() {
        let sizes: Vec<usize> = coherence_sectors(4).iter().map(Sector::len).collect();
        assert_eq!(sizes, vec![1, 8, 28, 56, 70, 56, 28, 8, 1]);
    }

    #[test]
    fn sectors_partition_liouville_space() {
        let mut all: Vec<usize> = coherence_sectors(3).into_iter().flat_map(|s| s.indices).collect();
        all.sort_unstable();
        assert_eq!(all, (0..64).collect::<Vec<_>>());
    }

    #[test]
    fn excited_is_bit_zero() {
        assert_eq!(excitations(0b00, 2), 2);
        assert_eq!(excitations(0b01, 2), 1);
        assert_eq!(excitations(0b11, 2), 0);
    }
}
