//! Random instance generator with a planted Hamiltonian cycle and an
//! explicit bounded-width path decomposition.
//!
//! Vertices form an a × b grid `v(i,j)` (a rows, b columns, numbered
//! `(i-1)·b + j`). Each row is a path; the row ends are wired into a single
//! cycle (row i pairs with row i + a/2 at column 1 and with its neighbor at
//! column b), which works out to one spanning cycle exactly because
//! a ≡ 2 (mod 4). Random chords are then added between rows i < i' ≤ a/2
//! within each column, independently with probability p. The instances are
//! built to flood the solvers with many partial solutions per separator
//! while the treewidth stays at most a.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::decomp::TreeDecomposition;
use crate::extract::{cycle_from_edges, CyclePath};
use crate::graph::Graph;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("row count must be positive and equal to 2 modulo 4, got {0}")]
    BadRowCount(u32),
    #[error("column count must be positive")]
    BadColumnCount,
    #[error("chord probability must lie strictly between 0 and 1, got {0}")]
    BadProbability(f64),
    #[error("a spanning cycle needs at least 3 vertices, got a·b = {0}")]
    TooFewVertices(u32),
}

#[derive(Debug, Clone, Copy)]
pub struct GenParams {
    /// Row count; must satisfy a ≡ 2 (mod 4).
    pub a: u32,
    /// Column count.
    pub b: u32,
    /// Chord probability, strictly between 0 and 1.
    pub p: f64,
    pub seed: u64,
}

impl GenParams {
    pub fn validate(&self) -> Result<(), GenError> {
        if self.a == 0 || self.a % 4 != 2 {
            return Err(GenError::BadRowCount(self.a));
        }
        if self.b == 0 {
            return Err(GenError::BadColumnCount);
        }
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(GenError::BadProbability(self.p));
        }
        if self.a * self.b < 3 {
            return Err(GenError::TooFewVertices(self.a * self.b));
        }
        Ok(())
    }
}

#[derive(Debug)]
pub struct GeneratedInstance {
    pub graph: Graph,
    pub planted_cycle: CyclePath,
    pub td: TreeDecomposition,
}

/// Closed-form expectations for a parameter choice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedParams {
    pub vertices: u64,
    pub base_edges: u64,
    pub chord_positions: u64,
    pub expected_edges: f64,
    /// Expected edge count over the number of vertex pairs.
    pub expected_density: f64,
}

pub fn expected_params_report(params: &GenParams) -> ExpectedParams {
    let (a, b) = (params.a as u64, params.b as u64);
    let n = a * b;
    let half = a / 2;
    let chord_positions = half * half.saturating_sub(1) / 2 * b;
    let expected_edges = n as f64 + params.p * chord_positions as f64;
    ExpectedParams {
        vertices: n,
        base_edges: n,
        chord_positions,
        expected_edges,
        expected_density: if n > 1 {
            expected_edges / (n as f64 * (n as f64 - 1.0) / 2.0)
        } else {
            0.0
        },
    }
}

/// Generates the instance: graph, planted spanning cycle, and the explicit
/// path decomposition of width at most a. Bit-reproducible per seed: chord
/// draws consume the generator in (i, i', j) lexicographic order.
pub fn generate(params: &GenParams) -> Result<GeneratedInstance, GenError> {
    params.validate()?;
    let (a, b) = (params.a, params.b);
    let n = a * b;
    let vid = |i: u32, j: u32| -> u32 {
        debug_assert!((1..=a).contains(&i) && (1..=b).contains(&j));
        (i - 1) * b + j
    };

    // Row paths, then the two column wirings closing one spanning cycle.
    let mut cycle_edges: Vec<(u32, u32)> = Vec::with_capacity(n as usize);
    for i in 1..=a {
        for j in 1..b {
            cycle_edges.push((vid(i, j), vid(i, j + 1)));
        }
    }
    for i in 1..=a / 2 {
        cycle_edges.push((vid(i, 1), vid(i + a / 2, 1)));
    }
    for i in (2..=a).step_by(2) {
        cycle_edges.push((vid(i - 1, b), vid(i, b)));
    }
    let planted_cycle =
        cycle_from_edges(n, &cycle_edges).expect("base wiring forms one spanning cycle");

    let mut edges = cycle_edges;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    for i in 1..=a / 2 {
        for i2 in i + 1..=a / 2 {
            for j in 1..=b {
                if rng.random_bool(params.p) {
                    edges.push((vid(i, j), vid(i2, j)));
                }
            }
        }
    }
    let graph = Graph::new(n, edges).expect("generator edges are in range");

    // Path decomposition sweeping the grid column-major: bag r covers the
    // a+1 consecutive vertices s ∈ [r, r+a] in column-major numbering.
    let td = if n > a {
        let col_major = |s: u32| -> u32 {
            let row = (s - 1) % a + 1;
            let col = s.div_ceil(a);
            vid(row, col)
        };
        let bag_count = n - a;
        let bags: Vec<Vec<u32>> = (1..=bag_count)
            .map(|r| (r..=r + a).map(col_major).collect())
            .collect();
        let tree_edges = (1..bag_count).map(|r| (r, r + 1)).collect();
        TreeDecomposition::new(bags, tree_edges, n).expect("bags are in range")
    } else {
        // b = 1: the sweep is empty; a single bag covers the cycle.
        TreeDecomposition::new(vec![(1..=n).collect()], Vec::new(), n).expect("bag in range")
    };

    Ok(GeneratedInstance {
        graph,
        planted_cycle,
        td,
    })
}
