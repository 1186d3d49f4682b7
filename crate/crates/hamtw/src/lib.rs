//! Exact Hamiltonian cycle solvers for graphs of bounded treewidth.
//!
//! The crate bundles four dynamic programs over nice tree decompositions —
//! a naive bucket/pairing DP, two rank-based variants that prune pairing
//! families by Gaussian elimination over F₂, and a randomized Cut&Count
//! procedure over GF(2⁶⁴) — together with the tooling needed to run them:
//! graph and decomposition file formats, a minimum fill-in heuristic,
//! cycle extraction by self-reducibility, a random instance generator with
//! planted cycles, and a benchmark harness.

pub mod bench;
pub mod cutcount;
pub mod decomp;
pub mod dp;
pub mod extract;
pub mod generator;
pub mod gf2p;
pub mod graph;
pub mod nice;
pub mod oracle;
pub mod rank;
pub mod z4conv;

pub use graph::{Graph, GraphFormat, GraphStats};
pub use decomp::TreeDecomposition;
pub use nice::NiceDecomposition;
