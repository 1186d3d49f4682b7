//! Testing oracles: exact Hamiltonicity by bitmask dynamic programming over
//! vertex subsets, and exhaustive enumeration of partial-solution states at
//! decomposition nodes. Both are deliberately independent of the
//! tree-decomposition solvers they cross-check.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::dp::{Bucket, Pairing, State};
use crate::extract::CyclePath;
use crate::graph::Graph;
use crate::nice::{NiceDecomposition, NodeKind};

/// Hard cap keeping oracle runs in the sub-second range.
pub const ORACLE_MAX_N: u32 = 20;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("oracle supports at most {ORACLE_MAX_N} vertices, got {0}")]
    TooLarge(u32),
}

/// Exact Hamiltonicity decision by subset dynamic programming, `n <= 20`.
pub fn brute_force_decide(g: &Graph) -> Result<bool, OracleError> {
    Ok(brute_force_cycle(g)?.is_some())
}

/// Finds some Hamiltonian cycle by subset dynamic programming, `n <= 20`.
pub fn brute_force_cycle(g: &Graph) -> Result<Option<CyclePath>, OracleError> {
    let n = g.vertex_count();
    if n > ORACLE_MAX_N {
        return Err(OracleError::TooLarge(n));
    }
    if n < 3 || !g.is_connected() {
        return Ok(None);
    }
    let n = n as usize;
    // 0-based adjacency bitmasks; paths start at vertex 0.
    let adj: Vec<u32> = (1..=n as u32)
        .map(|v| {
            g.neighbors(v)
                .iter()
                .map(|&w| 1u32 << (w - 1))
                .fold(0, |a, b| a | b)
        })
        .collect();
    let full = (1u32 << n) - 1;
    // reach[mask] = set of endpoints v such that some simple path visits
    // exactly `mask` and runs from vertex 0 to v.
    let mut reach = vec![0u32; 1 << n];
    reach[1] = 1;
    for mask in 1u32..=full {
        if mask & 1 == 0 || reach[mask as usize] == 0 {
            continue;
        }
        let mut ends = reach[mask as usize];
        while ends != 0 {
            let v = ends.trailing_zeros() as usize;
            ends &= ends - 1;
            let mut rest = adj[v] & !mask;
            while rest != 0 {
                let w = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                reach[(mask | (1 << w)) as usize] |= 1 << w;
            }
        }
    }
    let closing = reach[full as usize] & adj[0] & !1;
    if closing == 0 {
        return Ok(None);
    }
    // Reconstruct backwards from any closing endpoint.
    let mut order = Vec::with_capacity(n);
    let mut mask = full;
    let mut v = closing.trailing_zeros() as usize;
    loop {
        order.push(v as u32 + 1);
        if v == 0 {
            break;
        }
        mask &= !(1 << v);
        let predecessors = adj[v] & reach[mask as usize];
        debug_assert!(predecessors != 0);
        // Any predecessor works; pick the lowest for determinism.
        v = predecessors.trailing_zeros() as usize;
    }
    order.reverse();
    Ok(Some(CyclePath::cycle(order)))
}

/// Exhaustively enumerates the valid partial-solution states of the node at
/// `node_idx`: all subsets of the edges introduced in its subtree that form
/// vertex-disjoint paths covering every forgotten vertex, mapped to their
/// (bucket, pairing) state. Exponential in the subtree edge count.
pub fn enumerate_states(g: &Graph, nd: &NiceDecomposition, node_idx: usize) -> BTreeSet<State> {
    let nodes = nd.nodes();
    // Gather the subtree's introduced edges and occurring vertices.
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut vertices: BTreeSet<u32> = BTreeSet::new();
    let mut stack = vec![node_idx];
    while let Some(idx) = stack.pop() {
        let node = &nodes[idx];
        vertices.extend(node.bag.iter().copied());
        if let NodeKind::IntroduceEdge(u, v) = node.kind {
            if g.has_edge(u, v) {
                edges.push((u.min(v), u.max(v)));
            }
        }
        stack.extend(node.children.iter().copied());
    }
    edges.sort_unstable();
    edges.dedup();
    let bag = &nodes[node_idx].bag;
    let forgotten: Vec<u32> = vertices
        .iter()
        .copied()
        .filter(|v| bag.binary_search(v).is_err())
        .collect();
    assert!(edges.len() <= 24, "enumeration oracle limited to small subtrees");

    let mut out = BTreeSet::new();
    'subsets: for choice in 0u32..(1 << edges.len()) {
        let chosen: Vec<(u32, u32)> = edges
            .iter()
            .enumerate()
            .filter(|(i, _)| choice & (1 << i) != 0)
            .map(|(_, &e)| e)
            .collect();
        let mut deg: std::collections::HashMap<u32, u32> = Default::default();
        let mut adj: std::collections::HashMap<u32, Vec<u32>> = Default::default();
        for &(u, v) in &chosen {
            *deg.entry(u).or_default() += 1;
            *deg.entry(v).or_default() += 1;
            adj.entry(u).or_default().push(v);
            adj.entry(v).or_default().push(u);
        }
        if deg.values().any(|&d| d > 2) {
            continue;
        }
        for &f in &forgotten {
            if deg.get(&f).copied().unwrap_or(0) != 2 {
                continue 'subsets;
            }
        }
        // Endpoints (degree 1) must lie in the bag, and no component may be
        // a closed cycle.
        let mut endpoint_pairs: Vec<(u32, u32)> = Vec::new();
        let mut visited: BTreeSet<u32> = BTreeSet::new();
        for (&v, &d) in &deg {
            if d == 1 && !visited.contains(&v) {
                // Walk the path to its other endpoint.
                let mut prev = v;
                let mut cur = adj[&v][0];
                visited.insert(v);
                while deg[&cur] == 2 {
                    visited.insert(cur);
                    let next = *adj[&cur].iter().find(|&&w| w != prev).unwrap();
                    prev = cur;
                    cur = next;
                }
                visited.insert(cur);
                endpoint_pairs.push((v, cur));
            }
        }
        if deg.keys().any(|v| !visited.contains(v)) {
            continue; // leftover component is a cycle
        }
        if endpoint_pairs
            .iter()
            .any(|&(a, b)| bag.binary_search(&a).is_err() || bag.binary_search(&b).is_err())
        {
            continue;
        }
        //

        let mut bucket = Bucket::empty();
        for (slot, &v) in bag.iter().enumerate() {
            bucket = bucket.set(slot, deg.get(&v).copied().unwrap_or(0) as u8);
        }
        let deg1 = bucket.deg1_slots(bag.len());
        let rank_of = |v: u32| {
            let slot = bag.binary_search(&v).unwrap() as u8;
            deg1.binary_search(&slot).unwrap()
        };
        let rank_pairs: Vec<(usize, usize)> = endpoint_pairs
            .iter()
            .map(|&(a, b)| (rank_of(a), rank_of(b)))
            .collect();
        let pairing = Pairing::from_pairs(deg1.len(), &rank_pairs).unwrap();
        out.insert(State { bucket, pairing });
    }
    out
}
