//! The Cut&Count decision procedure.
//!
//! Instead of tracking connectivity, the DP counts pairs of (cycle cover,
//! side assignment of each cycle to left/right) as a polynomial over
//! GF(2ᵖ): each edge carries a random field weight, each cycle cover
//! contributes its weight monomial once per side assignment. A cover with c
//! cycles is counted 2^(c-1) times (one vertex is anchored to the left
//! side), so everything except Hamiltonian cycles cancels in characteristic
//! 2. The root accumulator is nonzero iff the graph is Hamiltonian, up to a
//! false-negative probability of n/2ᵖ (Schwartz–Zippel); "yes" answers are
//! always correct.
//!
//! Per bag vertex the DP keeps one of four states: degree 0, degree 1 on
//! the left or right side, or degree 2 (side discharged). The state codes
//! double as ℤ₄ digits for the fast join (see [`crate::z4conv`]).

use std::collections::HashMap;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dp::{SolveError, SolveStats};
use crate::gf2p::{FieldElem, FieldSpec};
use crate::graph::Graph;
use crate::nice::{NiceDecomposition, NodeKind};

/// Per-vertex states; the numeric codes are the ℤ₄ digits used by the fast
/// join (degree-1-right is 3 ≡ -1, so valid combinations sum correctly).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum CcState {
    D0 = 0,
    D1Left = 1,
    D2 = 2,
    D1Right = 3,
}

pub(crate) const CODE_D0: u8 = 0;
pub(crate) const CODE_D1L: u8 = 1;
pub(crate) const CODE_D2: u8 = 2;
pub(crate) const CODE_D1R: u8 = 3;

/// Degree contributed by a state code (index = code).
pub(crate) const CODE_DEGREE: [u32; 4] = [0, 1, 2, 1];

pub(crate) fn code_at(key: u64, slot: usize) -> u8 {
    ((key >> (2 * slot)) & 3) as u8
}

pub(crate) fn with_code(key: u64, slot: usize, code: u8) -> u64 {
    (key & !(3u64 << (2 * slot))) | ((code as u64) << (2 * slot))
}

fn key_insert_slot(key: u64, slot: usize) -> u64 {
    let v = key as u128;
    let low = v & ((1u128 << (2 * slot)) - 1);
    let high = (v >> (2 * slot)) << (2 * slot + 2);
    (low | high) as u64
}

fn key_remove_slot(key: u64, slot: usize) -> u64 {
    let v = key as u128;
    let low = v & ((1u128 << (2 * slot)) - 1);
    let high = (v >> (2 * slot + 2)) << (2 * slot);
    (low | high) as u64
}

/// Accumulator table of one node: per-bag-vertex state codes (2 bits per
/// slot, bag-sorted) mapped to field values. Zero entries are purged.
#[derive(Debug, Clone)]
pub struct CCTable {
    pub bag: Vec<u32>,
    /// The anchor vertex, once introduced somewhere in this subtree.
    pub anchor: Option<u32>,
    pub acc: HashMap<u64, FieldElem>,
}

impl CCTable {
    pub fn leaf() -> CCTable {
        CCTable {
            bag: Vec::new(),
            anchor: None,
            acc: HashMap::from([(0, FieldElem::ONE)]),
        }
    }

    pub fn len(&self) -> usize {
        self.acc.len()
    }

    pub fn is_empty(&self) -> bool {
        self.acc.is_empty()
    }

    fn add_into(&mut self, spec: FieldSpec, key: u64, val: FieldElem) {
        let entry = self.acc.entry(key).or_insert(FieldElem::ZERO);
        *entry = spec.add(*entry, val);
        if entry.is_zero() {
            self.acc.remove(&key);
        }
    }
}

/// Random edge weights, drawn once per decision call from a seed; every
/// edge of the graph gets a weight.
#[derive(Debug, Clone)]
pub struct EdgeWeights {
    w: HashMap<(u32, u32), FieldElem>,
}

impl EdgeWeights {
    pub fn draw(g: &Graph, spec: FieldSpec, seed: u64) -> EdgeWeights {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = g
            .edges()
            .iter()
            .map(|&e| (e, spec.random_elem(&mut rng)))
            .collect();
        EdgeWeights { w }
    }

    pub fn weight(&self, u: u32, v: u32) -> FieldElem {
        self.w[&(u.min(v), u.max(v))]
    }
}

/// Introduce vertex `v` at degree 0. `is_anchor` marks the globally fixed
/// vertex whose cycle must take the left side; the mark is consumed by
/// [`cc_introduce_edge`] when `v`'s first incident edge is taken.
pub fn cc_introduce_vertex(tbl: &CCTable, v: u32, is_anchor: bool) -> CCTable {
    let slot = tbl
        .bag
        .binary_search(&v)
        .expect_err("introduced vertex must be fresh");
    let mut bag = tbl.bag.clone();
    bag.insert(slot, v);
    let acc = tbl
        .acc
        .iter()
        .map(|(&key, &val)| (key_insert_slot(key, slot), val))
        .collect();
    CCTable {
        bag,
        anchor: if is_anchor { Some(v) } else { tbl.anchor },
        acc,
    }
}

/// Introduce edge `{u, v}`: every entry keeps a skip branch; entries whose
/// endpoint degrees are below 2 also spawn take branches with the entry
/// value multiplied by the edge weight. Sides unify on take: two degree-0
/// endpoints start a new segment on either side (left only if one of them
/// is the anchor), a degree-0 endpoint adopts its partner's side, and two
/// degree-1 endpoints of the same side close into degree 2.
pub fn cc_introduce_edge_with(
    spec: FieldSpec,
    tbl: &CCTable,
    u: u32,
    v: u32,
    weights: &EdgeWeights,
) -> CCTable {
    let pu = tbl.bag.binary_search(&u).expect("endpoint in bag");
    let pv = tbl.bag.binary_search(&v).expect("endpoint in bag");
    let w = weights.weight(u, v);
    let anchor_u = tbl.anchor == Some(u);
    let anchor_v = tbl.anchor == Some(v);
    let mut out = CCTable {
        bag: tbl.bag.clone(),
        anchor: tbl.anchor,
        acc: HashMap::with_capacity(tbl.acc.len() * 2),
    };
    for (&key, &val) in &tbl.acc {
        // Skip branch.
        out.add_into(spec, key, val);
        let (cu, cv) = (code_at(key, pu), code_at(key, pv));
        if cu == CODE_D2 || cv == CODE_D2 {
            continue;
        }
        let contribution = spec.mul(val, w);
        let emit = |code_u: u8, code_v: u8, out: &mut CCTable| {
            let key2 = with_code(with_code(key, pu, code_u), pv, code_v);
            out.add_into(spec, key2, contribution);
        };
        match (cu, cv) {
            (CODE_D0, CODE_D0) => {
                emit(CODE_D1L, CODE_D1L, &mut out);
                if !anchor_u && !anchor_v {
                    emit(CODE_D1R, CODE_D1R, &mut out);
                }
            }
            (CODE_D0, side) => {
                // u adopts v's side; the anchor may only adopt left.
                if !(anchor_u && side == CODE_D1R) {
                    emit(side, CODE_D2, &mut out);
                }
            }
            (side, CODE_D0) => {
                if !(anchor_v && side == CODE_D1R) {
                    emit(CODE_D2, side, &mut out);
                }
            }
            (a, b) if a == b => {
                // Same side: both endpoints discharge to degree 2.
                emit(CODE_D2, CODE_D2, &mut out);
            }
            _ => {} // opposite sides never join
        }
    }
    out
}

/// Forget vertex `v`: entries with `v` at degree 2 survive, `v`'s slot is
/// projected out, and colliding entries add (possibly cancelling to zero).
pub fn cc_forget(spec: FieldSpec, tbl: &CCTable, v: u32) -> CCTable {
    let slot = tbl.bag.binary_search(&v).expect("forgotten vertex in bag");
    let mut bag = tbl.bag.clone();
    bag.remove(slot);
    let mut out = CCTable {
        bag,
        anchor: tbl.anchor,
        acc: HashMap::with_capacity(tbl.acc.len()),
    };
    for (&key, &val) in &tbl.acc {
        if code_at(key, slot) == CODE_D2 {
            out.add_into(spec, key_remove_slot(key, slot), val);
        }
    }
    out
}

/// Whether two state codes combine at a join, and to what.
pub(crate) fn combine_codes(a: u8, b: u8) -> Option<u8> {
    match (a, b) {
        (CODE_D0, x) => Some(x),
        (x, CODE_D0) => Some(x),
        (CODE_D1L, CODE_D1L) => Some(CODE_D2),
        (CODE_D1R, CODE_D1R) => Some(CODE_D2),
        _ => None,
    }
}

/// Direct join: all entry pairs whose per-vertex states combine
/// (degree sums at most 2, matching sides) contribute the product of their
/// values. Quadratic in the table sizes.
pub fn cc_join_naive(spec: FieldSpec, a: &CCTable, b: &CCTable) -> CCTable {
    assert_eq!(a.bag, b.bag, "join children must share the bag");
    let k = a.bag.len();
    let mut out = CCTable {
        bag: a.bag.clone(),
        anchor: merge_anchor(a, b),
        acc: HashMap::new(),
    };
    for (&ka, &va) in &a.acc {
        'pairs: for (&kb, &vb) in &b.acc {
            let mut key = 0u64;
            for s in 0..k {
                match combine_codes(code_at(ka, s), code_at(kb, s)) {
                    Some(c) => key = with_code(key, s, c),
                    None => continue 'pairs,
                }
            }
            out.add_into(spec, key, spec.mul(va, vb));
        }
    }
    out
}

pub(crate) fn merge_anchor(a: &CCTable, b: &CCTable) -> Option<u32> {
    match (a.anchor, b.anchor) {
        (Some(x), Some(y)) => {
            debug_assert_eq!(x, y, "anchor vertex is global");
            Some(x)
        }
        (x, y) => x.or(y),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JoinKind {
    Naive,
    Fast,
}

/// Outcome of one Cut&Count decision call.
#[derive(Debug, Clone)]
pub struct CcReport {
    pub answer: bool,
    /// Value of the empty-bag accumulator at the root.
    pub root_accumulator: FieldElem,
    /// Upper bound on the probability that a "no" answer is wrong.
    pub false_negative_bound: f64,
}

/// Runs the Cut&Count DP over the decomposition with weights drawn from
/// `seed`. Returns yes iff the root accumulator is nonzero; "no" answers
/// are wrong with probability at most n/2ᵖ. The field must satisfy
/// 2ᵖ > n.
pub fn cc_decide(
    g: &Graph,
    nd: &NiceDecomposition,
    spec: FieldSpec,
    seed: u64,
    join_kind: JoinKind,
    deadline: Option<Instant>,
    stats: &mut SolveStats,
) -> Result<CcReport, SolveError> {
    if spec.order() <= g.vertex_count() as u128 {
        return Err(SolveError::FieldTooSmall {
            p: spec.degree(),
            n: g.vertex_count(),
        });
    }
    let bound = g.vertex_count() as f64 / spec.order() as f64;
    if g.vertex_count() < 3 || !g.is_connected() {
        return Ok(CcReport {
            answer: false,
            root_accumulator: FieldElem::ZERO,
            false_negative_bound: 0.0, // definitive
        });
    }
    if nd.graph_vertex_count() != g.vertex_count() {
        return Err(SolveError::DecompositionMismatch(
            "vertex count differs".into(),
        ));
    }
    let weights = EdgeWeights::draw(g, spec, seed);
    // The anchor is the first vertex introduced in post-order.
    let anchor = nd
        .nodes()
        .iter()
        .find_map(|n| match n.kind {
            NodeKind::IntroduceVertex(v) => Some(v),
            _ => None,
        })
        .expect("graph with n >= 3 has introduce nodes");
    let mut stack: Vec<CCTable> = Vec::new();
    for node in nd.nodes() {
        if let Some(deadline) = deadline {
            if Instant::now() >= deadline {
                return Err(SolveError::Timeout);
            }
        }
        let tbl = match node.kind {
            NodeKind::Leaf => CCTable::leaf(),
            NodeKind::IntroduceVertex(v) => {
                let child = stack.pop().expect("post-order");
                cc_introduce_vertex(&child, v, v == anchor)
            }
            NodeKind::IntroduceEdge(u, v) => {
                let child = stack.pop().expect("post-order");
                if g.has_edge(u, v) {
                    cc_introduce_edge_with(spec, &child, u, v, &weights)
                } else {
                    child
                }
            }
            NodeKind::ForgetVertex(v) => {
                let child = stack.pop().expect("post-order");
                cc_forget(spec, &child, v)
            }
            NodeKind::Join => {
                let right = stack.pop().expect("post-order");
                let left = stack.pop().expect("post-order");
                match join_kind {
                    JoinKind::Naive => cc_join_naive(spec, &left, &right),
                    JoinKind::Fast => crate::z4conv::cc_join_fast(spec, &left, &right),
                }
            }
        };
        stats.nodes_processed += 1;
        stats.peak_table = stats.peak_table.max(tbl.len());
        stack.push(tbl);
    }
    let root = stack.pop().expect("post-order leaves the root");
    debug_assert!(stack.is_empty());
    debug_assert!(root.bag.is_empty());
    let root_accumulator = root.acc.get(&0).copied().unwrap_or(FieldElem::ZERO);
    Ok(CcReport {
        answer: !root_accumulator.is_zero(),
        root_accumulator,
        false_negative_bound: bound,
    })
}
