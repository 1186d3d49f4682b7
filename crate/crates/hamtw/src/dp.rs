//! The bucket/pairing dynamic program over nice tree decompositions.
//!
//! A partial solution at a node is a family of vertex-disjoint paths in the
//! subtree graph that covers every forgotten vertex and has all endpoints in
//! the bag. Its state is the pair of a *bucket* (the degree 0/1/2 of every
//! bag vertex in the path family) and a *pairing* (the perfect matching on
//! the degree-1 vertices recording which endpoints belong to the same
//! path). Among partial solutions with equal states one representative
//! suffices, so tables store canonical states, optionally with one witness
//! edge set each.
//!
//! This module implements the five node transitions, duplicate elimination,
//! and the plain solver; the rank-based solvers reuse the same pipeline
//! with a pruning hook (see [`crate::rank`]).

use std::rc::Rc;
use std::time::Instant;

use smallvec::SmallVec;
use thiserror::Error;

use crate::graph::Graph;
use crate::nice::{NiceDecomposition, NodeKind};

/// Hard cap on bag size: degrees pack into 2 bits per vertex of a `u64`.
pub const MAX_BAG: usize = 32;

#[derive(Debug, Error)]
pub enum DpError {
    #[error("pairing requires an even ground set, got {0}")]
    OddGroundSet(usize),
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("timed out")]
    Timeout,
    #[error("bag of size {0} exceeds the supported maximum {MAX_BAG}")]
    BagTooLarge(usize),
    #[error("decomposition does not match the graph: {0}")]
    DecompositionMismatch(String),
    #[error("pairing basis unavailable: {0}")]
    Basis(String),
    #[error("field of size 2^{p} is too small for {n} vertices")]
    FieldTooSmall { p: u32, n: u32 },
}

/// Degrees of the bag vertices, packed 2 bits per bag position.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Bucket(u64);

impl Bucket {
    pub fn empty() -> Self {
        Bucket(0)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn get(self, slot: usize) -> u8 {
        ((self.0 >> (2 * slot)) & 3) as u8
    }

    #[must_use]
    pub fn set(self, slot: usize, deg: u8) -> Self {
        debug_assert!(deg <= 2);
        Bucket((self.0 & !(3u64 << (2 * slot))) | ((deg as u64) << (2 * slot)))
    }

    /// Inserts a fresh degree-0 slot, shifting higher slots up.
    #[must_use]
    pub fn insert_slot(self, slot: usize) -> Self {
        let v = self.0 as u128;
        let low = v & ((1u128 << (2 * slot)) - 1);
        let high = (v >> (2 * slot)) << (2 * slot + 2);
        Bucket((low | high) as u64)
    }

    /// Removes a slot, shifting higher slots down.
    #[must_use]
    pub fn remove_slot(self, slot: usize) -> Self {
        let v = self.0 as u128;
        let low = v & ((1u128 << (2 * slot)) - 1);
        let high = (v >> (2 * slot + 2)) << (2 * slot);
        Bucket((low | high) as u64)
    }

    /// Bag positions with degree exactly 1, ascending.
    pub fn deg1_slots(self, bag_size: usize) -> SmallVec<[u8; 16]> {
        (0..bag_size)
            .filter(|&s| self.get(s) == 1)
            .map(|s| s as u8)
            .collect()
    }
}

/// A perfect matching on `{0, .., l-1}`, stored as the partner index of
/// every element. This canonical form makes equal matchings bitwise equal,
/// so tables can be deduplicated by sorting.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Pairing {
    partner: SmallVec<[u8; 16]>,
}

impl Pairing {
    pub fn empty() -> Self {
        Pairing::default()
    }

    /// Ground set size (always even).
    pub fn size(&self) -> usize {
        self.partner.len()
    }

    pub fn partner_of(&self, i: usize) -> usize {
        self.partner[i] as usize
    }

    pub fn from_pairs(l: usize, pairs: &[(usize, usize)]) -> Result<Self, DpError> {
        if !l.is_multiple_of(2) {
            return Err(DpError::OddGroundSet(l));
        }
        assert_eq!(pairs.len() * 2, l, "pairs must cover the ground set");
        let mut partner = smallvec::smallvec![u8::MAX; l];
        for &(a, b) in pairs {
            assert!(a != b && a < l && b < l && partner[a] == u8::MAX && partner[b] == u8::MAX);
            partner[a] = b as u8;
            partner[b] = a as u8;
        }
        Ok(Pairing { partner })
    }

    fn from_partner(partner: SmallVec<[u8; 16]>) -> Self {
        debug_assert!(partner
            .iter()
            .enumerate()
            .all(|(i, &p)| (p as usize) < partner.len()
                && p as usize != i
                && partner[p as usize] as usize == i));
        Pairing { partner }
    }

    /// Pairs as `(min, max)` sorted by the smaller element.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.size())
            .filter(|&i| i < self.partner_of(i))
            .map(|i| (i, self.partner_of(i)))
            .collect()
    }
}

/// Number of perfect matchings of an `l`-element set: `(l-1)!!`.
pub fn count_pairings(l: usize) -> Result<u128, DpError> {
    if !l.is_multiple_of(2) {
        return Err(DpError::OddGroundSet(l));
    }
    Ok((1..l as u128).step_by(2).product())
}

/// All perfect matchings of `{0, .., l-1}` in a fixed deterministic order:
/// the smallest unmatched element is paired with each larger unmatched
/// element in ascending order, recursively.
pub fn all_pairings(l: usize) -> Vec<Pairing> {
    assert!(l.is_multiple_of(2), "ground set must be even");
    let mut out = Vec::new();
    let mut partner: SmallVec<[u8; 16]> = smallvec::smallvec![u8::MAX; l];
    fn rec(l: usize, partner: &mut SmallVec<[u8; 16]>, out: &mut Vec<Pairing>) {
        let Some(first) = (0..l).find(|&i| partner[i] == u8::MAX) else {
            out.push(Pairing {
                partner: partner.clone(),
            });
            return;
        };
        for second in first + 1..l {
            if partner[second] == u8::MAX {
                partner[first] = second as u8;
                partner[second] = first as u8;
                rec(l, partner, out);
                partner[first] = u8::MAX;
                partner[second] = u8::MAX;
            }
        }
    }
    rec(l, &mut partner, &mut out);
    out
}

/// DP state: degrees of the bag vertices plus the endpoint pairing over the
/// degree-1 positions (in bag order).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct State {
    pub bucket: Bucket,
    pub pairing: Pairing,
}

impl State {
    pub fn initial() -> Self {
        State {
            bucket: Bucket::empty(),
            pairing: Pairing::empty(),
        }
    }
}

/// Persistent edge-set node for witness tracking; prepend and union are
/// O(1), materializing is linear in the stored edges.
#[derive(Debug)]
pub enum WitnessTree {
    Empty,
    Edge((u32, u32), Rc<WitnessTree>),
    Union(Rc<WitnessTree>, Rc<WitnessTree>),
}

pub type Witness = Rc<WitnessTree>;

pub fn witness_edges(w: &Witness) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    let mut stack: Vec<&WitnessTree> = vec![w.as_ref()];
    while let Some(node) = stack.pop() {
        match node {
            WitnessTree::Empty => {}
            WitnessTree::Edge(e, rest) => {
                out.push(*e);
                stack.push(rest.as_ref());
            }
            WitnessTree::Union(a, b) => {
                stack.push(a.as_ref());
                stack.push(b.as_ref());
            }
        }
    }
    out
}

/// A completed Hamiltonian cycle discovered during the sweep.
#[derive(Debug, Clone)]
pub enum Found {
    /// Decision mode: existence only.
    Decision,
    /// Witness mode: the cycle's edge set.
    Cycle(Vec<(u32, u32)>),
}

/// Memoization table of one decomposition node.
#[derive(Debug)]
pub struct PartialTable {
    /// Sorted bag vertices the states refer to.
    pub bag: Vec<u32>,
    /// Canonically sorted, duplicate-free states.
    pub states: Vec<State>,
    /// One witness per state (same order) in witness mode.
    pub witnesses: Option<Vec<Witness>>,
    /// Set when a transition closed a spanning cycle.
    pub found: Option<Found>,
}

impl PartialTable {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Table of the leaf node: the empty state with an empty witness.
pub fn transition_leaf(witness_mode: bool) -> PartialTable {
    PartialTable {
        bag: Vec::new(),
        states: vec![State::initial()],
        witnesses: witness_mode.then(|| vec![Rc::new(WitnessTree::Empty)]),
        found: None,
    }
}

/// Introduce vertex `v` with degree 0; states and witnesses are otherwise
/// unchanged, so the table size is preserved.
pub fn transition_introduce_vertex(tbl: &PartialTable, v: u32) -> PartialTable {
    let slot = tbl
        .bag
        .binary_search(&v)
        .expect_err("introduced vertex must not be in the bag");
    let mut bag = tbl.bag.clone();
    bag.insert(slot, v);
    let states = tbl
        .states
        .iter()
        .map(|s| State {
            bucket: s.bucket.insert_slot(slot),
            pairing: s.pairing.clone(),
        })
        .collect();
    PartialTable {
        bag,
        states,
        witnesses: tbl.witnesses.clone(),
        found: None,
    }
}

/// Expanded pairing: partner slot per bag slot (`None` off the matching).
fn slot_partners(state: &State, bag_size: usize) -> SmallVec<[Option<u8>; 32]> {
    let deg1 = state.bucket.deg1_slots(bag_size);
    let mut out: SmallVec<[Option<u8>; 32]> = smallvec::smallvec![None; bag_size];
    for (rank, &slot) in deg1.iter().enumerate() {
        out[slot as usize] = Some(deg1[state.pairing.partner_of(rank)]);
    }
    out
}

/// Re-canonicalizes a slot-partner map into a rank-based pairing.
fn pairing_from_slots(bucket: Bucket, slots: &[Option<u8>], bag_size: usize) -> Pairing {
    let deg1 = bucket.deg1_slots(bag_size);
    let rank_of = |slot: u8| deg1.binary_search(&slot).expect("degree-1 slot") as u8;
    let partner: SmallVec<[u8; 16]> = deg1
        .iter()
        .map(|&s| rank_of(slots[s as usize].expect("degree-1 slot has a partner")))
        .collect();
    Pairing::from_partner(partner)
}

/// Introduce edge `{u, v}`: every state survives with the edge skipped, and
/// every state with both endpoint degrees below 2 additionally spawns the
/// state with the edge taken. Taking an edge between endpoints that are
/// already paired with each other closes a cycle, which is forbidden unless
/// it completes a spanning Hamiltonian cycle (pairing exactly `{{u, v}}`,
/// all other bag degrees 2, and the subtree covering all `n` vertices) — in
/// that case the table's `found` flag is set.
pub fn transition_introduce_edge(
    tbl: &PartialTable,
    u: u32,
    v: u32,
    n: u32,
    subtree_count: u32,
) -> PartialTable {
    let pu = tbl.bag.binary_search(&u).expect("endpoint in bag");
    let pv = tbl.bag.binary_search(&v).expect("endpoint in bag");
    let k = tbl.bag.len();
    let witness_mode = tbl.witnesses.is_some();
    let mut out = PartialTable {
        bag: tbl.bag.clone(),
        states: Vec::with_capacity(tbl.states.len() * 2),
        witnesses: witness_mode.then(|| Vec::with_capacity(tbl.states.len() * 2)),
        found: None,
    };
    let edge = (u.min(v), u.max(v));
    for (idx, s) in tbl.states.iter().enumerate() {
        let witness = tbl.witnesses.as_ref().map(|w| &w[idx]);
        // Skip branch.
        out.states.push(s.clone());
        if let Some(ws) = out.witnesses.as_mut() {
            ws.push(Rc::clone(witness.unwrap()));
        }
        // Take branch.
        let (du, dv) = (s.bucket.get(pu), s.bucket.get(pv));
        if du == 2 || dv == 2 {
            continue;
        }
        let mut partners = slot_partners(s, k);
        let extend_witness = || -> Option<Witness> {
            witness.map(|w| Rc::new(WitnessTree::Edge(edge, Rc::clone(w))))
        };
        match (du, dv) {
            (0, 0) => {
                partners[pu] = Some(pv as u8);
                partners[pv] = Some(pu as u8);
            }
            (1, 0) => {
                let q = partners[pu].unwrap();
                partners[q as usize] = Some(pv as u8);
                partners[pv] = Some(q);
                partners[pu] = None;
            }
            (0, 1) => {
                let q = partners[pv].unwrap();
                partners[q as usize] = Some(pu as u8);
                partners[pu] = Some(q);
                partners[pv] = None;
            }
            (1, 1) => {
                if partners[pu] == Some(pv as u8) {
                    // Closing the path u .. v into a cycle.
                    let spanning = subtree_count == n
                        && s.pairing.size() == 2
                        && (0..k).all(|slot| {
                            slot == pu || slot == pv || s.bucket.get(slot) == 2
                        });
                    if spanning && out.found.is_none() {
                        out.found = Some(match extend_witness() {
                            Some(w) => Found::Cycle(witness_edges(&w)),
                            None => Found::Decision,
                        });
                    }
                    continue;
                }
                let qu = partners[pu].unwrap();
                let qv = partners[pv].unwrap();
                partners[qu as usize] = Some(qv);
                partners[qv as usize] = Some(qu);
                partners[pu] = None;
                partners[pv] = None;
            }
            _ => unreachable!(),
        }
        let bucket = s.bucket.set(pu, du + 1).set(pv, dv + 1);
        let pairing = pairing_from_slots(bucket, &partners, k);
        out.states.push(State { bucket, pairing });
        if let Some(ws) = out.witnesses.as_mut() {
            ws.push(extend_witness().unwrap());
        }
    }
    dedupe(&mut out);
    out
}

/// Forget vertex `v`: only states in which `v` has degree 2 survive (every
/// forgotten vertex must be fully visited), and `v`'s slot is removed.
pub fn transition_forget(tbl: &PartialTable, v: u32) -> PartialTable {
    let slot = tbl.bag.binary_search(&v).expect("forgotten vertex in bag");
    let mut bag = tbl.bag.clone();
    bag.remove(slot);
    let witness_mode = tbl.witnesses.is_some();
    let mut out = PartialTable {
        bag,
        states: Vec::with_capacity(tbl.states.len()),
        witnesses: witness_mode.then(|| Vec::with_capacity(tbl.states.len())),
        found: None,
    };
    for (idx, s) in tbl.states.iter().enumerate() {
        if s.bucket.get(slot) != 2 {
            continue;
        }
        out.states.push(State {
            bucket: s.bucket.remove_slot(slot),
            pairing: s.pairing.clone(),
        });
        if let Some(ws) = out.witnesses.as_mut() {
            ws.push(Rc::clone(&tbl.witnesses.as_ref().unwrap()[idx]));
        }
    }
    dedupe(&mut out);
    out
}

/// Result of merging two pairings at a join node.
enum PairingMerge {
    /// The union contains a premature closed cycle.
    Invalid,
    /// Alternating paths re-paired into a new matching.
    Merged(SmallVec<[Option<u8>; 32]>),
    /// The union is one single cycle covering every matched slot.
    SingleCycle,
}

fn merge_pairings(
    a: &SmallVec<[Option<u8>; 32]>,
    b: &SmallVec<[Option<u8>; 32]>,
    bag_size: usize,
) -> PairingMerge {
    let mut visited = [false; MAX_BAG];
    let mut merged: SmallVec<[Option<u8>; 32]> = smallvec::smallvec![None; bag_size];
    let mut matched_slots = 0usize;
    let mut endpoints: SmallVec<[u8; 16]> = SmallVec::new();
    for s in 0..bag_size {
        let in_a = a[s].is_some();
        let in_b = b[s].is_some();
        if in_a || in_b {
            matched_slots += 1;
        }
        if in_a != in_b {
            endpoints.push(s as u8);
        }
    }
    let mut covered = 0usize;
    for &e in &endpoints {
        if visited[e as usize] {
            continue;
        }
        visited[e as usize] = true;
        covered += 1;
        let mut cur = e as usize;
        let mut via_a = a[cur].is_some();
        loop {
            let nxt = if via_a { a[cur] } else { b[cur] }.unwrap() as usize;
            if !visited[nxt] {
                visited[nxt] = true;
                covered += 1;
            }
            let continues = if via_a { b[nxt] } else { a[nxt] };
            if continues.is_none() {
                // Reached the other endpoint of the alternating path.
                merged[e as usize] = Some(nxt as u8);
                merged[nxt] = Some(e);
                break;
            }
            cur = nxt;
            via_a = !via_a;
        }
    }
    if covered == matched_slots {
        return PairingMerge::Merged(merged);
    }
    // Leftover slots lie on closed alternating cycles.
    if endpoints.is_empty() {
        // Pure cycles; spanning only if there is exactly one.
        let start = (0..bag_size).find(|&s| a[s].is_some()).unwrap();
        let mut cur = start;
        let mut via_a = true;
        let mut cycle_slots = 0usize;
        loop {
            let nxt = if via_a { a[cur] } else { b[cur] }.unwrap() as usize;
            cycle_slots += 1;
            cur = nxt;
            via_a = !via_a;
            if cur == start && via_a {
                break;
            }
        }
        if cycle_slots == matched_slots {
            return PairingMerge::SingleCycle;
        }
    }
    PairingMerge::Invalid
}

/// Join two child tables over the same bag: combine state pairs whose
/// degree sums stay at most 2 per vertex, re-pairing endpoints along the
/// alternating paths of the two matchings. A closed alternating cycle
/// invalidates the combination unless it completes a spanning Hamiltonian
/// cycle (single cycle, all merged degrees 2, subtree covering all `n`
/// vertices), which sets `found`.
pub fn transition_join(
    a: &PartialTable,
    b: &PartialTable,
    n: u32,
    subtree_count: u32,
) -> PartialTable {
    assert_eq!(a.bag, b.bag, "join children must share the bag");
    let k = a.bag.len();
    let witness_mode = a.witnesses.is_some();
    let mut out = PartialTable {
        bag: a.bag.clone(),
        states: Vec::new(),
        witnesses: witness_mode.then(Vec::new),
        found: None,
    };
    // Group consecutive states by bucket (tables are bucket-sorted) and
    // only match groups whose degree sums fit.
    let groups_a = bucket_groups(&a.states);
    let groups_b = bucket_groups(&b.states);
    for &(bucket_a, lo_a, hi_a) in &groups_a {
        for &(bucket_b, lo_b, hi_b) in &groups_b {
            let Some(merged_bucket) = add_buckets(bucket_a, bucket_b, k) else {
                continue;
            };
            for ia in lo_a..hi_a {
                let sa = &a.states[ia];
                let pa = slot_partners(sa, k);
                for ib in lo_b..hi_b {
                    let sb = &b.states[ib];
                    let pb = slot_partners(sb, k);
                    match merge_pairings(&pa, &pb, k) {
                        PairingMerge::Invalid => {}
                        PairingMerge::SingleCycle => {
                            let spanning = subtree_count == n
                                && (0..k).all(|s| merged_bucket.get(s) == 2);
                            if spanning && out.found.is_none() {
                                out.found = Some(if witness_mode {
                                    let w = Rc::new(WitnessTree::Union(
                                        Rc::clone(&a.witnesses.as_ref().unwrap()[ia]),
                                        Rc::clone(&b.witnesses.as_ref().unwrap()[ib]),
                                    ));
                                    Found::Cycle(witness_edges(&w))
                                } else {
                                    Found::Decision
                                });
                            }
                        }
                        PairingMerge::Merged(slots) => {
                            let pairing = pairing_from_slots(merged_bucket, &slots, k);
                            out.states.push(State {
                                bucket: merged_bucket,
                                pairing,
                            });
                            if let Some(ws) = out.witnesses.as_mut() {
                                ws.push(Rc::new(WitnessTree::Union(
                                    Rc::clone(&a.witnesses.as_ref().unwrap()[ia]),
                                    Rc::clone(&b.witnesses.as_ref().unwrap()[ib]),
                                )));
                            }
                        }
                    }
                }
            }
        }
    }
    dedupe(&mut out);
    out
}

fn bucket_groups(states: &[State]) -> Vec<(Bucket, usize, usize)> {
    let mut groups = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let bucket = states[i].bucket;
        let mut j = i + 1;
        while j < states.len() && states[j].bucket == bucket {
            j += 1;
        }
        groups.push((bucket, i, j));
        i = j;
    }
    groups
}

fn add_buckets(a: Bucket, b: Bucket, bag_size: usize) -> Option<Bucket> {
    let mut out = Bucket::empty();
    for s in 0..bag_size {
        let sum = a.get(s) + b.get(s);
        if sum > 2 {
            return None;
        }
        out = out.set(s, sum);
    }
    Some(out)
}

/// Sorts states canonically and removes duplicates, keeping the first
/// witness per state in sort order. Idempotent.
pub fn dedupe(tbl: &mut PartialTable) {
    let n = tbl.states.len();
    if n <= 1 {
        return;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| tbl.states[i].cmp(&tbl.states[j]));
    let mut states = Vec::with_capacity(n);
    let mut witnesses = tbl.witnesses.as_ref().map(|_| Vec::with_capacity(n));
    for &idx in &order {
        if states.last() == Some(&tbl.states[idx]) {
            continue;
        }
        states.push(tbl.states[idx].clone());
        if let Some(ws) = witnesses.as_mut() {
            ws.push(Rc::clone(&tbl.witnesses.as_ref().unwrap()[idx]));
        }
    }
    tbl.states = states;
    tbl.witnesses = witnesses;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Decision,
    Witness,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    /// Hamiltonian; carries the cycle edge set in witness mode.
    Yes(Option<Vec<(u32, u32)>>),
    No,
}

impl SolveOutcome {
    pub fn is_yes(&self) -> bool {
        matches!(self, SolveOutcome::Yes(_))
    }
}

#[derive(Debug, Default, Clone)]
pub struct SolveStats {
    /// Largest state count over all node tables.
    pub peak_table: usize,
    pub nodes_processed: usize,
    /// Gaussian eliminations actually triggered (rank-based solvers).
    pub reductions: usize,
    /// States removed by triggered reductions.
    pub pruned_states: usize,
}

/// Pruning hook applied to every freshly computed table; used by the
/// rank-based solvers.
pub(crate) type ReduceHook<'a> = dyn FnMut(&mut PartialTable, &mut SolveStats) -> Result<(), SolveError> + 'a;

/// The plain dynamic program: no pruning beyond duplicate elimination.
pub fn solve_naive(
    g: &Graph,
    nd: &NiceDecomposition,
    mode: Mode,
    deadline: Option<Instant>,
    stats: &mut SolveStats,
) -> Result<SolveOutcome, SolveError> {
    run_dp(g, nd, mode, None, deadline, stats)
}

pub(crate) fn run_dp(
    g: &Graph,
    nd: &NiceDecomposition,
    mode: Mode,
    mut reduce: Option<&mut ReduceHook>,
    deadline: Option<Instant>,
    stats: &mut SolveStats,
) -> Result<SolveOutcome, SolveError> {
    // A simple graph needs at least 3 vertices for a cycle, and a
    // disconnected graph has none.
    if g.vertex_count() < 3 || !g.is_connected() {
        return Ok(SolveOutcome::No);
    }
    check_decomposition(g, nd)?;
    let witness_mode = mode == Mode::Witness;
    let mut stack: Vec<PartialTable> = Vec::new();
    for node in nd.nodes() {
        if let Some(deadline) = deadline {
            if Instant::now() >= deadline {
                return Err(SolveError::Timeout);
            }
        }
        let mut tbl = match node.kind {
            NodeKind::Leaf => transition_leaf(witness_mode),
            NodeKind::IntroduceVertex(v) => {
                let child = stack.pop().expect("post-order");
                transition_introduce_vertex(&child, v)
            }
            NodeKind::IntroduceEdge(u, v) => {
                let child = stack.pop().expect("post-order");
                if g.has_edge(u, v) {
                    transition_introduce_edge(
                        &child,
                        u,
                        v,
                        g.vertex_count(),
                        node.subtree_vertices,
                    )
                } else {
                    // The decomposition may cover a supergraph (restricted
                    // instances during self-reducibility): absent edges are
                    // silently skippable.
                    child
                }
            }
            NodeKind::ForgetVertex(v) => {
                let child = stack.pop().expect("post-order");
                transition_forget(&child, v)
            }
            NodeKind::Join => {
                let right = stack.pop().expect("post-order");
                let left = stack.pop().expect("post-order");
                transition_join(&left, &right, g.vertex_count(), node.subtree_vertices)
            }
        };
        stats.nodes_processed += 1;
        if let Some(found) = tbl.found.take() {
            return Ok(SolveOutcome::Yes(match found {
                Found::Decision => None,
                Found::Cycle(edges) => Some(edges),
            }));
        }
        if let Some(hook) = reduce.as_mut() {
            hook(&mut tbl, stats)?;
        }
        stats.peak_table = stats.peak_table.max(tbl.len());
        stack.push(tbl);
    }
    debug_assert_eq!(stack.len(), 1);
    Ok(SolveOutcome::No)
}

fn check_decomposition(g: &Graph, nd: &NiceDecomposition) -> Result<(), SolveError> {
    if nd.graph_vertex_count() != g.vertex_count() {
        return Err(SolveError::DecompositionMismatch(format!(
            "decomposition covers {} vertices, graph has {}",
            nd.graph_vertex_count(),
            g.vertex_count()
        )));
    }
    if nd.width() as usize + 1 > MAX_BAG {
        return Err(SolveError::BagTooLarge(nd.width() as usize + 1));
    }
    // Every edge of the (possibly restricted) graph must be introduced
    // exactly once; extra introduce-edge nodes for absent edges are fine.
    let mut count: std::collections::HashMap<(u32, u32), u32> = g
        .edges()
        .iter()
        .map(|&e| (e, 0))
        .collect();
    for node in nd.nodes() {
        if let NodeKind::IntroduceEdge(u, v) = node.kind {
            if let Some(c) = count.get_mut(&(u.min(v), u.max(v))) {
                *c += 1;
            }
        }
    }
    if let Some((&(u, v), _)) = count.iter().find(|&(_, &c)| c != 1) {
        return Err(SolveError::DecompositionMismatch(format!(
            "edge {{{u}, {v}}} not introduced exactly once"
        )));
    }
    Ok(())
}

/// Checks that every witness of a table is a family of vertex-disjoint
/// paths whose bag degrees and endpoint pairing match the state exactly,
/// and that it covers all `subtree_count` vertices of the node's subtree.
/// Diagnostic; quadratic in the witness size.
pub fn validate_witnesses(tbl: &PartialTable, subtree_count: u32) -> Result<(), String> {
    let Some(witnesses) = &tbl.witnesses else {
        return Err("table has no witnesses".into());
    };
    for (state, witness) in tbl.states.iter().zip(witnesses) {
        let edges = witness_edges(witness);
        let mut deg: std::collections::HashMap<u32, u32> = Default::default();
        let mut adj: std::collections::HashMap<u32, Vec<u32>> = Default::default();
        for &(u, v) in &edges {
            *deg.entry(u).or_default() += 1;
            *deg.entry(v).or_default() += 1;
            adj.entry(u).or_default().push(v);
            adj.entry(v).or_default().push(u);
        }
        // Bag degrees match the bucket; everything off the bag is interior.
        for (slot, &v) in tbl.bag.iter().enumerate() {
            if deg.get(&v).copied().unwrap_or(0) != state.bucket.get(slot) as u32 {
                return Err(format!("vertex {v}: witness degree differs from bucket"));
            }
        }
        for (&v, &d) in &deg {
            if tbl.bag.binary_search(&v).is_err() && d != 2 {
                return Err(format!("off-bag vertex {v} has degree {d}"));
            }
        }
        let touched = deg.len() as u32;
        let idle_bag = tbl
            .bag
            .iter()
            .enumerate()
            .filter(|&(slot, _)| state.bucket.get(slot) == 0)
            .count() as u32;
        if touched + idle_bag != subtree_count {
            return Err(format!(
                "witness touches {touched} vertices, expected {}",
                subtree_count - idle_bag
            ));
        }
        // Walk each path from its endpoints; the pairing must match.
        let deg1 = state.bucket.deg1_slots(tbl.bag.len());
        let mut visited: std::collections::HashSet<u32> = Default::default();
        for (rank, &slot) in deg1.iter().enumerate() {
            let start = tbl.bag[slot as usize];
            if visited.contains(&start) {
                continue;
            }
            let mut prev = start;
            let mut cur = adj[&start][0];
            visited.insert(start);
            // Degree-2 vertices (bag or not) are path-interior.
            while deg[&cur] == 2 {
                visited.insert(cur);
                let next = *adj[&cur].iter().find(|&&w| w != prev).unwrap();
                prev = cur;
                cur = next;
            }
            visited.insert(cur);
            let partner_rank = state.pairing.partner_of(rank);
            let expected_end = tbl.bag[deg1[partner_rank] as usize];
            if cur != expected_end {
                return Err(format!(
                    "path from {start} ends at {cur}, pairing says {expected_end}"
                ));
            }
        }
        if visited.len() != deg.len() {
            return Err("witness contains a closed cycle component".into());
        }
    }
    Ok(())
}

/// Runs the sweep collecting every node table, without short-circuiting on
/// completion. Diagnostic helper for cross-checking tables against
/// exhaustive enumeration.
pub fn collect_tables(g: &Graph, nd: &NiceDecomposition) -> Result<Vec<PartialTable>, SolveError> {
    collect_tables_mode(g, nd, false)
}

/// [`collect_tables`] with optional witness tracking.
pub fn collect_tables_mode(
    g: &Graph,
    nd: &NiceDecomposition,
    witness_mode: bool,
) -> Result<Vec<PartialTable>, SolveError> {
    check_decomposition(g, nd)?;
    let mut all: Vec<PartialTable> = Vec::with_capacity(nd.node_count());
    let mut stack: Vec<usize> = Vec::new();
    for node in nd.nodes() {
        let tbl = match node.kind {
            NodeKind::Leaf => transition_leaf(witness_mode),
            NodeKind::IntroduceVertex(v) => {
                transition_introduce_vertex(&all[stack.pop().unwrap()], v)
            }
            NodeKind::IntroduceEdge(u, v) => {
                let child = &all[stack.pop().unwrap()];
                let mut t = transition_introduce_edge(
                    child,
                    u,
                    v,
                    g.vertex_count(),
                    node.subtree_vertices,
                );
                t.found = None;
                t
            }
            NodeKind::ForgetVertex(v) => transition_forget(&all[stack.pop().unwrap()], v),
            NodeKind::Join => {
                let right = stack.pop().unwrap();
                let left = stack.pop().unwrap();
                let mut t = transition_join(
                    &all[left],
                    &all[right],
                    g.vertex_count(),
                    node.subtree_vertices,
                );
                t.found = None;
                t
            }
        };
        all.push(tbl);
        stack.push(all.len() - 1);
    }
    Ok(all)
}
