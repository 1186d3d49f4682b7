//! Rank-based pruning of pairing families.
//!
//! For a fixed bucket, only a small subfamily of the pairings needs to be
//! kept: assign each pairing a 0-1 vector such that "pairing E completes
//! matching M into a single cycle" is linear over F₂ in the vector of E;
//! then any row basis of the vectors preserves every possible completion.
//! Two constructions are implemented:
//!
//! * *cut vectors* of length 2^(ℓ-1): one coordinate per bipartition of the
//!   ground set with element 0 fixed left, entry 1 iff no pair crosses the
//!   cut. Keeps at most 2^(ℓ-1) pairings per bucket.
//! * *improved vectors* of length 2^(ℓ/2-1): coordinates indexed by a fixed
//!   basis family of matchings, entry i = single-cycle(E, basisᵢ). The
//!   basis is derived once per ℓ by row-reducing the full single-cycle
//!   matrix over all (ℓ-1)!! matchings and is cached. Keeps at most
//!   2^(ℓ/2-1) pairings per bucket.
//!
//! Pruning runs through Gaussian elimination over F₂ after each node's
//! table is computed, gated by thresholds so that cheap nodes skip it.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use crate::dp::{
    all_pairings, run_dp, Mode, Pairing, PartialTable, ReduceHook, SolveError,
    SolveOutcome, SolveStats, State,
};
use crate::graph::Graph;
use crate::nice::NiceDecomposition;

/// Largest ℓ for which the improved basis may be derived by brute force
/// ((ℓ-1)!! matchings; 135135 at ℓ = 14).
pub const BASIS_MAX_L: usize = 14;

/// Memory guard for cut-vector elimination: skip pruning when the matrix
/// would exceed this many bits (pruning is optional for correctness).
const CUT_MATRIX_MAX_BITS: u128 = 1 << 33;

/// A 0-1 matrix with rows tagged by their original state index.
#[derive(Debug, Clone)]
pub struct F2Matrix {
    pub width: usize,
    pub rows: Vec<Vec<u64>>,
    pub row_tags: Vec<usize>,
}

impl F2Matrix {
    pub fn new(width: usize) -> Self {
        F2Matrix {
            width,
            rows: Vec::new(),
            row_tags: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<u64>, tag: usize) {
        debug_assert_eq!(row.len(), self.width.div_ceil(64));
        self.rows.push(row);
        self.row_tags.push(tag);
    }
}

fn highest_bit(row: &[u64]) -> Option<usize> {
    row.iter()
        .enumerate()
        .rev()
        .find(|(_, &w)| w != 0)
        .map(|(i, &w)| i * 64 + 63 - w.leading_zeros() as usize)
}

fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

/// Selects a maximal linearly independent row subset, first-pivot-wins in
/// input order, and returns the tags of the kept rows (in input order).
pub fn gaussian_eliminate(m: &F2Matrix) -> Vec<usize> {
    let mut echelon: HashMap<usize, Vec<u64>> = HashMap::new();
    let mut kept = Vec::new();
    for (row, &tag) in m.rows.iter().zip(&m.row_tags) {
        let mut r = row.clone();
        while let Some(p) = highest_bit(&r) {
            match echelon.get(&p) {
                Some(b) => xor_into(&mut r, b),
                None => break,
            }
        }
        if let Some(p) = highest_bit(&r) {
            echelon.insert(p, r);
            kept.push(tag);
        }
    }
    kept
}

/// Rank of an F₂ matrix; a second, independent elimination used as the
/// testing oracle for `gaussian_eliminate`.
pub fn f2_rank(rows: &[Vec<u64>], width: usize) -> usize {
    let mut work: Vec<Vec<u64>> = rows.to_vec();
    let mut rank = 0;
    let mut row = 0;
    for col in 0..width {
        let (w, b) = (col / 64, col % 64);
        let Some(pivot) = (row..work.len()).find(|&r| work[r][w] >> b & 1 == 1) else {
            continue;
        };
        work.swap(row, pivot);
        for r in 0..work.len() {
            if r != row && work[r][w] >> b & 1 == 1 {
                let (a, bpart) = if r < row {
                    let (lo, hi) = work.split_at_mut(row);
                    (&mut lo[r], &hi[0])
                } else {
                    let (lo, hi) = work.split_at_mut(r);
                    (&mut hi[0], &lo[row])
                };
                xor_into(a, bpart);
            }
        }
        rank += 1;
        row += 1;
        if row == work.len() {
            break;
        }
    }
    rank
}

/// True iff the union multigraph of two perfect matchings on the same
/// ground set is one single closed cycle covering it.
pub fn is_single_cycle(a: &Pairing, b: &Pairing) -> bool {
    let l = a.size();
    assert_eq!(l, b.size(), "matchings must share the ground set");
    if l == 0 {
        return false;
    }
    // Walk 0 →(a)→ partner →(b)→ ... until back at 0; a single cycle
    // visits all l elements in l steps.
    let mut cur = 0usize;
    let mut steps = 0usize;
    loop {
        cur = a.partner_of(cur);
        steps += 1;
        if cur == 0 {
            break;
        }
        cur = b.partner_of(cur);
        steps += 1;
        if cur == 0 {
            break;
        }
        if steps > l {
            break;
        }
    }
    steps == l
}

/// The cut vector of a pairing on `{0, .., l-1}`: one coordinate per
/// bipartition with element 0 on the left (index bit i-1 = side of element
/// i), entry 1 iff no pair crosses. Exactly the 2^(l/2-1) cuts refining
/// the pairs are set.
pub fn cut_vector(e: &Pairing) -> Vec<u64> {
    let l = e.size();
    assert!(l >= 2 && l.is_multiple_of(2));
    let len_bits = 1usize << (l - 1);
    let mut out = vec![0u64; len_bits.div_ceil(64)];
    let pairs = e.pairs();
    debug_assert_eq!(pairs[0].0, 0, "pairs are sorted by smaller element");
    // Assign a side to every pair; the pair containing element 0 stays left.
    for sides in 0u64..(1 << (pairs.len() - 1)) {
        let mut cut = 0usize;
        for (j, &(x, y)) in pairs.iter().enumerate().skip(1) {
            if sides >> (j - 1) & 1 == 1 {
                cut |= 1 << (x - 1);
                cut |= 1 << (y - 1);
            }
        }
        out[cut / 64] |= 1 << (cut % 64);
    }
    out
}

/// A family of matchings whose single-cycle rows form a row basis of the
/// full matchings-connectivity matrix; vectors against it have length
/// 2^(l/2-1).
#[derive(Debug, Clone)]
pub struct BasisFamily {
    pub l: usize,
    pub matchings: Vec<Pairing>,
}

impl BasisFamily {
    pub fn expected_size(l: usize) -> usize {
        1 << (l / 2 - 1)
    }
}

/// Derives (and caches) the basis family for ground-set size `l` by greedy
/// row reduction of the single-cycle matrix over all matchings,
/// first-matching-wins in enumeration order. Deterministic.
pub fn basis_for(l: usize) -> Result<Arc<BasisFamily>, SolveError> {
    if !l.is_multiple_of(2) || l == 0 {
        return Err(SolveError::Basis(format!("ground set size {l} not even and positive")));
    }
    if l > BASIS_MAX_L {
        return Err(SolveError::Basis(format!(
            "ground set size {l} exceeds the derivation cap {BASIS_MAX_L}"
        )));
    }
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<BasisFamily>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().unwrap().get(&l) {
        return Ok(Arc::clone(hit));
    }
    let family = Arc::new(derive_basis(l));
    cache.lock().unwrap().insert(l, Arc::clone(&family));
    Ok(family)
}

fn derive_basis(l: usize) -> BasisFamily {
    let all = all_pairings(l);
    let target = BasisFamily::expected_size(l);
    let words = all.len().div_ceil(64);
    let mut echelon: HashMap<usize, Vec<u64>> = HashMap::new();
    let mut matchings = Vec::with_capacity(target);
    for e in &all {
        let mut row = vec![0u64; words];
        for (j, m) in all.iter().enumerate() {
            if is_single_cycle(e, m) {
                row[j / 64] |= 1 << (j % 64);
            }
        }
        while let Some(p) = highest_bit(&row) {
            match echelon.get(&p) {
                Some(b) => xor_into(&mut row, b),
                None => break,
            }
        }
        if let Some(p) = highest_bit(&row) {
            echelon.insert(p, row);
            matchings.push(e.clone());
            if matchings.len() == target {
                break;
            }
        }
    }
    assert_eq!(
        matchings.len(),
        target,
        "single-cycle matrix rank must be 2^(l/2-1)"
    );
    BasisFamily { l, matchings }
}

/// The improved vector of a pairing: entry i = single-cycle(E, basisᵢ).
/// Never the zero vector (every matching closes a cycle with some basis
/// matching).
pub fn improved_vector(e: &Pairing, basis: &BasisFamily) -> Vec<u64> {
    assert_eq!(e.size(), basis.l, "ground sets must match");
    let mut out = vec![0u64; basis.matchings.len().div_ceil(64)];
    for (i, m) in basis.matchings.iter().enumerate() {
        if is_single_cycle(e, m) {
            out[i / 64] |= 1 << (i % 64);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankVariant {
    /// Cut vectors; keeps at most 2^(ℓ-1) pairings per bucket.
    Cut4t,
    /// Improved basis vectors; keeps at most 2^(ℓ/2-1) pairings per bucket.
    Improved,
}

impl RankVariant {
    pub fn bound(self, l: usize) -> usize {
        match self {
            RankVariant::Cut4t => 1 << (l - 1),
            RankVariant::Improved => 1 << (l / 2 - 1),
        }
    }
}

/// When to actually run the elimination. Bags up to `width_switch` use the
/// absolute per-ℓ thresholds; larger bags trigger once a bucket exceeds
/// `alpha · 2^(ℓ/2-1)`. Tuning only affects running time, never answers.
#[derive(Debug, Clone)]
pub struct ReducePolicy {
    /// ℓ → absolute state-count trigger (small-width style).
    pub small_tw_thresholds: BTreeMap<usize, usize>,
    /// Multiplicative trigger relative to the improved pruning guarantee.
    pub alpha: f64,
    /// Bag-size boundary between the two trigger styles.
    pub width_switch: usize,
}

impl ReducePolicy {
    /// Tuned defaults: thresholds τ(4)=3, τ(6)=5, τ(8)=9, α=8 for the
    /// cut-vector variant and α=2 for the improved one.
    pub fn default_for(variant: RankVariant) -> ReducePolicy {
        ReducePolicy {
            small_tw_thresholds: BTreeMap::from([(4, 3), (6, 5), (8, 9)]),
            alpha: match variant {
                RankVariant::Cut4t => 8.0,
                RankVariant::Improved => 2.0,
            },
            width_switch: 9,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.small_tw_thresholds.values().any(|&t| t < 1) {
            return Err("thresholds must be at least 1".into());
        }
        if !self.alpha.is_finite() || self.alpha <= 0.0 {
            return Err("alpha must be positive and finite".into());
        }
        Ok(())
    }

    fn triggered(&self, l: usize, count: usize, bag_size: usize) -> bool {
        if bag_size <= self.width_switch {
            let tau = self
                .small_tw_thresholds
                .get(&l)
                .copied()
                .unwrap_or(1);
            count >= tau
        } else {
            count as f64 >= self.alpha * (1u64 << (l / 2 - 1)) as f64
        }
    }
}

/// Prunes a family of states sharing one bucket down to a representative
/// subfamily. Returns the indices (into `states`) of the survivors, in
/// input order; when the policy trigger is not met (or ℓ ∈ {0, 2}, where a
/// bucket holds at most one state anyway) the input is returned unchanged.
pub fn reduce_bucket(
    states: &[State],
    bag_size: usize,
    variant: RankVariant,
    policy: &ReducePolicy,
) -> Result<Vec<usize>, SolveError> {
    let count = states.len();
    if count == 0 {
        return Ok(Vec::new());
    }
    let l = states[0].pairing.size();
    debug_assert!(states.iter().all(|s| s.bucket == states[0].bucket));
    let all: Vec<usize> = (0..count).collect();
    if l <= 2 {
        return Ok(all);
    }
    if !policy.triggered(l, count, bag_size) {
        return Ok(all);
    }
    let mut matrix = match variant {
        RankVariant::Cut4t => {
            let width = 1u128 << (l - 1);
            if width * count as u128 > CUT_MATRIX_MAX_BITS {
                // Pruning is optional; skip rather than blow memory.
                return Ok(all);
            }
            F2Matrix::new(width as usize)
        }
        RankVariant::Improved => {
            if l > BASIS_MAX_L {
                // No derivable basis this wide; keep the bucket as is.
                return Ok(all);
            }
            let basis = basis_for(l)?;
            F2Matrix::new(basis.matchings.len())
        }
    };
    match variant {
        RankVariant::Cut4t => {
            for (i, s) in states.iter().enumerate() {
                matrix.push(cut_vector(&s.pairing), i);
            }
        }
        RankVariant::Improved => {
            let basis = basis_for(l)?;
            for (i, s) in states.iter().enumerate() {
                matrix.push(improved_vector(&s.pairing, &basis), i);
            }
        }
    }
    let kept = gaussian_eliminate(&matrix);
    debug_assert!(kept.len() <= variant.bound(l));
    Ok(kept)
}

/// Applies [`reduce_bucket`] to every bucket group of a table (states are
/// bucket-sorted after deduplication), dropping pruned states and their
/// witnesses.
pub fn reduce_table(
    tbl: &mut PartialTable,
    variant: RankVariant,
    policy: &ReducePolicy,
    stats: &mut SolveStats,
) -> Result<(), SolveError> {
    let bag_size = tbl.bag.len();
    let n = tbl.states.len();
    let mut keep = Vec::with_capacity(n);
    let mut i = 0;
    let mut pruned_any = false;
    while i < n {
        let mut j = i + 1;
        while j < n && tbl.states[j].bucket == tbl.states[i].bucket {
            j += 1;
        }
        let kept = reduce_bucket(&tbl.states[i..j], bag_size, variant, policy)?;
        if kept.len() < j - i {
            pruned_any = true;
            stats.reductions += 1;
            stats.pruned_states += (j - i) - kept.len();
        }
        keep.extend(kept.into_iter().map(|k| k + i));
        i = j;
    }
    if pruned_any {
        let mut idx = 0;
        let keep_set: Vec<bool> = {
            let mut v = vec![false; n];
            for &k in &keep {
                v[k] = true;
            }
            v
        };
        tbl.states.retain(|_| {
            let k = keep_set[idx];
            idx += 1;
            k
        });
        if let Some(ws) = tbl.witnesses.as_mut() {
            let mut idx = 0;
            ws.retain(|_| {
                let k = keep_set[idx];
                idx += 1;
                k
            });
        }
    }
    Ok(())
}

/// The rank-based solvers: the plain pipeline plus representative-family
/// pruning after every node.
pub fn solve_rank(
    g: &Graph,
    nd: &NiceDecomposition,
    variant: RankVariant,
    policy: &ReducePolicy,
    mode: Mode,
    deadline: Option<Instant>,
    stats: &mut SolveStats,
) -> Result<SolveOutcome, SolveError> {
    policy
        .validate()
        .map_err(|e| SolveError::Basis(format!("invalid policy: {e}")))?;
    let mut hook = |tbl: &mut PartialTable, stats: &mut SolveStats| {
        reduce_table(tbl, variant, policy, stats)
    };
    let hook_ref: &mut ReduceHook = &mut hook;
    run_dp(g, nd, mode, Some(hook_ref), deadline, stats)
}
