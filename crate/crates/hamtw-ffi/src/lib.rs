//! C ABI over the solver suite: opaque handles for graphs and tree
//! decompositions, status codes for every fallible call, and plain
//! buffers for results. The header `include/hamtw.h` is generated by
//! cbindgen at build time.
//!
//! Conventions:
//! * Every object returned through an out-pointer is owned by the caller
//!   and must be released with the matching `_free` function.
//! * Functions never unwind across the boundary; internal panics surface
//!   as `HAMTW_STATUS_INTERNAL`.
//! * Vertices are 1-based, matching the text formats.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Duration;

use hamtw::bench::{prepare_instance, run_solver, Algorithm, ModeChoice, RunOutcome, SolverConfig};
use hamtw::decomp::{parse_td, validate_td, TdCheck, TreeDecomposition};
use hamtw::generator::{generate, GenParams};
use hamtw::graph::{parse_graph, write_graph, Graph, GraphFormat};

/// Status code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HamtwStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The input text could not be parsed.
    ParseError = 3,
    /// An argument value was out of range.
    InvalidArgument = 4,
    /// The decomposition does not fit the graph (or exceeds limits).
    InvalidDecomposition = 5,
    /// The deadline expired before an answer was reached.
    Timeout = 6,
    /// A supplied buffer is too small.
    BufferTooSmall = 7,
    /// Unexpected internal failure (a bug; please report).
    Internal = 8,
}

/// Instance file dialects.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HamtwFormat {
    PaceGr = 0,
    TsplibHcp = 1,
}

/// Solver selection.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HamtwAlgorithm {
    Naive = 0,
    Rank4t = 1,
    RankImproved = 2,
    CutCount = 3,
    CutCountFastJoin = 4,
}

/// Table mode: `Auto` stores witnesses for small widths and switches to
/// decision tables beyond.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HamtwMode {
    Auto = 0,
    Decision = 1,
    Witness = 2,
}

/// Structural statistics of a graph.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct HamtwGraphStats {
    pub n: u32,
    pub m: u64,
    pub min_degree: u32,
    pub avg_degree: f64,
    pub max_degree: u32,
    /// Shortest cycle length; 0 when acyclic.
    pub girth: u32,
    /// Exact diameter of the largest connected component.
    pub diameter: u32,
}

/// Opaque graph handle.
pub struct HamtwGraph {
    inner: Graph,
}

/// Opaque tree-decomposition handle.
pub struct HamtwDecomposition {
    inner: TreeDecomposition,
}

fn guard<F: FnOnce() -> HamtwStatus>(f: F) -> HamtwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => HamtwStatus::Internal,
    }
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, HamtwStatus> {
    if ptr.is_null() {
        return Err(HamtwStatus::NullArgument);
    }
    unsafe { CStr::from_ptr(ptr) }
        .to_str()
        .map_err(|_| HamtwStatus::InvalidUtf8)
}

/// Parses an instance in the given dialect into a new graph handle.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hamtw_graph_parse(
    text: *const c_char,
    format: HamtwFormat,
    out: *mut *mut HamtwGraph,
) -> HamtwStatus {
    guard(|| {
        if out.is_null() {
            return HamtwStatus::NullArgument;
        }
        let text = match unsafe { read_str(text) } {
            Ok(t) => t,
            Err(s) => return s,
        };
        let format = match format {
            HamtwFormat::PaceGr => GraphFormat::PaceGr,
            HamtwFormat::TsplibHcp => GraphFormat::TsplibHcp,
        };
        match parse_graph(text, format) {
            Ok(parsed) => {
                let handle = Box::new(HamtwGraph {
                    inner: parsed.graph,
                });
                unsafe { out.write(Box::into_raw(handle)) };
                HamtwStatus::Ok
            }
            Err(_) => HamtwStatus::ParseError,
        }
    })
}

/// Releases a graph handle. Null is a no-op.
///
/// # Safety
/// `g` must be a pointer previously returned by this library and not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn hamtw_graph_free(g: *mut HamtwGraph) {
    if !g.is_null() {
        drop(unsafe { Box::from_raw(g) });
    }
}

/// Number of vertices, or 0 for a null handle.
///
/// # Safety
/// `g` must be a live graph handle or null.
#[no_mangle]
pub unsafe extern "C" fn hamtw_graph_vertex_count(g: *const HamtwGraph) -> u32 {
    unsafe { g.as_ref() }.map_or(0, |g| g.inner.vertex_count())
}

/// Number of edges, or 0 for a null handle.
///
/// # Safety
/// `g` must be a live graph handle or null.
#[no_mangle]
pub unsafe extern "C" fn hamtw_graph_edge_count(g: *const HamtwGraph) -> u64 {
    unsafe { g.as_ref() }.map_or(0, |g| g.inner.edge_count() as u64)
}

/// Fills `out` with degree, girth, and diameter statistics.
///
/// # Safety
/// `g` must be a live graph handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hamtw_graph_stats(
    g: *const HamtwGraph,
    out: *mut HamtwGraphStats,
) -> HamtwStatus {
    guard(|| {
        let (Some(g), false) = (unsafe { g.as_ref() }, out.is_null()) else {
            return HamtwStatus::NullArgument;
        };
        let s = g.inner.stats();
        unsafe {
            out.write(HamtwGraphStats {
                n: s.n,
                m: s.m as u64,
                min_degree: s.min_deg as u32,
                avg_degree: s.avg_deg,
                max_degree: s.max_deg as u32,
                girth: s.girth,
                diameter: s.diameter,
            });
        }
        HamtwStatus::Ok
    })
}

/// Serializes the graph in PACE `.gr` text; free with
/// [`hamtw_string_free`].
///
/// # Safety
/// `g` must be a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn hamtw_graph_to_pace(g: *const HamtwGraph) -> *mut c_char {
    let Some(g) = (unsafe { g.as_ref() }) else {
        return std::ptr::null_mut();
    };
    match CString::new(write_graph(&g.inner, GraphFormat::PaceGr)) {
        Ok(s) => s.into_raw(),
        Err(_) => std::ptr::null_mut(),
    }
}

/// Releases a string returned by this library. Null is a no-op.
///
/// # Safety
/// `s` must originate from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn hamtw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Parses a PACE `.td` decomposition into a new handle.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hamtw_decomposition_parse(
    text: *const c_char,
    out: *mut *mut HamtwDecomposition,
) -> HamtwStatus {
    guard(|| {
        if out.is_null() {
            return HamtwStatus::NullArgument;
        }
        let text = match unsafe { read_str(text) } {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_td(text) {
            Ok(td) => {
                unsafe { out.write(Box::into_raw(Box::new(HamtwDecomposition { inner: td }))) };
                HamtwStatus::Ok
            }
            Err(_) => HamtwStatus::ParseError,
        }
    })
}

/// Computes a decomposition with the minimum fill-in heuristic.
///
/// # Safety
/// `g` must be a live graph handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hamtw_decomposition_min_fill(
    g: *const HamtwGraph,
    tie_break_seed: u64,
    out: *mut *mut HamtwDecomposition,
) -> HamtwStatus {
    guard(|| {
        let (Some(g), false) = (unsafe { g.as_ref() }, out.is_null()) else {
            return HamtwStatus::NullArgument;
        };
        let td = hamtw::decomp::min_fill_td(&g.inner, tie_break_seed);
        unsafe { out.write(Box::into_raw(Box::new(HamtwDecomposition { inner: td }))) };
        HamtwStatus::Ok
    })
}

/// Serializes a decomposition in PACE `.td` text; free with
/// [`hamtw_string_free`].
///
/// # Safety
/// `td` must be a live decomposition handle.
#[no_mangle]
pub unsafe extern "C" fn hamtw_decomposition_to_pace(
    td: *const HamtwDecomposition,
) -> *mut c_char {
    let Some(td) = (unsafe { td.as_ref() }) else {
        return std::ptr::null_mut();
    };
    match CString::new(hamtw::decomp::write_td(&td.inner)) {
        Ok(s) => s.into_raw(),
        Err(_) => std::ptr::null_mut(),
    }
}

/// Releases a decomposition handle. Null is a no-op.
///
/// # Safety
/// `td` must be a pointer previously returned by this library and not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn hamtw_decomposition_free(td: *mut HamtwDecomposition) {
    if !td.is_null() {
        drop(unsafe { Box::from_raw(td) });
    }
}

/// Validates a decomposition against a graph and writes its width.
///
/// # Safety
/// `g` and `td` must be live handles; `out_width` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hamtw_decomposition_validate(
    g: *const HamtwGraph,
    td: *const HamtwDecomposition,
    out_width: *mut u32,
) -> HamtwStatus {
    guard(|| {
        let (Some(g), Some(td), false) = (
            unsafe { g.as_ref() },
            unsafe { td.as_ref() },
            out_width.is_null(),
        ) else {
            return HamtwStatus::NullArgument;
        };
        match validate_td(&g.inner, &td.inner) {
            TdCheck::Valid { width } => {
                unsafe { out_width.write(width) };
                HamtwStatus::Ok
            }
            TdCheck::Violation(_) => HamtwStatus::InvalidDecomposition,
        }
    })
}

fn build_config(
    algorithm: HamtwAlgorithm,
    mode: HamtwMode,
    seed: u64,
    timeout_ms: u64,
    want_cycle: bool,
) -> SolverConfig {
    let mut cfg = SolverConfig::new(match algorithm {
        HamtwAlgorithm::Naive => Algorithm::Naive,
        HamtwAlgorithm::Rank4t => Algorithm::Rank4t,
        HamtwAlgorithm::RankImproved => Algorithm::RankImproved,
        HamtwAlgorithm::CutCount => Algorithm::CutCountNaiveJoin,
        HamtwAlgorithm::CutCountFastJoin => Algorithm::CutCountFastJoin,
    });
    cfg.mode = match mode {
        HamtwMode::Auto => ModeChoice::Auto,
        HamtwMode::Decision => ModeChoice::Decision,
        HamtwMode::Witness => ModeChoice::Witness,
    };
    cfg.seed = seed;
    if timeout_ms > 0 {
        cfg.timeout = Some(Duration::from_millis(timeout_ms));
    }
    cfg.want_cycle = want_cycle;
    cfg
}

fn run(
    g: &Graph,
    td: Option<&TreeDecomposition>,
    cfg: &SolverConfig,
) -> Result<(bool, Option<Vec<u32>>), HamtwStatus> {
    let prep =
        prepare_instance(g, td, None).map_err(|_| HamtwStatus::InvalidDecomposition)?;
    let result = run_solver(&prep, cfg);
    match result.outcome {
        RunOutcome::Yes => Ok((
            true,
            result.cycle.map(|c| c.vertices().to_vec()),
        )),
        RunOutcome::No => Ok((false, None)),
        RunOutcome::Timeout => Err(HamtwStatus::Timeout),
        RunOutcome::Error(_) => Err(HamtwStatus::Internal),
    }
}

/// Decides Hamiltonicity. `td` may be null (the minimum fill-in heuristic
/// supplies a decomposition); `timeout_ms` of 0 means no limit. Writes 1
/// into `out_answer` for Hamiltonian, 0 otherwise.
///
/// # Safety
/// `g` must be a live graph handle, `td` a live handle or null, and
/// `out_answer` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hamtw_solve(
    g: *const HamtwGraph,
    td: *const HamtwDecomposition,
    algorithm: HamtwAlgorithm,
    mode: HamtwMode,
    seed: u64,
    timeout_ms: u64,
    out_answer: *mut i32,
) -> HamtwStatus {
    guard(|| {
        let (Some(g), false) = (unsafe { g.as_ref() }, out_answer.is_null()) else {
            return HamtwStatus::NullArgument;
        };
        let td = unsafe { td.as_ref() }.map(|t| &t.inner);
        let cfg = build_config(algorithm, mode, seed, timeout_ms, false);
        match run(&g.inner, td, &cfg) {
            Ok((answer, _)) => {
                unsafe { out_answer.write(answer as i32) };
                HamtwStatus::Ok
            }
            Err(s) => s,
        }
    })
}

/// Finds a Hamiltonian cycle and writes its vertex sequence (length
/// exactly n) into `out_cycle`. Writes 1 into `out_answer` when a cycle
/// exists, 0 when the graph is not Hamiltonian (the buffer is untouched).
///
/// # Safety
/// `g` must be a live graph handle, `td` a live handle or null,
/// `out_cycle` a writable buffer of at least `cycle_capacity` entries, and
/// `out_answer` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hamtw_find_cycle(
    g: *const HamtwGraph,
    td: *const HamtwDecomposition,
    algorithm: HamtwAlgorithm,
    seed: u64,
    timeout_ms: u64,
    out_cycle: *mut u32,
    cycle_capacity: usize,
    out_answer: *mut i32,
) -> HamtwStatus {
    guard(|| {
        let (Some(g), false, false) = (
            unsafe { g.as_ref() },
            out_cycle.is_null(),
            out_answer.is_null(),
        ) else {
            return HamtwStatus::NullArgument;
        };
        let n = g.inner.vertex_count() as usize;
        if cycle_capacity < n {
            return HamtwStatus::BufferTooSmall;
        }
        let td = unsafe { td.as_ref() }.map(|t| &t.inner);
        let cfg = build_config(algorithm, HamtwMode::Auto, seed, timeout_ms, true);
        match run(&g.inner, td, &cfg) {
            Ok((true, Some(cycle))) => {
                debug_assert_eq!(cycle.len(), n);
                unsafe {
                    std::ptr::copy_nonoverlapping(cycle.as_ptr(), out_cycle, cycle.len());
                    out_answer.write(1);
                }
                HamtwStatus::Ok
            }
            Ok((false, _)) => {
                unsafe { out_answer.write(0) };
                HamtwStatus::Ok
            }
            Ok((true, None)) => HamtwStatus::Internal,
            Err(s) => s,
        }
    })
}

/// Generates a random instance with a planted Hamiltonian cycle and its
/// bounded-width decomposition. `a` must be 2 modulo 4, `p` strictly
/// between 0 and 1.
///
/// # Safety
/// `out_graph` and `out_td` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hamtw_generate(
    a: u32,
    b: u32,
    p: f64,
    seed: u64,
    out_graph: *mut *mut HamtwGraph,
    out_td: *mut *mut HamtwDecomposition,
) -> HamtwStatus {
    guard(|| {
        if out_graph.is_null() || out_td.is_null() {
            return HamtwStatus::NullArgument;
        }
        match generate(&GenParams { a, b, p, seed }) {
            Ok(inst) => {
                unsafe {
                    out_graph.write(Box::into_raw(Box::new(HamtwGraph { inner: inst.graph })));
                    out_td.write(Box::into_raw(Box::new(HamtwDecomposition {
                        inner: inst.td,
                    })));
                }
                HamtwStatus::Ok
            }
            Err(_) => HamtwStatus::InvalidArgument,
        }
    })
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn hamtw_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}
