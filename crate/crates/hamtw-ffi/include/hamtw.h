/* C interface of the hamtw Hamiltonian-cycle solver suite. */

#ifndef HAMTW_H
#define HAMTW_H

/* This file is generated by cbindgen from hamtw-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of every fallible call.
 */
typedef enum {
  HAMTW_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  HAMTW_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  HAMTW_STATUS_INVALID_UTF8 = 2,
  /**
   * The input text could not be parsed.
   */
  HAMTW_STATUS_PARSE_ERROR = 3,
  /**
   * An argument value was out of range.
   */
  HAMTW_STATUS_INVALID_ARGUMENT = 4,
  /**
   * The decomposition does not fit the graph (or exceeds limits).
   */
  HAMTW_STATUS_INVALID_DECOMPOSITION = 5,
  /**
   * The deadline expired before an answer was reached.
   */
  HAMTW_STATUS_TIMEOUT = 6,
  /**
   * A supplied buffer is too small.
   */
  HAMTW_STATUS_BUFFER_TOO_SMALL = 7,
  /**
   * Unexpected internal failure (a bug; please report).
   */
  HAMTW_STATUS_INTERNAL = 8,
} HamtwStatus;

/**
 * Instance file dialects.
 */
typedef enum {
  HAMTW_FORMAT_PACE_GR = 0,
  HAMTW_FORMAT_TSPLIB_HCP = 1,
} HamtwFormat;

/**
 * Solver selection.
 */
typedef enum {
  HAMTW_ALGORITHM_NAIVE = 0,
  HAMTW_ALGORITHM_RANK4T = 1,
  HAMTW_ALGORITHM_RANK_IMPROVED = 2,
  HAMTW_ALGORITHM_CUT_COUNT = 3,
  HAMTW_ALGORITHM_CUT_COUNT_FAST_JOIN = 4,
} HamtwAlgorithm;

/**
 * Table mode: `Auto` stores witnesses for small widths and switches to
 * decision tables beyond.
 */
typedef enum {
  HAMTW_MODE_AUTO = 0,
  HAMTW_MODE_DECISION = 1,
  HAMTW_MODE_WITNESS = 2,
} HamtwMode;

/**
 * Opaque tree-decomposition handle.
 */
typedef struct HamtwDecomposition HamtwDecomposition;

/**
 * Opaque graph handle.
 */
typedef struct HamtwGraph HamtwGraph;

/**
 * Structural statistics of a graph.
 */
typedef struct {
  uint32_t n;
  uint64_t m;
  uint32_t min_degree;
  double avg_degree;
  uint32_t max_degree;
  /**
   * Shortest cycle length; 0 when acyclic.
   */
  uint32_t girth;
  /**
   * Exact diameter of the largest connected component.
   */
  uint32_t diameter;
} HamtwGraphStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses an instance in the given dialect into a new graph handle.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string and `out` a valid pointer.
 */
HamtwStatus hamtw_graph_parse(const char *text, HamtwFormat format, HamtwGraph **out);

/**
 * Releases a graph handle. Null is a no-op.
 *
 * # Safety
 * `g` must be a pointer previously returned by this library and not yet
 * freed.
 */
void hamtw_graph_free(HamtwGraph *g);

/**
 * Number of vertices, or 0 for a null handle.
 *
 * # Safety
 * `g` must be a live graph handle or null.
 */
uint32_t hamtw_graph_vertex_count(const HamtwGraph *g);

/**
 * Number of edges, or 0 for a null handle.
 *
 * # Safety
 * `g` must be a live graph handle or null.
 */
uint64_t hamtw_graph_edge_count(const HamtwGraph *g);

/**
 * Fills `out` with degree, girth, and diameter statistics.
 *
 * # Safety
 * `g` must be a live graph handle; `out` a valid pointer.
 */
HamtwStatus hamtw_graph_stats(const HamtwGraph *g, HamtwGraphStats *out);

/**
 * Serializes the graph in PACE `.gr` text; free with
 * [`hamtw_string_free`].
 *
 * # Safety
 * `g` must be a live graph handle.
 */
char *hamtw_graph_to_pace(const HamtwGraph *g);

/**
 * Releases a string returned by this library. Null is a no-op.
 *
 * # Safety
 * `s` must originate from this library and not have been freed.
 */
void hamtw_string_free(char *s);

/**
 * Parses a PACE `.td` decomposition into a new handle.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string and `out` a valid pointer.
 */
HamtwStatus hamtw_decomposition_parse(const char *text, HamtwDecomposition **out);

/**
 * Computes a decomposition with the minimum fill-in heuristic.
 *
 * # Safety
 * `g` must be a live graph handle and `out` a valid pointer.
 */
HamtwStatus hamtw_decomposition_min_fill(const HamtwGraph *g,
                                         uint64_t tie_break_seed,
                                         HamtwDecomposition **out);

/**
 * Serializes a decomposition in PACE `.td` text; free with
 * [`hamtw_string_free`].
 *
 * # Safety
 * `td` must be a live decomposition handle.
 */
char *hamtw_decomposition_to_pace(const HamtwDecomposition *td);

/**
 * Releases a decomposition handle. Null is a no-op.
 *
 * # Safety
 * `td` must be a pointer previously returned by this library and not yet
 * freed.
 */
void hamtw_decomposition_free(HamtwDecomposition *td);

/**
 * Validates a decomposition against a graph and writes its width.
 *
 * # Safety
 * `g` and `td` must be live handles; `out_width` a valid pointer.
 */
HamtwStatus hamtw_decomposition_validate(const HamtwGraph *g,
                                         const HamtwDecomposition *td,
                                         uint32_t *out_width);

/**
 * Decides Hamiltonicity. `td` may be null (the minimum fill-in heuristic
 * supplies a decomposition); `timeout_ms` of 0 means no limit. Writes 1
 * into `out_answer` for Hamiltonian, 0 otherwise.
 *
 * # Safety
 * `g` must be a live graph handle, `td` a live handle or null, and
 * `out_answer` a valid pointer.
 */
HamtwStatus hamtw_solve(const HamtwGraph *g,
                        const HamtwDecomposition *td,
                        HamtwAlgorithm algorithm,
                        HamtwMode mode,
                        uint64_t seed,
                        uint64_t timeout_ms,
                        int32_t *out_answer);

/**
 * Finds a Hamiltonian cycle and writes its vertex sequence (length
 * exactly n) into `out_cycle`. Writes 1 into `out_answer` when a cycle
 * exists, 0 when the graph is not Hamiltonian (the buffer is untouched).
 *
 * # Safety
 * `g` must be a live graph handle, `td` a live handle or null,
 * `out_cycle` a writable buffer of at least `cycle_capacity` entries, and
 * `out_answer` a valid pointer.
 */
HamtwStatus hamtw_find_cycle(const HamtwGraph *g,
                             const HamtwDecomposition *td,
                             HamtwAlgorithm algorithm,
                             uint64_t seed,
                             uint64_t timeout_ms,
                             uint32_t *out_cycle,
                             uintptr_t cycle_capacity,
                             int32_t *out_answer);

/**
 * Generates a random instance with a planted Hamiltonian cycle and its
 * bounded-width decomposition. `a` must be 2 modulo 4, `p` strictly
 * between 0 and 1.
 *
 * # Safety
 * `out_graph` and `out_td` must be valid pointers.
 */
HamtwStatus hamtw_generate(uint32_t a,
                           uint32_t b,
                           double p,
                           uint64_t seed,
                           HamtwGraph **out_graph,
                           HamtwDecomposition **out_td);

/**
 * Library version as a static string; do not free.
 */
const char *hamtw_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HAMTW_H */
