#ifndef MMP_H
#define MMP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by fallible calls.
 */
typedef enum MmpStatus {
  MmpStatus_Ok = 0,
  /**
   * Malformed input text or arguments.
   */
  MmpStatus_ParseError = 1,
  /**
   * Structurally invalid hypergraph or out-of-range argument.
   */
  MmpStatus_InvalidInput = 2,
  /**
   * A search exceeded its node budget; the answer is undecided.
   */
  MmpStatus_BudgetExceeded = 3,
  /**
   * Input too large for the requested exhaustive computation.
   */
  MmpStatus_TooLarge = 4,
  MmpStatus_InternalError = 5,
} MmpStatus;

/**
 * Opaque hypergraph handle.
 */
typedef struct MmpHypergraph MmpHypergraph;

/**
 * Exact or sampled classical index values.
 */
typedef struct MmpIndices {
  uint64_t hi_c_max;
  uint64_t hi_c_min;
  uint64_t hi_mc_max;
  uint64_t l_c_max;
  uint64_t l_c_min;
  /**
   * 1 when the values come from the exact solver.
   */
  uint8_t exact;
} MmpIndices;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread, or NULL.
 * The pointer stays valid until the next failing call on the thread.
 */
const char *mmp_last_error(void);

/**
 * Parse one MMP string (`"12,23,34,45,51."`) into a hypergraph handle.
 * `dim` overrides the declared dimension when nonzero.
 *
 * # Safety
 * `text` must be NUL-terminated; `out` must be a valid pointer.
 */
enum MmpStatus mmp_parse(const char *text, uint32_t dim, struct MmpHypergraph **out);

/**
 * Generate the master hypergraph of a comma-separated component pool
 * (e.g. `"0,1,-1"`) in dimension `dim`.
 *
 * # Safety
 * `components` must be NUL-terminated; `out` must be a valid pointer.
 */
enum MmpStatus mmp_generate_master(const char *components,
                                   uint32_t dim,
                                   struct MmpHypergraph **out);

/**
 * Release a hypergraph handle.
 *
 * # Safety
 * `h` must be a pointer from this library, released at most once.
 */
void mmp_hypergraph_free(struct MmpHypergraph *h);

/**
 * Release a string returned by this library.
 *
 * # Safety
 * `s` must be a string pointer from this library, released at most once.
 */
void mmp_string_free(char *s);

/**
 * Number of vertices.
 *
 * # Safety
 * `h` must be a valid handle.
 */
uint64_t mmp_order(const struct MmpHypergraph *h);

/**
 * Number of hyperedges.
 *
 * # Safety
 * `h` must be a valid handle.
 */
uint64_t mmp_size(const struct MmpHypergraph *h);

/**
 * Declared hypergraph dimension.
 *
 * # Safety
 * `h` must be a valid handle.
 */
uint32_t mmp_dimension(const struct MmpHypergraph *h);

/**
 * Serialize back to the MMP string form.
 *
 * # Safety
 * `h` must be a valid handle.
 */
char *mmp_serialize(const struct MmpHypergraph *h);

/**
 * 1 when the hypergraph satisfies the structural conditions; strict mode
 * additionally demands connectivity, no duplicate hyperedges, and at least
 * two shared vertices per hyperedge.
 *
 * # Safety
 * `h` must be a valid handle.
 */
uint8_t mmp_is_valid(const struct MmpHypergraph *h, uint8_t strict);

/**
 * Decide binary (noncontextual) vs. non-binary (contextual).
 * `budget` of 0 selects the default search budget.
 *
 * # Safety
 * `h` and `out` must be valid pointers.
 */
enum MmpStatus mmp_is_binary(const struct MmpHypergraph *h, uint64_t budget, uint8_t *out);

/**
 * Decide criticality: non-binary, and every single hyperedge removal is
 * binary.
 *
 * # Safety
 * `h` and `out` must be valid pointers.
 */
enum MmpStatus mmp_is_critical(const struct MmpHypergraph *h, uint64_t budget, uint8_t *out);

/**
 * 1 when the hyperedge count is odd and every vertex multiplicity is even.
 *
 * # Safety
 * `h` must be a valid handle.
 */
uint8_t mmp_has_parity_proof(const struct MmpHypergraph *h);

/**
 * Classical indices. With `exact` nonzero the branch-and-bound solver runs
 * (may return `BudgetExceeded`); otherwise `runs` randomized maximal
 * assignments are sampled with the given seed.
 *
 * # Safety
 * `h` and `out` must be valid pointers.
 */
enum MmpStatus mmp_classical_indices(const struct MmpHypergraph *h,
                                     uint8_t exact,
                                     uint64_t runs,
                                     uint64_t seed,
                                     uint64_t budget,
                                     struct MmpIndices *out);

/**
 * Full analysis as a JSON document (structure, verdicts, indices,
 * inequality report), matching the CLI's `analyze --json` schema.
 *
 * # Safety
 * `h` and `out` must be valid pointers.
 */
enum MmpStatus mmp_analyze_json(const struct MmpHypergraph *h,
                                uint8_t exact,
                                uint64_t runs,
                                uint64_t seed,
                                char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MMP_H */
