/* C interface to the parqq workbench. Generated by cbindgen; do not edit. */

#ifndef PARQQ_H
#define PARQQ_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call in this ABI.
 */
typedef enum ParqqStatus {
  PARQQ_STATUS_OK = 0,
  PARQQ_STATUS_NULL_POINTER = 1,
  PARQQ_STATUS_INVALID_PARAMETER = 2,
  PARQQ_STATUS_RESOURCE_LIMIT = 3,
  PARQQ_STATUS_PROPERTY_FAILURE = 4,
  PARQQ_STATUS_PANIC = 5,
} ParqqStatus;

/**
 * Opaque handle to a Boolean function.
 */
typedef struct ParqqBoolFn ParqqBoolFn;

/**
 * Opaque handle to a dual certificate together with its certificate
 * structure, ready for feasibility checks.
 */
typedef struct ParqqDual ParqqDual;

/**
 * Classical measures and parallel query bounds of one function.
 */
typedef struct ParqqComplexity {
  uint32_t n;
  uint32_t p;
  uint32_t block_sensitivity;
  uint32_t certificate_complexity;
  uint32_t one_certificate_complexity;
  uint32_t dpar_upper;
  /**
   * true when the depth bound is achieved on the negated function
   */
  bool dpar_negated;
  /**
   * parallel quantum query lower bound sqrt(bs / p)
   */
  double q_lower;
} ParqqComplexity;

/**
 * Outcome of a full-edge-set feasibility check.
 */
typedef struct ParqqDualReport {
  double objective;
  double max_l;
  uint64_t edges_checked;
  bool feasible;
} ParqqDualReport;

/**
 * Optimized quantum walk cost model.
 */
typedef struct ParqqWalkCost {
  uint64_t r;
  double setup;
  double update;
  double check;
  double epsilon;
  double delta;
  double total;
  /**
   * analytic minimizer n^(k/(k+1)) p^(1/(k+1))
   */
  double closed_form_r;
} ParqqWalkCost;

/**
 * Result of the oracle-interrogation simulation.
 */
typedef struct ParqqInterrogation {
  uint32_t t;
  uint32_t rounds;
  double simulated_success;
  double closed_form;
} ParqqInterrogation;

/**
 * Result of the block-parallel Grover simulation.
 */
typedef struct ParqqGrover {
  uint32_t block_size;
  uint32_t t;
  uint32_t rounds;
  bool degenerate;
  double simulated_success;
  double closed_form;
} ParqqGrover;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread. Never null;
 * empty before the first failure. The pointer stays valid until the next
 * failing call on the same thread.
 */
const char *parqq_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *parqq_version(void);

/**
 * Parses a function spec (`or:N`, `and:N`, `parity:N`, `random:N:SEED`,
 * `hex:N:DIGITS`) into a new handle owned by the caller.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a valid pointer.
 */
enum ParqqStatus parqq_boolfn_parse(const char *spec, struct ParqqBoolFn **out);

/**
 * Frees a handle returned by [`parqq_boolfn_parse`]. Null is a no-op.
 *
 * # Safety
 * `f` must be a pointer previously returned by this library, freed once.
 */
void parqq_boolfn_free(struct ParqqBoolFn *f);

/**
 * Number of input bits.
 *
 * # Safety
 * `f` must be a live handle and `out` a valid pointer.
 */
enum ParqqStatus parqq_boolfn_arity(const struct ParqqBoolFn *f, uint32_t *out);

/**
 * Computes block sensitivity, certificate complexities, the p-parallel
 * decision-tree upper bound, and the quantum lower bound.
 *
 * # Safety
 * `f` must be a live handle and `out` a valid pointer.
 */
enum ParqqStatus parqq_boolfn_complexity(const struct ParqqBoolFn *f,
                                         uint32_t p,
                                         struct ParqqComplexity *out);

/**
 * Builds the element-distinctness dual certificate for n positions at
 * parallelism p. The caller owns the handle.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum ParqqStatus parqq_dual_ed(uint32_t n, uint32_t p, struct ParqqDual **out);

/**
 * Builds the k-sum dual certificate. The caller owns the handle.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum ParqqStatus parqq_dual_ksum(uint32_t n, uint32_t k, uint32_t p, struct ParqqDual **out);

/**
 * Frees a handle returned by the dual constructors. Null is a no-op.
 *
 * # Safety
 * `d` must be a pointer previously returned by this library, freed once.
 */
void parqq_dual_free(struct ParqqDual *d);

/**
 * Objective value of the certificate (the lower bound it certifies).
 *
 * # Safety
 * `d` must be a live handle and `out` a valid pointer.
 */
enum ParqqStatus parqq_dual_objective(const struct ParqqDual *d, double *out);

/**
 * Checks the per-edge constraints over the full edge set.
 *
 * # Safety
 * `d` must be a live handle and `out` a valid pointer.
 */
enum ParqqStatus parqq_dual_verify(const struct ParqqDual *d, struct ParqqDualReport *out);

/**
 * Spectral gap of the Johnson graph walk J(n, r), optionally lazy.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum ParqqStatus parqq_johnson_gap(uint32_t n, uint32_t r, bool lazy, double *out);

/**
 * Walk search cost for the k-subset certificate problem (k = 2 is element
 * distinctness), minimized over the vertex size r.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum ParqqStatus parqq_walk_cost(uint32_t k, uint32_t n, uint32_t p, struct ParqqWalkCost *out);

/**
 * p-parallel adversary ratio of the all-ones OR instance; equals
 * sqrt(n / p) whenever p divides n.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum ParqqStatus parqq_or_adversary_ratio(uint32_t n, uint32_t p, double *out);

/**
 * Simulates interrogation of the hidden n-bit string given by the low n
 * bits of `x_bits` (bit j is position j), with failure target eps.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum ParqqStatus parqq_interrogate(uint64_t x_bits,
                                   uint32_t n,
                                   uint32_t p,
                                   double eps,
                                   struct ParqqInterrogation *out);

/**
 * Simulates Grover search for `marked` over n items split into p blocks,
 * using the optimal iteration count for the block size.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum ParqqStatus parqq_grover(uint32_t n, uint32_t p, uint32_t marked, struct ParqqGrover *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PARQQ_H */
