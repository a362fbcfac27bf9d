#ifndef NEUTRALSCAPE_H
#define NEUTRALSCAPE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum NscStatus {
  NSC_STATUS_OK = 0,
  NSC_STATUS_NULL_POINTER = 1,
  NSC_STATUS_INVALID_ARGUMENT = 2,
  NSC_STATUS_PARSE = 3,
  NSC_STATUS_CONTRACT = 4,
  NSC_STATUS_CONFIG = 5,
  NSC_STATUS_IO = 6,
  NSC_STATUS_DEGENERATE = 7,
  NSC_STATUS_BUFFER_TOO_SMALL = 8,
  NSC_STATUS_NOT_FOUND = 9,
  NSC_STATUS_PANIC = 10,
} NscStatus;

typedef enum NscRngMode {
  NSC_RNG_MODE_NATIVE = 0,
  NSC_RNG_MODE_TAILLARD = 1,
} NscRngMode;

typedef enum NscFormat {
  NSC_FORMAT_NATIVE = 0,
  NSC_FORMAT_TAILLARD = 1,
} NscFormat;

typedef enum NscAlgorithm {
  NSC_ALGORITHM_ILS = 0,
  NSC_ALGORITHM_NEUTRAL_GUIDED = 1,
  NSC_ALGORITHM_DESCENT = 2,
  NSC_ALGORITHM_NEH = 3,
} NscAlgorithm;

typedef enum NscAcceptance {
  NSC_ACCEPTANCE_BETTER = 0,
  NSC_ACCEPTANCE_METROPOLIS = 1,
  NSC_ACCEPTANCE_BETTER_OR_EQUAL = 2,
} NscAcceptance;

typedef enum NscTypology {
  NSC_TYPOLOGY_T1 = 1,
  NSC_TYPOLOGY_T2 = 2,
  NSC_TYPOLOGY_T3 = 3,
} NscTypology;

// Opaque flowshop instance.
typedef struct NscInstance NscInstance;

// Opaque neutral walk record.
typedef struct NscWalk NscWalk;

typedef struct NscSearchConfig {
  uint64_t seed;
  uint64_t max_evaluations;
  size_t perturbation_strength;
  // Negative selects the instance-derived default temperature.
  double metropolis_temperature;
  size_t max_neutral_steps;
  // One of [`NscAcceptance`].
  uint32_t acceptance;
  // 0 computes evolvability exactly, k > 0 samples k neighbors.
  size_t sampled_evolvability;
} NscSearchConfig;

typedef struct NscNeighborhoodSummary {
  uint64_t fitness;
  size_t neutral_degree;
  size_t improving_degree;
  size_t neighbor_count;
  double evolvability;
} NscNeighborhoodSummary;

typedef struct NscWalkStep {
  size_t step;
  uint64_t fitness;
  size_t neutral_degree;
  double evolvability;
  bool is_portal;
  bool revisited;
} NscWalkStep;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after success.
// Valid until the next call into the library from the same thread.
const char *nsc_last_error_message(void);

const char *nsc_version(void);

struct NscSearchConfig nsc_search_config_default(void);

// `rng_mode` is one of [`NscRngMode`].
enum NscStatus nsc_instance_generate(size_t n_jobs,
                                     size_t n_machines,
                                     uint64_t seed,
                                     uint32_t rng_mode,
                                     struct NscInstance **out);

// Parses a NUL-terminated instance text; `format` is one of [`NscFormat`].
enum NscStatus nsc_instance_parse(const char *text, uint32_t format, struct NscInstance **out);

void nsc_instance_free(struct NscInstance *inst);

// 0 for a null handle.
size_t nsc_instance_n_jobs(const struct NscInstance *inst);

// 0 for a null handle.
size_t nsc_instance_n_machines(const struct NscInstance *inst);

enum NscStatus nsc_instance_time(const struct NscInstance *inst,
                                 size_t job,
                                 size_t machine,
                                 uint32_t *out);

// Native text serialization; release with [`nsc_string_free`].
enum NscStatus nsc_instance_to_text(const struct NscInstance *inst, char **out);

void nsc_string_free(char *s);

// `perm` holds `len` distinct 0-based job indices.
enum NscStatus nsc_makespan(const struct NscInstance *inst,
                            const size_t *perm,
                            size_t len,
                            uint64_t *out);

// Makespans of reinserting the job at `remove_pos` at every position
// `0..len`; `out` needs `len` slots.
enum NscStatus nsc_scan_insertions(const struct NscInstance *inst,
                                   const size_t *perm,
                                   size_t len,
                                   size_t remove_pos,
                                   uint64_t *out,
                                   size_t out_len);

enum NscStatus nsc_neighborhood_summary(const struct NscInstance *inst,
                                        const size_t *perm,
                                        size_t len,
                                        struct NscNeighborhoodSummary *out);

// Steepest descent from `start`; writes the local optimum to `out_perm`.
enum NscStatus nsc_steepest_descent(const struct NscInstance *inst,
                                    const size_t *start,
                                    size_t len,
                                    uint64_t seed,
                                    size_t *out_perm,
                                    uint64_t *out_fitness);

// Runs `algorithm` (one of [`NscAlgorithm`]).  `out_perm` needs
// `perm_capacity >= n_jobs` slots; `out_evaluations` may be null.
enum NscStatus nsc_solve(const struct NscInstance *inst,
                         uint32_t algorithm,
                         const struct NscSearchConfig *config,
                         size_t *out_perm,
                         size_t perm_capacity,
                         uint64_t *out_fitness,
                         uint64_t *out_evaluations);

// Neutral random walk from a local optimum; release with [`nsc_walk_free`].
enum NscStatus nsc_neutral_walk(const struct NscInstance *inst,
                                const size_t *start,
                                size_t len,
                                size_t max_steps,
                                uint64_t seed,
                                struct NscWalk **out);

void nsc_walk_free(struct NscWalk *walk);

// Number of recorded steps, 0 for a null handle.
size_t nsc_walk_len(const struct NscWalk *walk);

// One of [`NscTypology`], 0 for a null handle.
uint32_t nsc_walk_typology(const struct NscWalk *walk);

// `NotFound` when the walk met no portal.
enum NscStatus nsc_walk_first_portal_step(const struct NscWalk *walk, size_t *out);

enum NscStatus nsc_walk_step(const struct NscWalk *walk, size_t index, struct NscWalkStep *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NEUTRALSCAPE_H */
