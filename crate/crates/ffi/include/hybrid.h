#ifndef HYBRID_H
#define HYBRID_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum HkStatus {
  HK_STATUS_OK = 0,
  HK_STATUS_NULL_POINTER = 1,
  HK_STATUS_INVALID_UTF8 = 2,
  HK_STATUS_INVALID_ARGUMENT = 3,
  HK_STATUS_INVALID_INSTANCE = 4,
  HK_STATUS_UNSUPPORTED = 5,
  HK_STATUS_NO_SOLUTION = 6,
  HK_STATUS_TOO_LARGE = 7,
  HK_STATUS_BUFFER_TOO_SMALL = 8,
  HK_STATUS_IO = 9,
  HK_STATUS_PANIC = 10,
} HkStatus;

/**
 * A weighted client subset built by [`hk_coreset`].
 */
typedef struct HkCoreset HkCoreset;

/**
 * A validated instance: metric space, `k`, `r` and `z`.
 */
typedef struct HkInstance HkInstance;

/**
 * Best solution found by [`hk_solve`].
 */
typedef struct HkSolution HkSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the next call.
 */
const char *hk_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be null or a pointer returned by this library and not yet freed.
 */
void hk_string_free(char *s);

/**
 * Parses an instance from its JSON text.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
enum HkStatus hk_instance_from_json(const char *json, struct HkInstance **out);

/**
 * # Safety
 * `inst` must be null or a live handle from [`hk_instance_from_json`].
 */
void hk_instance_free(struct HkInstance *inst);

/**
 * Number of clients, or 0 for a null handle.
 *
 * # Safety
 * `inst` must be null or a live instance handle.
 */
size_t hk_instance_num_clients(const struct HkInstance *inst);

/**
 * Number of facilities, or 0 for a null handle or a continuous instance.
 *
 * # Safety
 * `inst` must be null or a live instance handle.
 */
size_t hk_instance_num_facilities(const struct HkInstance *inst);

/**
 * `cost(P, X, alpha, z)` for facility centers `X`.
 *
 * # Safety
 * `facilities` must point to `len` indices; `out` must be writable.
 */
enum HkStatus hk_cost(const struct HkInstance *inst,
                      const size_t *facilities,
                      size_t len,
                      double alpha,
                      double z,
                      double *out);

/**
 * Runs the solver over the guess grid. Returns [`HkStatus::NoSolution`] when every guess fails.
 *
 * # Safety
 * `inst` must be a live instance handle; `out` must be writable.
 */
enum HkStatus hk_solve(const struct HkInstance *inst,
                       double epsilon,
                       size_t repetitions,
                       uint64_t seed,
                       struct HkSolution **out);

/**
 * # Safety
 * `sol` must be null or a live handle from [`hk_solve`].
 */
void hk_solution_free(struct HkSolution *sol);

/**
 * Number of centers, or 0 for a null handle.
 *
 * # Safety
 * `sol` must be null or a live solution handle.
 */
size_t hk_solution_len(const struct HkSolution *sol);

/**
 * Cost at the inflated radius `(1 + eps/3) r` and at the reported radius `(1 + eps) r`.
 *
 * # Safety
 * `sol` must be a live solution handle; both outputs must be writable.
 */
enum HkStatus hk_solution_costs(const struct HkSolution *sol,
                                double *cost_r_prime,
                                double *cost_bicriteria);

/**
 * Copies the facility indices of a discrete solution into `out[0..len]`.
 *
 * # Safety
 * `out` must have room for `len` entries.
 */
enum HkStatus hk_solution_facilities(const struct HkSolution *sol, size_t *out, size_t len);

/**
 * JSON list of the solution's centers. Release with [`hk_string_free`].
 *
 * # Safety
 * `sol` must be a live solution handle; `out` must be writable.
 */
enum HkStatus hk_solution_to_json(const struct HkSolution *sol, char **out);

/**
 * Exact optimum of the instance by enumeration.
 *
 * # Safety
 * `inst` must be a live instance handle; `opt_cost` must be writable.
 */
enum HkStatus hk_brute_force(const struct HkInstance *inst, double *opt_cost);

/**
 * Builds an anchor set and the coreset for `epsilon`.
 *
 * # Safety
 * `inst` must be a live instance handle; `out` must be writable.
 */
enum HkStatus hk_coreset(const struct HkInstance *inst,
                         double epsilon,
                         uint64_t seed,
                         struct HkCoreset **out);

/**
 * # Safety
 * `set` must be null or a live handle from [`hk_coreset`].
 */
void hk_coreset_free(struct HkCoreset *set);

/**
 * Number of coreset members, or 0 for a null handle.
 *
 * # Safety
 * `set` must be null or a live coreset handle.
 */
size_t hk_coreset_len(const struct HkCoreset *set);

/**
 * Copies member client indices and weights into `points[0..len]` and `weights[0..len]`.
 *
 * # Safety
 * Both buffers must have room for `len` entries.
 */
enum HkStatus hk_coreset_members(const struct HkCoreset *set,
                                 size_t *points,
                                 uint64_t *weights,
                                 size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYBRID_H */
