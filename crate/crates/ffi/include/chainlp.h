#ifndef CHAINLP_H
#define CHAINLP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible function.
 */
typedef enum ChainlpStatus {
  CHAINLP_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  CHAINLP_STATUS_NULL_POINTER = 1,
  /**
   * The input data failed validation.
   */
  CHAINLP_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The exact oracle refuses instances this large.
   */
  CHAINLP_STATUS_TOO_LARGE = 3,
  /**
   * The profile violates feasibility or exceeds the budget.
   */
  CHAINLP_STATUS_INFEASIBLE = 4,
  /**
   * The handle does not carry the data the call needs
   * (e.g. rewards require a mechanism instance).
   */
  CHAINLP_STATUS_WRONG_KIND = 5,
} ChainlpStatus;

/**
 * Solver selector for [`chainlp_solve`].
 */
typedef enum ChainlpAlgorithm {
  /**
   * Quadratic greedy reference.
   */
  CHAINLP_ALGORITHM_GREEDY = 0,
  /**
   * O(n log n) solver.
   */
  CHAINLP_ALGORITHM_FAST = 1,
  /**
   * Exact rational vertex enumeration (small n only).
   */
  CHAINLP_ALGORITHM_ORACLE = 2,
} ChainlpAlgorithm;

/**
 * Opaque problem instance, either in LP form or in mechanism form.
 */
typedef struct ChainlpInstance ChainlpInstance;

/**
 * Opaque step reward function as (threshold, level) breakpoints.
 */
typedef struct ChainlpReward ChainlpReward;

/**
 * Opaque solution: profile, objective and budget use.
 */
typedef struct ChainlpSolution ChainlpSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates an instance from LP data: bounds `q`, weights `z` (both of
 * length `n`) and budget `k`. On success writes the new handle to `out`.
 *
 * # Safety
 * `q` and `z` must point to `n` readable doubles; `out` must be writable.
 */
enum ChainlpStatus chainlp_instance_from_lp(const double *q,
                                            const double *z,
                                            uintptr_t n,
                                            double k,
                                            struct ChainlpInstance **out);

/**
 * Creates an instance from mechanism data: agent types `q` (any order),
 * reward budget `budget` and cost constant `cost`.
 *
 * # Safety
 * `q` must point to `n` readable doubles; `out` must be writable.
 */
enum ChainlpStatus chainlp_instance_from_mechanism(const double *q,
                                                   uintptr_t n,
                                                   double budget,
                                                   double cost,
                                                   struct ChainlpInstance **out);

/**
 * Number of variables (agents) in the instance; 0 for a null handle.
 *
 * # Safety
 * `inst` must be a live handle from this library or null.
 */
uintptr_t chainlp_instance_n(const struct ChainlpInstance *inst);

/**
 * Frees an instance handle; null is a no-op.
 *
 * # Safety
 * `inst` must be a handle from this library, freed at most once.
 */
void chainlp_instance_free(struct ChainlpInstance *inst);

/**
 * Solves the instance with the selected algorithm. Mechanism instances are
 * reduced to their LP first and the solution is reported in the caller's
 * original agent order.
 *
 * # Safety
 * `inst` must be a live handle; `out` must be writable.
 */
enum ChainlpStatus chainlp_solve(const struct ChainlpInstance *inst,
                                 enum ChainlpAlgorithm algorithm,
                                 struct ChainlpSolution **out);

/**
 * Number of entries in the solution profile; 0 for a null handle.
 *
 * # Safety
 * `sol` must be a live handle from this library or null.
 */
uintptr_t chainlp_solution_len(const struct ChainlpSolution *sol);

/**
 * Objective value (sum of the profile); NaN for a null handle.
 *
 * # Safety
 * `sol` must be a live handle from this library or null.
 */
double chainlp_solution_objective(const struct ChainlpSolution *sol);

/**
 * Budget consumed by the solution; NaN for a null handle.
 *
 * # Safety
 * `sol` must be a live handle from this library or null.
 */
double chainlp_solution_budget_used(const struct ChainlpSolution *sol);

/**
 * Copies the solution profile into `buf` (capacity `len`); returns the
 * number of values written.
 *
 * # Safety
 * `sol` must be a live handle; `buf` must hold `len` writable doubles.
 */
uintptr_t chainlp_solution_values(const struct ChainlpSolution *sol, double *buf, uintptr_t len);

/**
 * Frees a solution handle; null is a no-op.
 *
 * # Safety
 * `sol` must be a handle from this library, freed at most once.
 */
void chainlp_solution_free(struct ChainlpSolution *sol);

/**
 * Builds the step reward function for a target profile over a mechanism
 * instance. The profile is given in the caller's original agent order.
 * Fails with `CHAINLP_STATUS_WRONG_KIND` for LP-form instances and with
 * `CHAINLP_STATUS_INFEASIBLE` when the profile cannot be incentivized
 * within the budget.
 *
 * # Safety
 * `inst` must be a live handle; `x` must point to `len` readable doubles;
 * `out` must be writable.
 */
enum ChainlpStatus chainlp_reward_build(const struct ChainlpInstance *inst,
                                        const double *x,
                                        uintptr_t len,
                                        struct ChainlpReward **out);

/**
 * Number of breakpoints in the reward function; 0 for a null handle.
 *
 * # Safety
 * `reward` must be a live handle from this library or null.
 */
uintptr_t chainlp_reward_len(const struct ChainlpReward *reward);

/**
 * Copies up to `len` breakpoints into `thresholds` and `levels`; returns
 * the number of pairs written.
 *
 * # Safety
 * `reward` must be a live handle; both buffers must hold `len` writable
 * doubles.
 */
uintptr_t chainlp_reward_breakpoints(const struct ChainlpReward *reward,
                                     double *thresholds,
                                     double *levels,
                                     uintptr_t len);

/**
 * Reward paid at quality `x`; NaN for a null handle.
 *
 * # Safety
 * `reward` must be a live handle from this library or null.
 */
double chainlp_reward_value(const struct ChainlpReward *reward, double x);

/**
 * Checks incentive compatibility of a reward function against a target
 * profile (caller order); writes 1 to `pass` when no agent has a
 * profitable deviation and the budget holds, else 0.
 *
 * # Safety
 * `inst` and `reward` must be live handles; `x` must point to `len`
 * readable doubles; `pass` must be writable.
 */
enum ChainlpStatus chainlp_reward_verify(const struct ChainlpReward *reward,
                                         const struct ChainlpInstance *inst,
                                         const double *x,
                                         uintptr_t len,
                                         int32_t *pass);

/**
 * Frees a reward handle; null is a no-op.
 *
 * # Safety
 * `reward` must be a handle from this library, freed at most once.
 */
void chainlp_reward_free(struct ChainlpReward *reward);

/**
 * Static description of a status code; never null.
 */
const char *chainlp_status_message(enum ChainlpStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHAINLP_H */
