#ifndef HORNOPT_H
#define HORNOPT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HornoptStatus {
  HORNOPT_STATUS_OK = 0,
  HORNOPT_STATUS_NULL_POINTER = 1,
  HORNOPT_STATUS_INVALID_UTF8 = 2,
  HORNOPT_STATUS_PARSE = 3,
  HORNOPT_STATUS_INVALID_ARGUMENT = 4,
  HORNOPT_STATUS_LIMIT = 5,
  HORNOPT_STATUS_INTERNAL = 6,
} HornoptStatus;

typedef enum HornoptStrategy {
  HORNOPT_STRATEGY_OCCURRENCE = 0,
  HORNOPT_STRATEGY_EXHAUSTIVE = 1,
  HORNOPT_STRATEGY_MCTS_UCT = 2,
  HORNOPT_STRATEGY_MCTS_SA_UCT = 3,
  HORNOPT_STRATEGY_NMCS = 4,
} HornoptStrategy;

typedef enum HornoptDirection {
  HORNOPT_DIRECTION_FORWARD = 0,
  HORNOPT_DIRECTION_BACKWARD = 1,
} HornoptDirection;

/**
 * Parsed polynomial.
 */
typedef struct HornoptPolynomial HornoptPolynomial;

/**
 * Outcome of a search, tied to the polynomial it was run on.
 */
typedef struct HornoptResult HornoptResult;

typedef struct HornoptOpCount {
  uint64_t muls;
  uint64_t adds;
} HornoptOpCount;

typedef struct HornoptSearchConfig {
  enum HornoptStrategy strategy;
  enum HornoptDirection direction;
  double cp;
  uint64_t iterations;
  uint64_t seed;
  /**
   * Nesting level for NMCS.
   */
  uint32_t level;
} HornoptSearchConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *hornopt_last_error_message(void);

void hornopt_string_free(char *s);

enum HornoptStatus hornopt_polynomial_parse(const char *src, struct HornoptPolynomial **out);

/**
 * Builds `res(m, n)` (subject to the library's degree cap).
 */
enum HornoptStatus hornopt_gen_res(uint32_t m, uint32_t n, struct HornoptPolynomial **out);

void hornopt_polynomial_free(struct HornoptPolynomial *p);

/**
 * Number of variables, or 0 for a null handle.
 */
size_t hornopt_polynomial_num_vars(const struct HornoptPolynomial *p);

/**
 * Number of terms, or 0 for a null handle.
 */
size_t hornopt_polynomial_num_terms(const struct HornoptPolynomial *p);

enum HornoptStatus hornopt_polynomial_to_string(const struct HornoptPolynomial *p, char **out);

/**
 * Operation count of the polynomial as written out term by term.
 */
enum HornoptStatus hornopt_polynomial_expanded_ops(const struct HornoptPolynomial *p,
                                                   struct HornoptOpCount *out);

struct HornoptSearchConfig hornopt_search_config_default(void);

enum HornoptStatus hornopt_simplify(const struct HornoptPolynomial *p,
                                    const struct HornoptSearchConfig *config,
                                    struct HornoptResult **out);

void hornopt_result_free(struct HornoptResult *r);

enum HornoptStatus hornopt_result_ops(const struct HornoptResult *r, struct HornoptOpCount *out);

/**
 * Number of schemes the search evaluated, or 0 for a null handle.
 */
uint64_t hornopt_result_evaluations(const struct HornoptResult *r);

/**
 * Best variable order as comma-separated names. For a backward search this
 * is the order as stored, before the reversal applied at evaluation.
 */
enum HornoptStatus hornopt_result_scheme(const struct HornoptResult *r, char **out);

/**
 * Straight-line code for the best scheme, assigning the value to `target`.
 */
enum HornoptStatus hornopt_result_emit_code(const struct HornoptResult *r,
                                            const char *target,
                                            char **out);

const char *hornopt_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HORNOPT_H */
