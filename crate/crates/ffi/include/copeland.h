#ifndef COPELAND_H
#define COPELAND_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum CopelandStatus {
  COPELAND_STATUS_OK = 0,
  COPELAND_STATUS_NULL_POINTER = 1,
  COPELAND_STATUS_INVALID_UTF8 = 2,
  COPELAND_STATUS_PARSE_ERROR = 3,
  COPELAND_STATUS_INVALID_ARGUMENT = 4,
  COPELAND_STATUS_BUDGET_EXCEEDED = 5,
  COPELAND_STATUS_WRONG_PROBLEM = 6,
  COPELAND_STATUS_BUFFER_TOO_SMALL = 7,
  COPELAND_STATUS_PANIC = 8,
} CopelandStatus;

typedef enum CopelandMethod {
  COPELAND_METHOD_EXACT = 0,
  COPELAND_METHOD_GREEDY = 1,
  COPELAND_METHOD_DP = 2,
  COPELAND_METHOD_FPT = 3,
} CopelandMethod;

/**
 * Opaque election handle.
 */
typedef struct CopelandElection CopelandElection;

/**
 * Opaque control-instance handle.
 */
typedef struct CopelandInstance CopelandInstance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the message of the last failure on this thread.
 */
enum CopelandStatus copeland_last_error(char *buf, size_t cap, size_t *needed);

/**
 * Parses an election in the text file format.
 */
enum CopelandStatus copeland_election_parse(const char *source, struct CopelandElection **election);

void copeland_election_free(struct CopelandElection *election);

enum CopelandStatus copeland_election_candidate_count(const struct CopelandElection *election,
                                                      size_t *count);

/**
 * Scaled scores (`t·wins + s·ties` for `alpha = s/t` in lowest terms) in
 * declaration order; `len` must be at least the candidate count.
 */
enum CopelandStatus copeland_election_scores(const struct CopelandElection *election,
                                             uint64_t alpha_num,
                                             uint64_t alpha_den,
                                             uint64_t *scaled,
                                             size_t len);

/**
 * Winner indices in declaration order; `count` receives how many.
 */
enum CopelandStatus copeland_election_winners(const struct CopelandElection *election,
                                              uint64_t alpha_num,
                                              uint64_t alpha_den,
                                              bool unique,
                                              size_t *winners,
                                              size_t len,
                                              size_t *count);

/**
 * Creates a control instance over a copy of `election`. `problem` is a
 * code such as `DCDC` or `CCRPC-TE`; `p` names the distinguished candidate.
 */
enum CopelandStatus copeland_instance_new(const struct CopelandElection *election,
                                          const char *problem,
                                          uint64_t alpha_num,
                                          uint64_t alpha_den,
                                          bool unique,
                                          const char *p,
                                          struct CopelandInstance **instance);

void copeland_instance_free(struct CopelandInstance *instance);

enum CopelandStatus copeland_instance_set_k(struct CopelandInstance *instance, size_t k);

/**
 * Marks candidates as spoilers; `names` is a candidates line such as
 * `candidates: d e`.
 */
enum CopelandStatus copeland_instance_set_spoilers(struct CopelandInstance *instance,
                                                   const char *names);

/**
 * Sets the unregistered voters from an election text over the same candidates.
 */
enum CopelandStatus copeland_instance_set_pool(struct CopelandInstance *instance, const char *pool);

/**
 * Overrides the goal, e.g. `unique:p` or `order:a<b`.
 */
enum CopelandStatus copeland_instance_set_goal(struct CopelandInstance *instance, const char *goal);

/**
 * Parameter for the FPT method, e.g. `BC_4`.
 */
enum CopelandStatus copeland_instance_set_bound(struct CopelandInstance *instance,
                                                const char *bound);

/**
 * Decides the instance. `yes` receives 1 or 0; when `witness` is not null
 * the witness block (empty for NO) is copied into it.
 */
enum CopelandStatus copeland_instance_solve(const struct CopelandInstance *instance,
                                            enum CopelandMethod method,
                                            int32_t *yes,
                                            char *witness,
                                            size_t cap,
                                            size_t *needed);

/**
 * Library version as a static NUL-terminated string.
 */
const char *copeland_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COPELAND_H */
