#ifndef HYPERKNOW_H
#define HYPERKNOW_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HkStatus {
  HK_STATUS_OK = 0,
  HK_STATUS_NULL_POINTER = 1,
  HK_STATUS_INVALID_UTF8 = 2,
  HK_STATUS_PARSE_ERROR = 3,
  HK_STATUS_INVALID_STATE = 4,
  HK_STATUS_CAP_EXCEEDED = 5,
  HK_STATUS_UNKNOWN_LAW = 6,
  HK_STATUS_INTERNAL = 7,
} HkStatus;

typedef enum HkKnowledge {
  HK_KNOWLEDGE_COMMON = 0,
  HK_KNOWLEDGE_UNKNOWN = 1,
} HkKnowledge;

typedef enum HkMode {
  HK_MODE_TELLING = 0,
  HK_MODE_FORWARDING = 1,
} HkMode;

typedef enum HkVerdict {
  HK_VERDICT_TRUE = 0,
  HK_VERDICT_FALSE = 1,
  HK_VERDICT_UNKNOWN = 2,
} HkVerdict;

/**
 * Opaque model handle: an interaction model together with its state.
 */
typedef struct HkModel HkModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a model file. On success `*out` owns a handle to release with
 * [`hk_model_free`].
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a writable pointer.
 */
enum HkStatus hk_model_parse(const char *text, struct HkModel **out);

/**
 * Loads a built-in example (`ex1` … `ex5`, `fig1a`).
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a writable pointer.
 */
enum HkStatus hk_model_builtin(const char *name, struct HkModel **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `model` must be null or a handle not yet freed.
 */
void hk_model_free(struct HkModel *model);

/**
 * # Safety
 * `model` must be a live handle.
 */
enum HkStatus hk_model_set_knowledge(struct HkModel *model, enum HkKnowledge knowledge);

/**
 * # Safety
 * `model` must be a live handle.
 */
enum HkStatus hk_model_set_mode(struct HkModel *model, enum HkMode mode);

/**
 * Number of states of the model, enumerating at most `max_states`.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum HkStatus hk_model_state_count(const struct HkModel *model, size_t max_states, size_t *out);

/**
 * Number of legality violations of the handle's state; 0 means legal.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum HkStatus hk_model_validate(const struct HkModel *model, size_t *out);

/**
 * Decides `formula` at the handle's state. A negative `bound` selects the
 * exact engine; otherwise only states with at most `bound` messages are
 * considered and the verdict may be unknown.
 *
 * # Safety
 * `model` must be a live handle, `formula` a NUL-terminated string and
 * `out` writable.
 */
enum HkStatus hk_check(const struct HkModel *model,
                       const char *formula,
                       int64_t bound,
                       size_t max_states,
                       enum HkVerdict *out);

/**
 * Runs one law over the built-ins and `instances` seeded random models.
 * `*out_passed` is true when the law met its expected verdict.
 *
 * # Safety
 * `law` must be a NUL-terminated string and `out_passed` writable.
 */
enum HkStatus hk_law_check(const char *law, uint64_t seed, size_t instances, bool *out_passed);

/**
 * The handle rendered as a model file; release with [`hk_string_free`].
 *
 * # Safety
 * `model` must be a live handle.
 */
char *hk_model_to_string(const struct HkModel *model);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void hk_string_free(char *s);

/**
 * Description of the last failure on this thread. After a successful
 * `hk_model_validate` or `hk_law_check` it holds the first violation, if any;
 * otherwise it is empty after success.
 * Valid until the next call into the library on the same thread.
 */
const char *hk_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *hk_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYPERKNOW_H */
