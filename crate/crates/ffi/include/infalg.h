#ifndef INFALG_H
#define INFALG_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum InfalgStatus {
  INFALG_STATUS_OK = 0,
  INFALG_STATUS_NULL_POINTER = 1,
  INFALG_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed or schema-violating document.
   */
  INFALG_STATUS_FORMAT = 3,
  /**
   * Well-formed input that the operation cannot accept.
   */
  INFALG_STATUS_INVALID = 4,
  /**
   * A Rust panic was caught at the boundary.
   */
  INFALG_STATUS_INTERNAL = 5,
} InfalgStatus;

/**
 * A parsed and validated problem document.
 */
typedef struct InfalgDocument InfalgDocument;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The message of the last failed call on this thread, or null. Owned by the library.
 */
const char *infalg_last_error(void);

/**
 * Parses a JSON document. On success `*out` holds a handle to release with [`infalg_document_free`].
 *
 * # Safety
 * `json` must be a nul-terminated string and `out` a valid pointer.
 */
enum InfalgStatus infalg_document_parse(const char *json,
                                        struct InfalgDocument **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `doc` must come from [`infalg_document_parse`] and not be used afterwards.
 */
void infalg_document_free(struct InfalgDocument *doc);

/**
 * Dimension of the document's graded space.
 *
 * # Safety
 * `doc` must be a live handle and `out` a valid pointer.
 */
enum InfalgStatus infalg_document_dim(const struct InfalgDocument *doc, size_t *out);

/**
 * Normalized JSON of the document; free it with [`infalg_string_free`].
 *
 * # Safety
 * `doc` must be a live handle and `out` a valid pointer.
 */
enum InfalgStatus infalg_document_serialize(const struct InfalgDocument *doc, char **out);

/**
 * Checks the structure equation up to `arity_cap`.
 *
 * `*holds` is 1 or 0; `*witness_arity` is the first failing arity, or 0.
 *
 * # Safety
 * `doc` must be a live handle; the output pointers must be valid.
 */
enum InfalgStatus infalg_check_structure(const struct InfalgDocument *doc,
                                         size_t arity_cap,
                                         int32_t *holds,
                                         size_t *witness_arity);

/**
 * Runs a command line (`argv[0]` is the program name) in-process.
 *
 * `*exit_code` gets the CLI exit code and `*report` the text it would print on
 * standard output, to be freed with [`infalg_string_free`]. Usage errors are
 * reported through the exit code, not the status.
 *
 * # Safety
 * `argv` must point to `argc` nul-terminated strings; the output pointers must be valid.
 */
enum InfalgStatus infalg_run_command(size_t argc,
                                     const char *const *argv,
                                     int32_t *exit_code,
                                     char **report);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void infalg_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* INFALG_H */
