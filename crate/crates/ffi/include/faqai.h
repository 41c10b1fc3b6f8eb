#ifndef FAQAI_H
#define FAQAI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. Values match the command-line exit statuses where both
 * exist.
 */
typedef enum FaqStatus {
  FAQ_STATUS_OK = 0,
  FAQ_STATUS_INVALID_ARGUMENT = 1,
  /**
   * Query refused: two or more inequalities, negative terms, unknown
   * feature or algebra.
   */
  FAQ_STATUS_REJECTED = 2,
  FAQ_STATUS_CYCLIC_JOIN = 3,
  /**
   * Row cap, sketch size cap, or count overflow.
   */
  FAQ_STATUS_LIMIT_EXCEEDED = 4,
  FAQ_STATUS_PARSE_ERROR = 5,
  FAQ_STATUS_IO_ERROR = 6,
  FAQ_STATUS_INTERNAL = 7,
} FaqStatus;

/**
 * Tables added so far; the join index is built on first use.
 */
typedef struct FaqDatabase FaqDatabase;

typedef struct FaqQuery FaqQuery;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates an empty database. Release with [`faq_database_free`].
 */
struct FaqDatabase *faq_database_new(void);

/**
 * Adds a table parsed from CSV text.
 *
 * # Safety
 * `db` must come from this library; `name` and `csv` must be
 * NUL-terminated strings.
 */
enum FaqStatus faq_database_add_csv(struct FaqDatabase *db,
                                    const char *name,
                                    const char *csv,
                                    int has_header);

/**
 * Loads every `.csv` file of a directory into a new database.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FaqStatus faq_database_load_dir(const char *path, struct FaqDatabase **out);

/**
 * # Safety
 * `db` must come from this library and not be used afterwards. Null is
 * ignored.
 */
void faq_database_free(struct FaqDatabase *db);

/**
 * Table count, largest table size, and feature count.
 *
 * # Safety
 * `db` must come from this library; outputs must be valid pointers.
 */
enum FaqStatus faq_database_stats(struct FaqDatabase *db, size_t *m, size_t *n, size_t *d);

/**
 * Parses a JSON query specification.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FaqStatus faq_query_parse(const char *json, struct FaqQuery **out);

/**
 * # Safety
 * `q` must come from this library and not be used afterwards. Null is
 * ignored.
 */
void faq_query_free(struct FaqQuery *q);

/**
 * Switches the query to exact evaluation.
 *
 * # Safety
 * `q` must come from this library.
 */
enum FaqStatus faq_query_set_exact(struct FaqQuery *q);

/**
 * Switches the query to approximate evaluation with relative error
 * `epsilon`.
 *
 * # Safety
 * `q` must come from this library.
 */
enum FaqStatus faq_query_set_epsilon(struct FaqQuery *q, double epsilon);

/**
 * Evaluates a query; the query must name its kind.
 *
 * # Safety
 * Handles must come from this library; `out` must be a valid pointer.
 */
enum FaqStatus faq_evaluate(struct FaqDatabase *db, const struct FaqQuery *q, double *out);

/**
 * Evaluates a query by materializing the join, stopping after `cap` rows.
 * Any number of inequalities is accepted.
 *
 * # Safety
 * Handles must come from this library; `out` must be a valid pointer.
 */
enum FaqStatus faq_oracle(struct FaqDatabase *db,
                          const struct FaqQuery *q,
                          size_t cap,
                          double *out);

/**
 * Writes the join tree as 1-based `(child, parent)` pairs into `edges`
 * (`2 * (m - 1)` entries) and the pair count into `len`. When `capacity`
 * is too small nothing is written except `len`, and the call fails with
 * `FAQ_STATUS_INVALID_ARGUMENT`.
 *
 * # Safety
 * `db` must come from this library; `edges` must hold `capacity` entries.
 */
enum FaqStatus faq_decompose(struct FaqDatabase *db, size_t *edges, size_t capacity, size_t *len);

/**
 * Message of the last failed call on this thread, or "". Valid until the
 * next call into this library on the same thread.
 */
const char *faq_last_error(void);

const char *faq_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FAQAI_H */
