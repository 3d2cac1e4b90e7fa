#ifndef E8SPREAD_H
#define E8SPREAD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Spread classes accepted by [`e8_pipeline_new`].
 */
#define E8_CLASS_A 0

#define E8_CLASS_B 1

/**
 * Result codes.
 */
typedef enum {
  E8_STATUS_OK = 0,
  E8_STATUS_NULL_POINTER = 1,
  E8_STATUS_INVALID_ARGUMENT = 2,
  E8_STATUS_VERIFICATION = 3,
  E8_STATUS_PARSE = 4,
  E8_STATUS_IO = 5,
  E8_STATUS_PANIC = 6,
} E8Status;

/**
 * Opaque pipeline state: the spread, frame array and partition of one
 * class, plus the stabilizer once requested.
 */
typedef struct E8Pipeline E8Pipeline;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static nul-terminated string.
 */
const char *e8_version(void);

/**
 * Message for the last failure on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *e8_last_error(void);

/**
 * Builds and certifies the spread, frame array and partition for `class`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
E8Status e8_pipeline_new(uint32_t class_, E8Pipeline **out);

/**
 * Releases a handle. NULL is ignored.
 *
 * # Safety
 * `p` must be NULL or a handle from [`e8_pipeline_new`] not yet freed.
 */
void e8_pipeline_free(E8Pipeline *p);

/**
 * Writes the four basis rows (bit i = coordinate i mod 2) of spread
 * member `index` (0..9) to `rows_out`.
 *
 * # Safety
 * `p` must be a live handle and `rows_out` must point to 4 writable bytes.
 */
E8Status e8_pipeline_spread_space(const E8Pipeline *p, size_t index, uint8_t *rows_out);

/**
 * Writes the 8 sorted root-pair ids of frame `(row, col)` to `ids_out`.
 *
 * # Safety
 * `p` must be a live handle and `ids_out` must point to 8 writable `u32`.
 */
E8Status e8_pipeline_frame_roots(const E8Pipeline *p, size_t row, size_t col, uint32_t *ids_out);

/**
 * Block (0..9) containing the norm-4 vector with basis coordinates
 * `coords[0..8]`.
 *
 * # Safety
 * `p` must be a live handle, `coords` must point to 8 readable `i64` and
 * `block_out` to one writable `u32`.
 */
E8Status e8_pipeline_block_of(const E8Pipeline *p, const int64_t *coords, uint32_t *block_out);

/**
 * Number of blocks in the partition (9).
 *
 * # Safety
 * `p` must be a live handle.
 */
size_t e8_pipeline_block_count(const E8Pipeline *p);

/**
 * Computes (once) and returns the order of the partition's stabilizer.
 *
 * # Safety
 * `p` must be a live handle and `order_out` must point to one writable
 * `u64`.
 */
E8Status e8_pipeline_group_order(E8Pipeline *p, uint64_t *order_out);

/**
 * Runs the full certification and writes the artifacts to `dir`.
 *
 * # Safety
 * `dir` must be a valid nul-terminated path.
 */
E8Status e8_certify_to_directory(const char *dir, uint32_t class_, bool skip_group);

/**
 * Re-verifies `count` artifact files.
 *
 * # Safety
 * `paths` must point to `count` valid nul-terminated strings.
 */
E8Status e8_verify_files(const char *const *paths, size_t count);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* E8SPREAD_H */
