#ifndef PATTERN_VIEWS_H
#define PATTERN_VIEWS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result of every call.
 */
typedef enum PvStatus {
  PV_STATUS_OK = 0,
  PV_STATUS_NULL_ARGUMENT = 1,
  PV_STATUS_INVALID_UTF8 = 2,
  PV_STATUS_NOT_FOUND = 3,
  PV_STATUS_CONFLICT = 4,
  PV_STATUS_INVALID = 5,
  PV_STATUS_MALFORMED = 6,
  PV_STATUS_IO = 7,
  PV_STATUS_PANIC = 8,
} PvStatus;

/**
 * Opaque repository handle.
 */
typedef struct PvRepository PvRepository;

/**
 * Creates an empty in-memory repository. Never returns null.
 */
struct PvRepository *pv_repository_new(void);

/**
 * Opens (or creates on first write) the state file at `path`.
 *
 * # Safety
 * `path` must be a nul-terminated string and `out` a valid pointer.
 */
enum PvStatus pv_repository_open(const char *path, struct PvRepository **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `handle` must come from this library and not be used afterwards.
 */
void pv_repository_free(struct PvRepository *handle);

/**
 * Installs the built-in seed corpus into an empty repository.
 *
 * # Safety
 * `handle` must be a live handle.
 */
enum PvStatus pv_repository_seed_corpus(const struct PvRepository *handle);

/**
 * Imports a bundle document into an empty repository.
 *
 * # Safety
 * `handle` must be live and `bundle_json` nul-terminated.
 */
enum PvStatus pv_repository_import_bundle(const struct PvRepository *handle,
                                          const char *bundle_json,
                                          bool lenient);

/**
 * Writes the repository as a canonical-json bundle to `*out`.
 *
 * # Safety
 * `handle` must be live and `out` valid.
 */
enum PvStatus pv_repository_export_bundle(const struct PvRepository *handle, char **out);

/**
 * Renders a view graph as `dot`, `graphml` or `json`. With `with_layout`
 * the output includes positions computed from `seed` and `iterations`
 * (0 selects the default).
 *
 * # Safety
 * `handle` must be live, strings nul-terminated and `out` valid.
 */
enum PvStatus pv_render_view(const struct PvRepository *handle,
                             const char *view_id,
                             const char *format,
                             bool with_layout,
                             uint64_t seed,
                             uint32_t iterations,
                             char **out);

/**
 * Validates one view, or the whole repository when `view_id` is null.
 * Writes the diagnostics as a json array and their error-severity count.
 *
 * # Safety
 * `handle` must be live, `view_id` null or nul-terminated, `out` valid.
 */
enum PvStatus pv_validate(const struct PvRepository *handle,
                          const char *view_id,
                          char **out,
                          size_t *error_count);

/**
 * Patterns outside the view within `depth` language relations, as json.
 *
 * # Safety
 * `handle` must be live, `view_id` nul-terminated and `out` valid.
 */
enum PvStatus pv_neighborhood(const struct PvRepository *handle,
                              const char *view_id,
                              int64_t depth,
                              char **out);

/**
 * Current version of a view, for use as `expected_version`.
 *
 * # Safety
 * `handle` must be live, `view_id` nul-terminated and `version` valid.
 */
enum PvStatus pv_view_version(const struct PvRepository *handle,
                              const char *view_id,
                              uint64_t *version);

/**
 * Adds a member to a view at `expected_version`; writes the new version.
 *
 * # Safety
 * `handle` must be live, strings nul-terminated, `new_version` null or valid.
 */
enum PvStatus pv_view_add_pattern(const struct PvRepository *handle,
                                  const char *view_id,
                                  const char *pattern_id,
                                  uint64_t expected_version,
                                  uint64_t *new_version);

/**
 * Adds a view-owned relation described by json
 * `{"sourceId","targetId","type","description"}`; writes the relation id
 * to `*relation_id` and the new view version.
 *
 * # Safety
 * `handle` must be live, strings nul-terminated, `relation_id` valid.
 */
enum PvStatus pv_view_add_relation(const struct PvRepository *handle,
                                   const char *view_id,
                                   const char *relation_json,
                                   uint64_t expected_version,
                                   char **relation_id,
                                   uint64_t *new_version);

/**
 * Checks that a bundle would import, without touching any repository.
 *
 * # Safety
 * `bundle_json` must be nul-terminated.
 */
enum PvStatus pv_check_bundle(const char *bundle_json, bool lenient);

/**
 * Message of the last failure on this thread, or null. Valid until the next
 * call into this library on the same thread.
 */
const char *pv_last_error_message(void);

/**
 * Module error code of the last failure on this thread (for example
 * `EndpointNotInView`), or null.
 */
const char *pv_last_error_code(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void pv_string_free(char *s);

#endif  /* PATTERN_VIEWS_H */
