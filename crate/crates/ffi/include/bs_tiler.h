#ifndef BS_TILER_H
#define BS_TILER_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every call.
typedef enum BsStatus {
  // Success.
  BS_STATUS_OK = 0,
  // A required pointer was null.
  BS_STATUS_NULL_POINTER = 1,
  // A string argument was not UTF-8.
  BS_STATUS_INVALID_UTF8 = 2,
  // A word, element or JSON document could not be parsed.
  BS_STATUS_PARSE = 3,
  // An argument was rejected.
  BS_STATUS_INVALID_INPUT = 4,
  // The computation failed.
  BS_STATUS_FAILED = 5,
  // A panic was caught at the boundary.
  BS_STATUS_PANIC = 6,
} BsStatus;

// A pattern on a finite subset of the group.
typedef struct BsPattern BsPattern;

// A normalized substitution with its eigendata.
typedef struct BsSubstitution BsSubstitution;

// Local-rule tables harvested for a substitution.
typedef struct BsTables BsTables;

// A finite patch of a tiling with its generator.
typedef struct BsWindow BsWindow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Static description of a status code.
const char *bs_status_message(enum BsStatus status);

// Releases a string returned by this library.
//
// # Safety
// `s` is null or a string from this library not yet released.
void bs_string_free(char *s);

// Normal form of a word over `a, A, t, T` in base `n`, as `t^i a^j t^-k`.
//
// # Safety
// `word` is a NUL-terminated string; `out` is writable.
enum BsStatus bs_normalize(const char *word, uint32_t n, char **out);

// Parses a substitution from JSON and normalizes it to the unique size
// property.
//
// # Safety
// `json` is a NUL-terminated string; `out` is writable.
enum BsStatus bs_substitution_from_json(const char *json, struct BsSubstitution **out);

// Expanding eigenvalue of the normalized substitution.
//
// # Safety
// `s` is a live handle; `out` is writable.
enum BsStatus bs_substitution_lambda(const struct BsSubstitution *s, double *out);

// Releases a substitution.
//
// # Safety
// `s` is null or a live handle.
void bs_substitution_free(struct BsSubstitution *s);

// Grows a window around a seed tile of letter index `letter`.
//
// # Safety
// `s` is a live handle; `out` is writable.
enum BsStatus bs_window_grow(const struct BsSubstitution *s,
                             size_t letter,
                             size_t up,
                             size_t down,
                             double half_width,
                             double y0,
                             uint64_t seed,
                             struct BsWindow **out);

// Number of tiles in a window.
//
// # Safety
// `w` is a live handle; `out` is writable.
enum BsStatus bs_window_tile_count(const struct BsWindow *w, size_t *out);

// SVG picture of a window over its own viewport.
//
// # Safety
// `w` is a live handle; `out` is writable.
enum BsStatus bs_window_render_svg(const struct BsWindow *w, double scale, char **out);

// Releases a window.
//
// # Safety
// `w` is null or a live handle.
void bs_window_free(struct BsWindow *w);

// Encodes a window on `R_{k,ℓ}`.
//
// # Safety
// `w` is a live handle; `out` is writable.
enum BsStatus bs_encode(const struct BsWindow *w, uint32_t k, uint32_t ell, struct BsPattern **out);

// Number of cells of a pattern.
//
// # Safety
// `p` is a live handle; `out` is writable.
enum BsStatus bs_pattern_len(const struct BsPattern *p, size_t *out);

// JSON form of a pattern.
//
// # Safety
// `p` and `s` are live handles; `out` is writable.
enum BsStatus bs_pattern_to_json(const struct BsPattern *p,
                                 const struct BsSubstitution *s,
                                 char **out);

// Releases a pattern.
//
// # Safety
// `p` is null or a live handle.
void bs_pattern_free(struct BsPattern *p);

// Harvests local-rule tables from `samples` random windows.
//
// # Safety
// `s` is a live handle; `out` is writable.
enum BsStatus bs_tables_harvest(const struct BsSubstitution *s,
                                size_t samples,
                                uint64_t seed,
                                struct BsTables **out);

// Releases tables.
//
// # Safety
// `t` is null or a live handle.
void bs_tables_free(struct BsTables *t);

// Number of local-rule violations of a pattern.
//
// # Safety
// `p` and `t` are live handles; `out` is writable.
enum BsStatus bs_check(const struct BsPattern *p, const struct BsTables *t, size_t *out);

// Checks newline-separated A/B/C/D/E rows; `out` receives the number of
// violations.
//
// # Safety
// `rows` is a NUL-terminated string; `out` is writable.
enum BsStatus bs_robinson_check(const char *rows, size_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BS_TILER_H */
