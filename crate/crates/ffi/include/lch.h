#ifndef LCH_H
#define LCH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LchStatus {
  LCH_STATUS_OK = 0,
  LCH_STATUS_NULL_ARGUMENT = 1,
  LCH_STATUS_INVALID_UTF8 = 2,
  /**
   * The input was rejected (parse error, unknown name, bad shape).
   */
  LCH_STATUS_INVALID_INPUT = 3,
  /**
   * The input was accepted but the computation failed or hit a budget.
   */
  LCH_STATUS_COMPUTATION_FAILED = 4,
  /**
   * An internal panic was caught at the boundary.
   */
  LCH_STATUS_PANIC = 5,
} LchStatus;

/**
 * An augmentation of a particular DGA.
 */
typedef struct LchAugmentation LchAugmentation;

/**
 * A DGA over F2.
 */
typedef struct LchDga LchDga;

typedef struct LchRanks {
  size_t h0;
  size_t h1;
} LchRanks;

typedef struct LchFormulaReport {
  struct LchRanks twisted;
  struct LchRanks quotient;
  /**
   * Only meaningful when `has_resolved` is set.
   */
  struct LchRanks resolved;
  bool has_resolved;
  bool holds;
} LchFormulaReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next call into the library on the same thread.
 */
const char *lch_last_error(void);

/**
 * Library version as a static string.
 */
const char *lch_version(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void lch_string_free(char *s);

/**
 * Parses a DGA from its JSON form.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum LchStatus lch_dga_from_json(const char *json, struct LchDga **out);

/**
 * Derives the DGA of a diagram given as JSON. A `disc_budget` of 0 uses
 * the default search budget.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum LchStatus lch_dga_from_diagram_json(const char *json,
                                         uint64_t disc_budget,
                                         struct LchDga **out);

/**
 * # Safety
 * `dga` must be null or a handle from this library, not yet freed.
 */
void lch_dga_free(struct LchDga *dga);

/**
 * Number of generators, or 0 for a null handle.
 *
 * # Safety
 * `dga` must be null or a live handle.
 */
size_t lch_dga_generator_count(const struct LchDga *dga);

/**
 * Number of link components, or 0 for a null handle.
 *
 * # Safety
 * `dga` must be null or a live handle.
 */
size_t lch_dga_component_count(const struct LchDga *dga);

/**
 * # Safety
 * `dga` must be a live handle and `passed` a valid pointer.
 */
enum LchStatus lch_dga_check_d_squared(const struct LchDga *dga, bool *passed);

/**
 * Serializes the DGA; release the string with `lch_string_free`.
 *
 * # Safety
 * `dga` must be a live handle and `out` a valid pointer.
 */
enum LchStatus lch_dga_to_json(const struct LchDga *dga, char **out);

/**
 * Counts augmentations by exhaustive search over at most `cap` degree-0
 * generators.
 *
 * # Safety
 * `dga` must be a live handle and `count` a valid pointer.
 */
enum LchStatus lch_augmentation_count(const struct LchDga *dga, size_t cap, size_t *count);

/**
 * Reads augmentation values (`{"values": {"name": 0|1}}`) for `dga`. The
 * values are not checked; see `lch_augmentation_is_valid`.
 *
 * # Safety
 * `dga` must be a live handle, `json` a NUL-terminated string and `out` a
 * valid pointer.
 */
enum LchStatus lch_augmentation_from_json(const struct LchDga *dga,
                                          const char *json,
                                          struct LchAugmentation **out);

/**
 * # Safety
 * `aug` must be null or a handle from this library, not yet freed.
 */
void lch_augmentation_free(struct LchAugmentation *aug);

/**
 * Whether ε ∘ d = 0.
 *
 * # Safety
 * Handles must be live and `valid` a valid pointer.
 */
enum LchStatus lch_augmentation_is_valid(const struct LchDga *dga,
                                         const struct LchAugmentation *aug,
                                         bool *valid);

/**
 * Bilinearized homology between components `comp0` and `comp1`, with
 * `aug0` on the first block and `aug1` on the second.
 *
 * # Safety
 * Handles must be live, names NUL-terminated and `ranks` a valid pointer.
 */
enum LchStatus lch_bilinearized_homology(const struct LchDga *dga,
                                         const char *comp0,
                                         const char *comp1,
                                         const struct LchAugmentation *aug0,
                                         const struct LchAugmentation *aug1,
                                         struct LchRanks *ranks);

/**
 * Runs the surgery formula check on a fixture file.
 *
 * # Safety
 * `path` must be NUL-terminated and `report` a valid pointer.
 */
enum LchStatus lch_surgery_formula(const char *path, struct LchFormulaReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LCH_H */
