#ifndef YM2D_H
#define YM2D_H

/* Generated from the ym2d-ffi crate by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Group code for U(1).
 */
#define YM2D_GROUP_U1 0

/**
 * Group code for SU(2).
 */
#define YM2D_GROUP_SU2 1

/**
 * Group code for SO(3).
 */
#define YM2D_GROUP_SO3 2

/**
 * Status code returned by every fallible entry point.
 */
typedef enum Ym2dStatus {
  /**
   * Success; out-parameters are valid.
   */
  YM2D_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  YM2D_STATUS_NULL_POINTER = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  YM2D_STATUS_INVALID_UTF8 = 2,
  /**
   * An argument was out of range or inconsistent.
   */
  YM2D_STATUS_INVALID_ARGUMENT = 3,
  /**
   * A time/area parameter was outside its admissible range.
   */
  YM2D_STATUS_INVALID_TIME = 4,
  /**
   * Objects from different groups were combined.
   */
  YM2D_STATUS_GROUP_MISMATCH = 5,
  /**
   * Malformed or inconsistent graph data.
   */
  YM2D_STATUS_INVALID_GRAPH = 6,
  /**
   * A character series could not resolve the requested value.
   */
  YM2D_STATUS_SERIES_FAILURE = 7,
  /**
   * A density or conditioning value was degenerate.
   */
  YM2D_STATUS_DEGENERATE_DENSITY = 8,
  /**
   * I/O or (de)serialization failure.
   */
  YM2D_STATUS_IO_FAILURE = 9,
  /**
   * An internal panic was caught at the boundary.
   */
  YM2D_STATUS_PANIC = 10,
} Ym2dStatus;

/**
 * Opaque surface-graph handle.
 */
typedef struct Ym2dGraph Ym2dGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static null-terminated string.
 */
const char *ym2d_version(void);

/**
 * Message for the most recent failure on this thread (empty if none).
 * Valid until the next failing call on the same thread.
 */
const char *ym2d_last_error(void);

/**
 * Parse a surface graph from its JSON description and validate it.
 * On success writes a handle that must be released with `ym2d_graph_free`.
 *
 * # Safety
 * `json` must be a null-terminated string and `out` a valid pointer.
 */
enum Ym2dStatus ym2d_graph_from_json(const char *json, struct Ym2dGraph **out);

/**
 * Release a graph handle. A null pointer is a no-op.
 *
 * # Safety
 * `graph` must be a handle from `ym2d_graph_from_json`, released once.
 */
void ym2d_graph_free(struct Ym2dGraph *graph);

/**
 * Report the vertex, edge, and face counts of a graph.
 *
 * # Safety
 * All pointers must be valid; `graph` must be a live handle.
 */
enum Ym2dStatus ym2d_graph_counts(const struct Ym2dGraph *graph,
                                  uint32_t *out_vertices,
                                  uint32_t *out_edges,
                                  uint32_t *out_faces);

/**
 * Heat-kernel density `p_t` at a conjugacy class angle.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum Ym2dStatus ym2d_heat_kernel(uint32_t group, double t, double angle, double tol, double *out);

/**
 * Natural logarithm of the heat-kernel density, finite even where the
 * value itself underflows double precision.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum Ym2dStatus ym2d_log_heat_kernel(uint32_t group,
                                     double t,
                                     double angle,
                                     double tol,
                                     double *out);

/**
 * Partition function `Z_{p,g,T}(classes)` of a surface with `boundaries`
 * boundary circles, genus `genus`, total area `area`, and the given
 * boundary class angles (`n_classes` must equal `boundaries`; pass null
 * with `n_classes = 0` for a closed surface).
 *
 * # Safety
 * `class_angles` must point to `n_classes` doubles (or be null when
 * `n_classes` is 0); `out` must be valid.
 */
enum Ym2dStatus ym2d_partition_value(uint32_t group,
                                     uint32_t boundaries,
                                     uint32_t genus,
                                     double area,
                                     const double *class_angles,
                                     size_t n_classes,
                                     double tol,
                                     double *out);

/**
 * Closed-form sphere Wilson-loop moment: the expected character of the
 * holonomy of a simple loop enclosing `loop_area` on a sphere of total
 * area `total_area`, in the irrep with the given label.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum Ym2dStatus ym2d_sphere_loop_moment(uint32_t group,
                                        double loop_area,
                                        double total_area,
                                        int64_t label,
                                        double tol,
                                        double *out);

/**
 * Estimate a Wilson-loop character moment by running a seeded Metropolis
 * chain over the edge measure of `graph` and averaging the character of
 * the loop holonomy (first tenth of the chain discarded as burn-in).
 *
 * The loop is given as `word_len` letters; letter `i` traverses edge
 * `word_edges[i]` forward if `word_signs[i] > 0` and backward otherwise.
 * Identical inputs produce identical estimates (the chain is seeded).
 *
 * # Safety
 * `graph` must be a live handle; `word_edges`/`word_signs` must point to
 * `word_len` elements; the three out-pointers must be valid.
 */
enum Ym2dStatus ym2d_wilson_estimate(uint32_t group,
                                     const struct Ym2dGraph *graph,
                                     const uint32_t *word_edges,
                                     const int32_t *word_signs,
                                     size_t word_len,
                                     int64_t label,
                                     size_t steps,
                                     size_t stride,
                                     uint64_t seed,
                                     double *out_re,
                                     double *out_im,
                                     double *out_stderr);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* YM2D_H */
