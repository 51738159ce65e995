#ifndef EINCLASS_H
#define EINCLASS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every call.
typedef enum EinclassStatus {
  EINCLASS_STATUS_OK = 0,
  EINCLASS_STATUS_NULL_POINTER = 1,
  EINCLASS_STATUS_INVALID_UTF8 = 2,
  // unknown catalog name, bad parameter, unparsable metric text
  EINCLASS_STATUS_METRIC = 3,
  // point outside the domain box or wrong signature there
  EINCLASS_STATUS_DOMAIN = 4,
  // internal identity check failed; no verdict is produced
  EINCLASS_STATUS_IDENTITY = 5,
  EINCLASS_STATUS_INVALID_ARGUMENT = 6,
  EINCLASS_STATUS_PANIC = 7,
} EinclassStatus;

// Class label of `∇T`.
typedef enum EinclassLabel {
  EINCLASS_LABEL_PARALLEL = 0,
  EINCLASS_LABEL_O1 = 1,
  EINCLASS_LABEL_O2 = 2,
  EINCLASS_LABEL_O3 = 3,
  EINCLASS_LABEL_O12 = 4,
  EINCLASS_LABEL_O13 = 5,
  EINCLASS_LABEL_O23 = 6,
  EINCLASS_LABEL_GENERIC = 7,
} EinclassLabel;

// Opaque metric handle.
typedef struct EinclassMetric EinclassMetric;

// Verdict at one point.
typedef struct EinclassVerdict {
  enum EinclassLabel label;
  double scalar;
  double nabla_t_norm;
  // frame norms of the three projections of `∇T`
  double projection_norms[3];
  // nonzero when the energy-momentum tensor itself vanishes
  uint8_t vacuum;
} EinclassVerdict;

// Tensors at one point, row-major with the derivative index first.
typedef struct EinclassComponents {
  double g[16];
  double g_inv[16];
  // `Γ^k_ij` at `[k*16 + i*4 + j]`
  double christoffel[64];
  double ricci[16];
  double scalar;
  double t[16];
  // `∇_k T_ij` at `[k*16 + i*4 + j]`
  double nabla_t[64];
} EinclassComponents;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on this thread.
const char *einclass_last_error(void);

// Library version as a static NUL-terminated string.
const char *einclass_version(void);

// Build a catalog metric. `params` is `key=value` pairs separated by `;`
// (e.g. `"m=2"`, `"spatial=1,0,0,1,0,1"`), or null for defaults.
//
// # Safety
// `name` and `params` must be null or NUL-terminated strings; `out` must be writable.
enum EinclassStatus einclass_metric_from_catalog(const char *name,
                                                 const char *params,
                                                 struct EinclassMetric **out);

// Build a metric from the text file format.
//
// # Safety
// `source` must be a NUL-terminated string; `out` must be writable.
enum EinclassStatus einclass_metric_from_text(const char *source, struct EinclassMetric **out);

// # Safety
// `metric` must be null or a handle from this library not yet freed.
void einclass_metric_free(struct EinclassMetric *metric);

// Classify `∇T` at `point[4]`. Zero tolerances select the defaults.
//
// # Safety
// `metric` must be a live handle, `point` must hold four doubles, `out` must be writable.
enum EinclassStatus einclass_classify_point(const struct EinclassMetric *metric,
                                            const double *point_ptr,
                                            double tol_rel,
                                            double tol_floor,
                                            struct EinclassVerdict *out);

// Metric, connection and curvature values at `point[4]`.
//
// # Safety
// `metric` must be a live handle, `point` must hold four doubles, `out` must be writable.
enum EinclassStatus einclass_components(const struct EinclassMetric *metric,
                                        const double *point_ptr,
                                        struct EinclassComponents *out);

// Classify over a uniform grid with `n` points per axis and return the JSON report.
// Release the string with [`einclass_string_free`].
//
// # Safety
// `metric` must be a live handle and `out` writable.
enum EinclassStatus einclass_classify_grid_json(const struct EinclassMetric *metric,
                                                uint32_t n,
                                                double tol_rel,
                                                double tol_floor,
                                                char **out);

// # Safety
// `s` must be null or a string returned by this library not yet freed.
void einclass_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EINCLASS_H */
