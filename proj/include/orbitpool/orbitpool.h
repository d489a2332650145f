/*
 * Copyright 2026 The orbitpool Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#ifndef ORBITPOOL_ORBITPOOL_H_
#define ORBITPOOL_ORBITPOOL_H_

#include <stddef.h>
#include <stdint.h>

#if defined(ORBITPOOL_BUILDING_LIBRARY)
#define ORBITPOOL_API __attribute__((visibility("default")))
#else
#define ORBITPOOL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum op_status {
  OP_OK = 0,
  OP_ERR_INVALID_ARGUMENT = 1,
  OP_ERR_NOT_FOUND = 2,
  OP_ERR_UNSUPPORTED_FORMAT = 3,
  OP_ERR_IO = 4,
  OP_ERR_OUT_OF_BOUNDS = 5,
  OP_ERR_TOO_SMALL = 6,
  OP_ERR_INTERNAL = 7
} op_status;

typedef enum op_kind {
  OP_KIND_SIFT = 0,
  OP_KIND_DSP_SIFT = 1,
  OP_KIND_SC = 2,
  OP_KIND_DSP_SC = 3
} op_kind;

typedef enum op_detector { OP_DETECT_GRID = 0, OP_DETECT_DOG = 1 } op_detector;

typedef enum op_metric { OP_METRIC_EUCLIDEAN = 0, OP_METRIC_BHATTACHARYYA = 1 } op_metric;

typedef struct op_image op_image;
typedef struct op_features op_features;
typedef struct op_template op_template;
typedef struct op_report op_report;

ORBITPOOL_API const char* op_version(void);
/* Message of the most recent failure on the calling thread; "" if none. */
ORBITPOOL_API const char* op_last_error(void);
ORBITPOOL_API const char* op_status_name(op_status status);

ORBITPOOL_API op_status op_kind_parse(const char* name, op_kind* out);
ORBITPOOL_API const char* op_kind_name(op_kind kind);

/* ---- images: grayscale doubles in [0, 1], row-major ---- */

ORBITPOOL_API op_status op_image_load(const char* path, op_image** out);
/* values may be NULL for an all-zero image. */
ORBITPOOL_API op_status op_image_create(int width, int height, const double* values,
                                        op_image** out);
ORBITPOOL_API void op_image_free(op_image* image);
ORBITPOOL_API int op_image_width(const op_image* image);
ORBITPOOL_API int op_image_height(const op_image* image);
ORBITPOOL_API const double* op_image_data(const op_image* image);
ORBITPOOL_API op_status op_image_write_pgm(const op_image* image, const char* path);

/* ---- descriptors ---- */

typedef struct op_describe_options {
  op_kind kind;
  op_detector detector;
  int grid_stride;          /* grid spacing in pixels */
  double base_size;         /* keypoint size for grid keypoints */
  int assign_orientation;   /* grid only; DoG keypoints are always oriented */
  const double* sizes;      /* size multipliers of a uniform prior; NULL = default */
  size_t n_sizes;
  int cells;
  int bins;
} op_describe_options;

ORBITPOOL_API void op_describe_options_init(op_describe_options* opts);
ORBITPOOL_API op_status op_describe(const op_image* image, const op_describe_options* opts,
                                    op_features** out);
ORBITPOOL_API void op_features_free(op_features* features);
ORBITPOOL_API size_t op_features_count(const op_features* features);
ORBITPOOL_API size_t op_features_dim(const op_features* features);
ORBITPOOL_API op_status op_features_keypoint(const op_features* features, size_t index,
                                             double* u, double* v, double* size,
                                             double* orientation, int* degenerate);
ORBITPOOL_API const double* op_features_values(const op_features* features, size_t index);
/* Path "-" writes to stdout. */
ORBITPOOL_API op_status op_features_write_csv(const op_features* features, const char* path);
/* Per-path coefficients; scattering kinds only. */
ORBITPOOL_API op_status op_features_write_scattering_csv(const op_features* features,
                                                         const char* path);

/* ---- synthetic pairs ---- */

typedef struct op_synth_options {
  uint64_t seed;
  double scale_min, scale_max;
  const double* scales;     /* if non-NULL, one pair per base per scale */
  size_t n_scales;
  double rotation_min, rotation_max;
  const char* contrasts;    /* comma list of none, affine, gamma */
  double occlusion;
  int procedural_count;     /* bases generated when no base directory is given */
  int procedural_size;
} op_synth_options;

ORBITPOOL_API void op_synth_options_init(op_synth_options* opts);
/* bases_dir may be NULL for procedural bases. Writes out_dir/pair_XXXX. */
ORBITPOOL_API op_status op_synth(const char* bases_dir, const char* out_dir,
                                 const op_synth_options* opts, size_t* n_pairs);

/* ---- matching and evaluation ---- */

typedef struct op_match_summary {
  size_t queries;
  size_t valid_queries;
  size_t correspondences;
  size_t accepted;
  size_t correct;
  double precision;
  double recall;
  int warning;
} op_match_summary;

/* records_csv may be NULL; "-" writes to stdout. */
ORBITPOOL_API op_status op_match_pair_dir(const char* pair_dir, op_kind kind, double ratio,
                                          const char* records_csv, op_match_summary* out);

ORBITPOOL_API op_status op_eval(const char* pairs_dir, const op_kind* kinds, size_t n_kinds,
                                const char* report_csv, op_report** out);
ORBITPOOL_API void op_report_free(op_report* report);
ORBITPOOL_API size_t op_report_kind_count(const op_report* report);
ORBITPOOL_API op_status op_report_summary(const op_report* report, size_t index,
                                          op_kind* kind, double* map, int* flagged);
ORBITPOOL_API double op_report_runtime(const op_report* report);
ORBITPOOL_API op_status op_report_write_summary(const op_report* report, const char* path);

/* ---- sampled-orbit likelihood ---- */

typedef struct op_template_options {
  const char* samples;   /* "standard" or rot<N>[x<S>][:aa] */
  double u, v;           /* keypoint; negative = image center */
  double size;           /* keypoint size; <= 0 = min(width, height) / 12 */
  op_metric metric;
} op_template_options;

typedef struct op_soa_result {
  double value;
  size_t argmax;         /* zero-based */
  size_t n_samples;
} op_soa_result;

ORBITPOOL_API void op_template_options_init(op_template_options* opts);
ORBITPOOL_API op_status op_template_build(const op_image* image, const op_template_options* opts,
                                          op_template** out);
ORBITPOOL_API op_status op_template_save(const op_template* tmpl, const char* path);
ORBITPOOL_API op_status op_template_load(const char* path, op_template** out);
ORBITPOOL_API void op_template_free(op_template* tmpl);
ORBITPOOL_API size_t op_template_size(const op_template* tmpl);
/* scores may be NULL; otherwise receives min(scores_len, n_samples) values. */
ORBITPOOL_API op_status op_soa(const op_template* tmpl, const op_image* query,
                               op_soa_result* out, double* scores, size_t scores_len);

#ifdef __cplusplus
}
#endif

#endif  // ORBITPOOL_ORBITPOOL_H_
