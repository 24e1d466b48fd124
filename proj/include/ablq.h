#ifndef ABLQ_H
#define ABLQ_H

/* C interface to the bone-loss analysis core. Handles are opaque; every
 * operation returns a status code and leaves a thread-local message
 * readable through ablq_last_error(). Strings returned through char**
 * are heap copies the caller releases with ablq_string_free(). */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ablq_status {
    ABLQ_OK = 0,
    ABLQ_ERR_IO = 1,         /* file unreadable or unwritable */
    ABLQ_ERR_SCHEMA = 2,     /* malformed document or out-of-bounds geometry */
    ABLQ_ERR_VALIDATION = 3, /* bad option, argument, or precondition */
    ABLQ_ERR_DEGENERATE = 4, /* geometry too degenerate to process */
    ABLQ_ERR_INFEASIBLE = 5, /* synthetic spec cannot be realized */
    ABLQ_ERR_INTERNAL = 6
} ablq_status;

/* Library version, "major.minor.patch". */
const char* ablq_version(void);

/* Message for the calling thread's most recent failure; empty after a
 * success. Valid until this thread's next ablq_* call. */
const char* ablq_last_error(void);

void ablq_string_free(char* text);

typedef struct ablq_batch ablq_batch;     /* records + load diagnostics */
typedef struct ablq_results ablq_results; /* per-record analysis */
typedef struct ablq_eval ablq_eval;       /* aggregated metrics */

/* ---- batches ---------------------------------------------------- */

/* Read a record file. strict != 0 fails on the first problem; strict == 0
 * drops malformed records and collects diagnostics instead. */
ablq_status ablq_batch_load(const char* path, int strict, ablq_batch** out);
ablq_status ablq_batch_from_text(const char* text, int strict,
                                 ablq_batch** out);

/* Read a keypoint-annotation export. name_map_json maps feature names to
 * roles {tooth, cej, intersection, apex, bone-line} as one object, e.g.
 * {"Bone Level":"bone-line"}; NULL or "" uses the built-in map. */
ablq_status ablq_batch_import_annotations(const char* path,
                                          const char* name_map_json,
                                          int strict, ablq_batch** out);

/* Generate `count` synthetic records. spec_json keys (all optional):
 * seed, teeth_count, severity_percent, theta_degrees, jitter, width,
 * height. Records take seeds seed, seed+1, ... */
ablq_status ablq_batch_synth(const char* spec_json, int count,
                             ablq_batch** out);

ablq_status ablq_batch_save(const ablq_batch* batch, const char* path);
size_t ablq_batch_size(const ablq_batch* batch);

size_t ablq_batch_diagnostic_count(const ablq_batch* batch);
/* Pointers stay valid while the batch lives. */
ablq_status ablq_batch_diagnostic(const ablq_batch* batch, size_t index,
                                  const char** image_id, const char** field,
                                  const char** message);

/* Representation changes, applied atomically across the whole batch:
 * every bone line becomes a raster mask of the given thickness, or every
 * mask becomes a centerline resampled to `resample_points` vertices. */
ablq_status ablq_batch_lines_to_masks(ablq_batch* batch, double thickness);
ablq_status ablq_batch_masks_to_lines(ablq_batch* batch,
                                      size_t resample_points);

/* Keeps only records whose split tag matches `split`: one of "train",
 * "validation", "test", or "unspecified". */
ablq_status ablq_batch_filter_split(ablq_batch* batch, const char* split);

void ablq_batch_free(ablq_batch* batch);

/* ---- analysis ---------------------------------------------------- */

/* options_json keys (all optional): run_pattern, iou_threshold, jobs,
 * pattern {threshold_degrees, tangent_window, snap_distance,
 * severity_floor_percent, orient_step}. NULL or "" uses defaults.
 * Unknown keys are rejected. */
ablq_status ablq_analyze(const ablq_batch* batch, const char* options_json,
                         ablq_results** out);

size_t ablq_results_size(const ablq_results* results);

/* format is "csv" or "structured". */
ablq_status ablq_results_write_report(const ablq_results* results,
                                      const char* path, const char* format);
ablq_status ablq_results_report_text(const ablq_results* results,
                                     const char* format, char** out_text);

/* One SVG per record, named <image_id>.svg (id sanitized to filename
 * characters) inside `directory`, which is created if missing. The
 * results must come from this batch. */
ablq_status ablq_results_write_overlays(const ablq_results* results,
                                        const ablq_batch* batch,
                                        const char* directory);

void ablq_results_free(ablq_results* results);

/* ---- evaluation -------------------------------------------------- */

/* options_json keys (all optional): mse_samples, analyze {as above}. */
ablq_status ablq_evaluate(const ablq_batch* predictions,
                          const ablq_batch* ground_truth,
                          const char* options_json, ablq_eval** out);

ablq_status ablq_eval_write_report(const ablq_eval* eval, const char* path,
                                   const char* format);
ablq_status ablq_eval_report_text(const ablq_eval* eval, const char* format,
                                  char** out_text);
/* Pattern confusion counts; the positive class is angular. */
ablq_status ablq_eval_counts(const ablq_eval* eval, long long* tp,
                             long long* fp, long long* fn, long long* tn);

void ablq_eval_free(ablq_eval* eval);

/* ---- scalar helpers ---------------------------------------------- */

/* Equal-ripple line through three points; swapped reports a fit in the
 * transposed frame (x as a function of y). */
ablq_status ablq_minimax_line(const double xs[3], const double ys[3],
                              double* m, double* c, int* swapped);

/* Severity percentage from the cej / intersection / apex triple. */
ablq_status ablq_severity(double cej_x, double cej_y, double inter_x,
                          double inter_y, double apex_x, double apex_y,
                          double* percent, int* out_of_range);

/* Boxes as [x0, y0, x1, y1]. */
ablq_status ablq_box_iou(const double a[4], const double b[4], double* iou);

ablq_status ablq_oks(double gt_x, double gt_y, double pred_x, double pred_y,
                     double object_scale, double falloff_k, double* value);

#ifdef __cplusplus
}
#endif

#endif /* ABLQ_H */
