/* C interface to the multi-view fusion toolkit. All functions return a
 * status code; 0 is success. On failure, mvcca_last_error() returns a
 * thread-local description of what went wrong. Buffers returned through
 * out-parameters are malloc'd and must be released with mvcca_free().
 */
#ifndef MVCCA_H
#define MVCCA_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mvcca_status {
    MVCCA_OK = 0,
    MVCCA_ERR_PARSE,
    MVCCA_ERR_DIMENSION,
    MVCCA_ERR_DATA,
    MVCCA_ERR_IO,
    MVCCA_ERR_DEGENERATE,
    MVCCA_ERR_SINGULAR,
    MVCCA_ERR_RANGE,
    MVCCA_ERR_LABEL,
    MVCCA_ERR_EMPTY,
    MVCCA_ERR_UNFITTED,
    MVCCA_ERR_CONFIG,
    MVCCA_ERR_INVALID_ARGUMENT,
    MVCCA_ERR_INTERNAL
} mvcca_status;

const char* mvcca_status_name(mvcca_status status);

/* Process exit code convention: 0 success, 2 configuration error, 3 data
 * error, 4 numeric failure. */
int mvcca_exit_code(mvcca_status status);

/* Message for the most recent failure on this thread ("" if none). */
const char* mvcca_last_error(void);

void mvcca_free(void* ptr);

/* ---------- feature matrices (p feature rows, n sample columns) ---------- */

typedef struct mvcca_matrix mvcca_matrix;

/* data is row-major with p*n entries. */
mvcca_status mvcca_matrix_create(const double* data, uint64_t p, uint64_t n,
                                 mvcca_matrix** out);
/* format: "csv" or "fmat". */
mvcca_status mvcca_matrix_load(const char* path, const char* format, mvcca_matrix** out);
mvcca_status mvcca_matrix_save(const mvcca_matrix* m, const char* path, const char* format);
mvcca_status mvcca_matrix_shape(const mvcca_matrix* m, uint64_t* p, uint64_t* n);
/* Copies row-major values into out; capacity is the element count of out. */
mvcca_status mvcca_matrix_data(const mvcca_matrix* m, double* out, size_t capacity);
mvcca_status mvcca_matrix_rank(const mvcca_matrix* m, uint64_t* rank);
void mvcca_matrix_destroy(mvcca_matrix* m);

/* ---------- canonical correlation transform ---------- */

typedef struct mvcca_cca mvcca_cca;

mvcca_status mvcca_cca_fit(const mvcca_matrix* x, const mvcca_matrix* y,
                           double ridge_rel, mvcca_cca** out);
mvcca_status mvcca_cca_rank(const mvcca_cca* t, uint64_t* rank);
/* Copies the canonical correlations (descending) into out. */
mvcca_status mvcca_cca_gamma(const mvcca_cca* t, double* out, size_t capacity);
/* fuse_mode: "sum" or "concat". */
mvcca_status mvcca_cca_project_fuse(const mvcca_cca* t, const mvcca_matrix* x,
                                    const mvcca_matrix* y, const char* fuse_mode,
                                    mvcca_matrix** fused);
mvcca_status mvcca_cca_save(const mvcca_cca* t, const char* path);
mvcca_status mvcca_cca_load(const char* path, mvcca_cca** out);
void mvcca_cca_destroy(mvcca_cca* t);

/* ---------- multi-set fusion plan ---------- */

typedef struct mvcca_plan mvcca_plan;

/* Fits the sequential pairwise fusion over `count` views and returns both the
 * plan and the fused training features. fused_train may be NULL. */
mvcca_status mvcca_plan_fit(const mvcca_matrix* const* views, size_t count,
                            const char* fuse_mode, double ridge_rel,
                            mvcca_plan** out, mvcca_matrix** fused_train);
mvcca_status mvcca_plan_apply(const mvcca_plan* plan, const mvcca_matrix* const* views,
                              size_t count, mvcca_matrix** fused);
mvcca_status mvcca_plan_stage_count(const mvcca_plan* plan, uint64_t* count);
mvcca_status mvcca_plan_save(const mvcca_plan* plan, const char* path);
mvcca_status mvcca_plan_load(const char* path, mvcca_plan** out);
void mvcca_plan_destroy(mvcca_plan* plan);

/* ---------- one-vs-rest linear SVM ---------- */

typedef struct mvcca_svm mvcca_svm;

typedef struct mvcca_svm_config {
    double c_penalty;
    int loss;               /* 0 hinge_l1, 1 hinge_l2 */
    int64_t batch_size;
    double momentum;
    double weight_decay;
    double lr_initial;
    double lr_decay_factor;
    int max_lr_decays;
    int64_t patience_epochs;
    int64_t max_epochs;
    uint64_t seed;
    int standardize;        /* nonzero: z-score features with training stats */
} mvcca_svm_config;

mvcca_svm_config mvcca_svm_config_default(void);

/* labels are 0..class_count-1, one per feature column; config NULL uses the
 * defaults. */
mvcca_status mvcca_svm_train(const mvcca_matrix* features, const int32_t* labels,
                             size_t label_count, int32_t class_count,
                             const mvcca_svm_config* config, mvcca_svm** out);
mvcca_status mvcca_svm_predict(const mvcca_svm* model, const mvcca_matrix* features,
                               int32_t* labels_out, size_t capacity);
mvcca_status mvcca_svm_save(const mvcca_svm* model, const char* path);
mvcca_status mvcca_svm_load(const char* path, mvcca_svm** out);
void mvcca_svm_destroy(mvcca_svm* model);

/* ---------- evaluation ---------- */

mvcca_status mvcca_accuracy(const int32_t* actual, const int32_t* predicted, size_t n,
                            double* out);
/* Renders the per-class + OVERALL metrics table as CSV into *csv_out. */
mvcca_status mvcca_report_csv(const int32_t* actual, const int32_t* predicted, size_t n,
                              int32_t class_count, char** csv_out);

/* ---------- architecture arithmetic ---------- */

mvcca_status mvcca_stack_params(int64_t filter_size, int64_t depth, int64_t channels,
                                uint64_t* out);
mvcca_status mvcca_params_ratio(int64_t k_a, int64_t d_a, int64_t k_b, int64_t d_b,
                                int64_t channels, double* out);
mvcca_status mvcca_receptive_field(const int64_t* filter_sizes, const int64_t* strides,
                                   size_t count, int64_t* out);
/* Writes pools+1 widths; capacity is the element count of out. */
mvcca_status mvcca_width_schedule(int64_t start, int pools, int64_t cap, int64_t* out,
                                  size_t capacity);

/* ---------- pixel corruption ---------- */

/* pixels/out are row-major h*w buffers; [lo, hi] is the replacement range. */
mvcca_status mvcca_inject_noise(const double* pixels, uint64_t h, uint64_t w,
                                double lo, double hi, double level, uint64_t seed,
                                double* out);

/* ---------- subcommand drivers ---------- */

/* seed_override is a decimal string or NULL; out_override is a directory or
 * NULL; format is "text", "csv" or "json-lines" (NULL means text). *output
 * receives a malloc'd NUL-terminated rendering. */
mvcca_status mvcca_cmd_synth(const char* config_path, const char* seed_override,
                             const char* out_override, const char* format, char** output);
mvcca_status mvcca_cmd_pipeline(const char* config_path, const char* seed_override,
                                const char* out_override, const char* format,
                                char** output);
mvcca_status mvcca_cmd_noise_sweep(const char* config_path, const char* seed_override,
                                   const char* out_override, const char* format,
                                   char** output);
/* Either preset (e.g. "3x3-vs-7x7") or stack_count strings "k=3,d=3,K=64". */
mvcca_status mvcca_cmd_netspec(const char* preset, const char* const* stacks,
                               size_t stack_count, const char* format, char** output);
mvcca_status mvcca_cmd_inspect(const char* path, char** output);

#ifdef __cplusplus
}
#endif

#endif /* MVCCA_H */
