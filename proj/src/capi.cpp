#include "mvcca.h"

#include <charconv>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "mvcca/cca.hpp"
#include "mvcca/matrixio.hpp"
#include "mvcca/mcca.hpp"
#include "mvcca/metrics.hpp"
#include "mvcca/netspec.hpp"
#include "mvcca/noise.hpp"
#include "mvcca/pipeline.hpp"
#include "mvcca/svm.hpp"

struct mvcca_matrix {
    mvcca::FeatureMatrix m;
};
struct mvcca_cca {
    mvcca::CcaTransform t;
};
struct mvcca_plan {
    mvcca::MccaPlan p;
};
struct mvcca_svm {
    mvcca::SvmModel m;
};

namespace {

thread_local std::string g_last_error;

mvcca_status status_from(mvcca::ErrorCode code) {
    switch (code) {
        case mvcca::ErrorCode::parse: return MVCCA_ERR_PARSE;
        case mvcca::ErrorCode::dimension: return MVCCA_ERR_DIMENSION;
        case mvcca::ErrorCode::data: return MVCCA_ERR_DATA;
        case mvcca::ErrorCode::io: return MVCCA_ERR_IO;
        case mvcca::ErrorCode::degenerate: return MVCCA_ERR_DEGENERATE;
        case mvcca::ErrorCode::singular: return MVCCA_ERR_SINGULAR;
        case mvcca::ErrorCode::range: return MVCCA_ERR_RANGE;
        case mvcca::ErrorCode::label: return MVCCA_ERR_LABEL;
        case mvcca::ErrorCode::empty: return MVCCA_ERR_EMPTY;
        case mvcca::ErrorCode::unfitted: return MVCCA_ERR_UNFITTED;
        case mvcca::ErrorCode::config: return MVCCA_ERR_CONFIG;
    }
    return MVCCA_ERR_INTERNAL;
}

mvcca_status fail(mvcca_status status, const char* message) {
    g_last_error = message;
    return status;
}

template <typename F>
mvcca_status guarded(F&& f) {
    try {
        f();
        g_last_error.clear();
        return MVCCA_OK;
    } catch (const mvcca::Error& e) {
        g_last_error = e.what();
        return status_from(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return MVCCA_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return MVCCA_ERR_INTERNAL;
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

mvcca::PipelineConfig load_with_overrides(const char* config_path,
                                          const char* seed_override,
                                          const char* out_override) {
    if (!config_path)
        throw mvcca::ConfigError("config path is required");
    mvcca::PipelineConfig cfg = mvcca::load_config(config_path);
    if (seed_override) {
        const std::string s(seed_override);
        std::uint64_t seed = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
        if (ec != std::errc() || ptr != s.data() + s.size())
            throw mvcca::ConfigError("seed override '" + s + "' is not an unsigned integer");
        cfg.seed = seed;
    }
    if (out_override) cfg.out_dir = out_override;
    return cfg;
}

mvcca::OutputFormat format_or_text(const char* format) {
    return format ? mvcca::output_format_from_string(format) : mvcca::OutputFormat::text;
}

} // namespace

extern "C" {

const char* mvcca_status_name(mvcca_status status) {
    switch (status) {
        case MVCCA_OK: return "ok";
        case MVCCA_ERR_PARSE: return "parse";
        case MVCCA_ERR_DIMENSION: return "dimension";
        case MVCCA_ERR_DATA: return "data";
        case MVCCA_ERR_IO: return "io";
        case MVCCA_ERR_DEGENERATE: return "degenerate";
        case MVCCA_ERR_SINGULAR: return "singular";
        case MVCCA_ERR_RANGE: return "range";
        case MVCCA_ERR_LABEL: return "label";
        case MVCCA_ERR_EMPTY: return "empty";
        case MVCCA_ERR_UNFITTED: return "unfitted";
        case MVCCA_ERR_CONFIG: return "config";
        case MVCCA_ERR_INVALID_ARGUMENT: return "invalid-argument";
        case MVCCA_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

int mvcca_exit_code(mvcca_status status) {
    switch (status) {
        case MVCCA_OK: return 0;
        case MVCCA_ERR_CONFIG:
        case MVCCA_ERR_RANGE:
        case MVCCA_ERR_INVALID_ARGUMENT: return 2;
        case MVCCA_ERR_PARSE:
        case MVCCA_ERR_DIMENSION:
        case MVCCA_ERR_DATA:
        case MVCCA_ERR_IO:
        case MVCCA_ERR_LABEL:
        case MVCCA_ERR_EMPTY: return 3;
        case MVCCA_ERR_DEGENERATE:
        case MVCCA_ERR_SINGULAR:
        case MVCCA_ERR_UNFITTED: return 4;
        case MVCCA_ERR_INTERNAL: return 1;
    }
    return 1;
}

const char* mvcca_last_error(void) { return g_last_error.c_str(); }

void mvcca_free(void* ptr) { std::free(ptr); }

/* ---------- matrices ---------- */

mvcca_status mvcca_matrix_create(const double* data, uint64_t p, uint64_t n,
                                 mvcca_matrix** out) {
    if (!data || !out)
        return fail(MVCCA_ERR_INVALID_ARGUMENT, "data and out must be non-null");
    if (p == 0 || n == 0)
        return fail(MVCCA_ERR_INVALID_ARGUMENT, "matrix dimensions must be positive");
    return guarded([&] {
        Eigen::MatrixXd m(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(n));
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j)
                m(i, j) = data[static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)];
        mvcca::require_finite(m, "matrix data");
        *out = new mvcca_matrix{mvcca::FeatureMatrix(std::move(m))};
    });
}

mvcca_status mvcca_matrix_load(const char* path, const char* format, mvcca_matrix** out) {
    if (!path || !format || !out)
        return fail(MVCCA_ERR_INVALID_ARGUMENT, "path, format and out must be non-null");
    return guarded([&] {
        *out = new mvcca_matrix{
            mvcca::load_matrix(path, mvcca::matrix_format_from_string(format))};
    });
}

mvcca_status mvcca_matrix_save(const mvcca_matrix* m, const char* path, const char* format) {
    if (!m || !path || !format)
        return fail(MVCCA_ERR_INVALID_ARGUMENT, "matrix, path and format must be non-null");
    return guarded([&] {
        mvcca::save_matrix(m->m, path, mvcca::matrix_format_from_string(format));
    });
}

mvcca_status mvcca_matrix_shape(const mvcca_matrix* m, uint64_t* p, uint64_t* n) {
    if (!m || !p || !n)
        return fail(MVCCA_ERR_INVALID_ARGUMENT, "matrix, p and n must be non-null");
    *p = static_cast<uint64_t>(m->m.p());
    *n = static_cast<uint64_t>(m->m.n());
    g_last_error.clear();
    return MVCCA_OK;
}

mvcca_status mvcca_matrix_data(const mvcca_matrix* m, double* out, size_t capacity) {
    if (!m || !out)
        return fail(MVCCA_ERR_INVALID_ARGUMENT, "matrix and out must be non-null");
    const std::size_t need = static_cast<std::size_t>(m->m.p()) *
                             static_cast<std::size_t>(m->m.n());
    if (capacity < need)
        return fail(MVCCA_ERR_INVALID_ARGUMENT, "output buffer is too small");
    const std::size_t n = static_cast<std::size_t>(m->m.n());
    for (Eigen::Index i = 0; i < m->m.p(); ++i)
        for (Eigen::Index j = 0; j < m->m.n(); ++j)
            out[static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)] = m->m.data(i, j);
    g_last_error.clear();
    return MVCCA_OK;
}

mvcca_status mvcca_matrix_rank(const mvcca_matrix* m, uint64_t* rank) {
    if (!m || !rank)
        return fail(MVCCA_ERR_INVALID_ARGUMENT, "matrix and rank must be non-null");
    return guarded([&] { *rank = static_cast<uint64_t>(mvcca::numerical_rank(m->m)); });
}

void mvcca_matrix_destroy(mvcca_matrix* m) { delete m; }

/* ---------- CCA ---------- */

mvcca_status mvcca_cca_fit(const mvcca_matrix* x, const mvcca_matrix* y,
                           double ridge_rel, mvcca_cca** out) {
    if (!x || !y || !out)
        return fail(MVCCA_ERR_INVALID_ARGUMENT, "x, y and out must be non-null");
    return guarded([&] {
        mvcca::FeatureSet xs(x->m, "x");
        mvcca::FeatureSet ys(y->m, "y");
        *out = new mvcca_cca{mvcca::fit_cca(xs, ys, ridge_rel)};
    });
}

mvcca_status mvcca_cca_rank(const mvcca_cca* t, uint64_t* rank) {
    if (!t || !rank)
        return fail(MVCCA_ERR_INVALID_ARGUMENT, "transform and rank must be non-null");
    *rank = static_cast<uint64_t>(t->t.r);
    g_last_error.clear();
    return MVCCA_OK;
}

mvcca_status mvcca_cca_gamma(const mvcca_cca* t, double* out, size_t capacity) {
    if (!t || !out)
        return fail(MVCCA_ERR_INVALID_ARGUMENT, "transform and out must be non-null");
    if (capacity < static_cast<std::size_t>(t->t.r))
        return fail(MVCCA_ERR_INVALID_ARGUMENT, "output buffer is too small");
    for (Eigen::Index i = 0; i < t->t.r; ++i) out[i] = t->t.gamma(i);
    g_last_error.clear();
    return MVCCA_OK;
}

mvcca_status mvcca_cca_project_fuse(const mvcca_cca* t, const mvcca_matrix* x,
                                    const mvcca_matrix* y, const char* fuse_mode,
                                    mvcca_matrix** fused) {
    if (!t || !x || !y || !fuse_mode || !fused)
        return fail(MVCCA_ERR_INVALID_ARGUMENT, "all arguments must be non-null");
    return guarded([&] {
        const mvcca::CanonicalVariates v = mvcca::project(t->t, x->m, y->m);
        mvcca::FusedFeatures f = mvcca::fuse(v, mvcca::fuse_mode_from_string(fuse_mode));
        *fused = new mvcca_matrix{mvcca::FeatureMatrix(std::move(f.data))};
    });
}

mvcca_status mvcca_cca_save(const mvcca_cca* t, const char* path) {
    if (!t || !path)
        return fail(MVCCA_ERR_INVALID_ARGUMENT, "transform and path must be non-null");
    return guarded([&] { mvcca::save_cca(t->t, path); });
}

mvcca_status mvcca_cca_load(const char* path, mvcca_cca** out) {
    if (!path || !out)
        return fail(MVCCA_ERR_INVALID_ARGUMENT, "path and out must be non-null");
    return guarded([&] { *out = new mvcca_cca{mvcca::load_cca(path)}; });
}

void mvcca_cca_destroy(mvcca_cca* t) { delete t; }

/* ---------- MCCA ---------- */

namespace {

std::vector<mvcca::FeatureSet> wrap_views(const mvcca_matrix* const* views, size_t count) {
    std::vector<mvcca::FeatureSet> sets;
    sets.reserve(count);
    for (size_t i = 0; i < count; ++i) {
        if (!views[i])
            throw mvcca::EmptyError("view " + std::to_string(i) + " is null");
        sets.emplace_back(views[i]->m, "view" + std::to_string(i));
    }
    return sets;
}

} // namespace

mvcca_status mvcca_plan_fit(const mvcca_matrix* const* views, size_t count,
                            const char* fuse_mode, double ridge_rel,
                            mvcca_plan** out, mvcca_matrix** fused_train) {
    if (!views || !fuse_mode || !out)
        return fail(MVCCA_ERR_INVALID_ARGUMENT, "views, fuse_mode and out must be non-null");
    return guarded([&] {
        auto [plan, fused] = mvcca::fit_mcca(wrap_views(views, count),
                                             mvcca::fuse_mode_from_string(fuse_mode),
                                             ridge_rel);
        *out = new mvcca_plan{std::move(plan)};
        if (fused_train)
            *fused_train = new mvcca_matrix{mvcca::FeatureMatrix(std::move(fused.data))};
    });
}

mvcca_status mvcca_plan_apply(const mvcca_plan* plan, const mvcca_matrix* const* views,
                              size_t count, mvcca_matrix** fused) {
    if (!plan || !views || !fused)
        return fail(MVCCA_ERR_INVALID_ARGUMENT, "plan, views and fused must be non-null");
    return guarded([&] {
        std::vector<mvcca::FeatureMatrix> mats;
        mats.reserve(count);
        for (size_t i = 0; i < count; ++i) {
            if (!views[i])
                throw mvcca::EmptyError("view " + std::to_string(i) + " is null");
            mats.push_back(views[i]->m);
        }
        mvcca::FusedFeatures f = mvcca::apply_mcca(plan->p, mats);
        *fused = new mvcca_matrix{mvcca::FeatureMatrix(std::move(f.data))};
    });
}

mvcca_status mvcca_plan_stage_count(const mvcca_plan* plan, uint64_t* count) {
    if (!plan || !count)
        return fail(MVCCA_ERR_INVALID_ARGUMENT, "plan and count must be non-null");
    *count = plan->p.stages.size();
    g_last_error.clear();
    return MVCCA_OK;
}

mvcca_status mvcca_plan_save(const mvcca_plan* plan, const char* path) {
    if (!plan || !path)
        return fail(MVCCA_ERR_INVALID_ARGUMENT, "plan and path must be non-null");
    return guarded([&] { mvcca::save_mcca(plan->p, path); });
}

mvcca_status mvcca_plan_load(const char* path, mvcca_plan** out) {
    if (!path || !out)
        return fail(MVCCA_ERR_INVALID_ARGUMENT, "path and out must be non-null");
    return guarded([&] { *out = new mvcca_plan{mvcca::load_mcca(path)}; });
}

void mvcca_plan_destroy(mvcca_plan* plan) { delete plan; }

/* ---------- SVM ---------- */

mvcca_svm_config mvcca_svm_config_default(void) {
    const mvcca::SvmConfig d;
    mvcca_svm_config c;
    c.c_penalty = d.c_penalty;
    c.loss = d.loss == mvcca::SvmLoss::hinge_l1 ? 0 : 1;
    c.batch_size = d.batch_size;
    c.momentum = d.momentum;
    c.weight_decay = d.weight_decay;
    c.lr_initial = d.lr_initial;
    c.lr_decay_factor = d.lr_decay_factor;
    c.max_lr_decays = d.max_lr_decays;
    c.patience_epochs = d.patience_epochs;
    c.max_epochs = d.max_epochs;
    c.seed = d.seed;
    c.standardize = d.standardize ? 1 : 0;
    return c;
}

namespace {

mvcca::SvmConfig svm_config_from(const mvcca_svm_config* config) {
    mvcca::SvmConfig cfg;
    if (!config) return cfg;
    cfg.c_penalty = config->c_penalty;
    if (config->loss != 0 && config->loss != 1)
        throw mvcca::ConfigError("loss must be 0 (hinge_l1) or 1 (hinge_l2)");
    cfg.loss = config->loss == 0 ? mvcca::SvmLoss::hinge_l1 : mvcca::SvmLoss::hinge_l2;
    cfg.batch_size = static_cast<Eigen::Index>(config->batch_size);
    cfg.momentum = config->momentum;
    cfg.weight_decay = config->weight_decay;
    cfg.lr_initial = config->lr_initial;
    cfg.lr_decay_factor = config->lr_decay_factor;
    cfg.max_lr_decays = config->max_lr_decays;
    cfg.patience_epochs = static_cast<Eigen::Index>(config->patience_epochs);
    cfg.max_epochs = static_cast<Eigen::Index>(config->max_epochs);
    cfg.seed = config->seed;
    cfg.standardize = config->standardize != 0;
    return cfg;
}

} // namespace

mvcca_status mvcca_svm_train(const mvcca_matrix* features, const int32_t* labels,
                             size_t label_count, int32_t class_count,
                             const mvcca_svm_config* config, mvcca_svm** out) {
    if (!features || !labels || !out)
        return fail(MVCCA_ERR_INVALID_ARGUMENT, "features, labels and out must be non-null");
    return guarded([&] {
        std::vector<int> lab(labels, labels + label_count);
        *out = new mvcca_svm{mvcca::train_multiclass(features->m.data, lab, class_count,
                                                     svm_config_from(config))};
    });
}

mvcca_status mvcca_svm_predict(const mvcca_svm* model, const mvcca_matrix* features,
                               int32_t* labels_out, size_t capacity) {
    if (!model || !features || !labels_out)
        return fail(MVCCA_ERR_INVALID_ARGUMENT,
                    "model, features and labels_out must be non-null");
    if (capacity < static_cast<std::size_t>(features->m.n()))
        return fail(MVCCA_ERR_INVALID_ARGUMENT, "label buffer is too small");
    return guarded([&] {
        const mvcca::Prediction pred = mvcca::predict(model->m, features->m.data);
        for (std::size_t i = 0; i < pred.labels.size(); ++i)
            labels_out[i] = static_cast<int32_t>(pred.labels[i]);
    });
}

mvcca_status mvcca_svm_save(const mvcca_svm* model, const char* path) {
    if (!model || !path)
        return fail(MVCCA_ERR_INVALID_ARGUMENT, "model and path must be non-null");
    return guarded([&] { mvcca::save_svm(model->m, path); });
}

mvcca_status mvcca_svm_load(const char* path, mvcca_svm** out) {
    if (!path || !out)
        return fail(MVCCA_ERR_INVALID_ARGUMENT, "path and out must be non-null");
    return guarded([&] { *out = new mvcca_svm{mvcca::load_svm(path)}; });
}

void mvcca_svm_destroy(mvcca_svm* model) { delete model; }

/* ---------- evaluation ---------- */

mvcca_status mvcca_accuracy(const int32_t* actual, const int32_t* predicted, size_t n,
                            double* out) {
    if (!actual || !predicted || !out)
        return fail(MVCCA_ERR_INVALID_ARGUMENT, "actual, predicted and out must be non-null");
    return guarded([&] {
        std::vector<int> a(actual, actual + n);
        std::vector<int> p(predicted, predicted + n);
        *out = mvcca::accuracy(a, p);
    });
}

mvcca_status mvcca_report_csv(const int32_t* actual, const int32_t* predicted, size_t n,
                              int32_t class_count, char** csv_out) {
    if (!actual || !predicted || !csv_out)
        return fail(MVCCA_ERR_INVALID_ARGUMENT,
                    "actual, predicted and csv_out must be non-null");
    return guarded([&] {
        std::vector<int> a(actual, actual + n);
        std::vector<int> p(predicted, predicted + n);
        const mvcca::ConfusionMatrix cm = mvcca::confusion_matrix(a, p, class_count);
        *csv_out = dup_string(mvcca::report_csv(mvcca::report(cm)));
    });
}

/* ---------- architecture arithmetic ---------- */

mvcca_status mvcca_stack_params(int64_t filter_size, int64_t depth, int64_t channels,
                                uint64_t* out) {
    if (!out) return fail(MVCCA_ERR_INVALID_ARGUMENT, "out must be non-null");
    return guarded([&] {
        *out = mvcca::stack_params(mvcca::ConvStackSpec{filter_size, depth, channels, 1});
    });
}

mvcca_status mvcca_params_ratio(int64_t k_a, int64_t d_a, int64_t k_b, int64_t d_b,
                                int64_t channels, double* out) {
    if (!out) return fail(MVCCA_ERR_INVALID_ARGUMENT, "out must be non-null");
    return guarded([&] {
        *out = mvcca::params_ratio(mvcca::ConvStackSpec{k_a, d_a, channels, 1},
                                   mvcca::ConvStackSpec{k_b, d_b, channels, 1});
    });
}

mvcca_status mvcca_receptive_field(const int64_t* filter_sizes, const int64_t* strides,
                                   size_t count, int64_t* out) {
    if (!filter_sizes || !out)
        return fail(MVCCA_ERR_INVALID_ARGUMENT, "filter_sizes and out must be non-null");
    return guarded([&] {
        std::vector<mvcca::FilterLayer> layers;
        layers.reserve(count);
        for (size_t i = 0; i < count; ++i)
            layers.push_back({filter_sizes[i], strides ? strides[i] : 1});
        *out = mvcca::effective_receptive_field(layers);
    });
}

mvcca_status mvcca_width_schedule(int64_t start, int pools, int64_t cap, int64_t* out,
                                  size_t capacity) {
    if (!out) return fail(MVCCA_ERR_INVALID_ARGUMENT, "out must be non-null");
    return guarded([&] {
        const std::vector<std::int64_t> widths = mvcca::width_schedule(start, pools, cap);
        if (capacity < widths.size())
            throw mvcca::RangeError("width buffer is too small: need " +
                                    std::to_string(widths.size()) + " entries");
        for (std::size_t i = 0; i < widths.size(); ++i) out[i] = widths[i];
    });
}

/* ---------- pixel corruption ---------- */

mvcca_status mvcca_inject_noise(const double* pixels, uint64_t h, uint64_t w,
                                double lo, double hi, double level, uint64_t seed,
                                double* out) {
    if (!pixels || !out)
        return fail(MVCCA_ERR_INVALID_ARGUMENT, "pixels and out must be non-null");
    if (h == 0 || w == 0)
        return fail(MVCCA_ERR_INVALID_ARGUMENT, "patch dimensions must be positive");
    return guarded([&] {
        mvcca::ImagePatch patch;
        patch.pixels.resize(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(w));
        for (Eigen::Index i = 0; i < patch.pixels.rows(); ++i)
            for (Eigen::Index j = 0; j < patch.pixels.cols(); ++j)
                patch.pixels(i, j) =
                    pixels[static_cast<std::size_t>(i) * w + static_cast<std::size_t>(j)];
        patch.lo = lo;
        patch.hi = hi;
        const mvcca::ImagePatch noisy = mvcca::inject_noise(patch, level, seed);
        for (Eigen::Index i = 0; i < noisy.pixels.rows(); ++i)
            for (Eigen::Index j = 0; j < noisy.pixels.cols(); ++j)
                out[static_cast<std::size_t>(i) * w + static_cast<std::size_t>(j)] =
                    noisy.pixels(i, j);
    });
}

/* ---------- subcommand drivers ---------- */

mvcca_status mvcca_cmd_synth(const char* config_path, const char* seed_override,
                             const char* out_override, const char* format, char** output) {
    if (!output) return fail(MVCCA_ERR_INVALID_ARGUMENT, "output must be non-null");
    return guarded([&] {
        const mvcca::PipelineConfig cfg =
            load_with_overrides(config_path, seed_override, out_override);
        *output = dup_string(mvcca::cmd_synth(cfg, format_or_text(format)).rendered);
    });
}

mvcca_status mvcca_cmd_pipeline(const char* config_path, const char* seed_override,
                                const char* out_override, const char* format,
                                char** output) {
    if (!output) return fail(MVCCA_ERR_INVALID_ARGUMENT, "output must be non-null");
    return guarded([&] {
        const mvcca::PipelineConfig cfg =
            load_with_overrides(config_path, seed_override, out_override);
        *output = dup_string(mvcca::cmd_pipeline(cfg, format_or_text(format)).rendered);
    });
}

mvcca_status mvcca_cmd_noise_sweep(const char* config_path, const char* seed_override,
                                   const char* out_override, const char* format,
                                   char** output) {
    if (!output) return fail(MVCCA_ERR_INVALID_ARGUMENT, "output must be non-null");
    return guarded([&] {
        const mvcca::PipelineConfig cfg =
            load_with_overrides(config_path, seed_override, out_override);
        *output = dup_string(mvcca::cmd_noise_sweep(cfg, format_or_text(format)).rendered);
    });
}

mvcca_status mvcca_cmd_netspec(const char* preset, const char* const* stacks,
                               size_t stack_count, const char* format, char** output) {
    if (!output) return fail(MVCCA_ERR_INVALID_ARGUMENT, "output must be non-null");
    return guarded([&] {
        const mvcca::OutputFormat fmt = format_or_text(format);
        mvcca::NetspecResult res;
        if (preset && stack_count > 0)
            throw mvcca::ConfigError("give either a preset or explicit stacks, not both");
        if (preset) {
            res = mvcca::cmd_netspec_preset(preset, fmt);
        } else {
            if (!stacks || stack_count == 0)
                throw mvcca::ConfigError("netspec needs a preset or at least one stack");
            std::vector<mvcca::ConvStackSpec> specs;
            specs.reserve(stack_count);
            for (size_t i = 0; i < stack_count; ++i) {
                if (!stacks[i])
                    throw mvcca::ConfigError("stack " + std::to_string(i) + " is null");
                specs.push_back(mvcca::parse_stack_arg(stacks[i]));
            }
            res = mvcca::cmd_netspec(specs, fmt);
        }
        *output = dup_string(res.rendered);
    });
}

mvcca_status mvcca_cmd_inspect(const char* path, char** output) {
    if (!path || !output)
        return fail(MVCCA_ERR_INVALID_ARGUMENT, "path and output must be non-null");
    return guarded([&] { *output = dup_string(mvcca::cmd_inspect(path)); });
}

} // extern "C"
