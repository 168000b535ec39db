#include "mvcca/svm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "mvcca/matrixio.hpp"
#include "mvcca/rng.hpp"

namespace mvcca {

namespace {

constexpr char kSvmMagic[6] = {'S', 'V', 'M', 'M', '1', '\0'};

// Relative objective improvement below this counts as a plateau epoch.
constexpr double kPlateauTol = 1e-4;

Eigen::MatrixXd augment_bias(const Eigen::MatrixXd& features) {
    Eigen::MatrixXd aug(features.rows() + 1, features.cols());
    aug.topRows(features.rows()) = features;
    aug.row(features.rows()).setOnes();
    return aug;
}

void check_binary_labels(const Eigen::VectorXd& t) {
    for (Eigen::Index i = 0; i < t.size(); ++i)
        if (t(i) != 1.0 && t(i) != -1.0)
            throw LabelError("binary target at " + std::to_string(i) +
                             " is not in {-1, +1}");
}

} // namespace

SvmLoss svm_loss_from_string(const std::string& s) {
    if (s == "hinge_l1") return SvmLoss::hinge_l1;
    if (s == "hinge_l2") return SvmLoss::hinge_l2;
    throw ConfigError("unknown loss '" + s + "' (expected hinge_l1 or hinge_l2)");
}

const char* svm_loss_name(SvmLoss loss) {
    return loss == SvmLoss::hinge_l1 ? "hinge_l1" : "hinge_l2";
}

void SvmConfig::validate() const {
    if (!(c_penalty > 0.0)) throw ConfigError("c_penalty must be positive");
    if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
    if (momentum < 0.0 || momentum >= 1.0) throw ConfigError("momentum must be in [0, 1)");
    if (weight_decay < 0.0) throw ConfigError("weight_decay must be nonnegative");
    if (!(lr_initial > 0.0)) throw ConfigError("lr_initial must be positive");
    if (lr_decay_factor <= 0.0 || lr_decay_factor >= 1.0)
        throw ConfigError("lr_decay_factor must be in (0, 1)");
    if (max_lr_decays < 0) throw ConfigError("max_lr_decays must be nonnegative");
    if (patience_epochs < 1) throw ConfigError("patience_epochs must be at least 1");
    if (max_epochs < 1) throw ConfigError("max_epochs must be at least 1");
}

double objective(const Eigen::VectorXd& w, const Eigen::MatrixXd& data,
                 const Eigen::VectorXd& t, const SvmConfig& cfg) {
    if (data.rows() != w.size())
        throw DimensionError("objective: weight length does not match feature rows");
    if (data.cols() != t.size())
        throw DimensionError("objective: label count does not match sample count");
    const Eigen::ArrayXd margins =
        1.0 - (t.array() * (data.transpose() * w).array());
    const Eigen::ArrayXd active = margins.max(0.0);
    const double loss = cfg.loss == SvmLoss::hinge_l1 ? active.sum()
                                                      : active.square().sum();
    return 0.5 * w.squaredNorm() + cfg.c_penalty * loss;
}

Eigen::VectorXd grad_wrt_input(const Eigen::VectorXd& w, const Eigen::VectorXd& m,
                               double t, const SvmConfig& cfg) {
    if (w.size() != m.size())
        throw DimensionError("grad_wrt_input: weight and input lengths differ");
    if (t != 1.0 && t != -1.0)
        throw LabelError("grad_wrt_input: target must be -1 or +1");
    const double margin = 1.0 - w.dot(m) * t;
    if (cfg.loss == SvmLoss::hinge_l1)
        return margin > 0.0 ? Eigen::VectorXd(-cfg.c_penalty * t * w)
                            : Eigen::VectorXd(Eigen::VectorXd::Zero(w.size()));
    return -2.0 * cfg.c_penalty * t * std::max(margin, 0.0) * w;
}

Eigen::VectorXd grad_wrt_weights(const Eigen::VectorXd& w, const Eigen::MatrixXd& data,
                                 const Eigen::VectorXd& t, const SvmConfig& cfg) {
    if (data.rows() != w.size())
        throw DimensionError("grad_wrt_weights: weight length does not match feature rows");
    if (data.cols() != t.size())
        throw DimensionError("grad_wrt_weights: label count does not match sample count");
    const Eigen::ArrayXd margins =
        1.0 - (t.array() * (data.transpose() * w).array());
    Eigen::VectorXd coeff(t.size());
    if (cfg.loss == SvmLoss::hinge_l1) {
        for (Eigen::Index i = 0; i < t.size(); ++i)
            coeff(i) = margins(i) > 0.0 ? -cfg.c_penalty * t(i) : 0.0;
    } else {
        for (Eigen::Index i = 0; i < t.size(); ++i)
            coeff(i) = -2.0 * cfg.c_penalty * t(i) * std::max(margins(i), 0.0);
    }
    return (1.0 + cfg.weight_decay) * w + data * coeff;
}

BinaryResult train_binary(const Eigen::MatrixXd& features, const Eigen::VectorXd& t,
                          const SvmConfig& cfg) {
    cfg.validate();
    if (features.cols() != t.size())
        throw DimensionError("train_binary: label count does not match sample count");
    if (features.cols() == 0)
        throw EmptyError("train_binary: no samples");
    require_finite(features, "train_binary features");
    check_binary_labels(t);
    bool has_pos = false, has_neg = false;
    for (Eigen::Index i = 0; i < t.size(); ++i)
        (t(i) == 1.0 ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg)
        throw DegenerateError("train_binary: both classes must be present");

    const Eigen::MatrixXd aug = augment_bias(features);
    const Eigen::Index dim = aug.rows();
    const Eigen::Index n = aug.cols();

    Eigen::VectorXd w = Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd velocity = Eigen::VectorXd::Zero(dim);
    Rng rng(cfg.seed);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});

    BinaryResult result;
    double lr = cfg.lr_initial;
    double best = std::numeric_limits<double>::infinity();
    Eigen::Index stalled = 0;
    int decays = 0;

    for (Eigen::Index epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        rng.shuffle(order);
        for (Eigen::Index start = 0; start < n; start += cfg.batch_size) {
            const Eigen::Index count = std::min(cfg.batch_size, n - start);
            Eigen::MatrixXd batch(dim, count);
            Eigen::VectorXd batch_t(count);
            for (Eigen::Index j = 0; j < count; ++j) {
                const Eigen::Index src = order[static_cast<std::size_t>(start + j)];
                batch.col(j) = aug.col(src);
                batch_t(j) = t(src);
            }
            const Eigen::VectorXd g = grad_wrt_weights(w, batch, batch_t, cfg);
            velocity = cfg.momentum * velocity - lr * g;
            w += velocity;
        }

        const double obj = objective(w, aug, t, cfg);
        result.history.push_back({epoch, obj, lr});

        const double improvement = (best - obj) / std::max(std::abs(best), 1e-12);
        if (std::isfinite(obj) && obj < best && improvement > kPlateauTol) {
            best = obj;
            stalled = 0;
            continue;
        }
        if (obj < best) best = obj;
        if (++stalled >= cfg.patience_epochs) {
            if (decays >= cfg.max_lr_decays) break;
            lr *= cfg.lr_decay_factor;
            ++decays;
            stalled = 0;
        }
    }

    result.weights = std::move(w);
    return result;
}

namespace {

struct Standardizer {
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;
};

Standardizer fit_standardizer(const Eigen::MatrixXd& data) {
    Standardizer s;
    s.mean = data.rowwise().mean();
    const Eigen::MatrixXd centered = data.colwise() - s.mean;
    s.scale = (centered.array().square().rowwise().mean()).sqrt();
    for (Eigen::Index i = 0; i < s.scale.size(); ++i)
        if (s.scale(i) <= std::numeric_limits<double>::epsilon()) s.scale(i) = 1.0;
    return s;
}

Eigen::MatrixXd apply_standardizer(const Eigen::VectorXd& mean,
                                   const Eigen::VectorXd& scale,
                                   const Eigen::MatrixXd& data) {
    return (data.colwise() - mean).array().colwise() / scale.array();
}

} // namespace

SvmModel train_multiclass(const Eigen::MatrixXd& data, const std::vector<int>& labels,
                          int class_count, const SvmConfig& cfg) {
    cfg.validate();
    if (class_count < 2)
        throw ConfigError("train_multiclass needs at least 2 classes");
    if (static_cast<Eigen::Index>(labels.size()) != data.cols())
        throw DimensionError("train_multiclass: label count does not match sample count");
    if (labels.empty())
        throw EmptyError("train_multiclass: no samples");
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] < 0 || labels[i] >= class_count)
            throw LabelError("label " + std::to_string(labels[i]) + " at sample " +
                             std::to_string(i) + " is outside 0.." +
                             std::to_string(class_count - 1));

    SvmModel model;
    model.classes = class_count;
    model.loss = cfg.loss;

    Eigen::MatrixXd train = data;
    if (cfg.standardize) {
        Standardizer s = fit_standardizer(data);
        train = apply_standardizer(s.mean, s.scale, data);
        model.feature_mean = std::move(s.mean);
        model.feature_scale = std::move(s.scale);
    }

    model.weights.resize(class_count, data.rows() + 1);
    model.histories.reserve(static_cast<std::size_t>(class_count));
    Eigen::VectorXd t(data.cols());
    // Every head trains from the same seed so a 2-class model degenerates to
    // the single binary problem exactly (the heads are mirror images).
    for (int c = 0; c < class_count; ++c) {
        for (Eigen::Index i = 0; i < t.size(); ++i)
            t(i) = labels[static_cast<std::size_t>(i)] == c ? 1.0 : -1.0;
        BinaryResult head = train_binary(train, t, cfg);
        model.weights.row(c) = head.weights.transpose();
        model.histories.push_back(std::move(head.history));
    }
    return model;
}

Prediction predict(const SvmModel& model, const Eigen::MatrixXd& data) {
    if (model.weights.size() == 0)
        throw UnfittedError("predict: model has no weights");
    if (data.rows() != model.input_dim())
        throw DimensionError("predict: expected " + std::to_string(model.input_dim()) +
                             " features, got " + std::to_string(data.rows()));
    require_finite(data, "predict data");

    Eigen::MatrixXd x = data;
    if (model.feature_mean.size() != 0)
        x = apply_standardizer(model.feature_mean, model.feature_scale, data);

    Prediction out;
    out.decision_values = model.weights * augment_bias(x);
    out.labels.resize(static_cast<std::size_t>(data.cols()));
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
        Eigen::Index arg = 0;
        double top = out.decision_values(0, j);
        for (Eigen::Index c = 1; c < out.decision_values.rows(); ++c) {
            if (out.decision_values(c, j) > top) {
                top = out.decision_values(c, j);
                arg = c;
            }
        }
        out.labels[static_cast<std::size_t>(j)] = static_cast<int>(arg);
    }
    return out;
}

double accuracy(const std::vector<int>& actual, const std::vector<int>& predicted) {
    if (actual.size() != predicted.size())
        throw DimensionError("accuracy: label vectors differ in length");
    if (actual.empty())
        throw EmptyError("accuracy: no labels");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < actual.size(); ++i)
        if (actual[i] == predicted[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(actual.size());
}

namespace {

void write_u64(std::ostream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), 8);
}

std::uint64_t read_u64(std::istream& in) {
    std::uint64_t v = 0;
    if (!in.read(reinterpret_cast<char*>(&v), 8))
        throw ParseError("SVMM1 field truncated");
    return v;
}

void write_f64(std::ostream& out, double v) {
    out.write(reinterpret_cast<const char*>(&v), 8);
}

double read_f64(std::istream& in) {
    double v = 0.0;
    if (!in.read(reinterpret_cast<char*>(&v), 8))
        throw ParseError("SVMM1 field truncated");
    return v;
}

} // namespace

void save_svm(const SvmModel& model, const std::string& path) {
    if (model.weights.size() == 0)
        throw UnfittedError("save_svm: model has no weights");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    out.write(kSvmMagic, sizeof(kSvmMagic));
    write_u64(out, static_cast<std::uint64_t>(model.classes));
    out.put(model.loss == SvmLoss::hinge_l1 ? '\x00' : '\x01');
    const bool standardized = model.feature_mean.size() != 0;
    out.put(standardized ? '\x01' : '\x00');
    write_fmat(out, model.weights);
    if (standardized) {
        write_fmat(out, model.feature_mean);
        write_fmat(out, model.feature_scale);
    }
    write_u64(out, model.histories.size());
    for (const TrainingHistory& h : model.histories) {
        write_u64(out, h.size());
        for (const EpochRecord& rec : h) {
            write_u64(out, static_cast<std::uint64_t>(rec.epoch));
            write_f64(out, rec.objective);
            write_f64(out, rec.lr);
        }
    }
    if (!out.flush())
        throw IoError("write to '" + path + "' failed");
}

SvmModel load_svm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path + "' for reading");
    char magic[sizeof(kSvmMagic)] = {};
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kSvmMagic, sizeof(magic)) != 0)
        throw ParseError("missing SVMM1 magic in '" + path + "'");

    SvmModel model;
    const std::uint64_t classes = read_u64(in);
    if (classes < 2 || classes > (1u << 20))
        throw ParseError("SVMM1 class count out of range");
    model.classes = static_cast<int>(classes);
    const int loss_byte = in.get();
    const int std_byte = in.get();
    if (loss_byte < 0 || std_byte < 0)
        throw ParseError("SVMM1 header truncated");
    if (loss_byte > 1 || std_byte > 1)
        throw ParseError("SVMM1 header has invalid flags");
    model.loss = loss_byte == 0 ? SvmLoss::hinge_l1 : SvmLoss::hinge_l2;
    model.weights = read_fmat(in);
    if (model.weights.rows() != static_cast<Eigen::Index>(classes) ||
        model.weights.cols() < 2)
        throw ParseError("SVMM1 weight shape disagrees with header");
    if (std_byte == 1) {
        Eigen::MatrixXd mean = read_fmat(in);
        Eigen::MatrixXd scale = read_fmat(in);
        if (mean.cols() != 1 || scale.cols() != 1 ||
            mean.rows() != model.input_dim() || scale.rows() != model.input_dim())
            throw ParseError("SVMM1 standardizer shape disagrees with weights");
        model.feature_mean = mean.col(0);
        model.feature_scale = scale.col(0);
    }
    const std::uint64_t heads = read_u64(in);
    if (heads != classes)
        throw ParseError("SVMM1 history count disagrees with class count");
    model.histories.resize(heads);
    for (std::uint64_t h = 0; h < heads; ++h) {
        const std::uint64_t records = read_u64(in);
        if (records > (1u << 24))
            throw ParseError("SVMM1 history implausibly long");
        model.histories[h].reserve(records);
        for (std::uint64_t i = 0; i < records; ++i) {
            EpochRecord rec;
            rec.epoch = static_cast<Eigen::Index>(read_u64(in));
            rec.objective = read_f64(in);
            rec.lr = read_f64(in);
            model.histories[h].push_back(rec);
        }
    }
    return model;
}

void save_history_csv(const TrainingHistory& history, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    out << "epoch,objective,lr\n";
    char buf[64];
    for (const EpochRecord& rec : history) {
        out << rec.epoch << ',';
        std::snprintf(buf, sizeof(buf), "%.17g", rec.objective);
        out << buf << ',';
        std::snprintf(buf, sizeof(buf), "%.17g", rec.lr);
        out << buf << '\n';
    }
    if (!out.flush())
        throw IoError("write to '" + path + "' failed");
}

} // namespace mvcca
