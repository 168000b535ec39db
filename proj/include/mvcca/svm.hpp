#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "mvcca/errors.hpp"

namespace mvcca {

enum class SvmLoss { hinge_l1, hinge_l2 };

SvmLoss svm_loss_from_string(const std::string& s);
const char* svm_loss_name(SvmLoss loss);

/// Optimizer and loss settings. Defaults follow the reference training
/// recipe: batch 64, momentum 0.9, weight decay 5e-4, initial rate 1e-2
/// decayed by 0.1 on plateau at most twice.
struct SvmConfig {
    double c_penalty = 1.0;
    SvmLoss loss = SvmLoss::hinge_l2;
    Eigen::Index batch_size = 64;
    double momentum = 0.9;
    double weight_decay = 5e-4;
    double lr_initial = 1e-2;
    double lr_decay_factor = 0.1;
    int max_lr_decays = 2;
    Eigen::Index patience_epochs = 5;
    Eigen::Index max_epochs = 100;
    std::uint64_t seed = 0;
    bool standardize = false;   // z-score features with training stats

    void validate() const;
};

struct EpochRecord {
    Eigen::Index epoch;
    double objective;
    double lr;
};

using TrainingHistory = std::vector<EpochRecord>;

/// One-vs-rest linear classifier. Row c of `weights` is the class-c weight
/// vector over d features plus a trailing bias column (constant-1 feature).
struct SvmModel {
    Eigen::MatrixXd weights;                  // C x (d+1)
    int classes = 0;
    SvmLoss loss = SvmLoss::hinge_l2;
    std::vector<TrainingHistory> histories;   // one per class head
    Eigen::VectorXd feature_mean;             // empty unless standardized
    Eigen::VectorXd feature_scale;

    Eigen::Index input_dim() const { return weights.cols() - 1; }
};

/// Margin objective: 0.5 w'w + C sum_n max(1 - w'x_n t_n, 0) (hinge_l1) or
/// the squared-hinge variant. Labels must be in {-1, +1}.
double objective(const Eigen::VectorXd& w, const Eigen::MatrixXd& data,
                 const Eigen::VectorXd& t, const SvmConfig& cfg);

/// Gradient of the per-sample loss with respect to the input activation:
/// hinge_l1: -C t w [1 > w'm t];  hinge_l2: -2C t w max(1 - w'm t, 0).
Eigen::VectorXd grad_wrt_input(const Eigen::VectorXd& w, const Eigen::VectorXd& m,
                               double t, const SvmConfig& cfg);

/// Gradient of objective(w) + 0.5 * weight_decay * w'w over the batch.
Eigen::VectorXd grad_wrt_weights(const Eigen::VectorXd& w, const Eigen::MatrixXd& data,
                                 const Eigen::VectorXd& t, const SvmConfig& cfg);

struct BinaryResult {
    Eigen::VectorXd weights;   // d+1 (bias appended)
    TrainingHistory history;
};

/// Mini-batch gradient descent with momentum on the augmented problem
/// (constant-1 feature appended for the bias). The training objective is
/// monitored each epoch; when it plateaus for patience_epochs the rate is
/// decayed, at most max_lr_decays times, after which training stops.
BinaryResult train_binary(const Eigen::MatrixXd& features, const Eigen::VectorXd& t,
                          const SvmConfig& cfg);

SvmModel train_multiclass(const Eigen::MatrixXd& data, const std::vector<int>& labels,
                          int class_count, const SvmConfig& cfg);

struct Prediction {
    std::vector<int> labels;
    Eigen::MatrixXd decision_values;   // C x m
};

/// argmax over class decision values; exact ties go to the smallest index.
Prediction predict(const SvmModel& model, const Eigen::MatrixXd& data);

double accuracy(const std::vector<int>& actual, const std::vector<int>& predicted);

/// SVMM1 container serialization; history exports as CSV (epoch,objective,lr).
void save_svm(const SvmModel& model, const std::string& path);
SvmModel load_svm(const std::string& path);
void save_history_csv(const TrainingHistory& history, const std::string& path);

} // namespace mvcca
