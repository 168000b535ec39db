// Acceptance gate for the toolkit: eleven end-to-end checks, each printing
// exactly one PASS/FAIL line. The process exits nonzero if any check fails.
//
// The checks cover: solver-vs-oracle equivalence, the covariance structure of
// canonical variates, population-value recovery on generated data, gradient
// fidelity against finite differences, classifier sanity on separable and
// near-separable data, aggregation of published per-class metric columns,
// exact convolution-stack arithmetic, accuracy degradation under pixel
// corruption, the fusion-beats-single-view ordering, the greedy fusion
// schedule, and byte-level determinism of the pipeline driver.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "mvcca/cca.hpp"
#include "mvcca/matrixio.hpp"
#include "mvcca/mcca.hpp"
#include "mvcca/metrics.hpp"
#include "mvcca/netspec.hpp"
#include "mvcca/noise.hpp"
#include "mvcca/pipeline.hpp"
#include "mvcca/rng.hpp"
#include "mvcca/svm.hpp"

#include "oracles.hpp"
#include "tempdir.hpp"

namespace {

using namespace mvcca;
using Clock = std::chrono::steady_clock;

struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw CheckFailure(what);
}

std::string fmt(double v) {
    std::ostringstream out;
    out.precision(6);
    out << v;
    return out.str();
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool run_check(int number, const std::string& label, const std::function<void()>& body) {
    try {
        body();
        std::cout << "PASS: [" << number << "] " << label << std::endl;
        return true;
    } catch (const std::exception& e) {
        std::cout << "FAIL: [" << number << "] " << label << " -- " << e.what()
                  << std::endl;
        return false;
    }
}

Eigen::MatrixXd random_normal(Rng& rng, Eigen::Index p, Eigen::Index n,
                              double scale = 1.0) {
    Eigen::MatrixXd m(p, n);
    for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = scale * rng.normal();
    return m;
}

/// A generic correlated view pair: y is a random linear image of x plus noise,
/// so the canonical correlations are spread over (0, 1).
struct ViewPair {
    Eigen::MatrixXd x;   // p x n
    Eigen::MatrixXd y;   // q x n
};

ViewPair correlated_pair(Rng& rng, Eigen::Index p, Eigen::Index q, Eigen::Index n) {
    ViewPair vp;
    vp.x = random_normal(rng, p, n);
    const Eigen::MatrixXd mix =
        random_normal(rng, q, p, 1.0 / std::sqrt(static_cast<double>(p)));
    vp.y = mix * vp.x + random_normal(rng, q, n, 0.7);
    return vp;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Trains a one-vs-rest classifier and returns held-out accuracy.
double train_eval(const Eigen::MatrixXd& train_x, const std::vector<int>& train_y,
                  const Eigen::MatrixXd& test_x, const std::vector<int>& test_y,
                  int classes, std::uint64_t seed) {
    SvmConfig cfg;
    cfg.seed = seed;
    const SvmModel model = train_multiclass(train_x, train_y, classes, cfg);
    return accuracy(test_y, predict(model, test_x).labels);
}

// ---------------------------------------------------------------------------
// 1. Whitened solver vs. literal product-matrix eigenvalue oracle.
// ---------------------------------------------------------------------------
void check_solver_oracle() {
    const auto t0 = Clock::now();
    Rng rng(derive_seed(2026, "acceptance-solver-oracle"));
    const int instances = 60;
    double worst = 0.0;
    for (int it = 0; it < instances; ++it) {
        const Eigen::Index p = 1 + static_cast<Eigen::Index>(rng.bounded(6));
        const Eigen::Index q = 1 + static_cast<Eigen::Index>(rng.bounded(6));
        const Eigen::Index lo = p + q + 10;
        const Eigen::Index n =
            lo + static_cast<Eigen::Index>(rng.bounded(static_cast<std::uint64_t>(61 - lo)));
        const ViewPair vp = correlated_pair(rng, p, q, n);

        const CcaTransform t = fit_cca(FeatureSet(FeatureMatrix(vp.x), "x"),
                                       FeatureSet(FeatureMatrix(vp.y), "y"), 0.0);
        require(t.r == std::min(p, q),
                "instance " + std::to_string(it) + ": rank " + std::to_string(t.r) +
                    " != min(p, q) = " + std::to_string(std::min(p, q)));

        const Eigen::VectorXd ref = oracle::cca_gamma_product_matrix(vp.x, vp.y);
        for (Eigen::Index i = 0; i < t.r; ++i)
            worst = std::max(worst, std::abs(t.gamma(i) - ref(i)));
    }
    require(worst < 1e-7, "max |gamma - oracle| = " + fmt(worst) + " >= 1e-7");
    const double dt = seconds_since(t0);
    require(dt < 10.0, "runtime " + fmt(dt) + "s exceeds the 10s budget");
}

// ---------------------------------------------------------------------------
// 2. Covariance structure of the training canonical variates.
// ---------------------------------------------------------------------------
void check_variate_covariance() {
    Rng rng(derive_seed(2026, "acceptance-variate-covariance"));
    double worst = 0.0;
    for (int it = 0; it < 5; ++it) {
        const Eigen::Index p = 5, q = 4, n = 300;
        const ViewPair vp = correlated_pair(rng, p, q, n);
        const CcaTransform t = fit_cca(FeatureSet(FeatureMatrix(vp.x), "x"),
                                       FeatureSet(FeatureMatrix(vp.y), "y"), 0.0);
        const CanonicalVariates v = project(t, FeatureMatrix(vp.x), FeatureMatrix(vp.y));

        const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(t.r, t.r);
        const Eigen::MatrixXd diag_gamma = t.gamma.asDiagonal();
        const double ex =
            (oracle::cross_covariance(v.xstar, v.xstar) - eye).cwiseAbs().maxCoeff();
        const double ey =
            (oracle::cross_covariance(v.ystar, v.ystar) - eye).cwiseAbs().maxCoeff();
        const double exy =
            (oracle::cross_covariance(v.xstar, v.ystar) - diag_gamma).cwiseAbs().maxCoeff();
        worst = std::max({worst, ex, ey, exy});
    }
    require(worst < 1e-8,
            "max deviation from the identity/diagonal structure = " + fmt(worst));
}

// ---------------------------------------------------------------------------
// 3. Sample canonical correlation recovers the closed-form population value.
// ---------------------------------------------------------------------------
void check_population_recovery() {
    MultiViewSpec spec;
    spec.latent_dim = 1;
    spec.view_dims = {3, 3};
    spec.noise_sigmas = {1.0, 1.0};
    spec.loading_seed = derive_seed(2026, "acceptance-recovery-loadings");
    spec.sample_seed = derive_seed(2026, "acceptance-recovery-samples");
    spec.n = 100000;

    const Eigen::VectorXd pop = population_gamma(spec, 0, 1);
    require(std::abs(pop(0) - 0.5) < 1e-15,
            "population value " + fmt(pop(0)) + " != 0.5");

    const MultiViewData data = gen_multiview(spec);
    const CcaTransform t = fit_cca(data.views[0], data.views[1], 0.0);
    require(std::abs(t.gamma(0) - 0.5) <= 0.02,
            "estimated leading correlation " + fmt(t.gamma(0)) +
                " outside 0.5 +/- 0.02");
}

// ---------------------------------------------------------------------------
// 4. Hinge gradients vs. central finite differences.
// ---------------------------------------------------------------------------
void check_gradients() {
    Rng rng(derive_seed(2026, "acceptance-gradients"));
    const double step = 1e-6;
    const double kink_margin = 1e-3;   // keep every hinge away from its corner

    for (const SvmLoss loss : {SvmLoss::hinge_l1, SvmLoss::hinge_l2}) {
        int done = 0, attempts = 0;
        double worst = 0.0;
        while (done < 100) {
            require(++attempts < 20000, "resampling failed to find clean configs");
            SvmConfig cfg;
            cfg.loss = loss;
            cfg.c_penalty = 0.25 + 2.75 * rng.uniform01();
            cfg.weight_decay = rng.uniform01() * 1e-2;

            const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng.bounded(7));
            const Eigen::Index m = 3 + static_cast<Eigen::Index>(rng.bounded(13));
            const Eigen::VectorXd w = random_normal(rng, d, 1);
            const Eigen::MatrixXd data = random_normal(rng, d, m);
            Eigen::VectorXd t(m);
            for (Eigen::Index i = 0; i < m; ++i)
                t(i) = rng.bounded(2) == 0 ? -1.0 : 1.0;

            // Reject configurations with a sample near the hinge corner, where
            // the loss is not twice differentiable and central differences
            // cannot be trusted at the requested precision.
            bool near_kink = false;
            for (Eigen::Index i = 0; i < m; ++i)
                if (std::abs(1.0 - t(i) * w.dot(data.col(i))) < kink_margin)
                    near_kink = true;
            if (near_kink) continue;
            ++done;

            // Gradient with respect to one input sample.
            {
                const Eigen::VectorXd analytic =
                    grad_wrt_input(w, data.col(0), t(0), cfg);
                const auto f = [&](const Eigen::VectorXd& m0) {
                    const double margin = 1.0 - t(0) * w.dot(m0);
                    const double h = std::max(margin, 0.0);
                    return cfg.c_penalty *
                           (loss == SvmLoss::hinge_l1 ? h : h * h);
                };
                Eigen::VectorXd numeric(d);
                for (Eigen::Index i = 0; i < d; ++i)
                    numeric(i) = oracle::central_diff(f, data.col(0), i, step);
                const double rel = (numeric - analytic).cwiseAbs().maxCoeff() /
                                   std::max(1.0, analytic.cwiseAbs().maxCoeff());
                worst = std::max(worst, rel);
            }

            // Gradient with respect to the weights over the whole batch.
            {
                const Eigen::VectorXd analytic = grad_wrt_weights(w, data, t, cfg);
                const auto f = [&](const Eigen::VectorXd& w0) {
                    return objective(w0, data, t, cfg) +
                           0.5 * cfg.weight_decay * w0.squaredNorm();
                };
                Eigen::VectorXd numeric(d);
                for (Eigen::Index i = 0; i < d; ++i)
                    numeric(i) = oracle::central_diff(f, w, i, step);
                const double rel = (numeric - analytic).cwiseAbs().maxCoeff() /
                                   std::max(1.0, analytic.cwiseAbs().maxCoeff());
                worst = std::max(worst, rel);
            }
        }
        require(worst < 1e-5, std::string(svm_loss_name(loss)) +
                                  ": max relative gradient error = " + fmt(worst));
    }
}

// ---------------------------------------------------------------------------
// 5. Classifier sanity: separable pair and near-separable Gaussian blobs.
// ---------------------------------------------------------------------------
void check_svm_sanity() {
    const auto t0 = Clock::now();

    {
        Eigen::MatrixXd x(1, 2);
        x << -1.0, 1.0;
        const std::vector<int> y = {0, 1};
        SvmConfig cfg;
        cfg.seed = derive_seed(2026, "acceptance-separable");
        const SvmModel model = train_multiclass(x, y, 2, cfg);
        const double acc = accuracy(y, predict(model, x).labels);
        require(acc == 1.0, "separable pair training accuracy " + fmt(acc));
    }

    {
        const Eigen::Index per_class = 2000;
        Rng rng(derive_seed(2026, "acceptance-blobs"));
        const auto blob_split = [&](Eigen::MatrixXd& x, std::vector<int>& y) {
            x.resize(2, 2 * per_class);
            y.clear();
            for (Eigen::Index c = 0; c < 2; ++c) {
                const double mu = c == 0 ? -1.0 : 1.0;
                for (Eigen::Index i = 0; i < per_class; ++i) {
                    const Eigen::Index col = c * per_class + i;
                    x(0, col) = mu + rng.normal();
                    x(1, col) = mu + rng.normal();
                    y.push_back(static_cast<int>(c));
                }
            }
        };
        Eigen::MatrixXd train_x, test_x;
        std::vector<int> train_y, test_y;
        blob_split(train_x, train_y);
        blob_split(test_x, test_y);
        const double acc = train_eval(train_x, train_y, test_x, test_y, 2,
                                      derive_seed(2026, "acceptance-blobs-svm"));
        require(acc >= 0.90, "held-out blob accuracy " + fmt(acc) + " < 0.90");
    }

    const double dt = seconds_since(t0);
    require(dt < 30.0, "runtime " + fmt(dt) + "s exceeds the 30s budget");
}

// ---------------------------------------------------------------------------
// 6. Aggregating the published per-class columns reproduces the published
//    overall row. The ten rows below are the per-class results a reference
//    10-class experiment reports (row order as published; the columns are
//    single accuracy, error single, total accuracy, error total, sensitivity,
//    specificity, precision, false positive rate).
// ---------------------------------------------------------------------------
void check_published_aggregation() {
    const double rows[10][8] = {
        {0.99825, 0.0017452, 0.10223, 0, 0.99825, 1, 1, 0},
        {1, 0, 0.10223, 0.00017873, 1, 0.9998, 0.99825, 0.00019908},
        {0.98255, 0.017452, 0.10063, 0.00089366, 0.98255, 0.999, 0.9912, 0.00099562},
        {0.99778, 0.0022173, 0.080429, 0, 0.99778, 1, 1, 0},
        {1, 0, 0.10241, 0, 1, 1, 1, 0},
        {1, 0, 0.10223, 0, 1, 1, 1, 0},
        {1, 0, 0.10223, 0, 1, 1, 1, 0},
        {1, 0, 0.10241, 0, 1, 1, 1, 0},
        {0.99824, 0.0017575, 0.10152, 0.00017873, 0.99824, 0.9998, 0.99824, 0.00019897},
        {0.99295, 0.0070547, 0.10063, 0.0017873, 0.99295, 0.99801, 0.98255, 0.0019889},
    };
    std::vector<ClassMetrics> per_class(10);
    for (int c = 0; c < 10; ++c) {
        per_class[c].single_accuracy = rows[c][0];
        per_class[c].error_single = rows[c][1];
        per_class[c].total_accuracy = rows[c][2];
        per_class[c].error_total = rows[c][3];
        per_class[c].sensitivity = rows[c][4];
        per_class[c].specificity = rows[c][5];
        per_class[c].precision = rows[c][6];
        per_class[c].fpr = rows[c][7];
    }
    const OverallMetrics o = overall_from_per_class(per_class);

    // The published aggregate row: 0.9970, 0.9970, 0.9997, 0.9970, 3.3825e-04.
    // The false positive rate is printed with five significant digits, so the
    // 5e-7 band is checkable directly. The four-decimal columns only carry
    // half-ulp 5e-5 precision, so they are checked at that printed precision
    // (the accuracy column, a sum of five-significant-digit terms, at 5e-4).
    require(std::abs(o.fpr - 3.3825e-04) < 5e-7,
            "overall false positive rate " + fmt(o.fpr) + " not within 5e-7 of 3.3825e-04");
    require(std::abs(o.precision - 0.9970) < 5e-5,
            "overall precision " + fmt(o.precision) + " not within 5e-5 of 0.9970");
    require(std::abs(o.sensitivity - 0.9970) < 5e-5,
            "overall sensitivity " + fmt(o.sensitivity) + " not within 5e-5 of 0.9970");
    require(std::abs(o.specificity - 0.9997) < 5e-5,
            "overall specificity " + fmt(o.specificity) + " not within 5e-5 of 0.9997");
    require(std::abs(o.accuracy - 0.9970) < 5e-4,
            "total-accuracy column sum " + fmt(o.accuracy) + " not within 5e-4 of 0.9970");
}

// ---------------------------------------------------------------------------
// 7. Convolution-stack arithmetic, exact.
// ---------------------------------------------------------------------------
void check_stack_arithmetic() {
    ConvStackSpec three33;   // three stacked 3x3 layers
    three33.filter_size = 3;
    three33.depth = 3;
    three33.channels = 64;
    ConvStackSpec one77;     // one 7x7 layer
    one77.filter_size = 7;
    one77.depth = 1;
    one77.channels = 64;

    require(stack_params_symbolic(three33) == "27K^2",
            "symbolic form " + stack_params_symbolic(three33));
    require(stack_params_symbolic(one77) == "49K^2",
            "symbolic form " + stack_params_symbolic(one77));
    require(stack_params(three33) == 110592,
            "27K^2 at K=64 returned " + std::to_string(stack_params(three33)));
    require(stack_params(one77) == 200704,
            "49K^2 at K=64 returned " + std::to_string(stack_params(one77)));
    require(params_ratio(three33, one77) == 49.0 / 27.0,
            "parameter ratio " + fmt(params_ratio(three33, one77)));

    const std::int64_t two_layers = effective_receptive_field({{3, 1}, {3, 1}});
    const std::int64_t three_layers = effective_receptive_field({{3, 1}, {3, 1}, {3, 1}});
    require(two_layers == 5, "two stacked 3x3: field " + std::to_string(two_layers));
    require(three_layers == 7, "three stacked 3x3: field " + std::to_string(three_layers));
}

// ---------------------------------------------------------------------------
// 8. Accuracy degrades with pixel corruption, averaged over seeds.
//    Constants frozen after tuning against the nearest-template oracle.
// ---------------------------------------------------------------------------
void check_noise_degradation() {
    const auto t0 = Clock::now();
    testutil::TempDir tmp("acceptance-noise");

    PipelineConfig cfg;
    cfg.task.class_count = 4;
    cfg.task.patch_h = 12;
    cfg.task.patch_w = 12;
    cfg.task.template_scale = 1.0;
    cfg.task.within_sigma = 0.8;
    cfg.task.views = {Extractor::raw_flatten, Extractor::block_means_2x2};
    cfg.task.n_train = 25;
    cfg.task.n_test = 40;
    cfg.fusion = "mcca";
    cfg.fuse_mode = FuseMode::sum;
    cfg.levels = {0.01, 0.05, 0.10, 0.15};
    cfg.out_dir = tmp.file("sweep");

    const std::vector<std::uint64_t> seeds = {11, 12, 13, 14, 15};
    std::vector<double> mean_acc(cfg.levels.size(), 0.0);
    for (const std::uint64_t seed : seeds) {
        cfg.seed = seed;
        const NoiseSweepResult res = cmd_noise_sweep(cfg);
        require(res.accuracies.size() == cfg.levels.size(), "unexpected sweep length");
        for (std::size_t i = 0; i < res.accuracies.size(); ++i)
            mean_acc[i] += res.accuracies[i] / static_cast<double>(seeds.size());
    }

    std::string curve;
    for (const double a : mean_acc) curve += (curve.empty() ? "" : ", ") + fmt(a);
    for (std::size_t i = 0; i + 1 < mean_acc.size(); ++i)
        require(mean_acc[i + 1] <= mean_acc[i] + 0.01,
                "mean accuracy increased by more than one point between levels " +
                    fmt(cfg.levels[i]) + " and " + fmt(cfg.levels[i + 1]) +
                    " (curve: " + curve + ")");
    require(mean_acc.front() > mean_acc.back(),
            "corruption never reduced accuracy (curve: " + curve + ")");

    const double dt = seconds_since(t0);
    require(dt < 120.0, "runtime " + fmt(dt) + "s exceeds the 2min budget");
}

// ---------------------------------------------------------------------------
// 9. Fusion ordering: multi-stage fusion >= pair fusion >= best single view,
//    mean accuracy over ten seeds, 0.5-point tolerance band. The construction
//    was tuned once against the nearest-template oracle and is frozen here:
//    on 4x4 patches all three mean-pooling extractors emit 4-dim views with
//    the same signal scale (~0.5 per feature), so every fusion stage averages
//    independent per-view noise without compressing rank, and each extra view
//    strictly helps. Per-view noise 0.4 puts single views around 70%, the
//    fused pair around 77%, and the three-view fusion around 85%.
// ---------------------------------------------------------------------------
void check_fusion_ordering() {
    const int trials = 10;
    const double ridge = 1e-4;

    ClassTaskSpec base;
    base.class_count = 4;
    base.patch_h = 4;
    base.patch_w = 4;
    base.template_scale = 1.0;
    base.within_sigma = 0.2;
    base.views = {Extractor::block_means_2x2, Extractor::row_means,
                  Extractor::column_means};
    base.view_noise_sigmas = {0.4, 0.4, 0.4};
    base.n_train = 30;
    base.n_test = 100;

    const std::size_t n_views = base.views.size();
    std::vector<double> single_mean(n_views, 0.0);
    double pair_mean = 0.0, mcca_mean = 0.0, oracle_mean = 0.0;

    for (int trial = 0; trial < trials; ++trial) {
        ClassTaskSpec spec = base;
        spec.seed = derive_seed(7100 + static_cast<std::uint64_t>(trial),
                                "acceptance-fusion-task");
        const ClassTask task = gen_classification(spec);
        const std::uint64_t svm_seed = derive_seed(spec.seed, "acceptance-fusion-svm");

        // Ground-truth oracle on the uncorrupted test patches: documents that
        // the task itself is solvable before per-view noise enters.
        {
            const std::vector<Eigen::MatrixXd> templates = class_templates(spec);
            int hits = 0;
            for (std::size_t i = 0; i < task.test_patches.size(); ++i)
                if (oracle::nearest_template(task.test_patches[i].pixels, templates) ==
                    task.test.labels[i])
                    ++hits;
            oracle_mean += static_cast<double>(hits) /
                           static_cast<double>(task.test_patches.size()) / trials;
        }

        for (std::size_t v = 0; v < n_views; ++v)
            single_mean[v] += train_eval(task.train.views[v].matrix.data,
                                         task.train.labels,
                                         task.test.views[v].matrix.data,
                                         task.test.labels, spec.class_count,
                                         svm_seed) /
                              trials;

        // Pair arm: the two highest-rank views (descending, ties to the lower
        // index), mirroring the pipeline's pair-selection rule.
        {
            std::vector<std::size_t> order(n_views);
            std::iota(order.begin(), order.end(), 0u);
            std::vector<Eigen::Index> ranks(n_views);
            for (std::size_t v = 0; v < n_views; ++v)
                ranks[v] = numerical_rank(task.train.views[v].matrix);
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) {
                                 return ranks[a] > ranks[b];
                             });
            const std::size_t i0 = std::min(order[0], order[1]);
            const std::size_t i1 = std::max(order[0], order[1]);

            const CcaTransform t =
                fit_cca(task.train.views[i0], task.train.views[i1], ridge);
            const FusedFeatures ftr = fuse_sum(project(t, task.train.views[i0].matrix,
                                                       task.train.views[i1].matrix));
            const FusedFeatures fte = fuse_sum(project(t, task.test.views[i0].matrix,
                                                       task.test.views[i1].matrix));
            pair_mean += train_eval(ftr.data, task.train.labels, fte.data,
                                    task.test.labels, spec.class_count, svm_seed) /
                         trials;
        }

        // Full multi-stage arm over all views.
        {
            const auto [plan, fused_train] =
                fit_mcca(task.train.views, FuseMode::sum, ridge);
            std::vector<FeatureMatrix> test_mats;
            for (const FeatureSet& fs : task.test.views)
                test_mats.push_back(fs.matrix);
            const FusedFeatures fused_test = apply_mcca(plan, test_mats);
            mcca_mean += train_eval(fused_train.data, task.train.labels,
                                    fused_test.data, task.test.labels,
                                    spec.class_count, svm_seed) /
                         trials;
        }
    }

    const double best_single = *std::max_element(single_mean.begin(), single_mean.end());
    std::string summary = "means: multi-stage " + fmt(mcca_mean) + ", pair " +
                          fmt(pair_mean) + ", best single " + fmt(best_single) +
                          ", patch oracle " + fmt(oracle_mean);

    require(oracle_mean >= 0.95,
            "construction unsound; nearest-template oracle only reaches " +
                fmt(oracle_mean));
    require(mcca_mean >= pair_mean - 0.005,
            "multi-stage fusion fell below pair fusion (" + summary + ")");
    require(pair_mean >= best_single - 0.005,
            "pair fusion fell below the best single view (" + summary + ")");
}

// ---------------------------------------------------------------------------
// 10. The planner replays the greedy max-rank schedule for five views whose
//     ranks descend strictly and then tie: r1 > r2 > r3 > r4 = r5.
// ---------------------------------------------------------------------------
void check_greedy_schedule() {
    Rng rng(derive_seed(2026, "acceptance-schedule"));
    const std::vector<Eigen::Index> dims = {12, 10, 8, 6, 6};
    const std::vector<std::string> names = {"first", "second", "third", "fourth",
                                            "fifth"};
    std::vector<FeatureSet> views;
    for (std::size_t i = 0; i < dims.size(); ++i)
        views.emplace_back(FeatureMatrix(random_normal(rng, dims[i], 64)), names[i]);
    for (std::size_t i = 0; i < dims.size(); ++i)
        require(numerical_rank(views[i].matrix) == dims[i],
                names[i] + " does not have full rank " + std::to_string(dims[i]));

    const MccaPlan plan = plan_fusion(views, FuseMode::sum);
    require(plan.lambda == 5, "lambda = " + std::to_string(plan.lambda));
    require(plan.stages.size() == 4,
            std::to_string(plan.stages.size()) + " stages planned, expected 4");
    for (std::size_t i = 0; i < names.size(); ++i)
        require(plan.input_ranks.at(names[i]) == dims[i],
                names[i] + ": recorded rank " +
                    std::to_string(plan.input_ranks.at(names[i])));

    // Greedy replay: (first, second) fuse first; each later stage pairs the
    // running fused set with the next view; the final tie (fourth vs fifth)
    // resolves to the lower original index.
    const std::vector<Eigen::Index> expected_rank = {10, 8, 6, 6};
    std::string running = names[0];
    for (std::size_t s = 0; s < plan.stages.size(); ++s) {
        const MccaStage& st = plan.stages[s];
        const std::string expect_left = s == 0 ? names[0] : running;
        require(st.left_id == expect_left, "stage " + std::to_string(s + 1) +
                                               " left operand " + st.left_id +
                                               ", expected " + expect_left);
        require(st.right_id == names[s + 1], "stage " + std::to_string(s + 1) +
                                                 " right operand " + st.right_id +
                                                 ", expected " + names[s + 1]);
        require(st.output_rank == expected_rank[s],
                "stage " + std::to_string(s + 1) + " planned rank " +
                    std::to_string(st.output_rank) + ", expected " +
                    std::to_string(expected_rank[s]));
        running = st.output_id;
    }
    require(plan.result_id() == running, "result id mismatch");
}

// ---------------------------------------------------------------------------
// 11. Byte-identical pipeline reruns.
// ---------------------------------------------------------------------------
void check_determinism() {
    testutil::TempDir tmp("acceptance-determinism");

    PipelineConfig cfg;
    cfg.task.class_count = 3;
    cfg.task.patch_h = 8;
    cfg.task.patch_w = 8;
    cfg.task.within_sigma = 0.4;
    cfg.task.views = {Extractor::raw_flatten, Extractor::row_means};
    cfg.task.n_train = 12;
    cfg.task.n_test = 8;
    cfg.fusion = "mcca";
    cfg.svm.max_epochs = 40;
    cfg.seed = 97;
    cfg.out_dir = tmp.file("run");

    const PipelineResult first = cmd_pipeline(cfg);
    const std::vector<std::string> artifacts = {
        first.report_csv_path, first.report_text_path, first.summary_path,
        first.model_path, first.plan_path};
    std::vector<std::string> before;
    for (const std::string& path : artifacts) before.push_back(slurp(path));

    const PipelineResult second = cmd_pipeline(cfg);
    require(second.accuracy == first.accuracy, "headline accuracy changed on rerun");
    for (std::size_t i = 0; i < artifacts.size(); ++i)
        require(slurp(artifacts[i]) == before[i],
                artifacts[i] + " changed between identical runs");
}

} // namespace

int main() {
    int failures = 0;
    const auto check = [&](int number, const std::string& label,
                           const std::function<void()>& body) {
        if (!run_check(number, label, body)) ++failures;
    };

    check(1, "whitened solver matches the product-matrix eigenvalue oracle "
             "on 60 random instances",
          check_solver_oracle);
    check(2, "training canonical variates have identity self-covariance and "
             "diagonal cross-covariance",
          check_variate_covariance);
    check(3, "leading sample correlation recovers the population value 0.5 "
             "on 100000 generated draws",
          check_population_recovery);
    check(4, "hinge gradients match central finite differences on 100 "
             "configurations per loss",
          check_gradients);
    check(5, "classifier solves a separable pair exactly and Gaussian blobs "
             "near the Bayes rate",
          check_svm_sanity);
    check(6, "aggregating published per-class columns reproduces the "
             "published overall row",
          check_published_aggregation);
    check(7, "convolution stack parameter counts, ratio, and receptive "
             "fields are exact",
          check_stack_arithmetic);
    check(8, "mean accuracy degrades monotonically with pixel corruption "
             "over five seeds",
          check_noise_degradation);
    check(9, "multi-stage fusion >= pair fusion >= best single view over "
             "ten seeds",
          check_fusion_ordering);
    check(10, "planner replays the greedy max-rank schedule with the "
              "documented tie-break",
          check_greedy_schedule);
    check(11, "pipeline reruns produce byte-identical reports, plans, and "
              "models",
          check_determinism);

    if (failures == 0) {
        std::cout << "all 11 acceptance checks passed" << std::endl;
        return 0;
    }
    std::cout << failures << " of 11 acceptance checks failed" << std::endl;
    return 1;
}
