#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "mvcca/errors.hpp"
#include "mvcca/matrixio.hpp"

namespace mvcca {

/// Raw imagery: H x W pixels plus the dynamic range replacement values are
/// drawn from. Every pixel lies within [lo, hi].
struct ImagePatch {
    Eigen::MatrixXd pixels;
    double lo = 0.0;
    double hi = 0.0;
};

/// Builds a patch whose value range is the pixel min/max.
ImagePatch make_patch(Eigen::MatrixXd pixels);

/// Replaces exactly floor(level * H * W) distinct pixels, chosen uniformly
/// without replacement by the seeded generator, with i.i.d. Uniform(lo, hi)
/// draws. Every other pixel is bit-identical to the input.
ImagePatch inject_noise(const ImagePatch& img, double level, std::uint64_t rng_seed);

/// Shared-latent generator: view_i = L_i S z + sigma_i eps with orthonormal
/// loadings L_i, z standard normal, S = diag(latent_scales). Closed-form
/// canonical correlations between any two views follow per latent coordinate.
struct MultiViewSpec {
    Eigen::Index latent_dim = 1;
    std::vector<Eigen::Index> view_dims;
    std::vector<double> noise_sigmas;     // per view, > 0
    std::vector<double> latent_scales;    // per coordinate; empty means all 1
    std::uint64_t loading_seed = 0;
    std::uint64_t sample_seed = 0;
    Eigen::Index n = 0;

    void validate() const;
};

struct MultiViewData {
    std::vector<FeatureSet> views;
    Eigen::MatrixXd latents;   // k x n shared coordinates (pre-scaling)
};

MultiViewData gen_multiview(const MultiViewSpec& spec);

/// Population canonical correlations between two generated views, sorted
/// descending: gamma_j = s_j^2 / sqrt((s_j^2 + sigma_a^2)(s_j^2 + sigma_b^2)).
Eigen::VectorXd population_gamma(const MultiViewSpec& spec, std::size_t view_a,
                                 std::size_t view_b);

enum class Extractor { raw_flatten, row_means, column_means, block_means_2x2 };

Extractor extractor_from_string(const std::string& s);
const char* extractor_name(Extractor e);
Eigen::Index extractor_dim(Extractor e, Eigen::Index h, Eigen::Index w);
Eigen::VectorXd apply_extractor(Extractor e, const ImagePatch& patch);

/// Patch-classification task: class templates plus within-class Gaussian
/// pixel noise; each view applies one deterministic extractor, optionally
/// followed by additive per-view feature noise. Counts are per class.
struct ClassTaskSpec {
    int class_count = 2;
    Eigen::Index patch_h = 8;
    Eigen::Index patch_w = 8;
    double template_scale = 1.0;
    double within_sigma = 0.1;
    std::vector<Extractor> views;
    std::vector<double> view_noise_sigmas;   // empty means all 0
    Eigen::Index n_train = 1;                // per class
    Eigen::Index n_test = 1;                 // per class
    std::uint64_t seed = 0;

    void validate() const;
};

/// The resolved per-class mean patches (derived deterministically from the
/// spec seed), exposed so oracles can classify against the ground truth.
std::vector<Eigen::MatrixXd> class_templates(const ClassTaskSpec& spec);

struct ClassTask {
    LabeledDataset train;
    LabeledDataset test;
    std::vector<ImagePatch> test_patches;      // aligned with test sample order
    std::vector<Eigen::MatrixXd> test_view_noise;   // per view: dim x n_test_total
};

ClassTask gen_classification(const ClassTaskSpec& spec);

/// Recomputes the test views from (possibly corrupted) patches, reusing the
/// stored per-view noise so level 0 reproduces the original features exactly.
std::vector<FeatureSet> extract_test_views(const ClassTaskSpec& spec,
                                           const std::vector<ImagePatch>& patches,
                                           const std::vector<Eigen::MatrixXd>& view_noise);

/// DATASPEC1: plain-text record of every generator parameter and seed,
/// sufficient for exact regeneration.
struct DataSpec {
    std::string kind;              // "classification" or "multiview"
    ClassTaskSpec classification;  // meaningful when kind matches
    MultiViewSpec multiview;
};

void save_dataspec(const DataSpec& spec, const std::string& path);
DataSpec load_dataspec(const std::string& path);

} // namespace mvcca
