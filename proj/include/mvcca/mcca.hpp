#pragma once

#include <map>
#include <string>
#include <vector>

#include "mvcca/cca.hpp"

namespace mvcca {

/// One pairwise fusion step: the two named inputs are projected through
/// `transform` and combined with `fuse_mode` into a fresh set `output_id`.
struct MccaStage {
    std::string left_id;
    std::string right_id;
    std::string output_id;
    CcaTransform transform;          // unfitted (r == 0) in a planning-only plan
    FuseMode fuse_mode = FuseMode::sum;
    Eigen::Index output_rank = 0;    // numerical rank (fitted) or planning bound
};

/// A frozen rank-ordered fusion schedule over lambda feature sets. The greedy
/// rule always fuses the two highest-rank alive sets; ties break by ascending
/// original input index, and a fused set inherits the smaller constituent
/// index for later tie-breaks.
struct MccaPlan {
    std::vector<MccaStage> stages;               // lambda - 1 entries
    std::vector<std::string> input_ids;          // original views, in input order
    std::map<std::string, Eigen::Index> input_ranks;  // id -> rank when it became alive
    Eigen::Index lambda = 0;
    FuseMode fuse_mode = FuseMode::sum;
    double ridge = 0.0;
    bool fitted = false;

    const std::string& result_id() const { return stages.back().output_id; }
};

/// Rank-ordered schedule without fitting any transform. Intermediate ranks
/// are the planning bounds: min(r_left, r_right) for sum and
/// r_left + r_right for concat.
MccaPlan plan_fusion(const std::vector<FeatureSet>& views, FuseMode fuse_mode);

/// Plans and executes the fusion on training data. Each stage fits CCA on the
/// two highest-rank alive sets, projects, fuses, and records the numerical
/// rank of the fused matrix for subsequent scheduling.
std::pair<MccaPlan, FusedFeatures> fit_mcca(const std::vector<FeatureSet>& views,
                                            FuseMode fuse_mode, double ridge_rel = 1e-4);

/// Replays a fitted plan on new data (views bound by position to input_ids).
/// No refitting: stored transforms and training means are reused.
FusedFeatures apply_mcca(const MccaPlan& plan, const std::vector<FeatureMatrix>& views);

/// MCCA1 container serialization.
void save_mcca(const MccaPlan& plan, const std::string& path);
MccaPlan load_mcca(const std::string& path);

} // namespace mvcca
