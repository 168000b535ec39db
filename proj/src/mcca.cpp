#include "mvcca/mcca.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

namespace mvcca {

namespace {

constexpr char kMccaMagic[6] = {'M', 'C', 'C', 'A', '1', '\0'};

struct Alive {
    std::string id;
    Eigen::Index rank;
    std::size_t tie_index;   // original input index; fused sets inherit the min
    std::size_t slot;        // position in the working store
};

/// Picks the two highest-rank alive sets; ties resolve by ascending tie index.
std::pair<std::size_t, std::size_t> pick_pair(const std::vector<Alive>& alive) {
    auto better = [](const Alive& l, const Alive& r) {
        if (l.rank != r.rank) return l.rank > r.rank;
        return l.tie_index < r.tie_index;
    };
    std::size_t first = 0;
    for (std::size_t i = 1; i < alive.size(); ++i)
        if (better(alive[i], alive[first])) first = i;
    std::size_t second = first == 0 ? 1 : 0;
    for (std::size_t i = 0; i < alive.size(); ++i) {
        if (i == first) continue;
        if (better(alive[i], alive[second])) second = i;
    }
    return {first, second};
}

std::vector<std::string> assign_ids(const std::vector<FeatureSet>& views) {
    std::vector<std::string> ids;
    std::set<std::string> used;
    for (std::size_t i = 0; i < views.size(); ++i) {
        std::string id = views[i].name.empty() ? "view" + std::to_string(i) : views[i].name;
        while (used.count(id)) id += "_";
        used.insert(id);
        ids.push_back(id);
    }
    return ids;
}

std::string fresh_output_id(std::size_t stage, const std::set<std::string>& used) {
    std::string id = "fused" + std::to_string(stage);
    while (used.count(id)) id += "_";
    return id;
}

void check_views(const std::vector<FeatureSet>& views) {
    if (views.size() < 2)
        throw DegenerateError("fusion needs at least 2 views");
    const Eigen::Index n = views.front().n();
    for (const auto& v : views)
        if (v.n() != n)
            throw DimensionError("views disagree on sample count");
}

} // namespace

MccaPlan plan_fusion(const std::vector<FeatureSet>& views, FuseMode fuse_mode) {
    check_views(views);
    MccaPlan plan;
    plan.lambda = static_cast<Eigen::Index>(views.size());
    plan.fuse_mode = fuse_mode;
    plan.input_ids = assign_ids(views);

    std::set<std::string> used(plan.input_ids.begin(), plan.input_ids.end());
    std::vector<Alive> alive;
    for (std::size_t i = 0; i < views.size(); ++i) {
        Eigen::Index rank = numerical_rank(views[i].matrix);
        plan.input_ranks[plan.input_ids[i]] = rank;
        alive.push_back({plan.input_ids[i], rank, i, i});
    }

    for (std::size_t stage = 1; alive.size() > 1; ++stage) {
        auto [first, second] = pick_pair(alive);
        const Alive left = alive[first];
        const Alive right = alive[second];

        MccaStage s;
        s.left_id = left.id;
        s.right_id = right.id;
        s.fuse_mode = fuse_mode;
        s.output_id = fresh_output_id(stage, used);
        used.insert(s.output_id);
        s.output_rank = fuse_mode == FuseMode::sum ? std::min(left.rank, right.rank)
                                                   : left.rank + right.rank;
        plan.input_ranks[s.output_id] = s.output_rank;

        Alive fused{s.output_id, s.output_rank, std::min(left.tie_index, right.tie_index), 0};
        alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(std::max(first, second)));
        alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(std::min(first, second)));
        alive.push_back(fused);
        plan.stages.push_back(std::move(s));
    }
    plan.fitted = false;
    return plan;
}

std::pair<MccaPlan, FusedFeatures> fit_mcca(const std::vector<FeatureSet>& views,
                                            FuseMode fuse_mode, double ridge_rel) {
    check_views(views);
    if (views.front().n() < 3)
        throw DegenerateError("fit_mcca needs at least 3 samples");

    MccaPlan plan;
    plan.lambda = static_cast<Eigen::Index>(views.size());
    plan.fuse_mode = fuse_mode;
    plan.ridge = ridge_rel;
    plan.input_ids = assign_ids(views);

    std::set<std::string> used(plan.input_ids.begin(), plan.input_ids.end());
    std::vector<Alive> alive;
    std::vector<FeatureSet> store;   // working sets, indexed by Alive::slot
    for (std::size_t i = 0; i < views.size(); ++i) {
        Eigen::Index rank = numerical_rank(views[i].matrix);
        plan.input_ranks[plan.input_ids[i]] = rank;
        alive.push_back({plan.input_ids[i], rank, i, i});
        store.push_back(views[i]);
    }

    FusedFeatures last;
    for (std::size_t stage = 1; alive.size() > 1; ++stage) {
        auto [first, second] = pick_pair(alive);
        const Alive left = alive[first];
        const Alive right = alive[second];

        MccaStage s;
        s.left_id = left.id;
        s.right_id = right.id;
        s.fuse_mode = fuse_mode;
        s.output_id = fresh_output_id(stage, used);
        used.insert(s.output_id);

        try {
            s.transform = fit_cca(store[left.slot], store[right.slot], ridge_rel);
            CanonicalVariates variates = project(s.transform, store[left.slot].matrix,
                                                 store[right.slot].matrix);
            last = fuse(variates, fuse_mode);
        } catch (const Error& e) {
            throw Error(e.code(), "stage " + std::to_string(stage) + " (" + left.id +
                                      " + " + right.id + "): " + e.what());
        }

        FeatureSet fused_set(FeatureMatrix(last.data), s.output_id);
        s.output_rank = numerical_rank(fused_set.matrix);
        plan.input_ranks[s.output_id] = s.output_rank;

        Alive fused{s.output_id, s.output_rank, std::min(left.tie_index, right.tie_index),
                    store.size()};
        store.push_back(std::move(fused_set));
        alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(std::max(first, second)));
        alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(std::min(first, second)));
        alive.push_back(fused);
        plan.stages.push_back(std::move(s));
    }
    plan.fitted = true;
    return {std::move(plan), std::move(last)};
}

FusedFeatures apply_mcca(const MccaPlan& plan, const std::vector<FeatureMatrix>& views) {
    if (!plan.fitted)
        throw UnfittedError("apply_mcca: plan has no fitted transforms");
    if (views.size() != plan.input_ids.size())
        throw DimensionError("apply_mcca: expected " + std::to_string(plan.input_ids.size()) +
                             " views, got " + std::to_string(views.size()));
    if (views.empty())
        throw DegenerateError("apply_mcca: no views");
    const Eigen::Index n = views.front().n();
    std::map<std::string, const FeatureMatrix*> bound;
    std::vector<FeatureMatrix> intermediates;
    intermediates.reserve(plan.stages.size());
    for (std::size_t i = 0; i < views.size(); ++i) {
        if (views[i].n() != n)
            throw DimensionError("apply_mcca: views disagree on sample count");
        bound[plan.input_ids[i]] = &views[i];
    }

    FusedFeatures last;
    for (std::size_t i = 0; i < plan.stages.size(); ++i) {
        const MccaStage& s = plan.stages[i];
        auto left = bound.find(s.left_id);
        auto right = bound.find(s.right_id);
        if (left == bound.end() || right == bound.end())
            throw UnfittedError("apply_mcca: stage operand missing");
        try {
            CanonicalVariates variates = project(s.transform, *left->second, *right->second);
            last = fuse(variates, s.fuse_mode);
        } catch (const Error& e) {
            throw Error(e.code(), "stage " + std::to_string(i + 1) + " (" + s.left_id +
                                      " + " + s.right_id + "): " + e.what());
        }
        intermediates.emplace_back(last.data);
        bound[s.output_id] = &intermediates.back();
    }
    return last;
}

namespace {

void write_str(std::ostream& out, const std::string& s) {
    std::uint64_t len = s.size();
    out.write(reinterpret_cast<const char*>(&len), 8);
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_str(std::istream& in) {
    std::uint64_t len = 0;
    if (!in.read(reinterpret_cast<char*>(&len), 8))
        throw ParseError("MCCA1 string truncated");
    // Stage fields embed whole CCAT1 payloads, so the bound matches theirs.
    if (len > (1ull << 34))
        throw ParseError("MCCA1 string implausibly large");
    std::string s(len, '\0');
    if (len && !in.read(s.data(), static_cast<std::streamsize>(len)))
        throw ParseError("MCCA1 string payload truncated");
    return s;
}

void write_u64(std::ostream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), 8);
}

std::uint64_t read_u64(std::istream& in) {
    std::uint64_t v = 0;
    if (!in.read(reinterpret_cast<char*>(&v), 8))
        throw ParseError("MCCA1 u64 truncated");
    return v;
}

} // namespace

void save_mcca(const MccaPlan& plan, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    out.write(kMccaMagic, sizeof(kMccaMagic));
    write_u64(out, static_cast<std::uint64_t>(plan.lambda));
    out.put(plan.fuse_mode == FuseMode::sum ? 0 : 1);
    out.put(plan.fitted ? 1 : 0);
    double ridge = plan.ridge;
    out.write(reinterpret_cast<const char*>(&ridge), 8);
    write_u64(out, plan.input_ids.size());
    for (const auto& id : plan.input_ids) {
        write_str(out, id);
        write_u64(out, static_cast<std::uint64_t>(plan.input_ranks.at(id)));
    }
    write_u64(out, plan.stages.size());
    for (const auto& s : plan.stages) {
        write_str(out, s.left_id);
        write_str(out, s.right_id);
        write_str(out, s.output_id);
        write_u64(out, static_cast<std::uint64_t>(s.output_rank));
        std::ostringstream tbytes(std::ios::binary);
        if (plan.fitted) write_cca(tbytes, s.transform);
        write_str(out, tbytes.str());
    }
    if (!out.flush())
        throw IoError("write to '" + path + "' failed");
}

MccaPlan load_mcca(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path + "' for reading");
    char magic[sizeof(kMccaMagic)] = {};
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMccaMagic, sizeof(magic)) != 0)
        throw ParseError("missing MCCA1 magic");
    MccaPlan plan;
    plan.lambda = static_cast<Eigen::Index>(read_u64(in));
    int mode = in.get();
    int fitted = in.get();
    if (mode < 0 || fitted < 0)
        throw ParseError("MCCA1 header truncated");
    plan.fuse_mode = mode == 0 ? FuseMode::sum : FuseMode::concat;
    plan.fitted = fitted != 0;
    if (!in.read(reinterpret_cast<char*>(&plan.ridge), 8))
        throw ParseError("MCCA1 ridge truncated");
    const std::uint64_t ninputs = read_u64(in);
    for (std::uint64_t i = 0; i < ninputs; ++i) {
        std::string id = read_str(in);
        plan.input_ranks[id] = static_cast<Eigen::Index>(read_u64(in));
        plan.input_ids.push_back(std::move(id));
    }
    const std::uint64_t nstages = read_u64(in);
    for (std::uint64_t i = 0; i < nstages; ++i) {
        MccaStage s;
        s.left_id = read_str(in);
        s.right_id = read_str(in);
        s.output_id = read_str(in);
        s.fuse_mode = plan.fuse_mode;
        s.output_rank = static_cast<Eigen::Index>(read_u64(in));
        std::string tbytes = read_str(in);
        if (plan.fitted) {
            std::istringstream ts(tbytes, std::ios::binary);
            s.transform = read_cca(ts);
        }
        plan.input_ranks[s.output_id] = s.output_rank;
        plan.stages.push_back(std::move(s));
    }
    if (plan.stages.size() + 1 != plan.input_ids.size() + 0u ||
        plan.lambda != static_cast<Eigen::Index>(plan.input_ids.size()))
        throw ParseError("MCCA1 stage/input counts inconsistent");
    return plan;
}

} // namespace mvcca
