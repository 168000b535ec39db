#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace mvcca {

/// Deterministic random source. All distribution transforms are implemented
/// on top of the raw mt19937_64 stream so that identical seeds give identical
/// draws on every platform (std::normal_distribution and std::shuffle are
/// implementation-defined and therefore avoided).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    /// Standard normal via Box-Muller; the second variate is cached.
    double normal();

    /// Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
    std::uint64_t bounded(std::uint64_t n);

    /// Fisher-Yates shuffle using bounded().
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(bounded(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Stage-name-hashed sub-seed derivation. Every random stage of the pipeline
/// draws its seed as derive_seed(global_seed, "stage.name"), so adding a stage
/// never perturbs the draws of existing ones.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stage);

} // namespace mvcca
