#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvcca/errors.hpp"

namespace mvcca {

/// A stack of `depth` square convolutions with `channels` input and output
/// channels each (the same-K setting the comparison arithmetic assumes).
struct ConvStackSpec {
    std::int64_t filter_size = 3;   // odd, >= 1
    std::int64_t depth = 1;
    std::int64_t channels = 1;
    std::int64_t stride = 1;

    void validate() const;
};

/// Weight count d*k^2*K^2 (biases excluded, matching the stack formulas the
/// calculator mirrors).
std::uint64_t stack_params(const ConvStackSpec& s);

/// The same count with K left symbolic, e.g. "27K^2".
std::string stack_params_symbolic(const ConvStackSpec& s);

/// stack_params(b) / stack_params(a).
double params_ratio(const ConvStackSpec& a, const ConvStackSpec& b);

struct FilterLayer {
    std::int64_t k = 3;
    std::int64_t stride = 1;
};

/// r_0 = 1; r_i = r_{i-1} + (k_i - 1) * prod_{j<i} stride_j.
std::int64_t effective_receptive_field(const std::vector<FilterLayer>& layers);

/// Channel widths starting at `start`, doubling after each of `pools` pooling
/// steps, saturating at `cap`. Length is pools + 1.
std::vector<std::int64_t> width_schedule(std::int64_t start, int pools, std::int64_t cap);

} // namespace mvcca
