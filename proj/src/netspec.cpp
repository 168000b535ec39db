#include "mvcca/netspec.hpp"

#include <algorithm>

namespace mvcca {

void ConvStackSpec::validate() const {
    if (filter_size < 1) throw ConfigError("filter_size must be at least 1");
    if (filter_size % 2 == 0) throw ConfigError("filter_size must be odd");
    if (depth < 1) throw ConfigError("depth must be at least 1");
    if (channels < 1) throw ConfigError("channels must be at least 1");
    if (stride < 1) throw ConfigError("stride must be at least 1");
}

std::uint64_t stack_params(const ConvStackSpec& s) {
    s.validate();
    const std::uint64_t k = static_cast<std::uint64_t>(s.filter_size);
    const std::uint64_t d = static_cast<std::uint64_t>(s.depth);
    const std::uint64_t c = static_cast<std::uint64_t>(s.channels);
    return d * k * k * c * c;
}

std::string stack_params_symbolic(const ConvStackSpec& s) {
    s.validate();
    const std::uint64_t coeff = static_cast<std::uint64_t>(s.depth) *
                                static_cast<std::uint64_t>(s.filter_size) *
                                static_cast<std::uint64_t>(s.filter_size);
    return std::to_string(coeff) + "K^2";
}

double params_ratio(const ConvStackSpec& a, const ConvStackSpec& b) {
    return static_cast<double>(stack_params(b)) / static_cast<double>(stack_params(a));
}

std::int64_t effective_receptive_field(const std::vector<FilterLayer>& layers) {
    if (layers.empty())
        throw EmptyError("effective_receptive_field: no layers");
    std::int64_t r = 1;
    std::int64_t jump = 1;
    for (const FilterLayer& layer : layers) {
        if (layer.k < 1 || layer.stride < 1)
            throw ConfigError("filter layers need k >= 1 and stride >= 1");
        r += (layer.k - 1) * jump;
        jump *= layer.stride;
    }
    return r;
}

std::vector<std::int64_t> width_schedule(std::int64_t start, int pools, std::int64_t cap) {
    if (start < 1) throw ConfigError("width_schedule: start must be at least 1");
    if (cap < start) throw ConfigError("width_schedule: cap must be at least start");
    if (pools < 0) throw ConfigError("width_schedule: pools must be nonnegative");
    std::vector<std::int64_t> widths;
    widths.reserve(static_cast<std::size_t>(pools) + 1);
    std::int64_t w = start;
    widths.push_back(w);
    for (int i = 0; i < pools; ++i) {
        w = std::min(w * 2, cap);
        widths.push_back(w);
    }
    return widths;
}

} // namespace mvcca
