#ifndef QSMETRIC_HEATMAP_HPP
#define QSMETRIC_HEATMAP_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "qsmetric/params.hpp"

namespace qsmetric {

struct HeatmapOptions {
    int level = 1;
    // Fixed level-k cube indices for axes 2..n-1 (required size n-2).
    std::vector<std::int64_t> slice;
    std::int64_t cell_budget = 262'144;
};

// SVG picture of the level-k weight field over the (axis 0, axis 1) plane:
// one rectangle per cell on a log color scale, plus a legend listing every
// exponent pair with its exact value. Byte-deterministic for fixed inputs.
std::string heatmap_svg(const Params& params, const HeatmapOptions& opt);

void write_heatmap(const Params& params, const HeatmapOptions& opt, const std::string& path);

}  // namespace qsmetric

#endif
