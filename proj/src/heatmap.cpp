#include "qsmetric/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "qsmetric/cubes.hpp"
#include "qsmetric/errors.hpp"
#include "qsmetric/weights.hpp"

namespace qsmetric {

namespace {

struct ExponentKey {
    int a, b;
    bool operator<(const ExponentKey& o) const {
        return a != o.a ? a < o.a : b < o.b;
    }
};

std::string color_at(double u) {
    // dark violet -> yellow ramp, channels rounded to integers
    static constexpr int lo[3] = {13, 8, 135};
    static constexpr int hi[3] = {240, 249, 33};
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                  lo[0] + static_cast<int>(std::lround(u * (hi[0] - lo[0]))),
                  lo[1] + static_cast<int>(std::lround(u * (hi[1] - lo[1]))),
                  lo[2] + static_cast<int>(std::lround(u * (hi[2] - lo[2]))));
    return buf;
}

}  // namespace

std::string heatmap_svg(const Params& params, const HeatmapOptions& opt) {
    if (opt.level < 0) throw domain_error("heatmap: level must be nonnegative");
    if (static_cast<int>(opt.slice.size()) != params.n - 2) {
        throw domain_error("heatmap: slice must fix exactly n-2 axes");
    }
    const std::int64_t side = level_cells(params, opt.level);
    if (opt.cell_budget < 1 || side > opt.cell_budget / side) {
        throw resource_error("heatmap: cell budget exceeded, use a smaller level",
                             side * side, 0);
    }
    for (const std::int64_t s : opt.slice) {
        if (s < 0 || s >= side) throw domain_error("heatmap: slice index out of range");
    }

    // Exact exponents per cell; the palette position comes from the log value.
    std::vector<ExponentKey> cells(static_cast<std::size_t>(side * side));
    std::map<ExponentKey, double> logs;
    CubeAddress cube{opt.level, std::vector<std::int64_t>(params.n)};
    for (int j = 2; j < params.n; ++j) cube.index[j] = opt.slice[j - 2];
    for (std::int64_t iy = 0; iy < side; ++iy) {
        for (std::int64_t ix = 0; ix < side; ++ix) {
            cube.index[0] = ix;
            cube.index[1] = iy;
            const WeightExponents w = cube_weight(params, cube);
            const ExponentKey key{w.a, w.b};
            cells[static_cast<std::size_t>(iy * side + ix)] = key;
            logs.emplace(key, log_weight_value(params, w));
        }
    }
    // Absolute scale over the level's attainable range [L^-k, (M-2n+1)^k], so
    // equal values get equal colors across capped/uncapped renders.
    const double lo = -opt.level * params.log_L();
    const double span = opt.level * (params.log_multiplier() + params.log_L());
    auto shade = [&](const ExponentKey& key) {
        return color_at(span > 0 ? (logs.at(key) - lo) / span : 0.5);
    };

    // Legend rows sorted by decreasing value.
    std::vector<ExponentKey> order;
    for (const auto& [key, lg] : logs) order.push_back(key);
    std::sort(order.begin(), order.end(), [&](const ExponentKey& x, const ExponentKey& y) {
        return compare_weight(params, {x.a, x.b, false}, {y.a, y.b, false}) > 0;
    });

    const std::int64_t px = std::max<std::int64_t>(1, 512 / side);
    const std::int64_t plot = side * px;
    const std::int64_t legend_w = 320;
    const std::int64_t row_h = 18;
    const std::int64_t height =
        std::max<std::int64_t>(plot, 30 + row_h * static_cast<std::int64_t>(order.size()));

    std::string out;
    out.reserve(static_cast<std::size_t>(side * side) * 64 + 4096);
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%lld\" height=\"%lld\" "
                  "viewBox=\"0 0 %lld %lld\">\n",
                  static_cast<long long>(plot + legend_w), static_cast<long long>(height),
                  static_cast<long long>(plot + legend_w), static_cast<long long>(height));
    out += buf;
    for (std::int64_t iy = 0; iy < side; ++iy) {
        for (std::int64_t ix = 0; ix < side; ++ix) {
            const ExponentKey& key = cells[static_cast<std::size_t>(iy * side + ix)];
            std::snprintf(buf, sizeof(buf),
                          "<rect x=\"%lld\" y=\"%lld\" width=\"%lld\" height=\"%lld\" "
                          "fill=\"%s\"/>\n",
                          static_cast<long long>(ix * px),
                          static_cast<long long>((side - 1 - iy) * px),
                          static_cast<long long>(px), static_cast<long long>(px),
                          shade(key).c_str());
            out += buf;
        }
    }
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%lld\" y=\"20\" font-family=\"monospace\" font-size=\"13\">"
                  "level %d weights</text>\n",
                  static_cast<long long>(plot + 16), opt.level);
    out += buf;
    for (std::size_t row = 0; row < order.size(); ++row) {
        const ExponentKey& key = order[row];
        const std::int64_t y = 30 + row_h * static_cast<std::int64_t>(row);
        std::snprintf(buf, sizeof(buf),
                      "<rect x=\"%lld\" y=\"%lld\" width=\"12\" height=\"12\" fill=\"%s\"/>\n",
                      static_cast<long long>(plot + 16), static_cast<long long>(y),
                      shade(key).c_str());
        out += buf;
        const Rational value = weight_value(params, {key.a, key.b, false});
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%lld\" y=\"%lld\" font-family=\"monospace\" "
                      "font-size=\"12\">(%d)^%d (%s)^-%d = %s</text>\n",
                      static_cast<long long>(plot + 34), static_cast<long long>(y + 10),
                      params.multiplier(), key.a, params.L.str().c_str(), key.b,
                      value.str().c_str());
        out += buf;
    }
    out += "</svg>\n";
    return out;
}

void write_heatmap(const Params& params, const HeatmapOptions& opt, const std::string& path) {
    const std::string svg = heatmap_svg(params, opt);
    std::ofstream file(path, std::ios::binary);
    if (!file) throw domain_error("heatmap: cannot open output file " + path);
    file << svg;
}

}  // namespace qsmetric
