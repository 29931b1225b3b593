#include "qsmetric/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "qsmetric/constants.hpp"
#include "qsmetric/errors.hpp"
#include "qsmetric/weights.hpp"

namespace qsmetric {

double shortest_distance(const Params& params, const GridPoint& x, const GridPoint& y,
                         const GridSpec& spec, std::int64_t node_budget, int margin_cells) {
    NodeBox box = window_box(params, spec.weight_level, spec.resolution_level, {x, y},
                             margin_cells);
    WeightedGrid grid(params, spec, box, node_budget);
    return grid.distance(grid.node_id(x), grid.node_id(y));
}

MetricEstimate limit_distance(const Params& params, const GridPoint& x, const GridPoint& y,
                              const LimitOptions& opts) {
    if (opts.start_level < 0 || opts.level_cap < opts.start_level)
        throw domain_error("limit_distance: bad level range");
    MetricEstimate est;
    double lambda = anisotropy(opts.stencil, params.n);
    if (x == y || euclidean(params, x, y) == 0) {
        est.converged = true;
        return est;
    }
    double best = 0;
    double prev = -1;
    for (int k = opts.start_level; k <= opts.level_cap; ++k) {
        int K = std::max({k + opts.extra_resolution, x.level, y.level});
        GridSpec spec{k, K, opts.stencil};
        double v;
        try {
            v = shortest_distance(params, x, y, spec, opts.node_budget);
        } catch (const resource_error&) {
            break;
        }
        est.value = v;
        est.levels_used += 1;
        best = std::max(best, v);
        if (prev >= 0 && std::abs(v - prev) <= opts.tol * std::max(v, 1e-300)) {
            est.converged = true;
            prev = v;
            break;
        }
        prev = v;
    }
    if (est.levels_used == 0)
        throw resource_error("limit_distance: no level fits the node budget", 0, 0);
    est.lower_bound = best / lambda;
    est.upper_bound = est.value;
    return est;
}

DiameterReport cube_diameter(const Params& params, const CubeAddress& cube, Stencil stencil,
                             bool with_graph, std::int64_t node_budget) {
    check_cube(params, cube);
    Constants cst = constants(params);
    DiameterReport rep;
    double w = weight_value_d(params, cube_weight(params, cube));
    rep.analytic = 2.0 * params.n * to_double(cst.C1) * w *
                   std::pow(static_cast<double>(params.M), -cube.level);
    rep.graph = std::numeric_limits<double>::quiet_NaN();
    if (!with_graph) return rep;

    const int n = params.n;
    const int K = cube.level + (n == 2 ? 2 : 1);
    GridSpec spec{cube.level, K, stencil};
    GridPoint corner{std::vector<std::int64_t>(n), cube.level};
    GridPoint opposite{std::vector<std::int64_t>(n), cube.level};
    for (int i = 0; i < n; ++i) {
        corner.p[i] = cube.index[i];
        opposite.p[i] = cube.index[i] + 1;
    }
    NodeBox box = window_box(params, cube.level, K, {corner, opposite}, 1);
    WeightedGrid grid(params, spec, box, node_budget);

    // Boundary nodes of the cube at a few fixed fractions per axis.
    const std::int64_t S = level_cells(params, K - cube.level);
    std::vector<std::int64_t> fr;
    if (n == 2) fr = {0, S / 4, S / 2, 3 * S / 4, S};
    else fr = {0, S / 2, S};
    std::vector<GridPoint> pts;
    std::vector<std::size_t> pick(n, 0);
    while (true) {
        bool on_boundary = false;
        for (int i = 0; i < n; ++i) {
            if (pick[i] == 0 || pick[i] + 1 == fr.size()) on_boundary = true;
        }
        if (on_boundary) {
            GridPoint gp{std::vector<std::int64_t>(n), K};
            for (int i = 0; i < n; ++i) gp.p[i] = cube.index[i] * S + fr[pick[i]];
            pts.push_back(std::move(gp));
        }
        int i = n - 1;
        while (i >= 0 && ++pick[i] == fr.size()) pick[i--] = 0;
        if (i < 0) break;
    }
    rep.sample_points = static_cast<int>(pts.size());
    std::vector<std::int64_t> ids;
    ids.reserve(pts.size());
    for (const auto& gp : pts) ids.push_back(grid.node_id(gp));
    double worst = 0;
    for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
        std::vector<double> dist = grid.distances_from(ids[i]);
        for (std::size_t j = i + 1; j < ids.size(); ++j)
            worst = std::max(worst, dist[ids[j]]);
    }
    rep.graph = worst;
    return rep;
}

}  // namespace qsmetric
