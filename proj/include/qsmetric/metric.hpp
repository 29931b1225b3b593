#ifndef QSMETRIC_METRIC_HPP
#define QSMETRIC_METRIC_HPP

#include <cstdint>

#include "qsmetric/cubes.hpp"
#include "qsmetric/grid.hpp"
#include "qsmetric/params.hpp"

namespace qsmetric {

// Graph distance between two lattice points on a window around them. The
// window spans the bounding level-k cells of the endpoints plus margin_cells
// complete cells per side, so it only ever over-estimates the full-grid value.
double shortest_distance(const Params& params, const GridPoint& x, const GridPoint& y,
                         const GridSpec& spec, std::int64_t node_budget = kDefaultNodeBudget,
                         int margin_cells = 1);

// Bracketed estimate of the level limit. value is the graph distance at the
// finest level reached; the true metric lies above lower_bound and below the
// limit of the (increasing) level values, which value approximates to within
// the stencil anisotropy once converged.
struct MetricEstimate {
    double value = 0;
    double lower_bound = 0;
    double upper_bound = 0;
    bool converged = false;
    int levels_used = 0;
};

struct LimitOptions {
    int start_level = 1;
    int level_cap = 6;
    std::int64_t node_budget = 400'000;
    double tol = 1e-3;
    Stencil stencil = Stencil::axis;
    int extra_resolution = 2;  // resolution level = weight level + this
};

MetricEstimate limit_distance(const Params& params, const GridPoint& x, const GridPoint& y,
                              const LimitOptions& opts = {});

// Analytic diameter bound 2n C1 w_k(I) M^-k for a level-k cube, optionally
// compared against the max pairwise graph distance over sampled boundary
// nodes (window: the cube plus one-cell margin, resolution k+2).
struct DiameterReport {
    double analytic = 0;
    double graph = 0;
    int sample_points = 0;
};

DiameterReport cube_diameter(const Params& params, const CubeAddress& cube,
                             Stencil stencil = Stencil::axis, bool with_graph = true,
                             std::int64_t node_budget = kDefaultNodeBudget);

}  // namespace qsmetric

#endif
