#ifndef QSMETRIC_GRID_HPP
#define QSMETRIC_GRID_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "qsmetric/params.hpp"
#include "qsmetric/weights.hpp"

namespace qsmetric {

enum class Stencil { axis, axis_diagonal, extended };

std::string stencil_name(Stencil s);
Stencil stencil_from_name(const std::string& name);

// Worst-case ratio of optimal stencil-path length to Euclidean length over all
// directions (inverse inradius of the hull of unit step directions). Closed
// form sqrt(n) for the axis stencil; hull enumeration for the others (n <= 3).
double anisotropy(Stencil s, int n);

struct GridSpec {
    int weight_level = 0;      // k: level of the weight field
    int resolution_level = 0;  // K >= k: lattice spacing M^-K
    Stencil stencil = Stencil::axis;
};

// Exact lattice point with coordinates p / M^level, p in [0, M^level]^n.
struct GridPoint {
    std::vector<std::int64_t> p;
    int level = 0;
};

bool operator==(const GridPoint& a, const GridPoint& b);
GridPoint rebase(const Params& params, const GridPoint& x, int level);
double euclidean(const Params& params, const GridPoint& x, const GridPoint& y);

// Inclusive node-coordinate ranges at some resolution level.
struct NodeBox {
    std::vector<std::int64_t> lo, hi;
};

inline constexpr std::int64_t kDefaultNodeBudget = 6'000'000;

// Implicit weighted grid graph over a box of lattice nodes. Every edge segment
// lies in the closure of a single level-k cube; its weight factor is that
// cube's value, or the incident minimum (face weight) for segments in the
// skeleton. Edge weight = factor * Euclidean segment length.
class WeightedGrid {
  public:
    WeightedGrid(const Params& params, const GridSpec& spec, const NodeBox& box,
                 std::int64_t node_budget = kDefaultNodeBudget);

    const Params& params() const { return params_; }
    const GridSpec& spec() const { return spec_; }
    const NodeBox& box() const { return box_; }
    double lambda() const { return lambda_; }
    std::int64_t node_count() const { return node_count_; }
    std::int64_t direction_count() const { return static_cast<std::int64_t>(dir_d_.size()); }

    bool contains(const GridPoint& x) const;
    std::int64_t node_id(const GridPoint& x) const;

    // Single-pair solve (early exit) and full single-source solve. Priority
    // ties are broken by node id, so results are order-deterministic.
    double distance(std::int64_t source, std::int64_t target) const;
    std::vector<double> distances_from(std::int64_t source) const;

    // Weight factor of the edge leaving `from` along direction index di, or a
    // negative value when the edge is not part of the graph.
    double edge_factor(const std::vector<std::int64_t>& from, std::size_t di) const;
    double edge_length(std::size_t di) const { return dir_len_[di]; }
    std::vector<int> direction(std::size_t di) const;

  private:
    void fill_cells();
    double cell_log(std::int64_t flat) const { return cell_log_[flat]; }
    double run_dijkstra(std::int64_t source, std::int64_t target,
                        std::vector<double>& dist) const;

    Params params_;
    GridSpec spec_;
    NodeBox box_;
    std::vector<std::int64_t> dims_, stride_;
    std::int64_t node_count_ = 0;
    std::int64_t scale_ = 1;  // M^(K-k)
    std::int64_t cube_side_ = 1;
    std::int64_t side_ = 1;
    double lambda_ = 1;

    std::vector<std::int64_t> cell_lo_, cell_dims_, cell_stride_;
    std::vector<double> cell_val_, cell_log_;
    std::vector<std::uint32_t> cell_ab_;

    std::vector<std::vector<int>> dir_d_;
    std::vector<double> dir_len_;
};

NodeBox full_box(const Params& params, const GridSpec& spec);

// Bounding box of the given points in level-k cube units, expanded by
// margin_cells complete cubes and clipped to the unit cube.
NodeBox window_box(const Params& params, int weight_level, int resolution_level,
                   const std::vector<GridPoint>& points, int margin_cells = 1);

WeightedGrid build_weighted_grid(const Params& params, const GridSpec& spec,
                                 std::int64_t node_budget = kDefaultNodeBudget);
WeightedGrid build_window_grid(const Params& params, const GridSpec& spec, const NodeBox& box,
                               std::int64_t node_budget = kDefaultNodeBudget);

}  // namespace qsmetric

#endif
