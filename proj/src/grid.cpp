#include "qsmetric/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <utility>

#include "qsmetric/errors.hpp"

namespace qsmetric {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::vector<int>> stencil_directions(Stencil s, int n) {
    std::vector<std::vector<int>> dirs;
    if (s == Stencil::axis) {
        for (int i = 0; i < n; ++i) {
            for (int sign : {-1, 1}) {
                std::vector<int> d(n, 0);
                d[i] = sign;
                dirs.push_back(d);
            }
        }
        return dirs;
    }
    const int reach = s == Stencil::extended ? 2 : 1;
    std::vector<int> d(n, -reach);
    while (true) {
        int g = 0;
        for (int v : d) g = std::gcd(g, std::abs(v));
        if (g == 1) dirs.push_back(d);
        int i = 0;
        while (i < n && d[i] == reach) d[i++] = -reach;
        if (i == n) break;
        ++d[i];
    }
    return dirs;
}

double hull_inradius_2d(const std::vector<std::vector<double>>& u) {
    std::vector<std::vector<double>> v = u;
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
        return std::atan2(a[1], a[0]) < std::atan2(b[1], b[0]);
    });
    double inr = kInf;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto& a = v[i];
        const auto& b = v[(i + 1) % v.size()];
        double cross = a[0] * b[1] - a[1] * b[0];
        double chord = std::hypot(a[0] - b[0], a[1] - b[1]);
        if (chord > 1e-12) inr = std::min(inr, std::abs(cross) / chord);
    }
    return inr;
}

double hull_inradius_3d(const std::vector<std::vector<double>>& u) {
    const double eps = 1e-9;
    double inr = kInf;
    const std::size_t m = u.size();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            for (std::size_t k = j + 1; k < m; ++k) {
                double ab[3], ac[3], nrm[3];
                for (int t = 0; t < 3; ++t) {
                    ab[t] = u[j][t] - u[i][t];
                    ac[t] = u[k][t] - u[i][t];
                }
                nrm[0] = ab[1] * ac[2] - ab[2] * ac[1];
                nrm[1] = ab[2] * ac[0] - ab[0] * ac[2];
                nrm[2] = ab[0] * ac[1] - ab[1] * ac[0];
                double nn = std::sqrt(nrm[0] * nrm[0] + nrm[1] * nrm[1] + nrm[2] * nrm[2]);
                if (nn < eps) continue;
                double off = nrm[0] * u[i][0] + nrm[1] * u[i][1] + nrm[2] * u[i][2];
                if (std::abs(off) < eps * nn) continue;
                if (off < 0) {
                    for (double& t : nrm) t = -t;
                    off = -off;
                }
                bool supporting = true;
                for (std::size_t q = 0; q < m && supporting; ++q) {
                    double s = nrm[0] * u[q][0] + nrm[1] * u[q][1] + nrm[2] * u[q][2];
                    if (s > off + eps * nn) supporting = false;
                }
                if (supporting) inr = std::min(inr, off / nn);
            }
        }
    }
    return inr;
}

}  // namespace

std::string stencil_name(Stencil s) {
    switch (s) {
        case Stencil::axis: return "axis";
        case Stencil::axis_diagonal: return "axis_diagonal";
        case Stencil::extended: return "extended";
    }
    throw domain_error("unknown stencil");
}

Stencil stencil_from_name(const std::string& name) {
    if (name == "axis") return Stencil::axis;
    if (name == "axis_diagonal") return Stencil::axis_diagonal;
    if (name == "extended") return Stencil::extended;
    throw domain_error("unknown stencil name: " + name);
}

double anisotropy(Stencil s, int n) {
    if (n < 2) throw domain_error("anisotropy: dimension must be at least 2");
    if (s == Stencil::axis) return std::sqrt(static_cast<double>(n));
    if (n > 3) throw domain_error("anisotropy: " + stencil_name(s) + " stencil needs n <= 3");
    auto dirs = stencil_directions(s, n);
    std::vector<std::vector<double>> u;
    u.reserve(dirs.size());
    for (const auto& d : dirs) {
        double len = 0;
        for (int v : d) len += static_cast<double>(v) * v;
        len = std::sqrt(len);
        std::vector<double> x(n);
        for (int i = 0; i < n; ++i) x[i] = d[i] / len;
        u.push_back(std::move(x));
    }
    double inr = n == 2 ? hull_inradius_2d(u) : hull_inradius_3d(u);
    return 1.0 / inr;
}

bool operator==(const GridPoint& a, const GridPoint& b) {
    return a.level == b.level && a.p == b.p;
}

GridPoint rebase(const Params& params, const GridPoint& x, int level) {
    if (static_cast<int>(x.p.size()) != params.n)
        throw domain_error("grid point dimension mismatch");
    GridPoint out{x.p, level};
    if (level >= x.level) {
        std::int64_t f = level_cells(params, level - x.level);
        for (auto& v : out.p) v *= f;
    } else {
        std::int64_t f = level_cells(params, x.level - level);
        for (auto& v : out.p) {
            if (v % f != 0) throw domain_error("grid point not on the coarser lattice");
            v /= f;
        }
    }
    return out;
}

double euclidean(const Params& params, const GridPoint& x, const GridPoint& y) {
    int J = std::max(x.level, y.level);
    GridPoint a = rebase(params, x, J);
    GridPoint b = rebase(params, y, J);
    double s = 0;
    for (int i = 0; i < params.n; ++i) {
        double d = static_cast<double>(a.p[i] - b.p[i]);
        s += d * d;
    }
    return std::sqrt(s) * std::pow(static_cast<double>(params.M), -J);
}

WeightedGrid::WeightedGrid(const Params& params, const GridSpec& spec, const NodeBox& box,
                           std::int64_t node_budget)
    : params_(params), spec_(spec), box_(box) {
    const int n = params_.n;
    if (n > 8) throw domain_error("grids support n <= 8");
    if (spec_.weight_level < 0 || spec_.resolution_level < spec_.weight_level)
        throw domain_error("grid spec: need 0 <= weight_level <= resolution_level");
    if (static_cast<int>(box_.lo.size()) != n || static_cast<int>(box_.hi.size()) != n)
        throw domain_error("node box dimension mismatch");
    lambda_ = anisotropy(spec_.stencil, n);
    const std::int64_t side = level_cells(params_, spec_.resolution_level);
    scale_ = level_cells(params_, spec_.resolution_level - spec_.weight_level);
    cube_side_ = level_cells(params_, spec_.weight_level);
    side_ = side;

    node_count_ = 1;
    double approx = 1;
    bool over = false;
    for (int i = 0; i < n; ++i) {
        if (box_.lo[i] < 0 || box_.hi[i] > side || box_.lo[i] > box_.hi[i])
            throw domain_error("node box out of range");
        std::int64_t d = box_.hi[i] - box_.lo[i] + 1;
        dims_.push_back(d);
        approx *= static_cast<double>(d);
        if (over || node_count_ > (std::numeric_limits<std::int64_t>::max)() / d) over = true;
        else node_count_ *= d;
    }
    dir_d_ = stencil_directions(spec_.stencil, n);
    for (const auto& d : dir_d_) {
        double len = 0;
        for (int v : d) len += static_cast<double>(v) * v;
        dir_len_.push_back(std::sqrt(len) * std::pow(static_cast<double>(params_.M),
                                                     -spec_.resolution_level));
    }
    if (over || node_count_ > node_budget) {
        auto clamp = [](double v) {
            return v > 8e18 ? (std::numeric_limits<std::int64_t>::max)()
                            : static_cast<std::int64_t>(v);
        };
        throw resource_error("grid exceeds node budget " + std::to_string(node_budget),
                             clamp(approx), clamp(approx * static_cast<double>(dir_d_.size())));
    }
    stride_.assign(n, 1);
    for (int i = n - 2; i >= 0; --i) stride_[i] = stride_[i + 1] * dims_[i + 1];
    fill_cells();
}

void WeightedGrid::fill_cells() {
    const int n = params_.n;
    cell_lo_.resize(n);
    cell_dims_.resize(n);
    std::int64_t total = 1;
    for (int i = 0; i < n; ++i) {
        std::int64_t lo = box_.lo[i] / scale_ - 1;
        std::int64_t hi = box_.hi[i] / scale_ + 1;
        lo = std::max<std::int64_t>(lo, 0);
        hi = std::min(hi, cube_side_ - 1);
        cell_lo_[i] = lo;
        cell_dims_[i] = hi - lo + 1;
        total *= cell_dims_[i];
    }
    cell_stride_.assign(n, 1);
    for (int i = n - 2; i >= 0; --i) cell_stride_[i] = cell_stride_[i + 1] * cell_dims_[i + 1];
    cell_val_.resize(total);
    cell_log_.resize(total);
    cell_ab_.resize(total);

    std::map<std::pair<int, int>, std::pair<double, double>> memo;
    std::vector<std::int64_t> c(n, 0);
    for (std::int64_t flat = 0; flat < total; ++flat) {
        CubeAddress cube{spec_.weight_level, std::vector<std::int64_t>(n)};
        for (int i = 0; i < n; ++i) cube.index[i] = cell_lo_[i] + c[i];
        WeightExponents w = weight_exponents(params_, digits_of_cube(params_, cube));
        auto key = std::make_pair(w.a, w.b);
        auto it = memo.find(key);
        if (it == memo.end()) {
            it = memo.emplace(key, std::make_pair(weight_value_d(params_, w),
                                                  log_weight_value(params_, w)))
                     .first;
        }
        cell_val_[flat] = it->second.first;
        cell_log_[flat] = it->second.second;
        cell_ab_[flat] = (static_cast<std::uint32_t>(w.a) << 16) | static_cast<std::uint32_t>(w.b);
        int i = n - 1;
        while (i >= 0 && ++c[i] == cell_dims_[i]) c[i--] = 0;
    }
}

bool WeightedGrid::contains(const GridPoint& x) const {
    GridPoint r;
    try {
        r = rebase(params_, x, spec_.resolution_level);
    } catch (const domain_error&) {
        return false;
    }
    for (int i = 0; i < params_.n; ++i) {
        if (r.p[i] < box_.lo[i] || r.p[i] > box_.hi[i]) return false;
    }
    return true;
}

std::int64_t WeightedGrid::node_id(const GridPoint& x) const {
    GridPoint r = rebase(params_, x, spec_.resolution_level);
    std::int64_t id = 0;
    for (int i = 0; i < params_.n; ++i) {
        if (r.p[i] < box_.lo[i] || r.p[i] > box_.hi[i])
            throw domain_error("grid point outside node box");
        id += (r.p[i] - box_.lo[i]) * stride_[i];
    }
    return id;
}

double WeightedGrid::edge_factor(const std::vector<std::int64_t>& from, std::size_t di) const {
    const int n = params_.n;
    const auto& d = dir_d_[di];
    // Per axis: the cells whose closure can contain the open segment.
    std::int64_t cand[8][2];
    int cand_n[8];
    for (int i = 0; i < n; ++i) {
        if (d[i] != 0) {
            std::int64_t lo = d[i] > 0 ? from[i] : from[i] + d[i];
            std::int64_t step = d[i] > 0 ? d[i] : -d[i];
            if (lo < 0 || lo + step > side_) return -1;  // leaves the lattice
            if (lo % scale_ + step > scale_) return -1;  // crosses a cell wall mid-segment
            cand[i][0] = lo / scale_;
            cand_n[i] = 1;
        } else if (from[i] % scale_ == 0) {
            std::int64_t plane = from[i] / scale_;
            cand_n[i] = 0;
            if (plane - 1 >= 0) cand[i][cand_n[i]++] = plane - 1;
            if (plane < cube_side_) cand[i][cand_n[i]++] = plane;
        } else {
            cand[i][0] = from[i] / scale_;
            cand_n[i] = 1;
        }
    }
    double best_log = kInf;
    double best_val = -1;
    std::uint32_t best_ab = 0;
    int pick[8] = {0};
    while (true) {
        std::int64_t flat = 0;
        bool in_table = true;
        for (int i = 0; i < n; ++i) {
            std::int64_t ci = cand[i][pick[i]] - cell_lo_[i];
            if (ci < 0 || ci >= cell_dims_[i]) {
                in_table = false;
                break;
            }
            flat += ci * cell_stride_[i];
        }
        if (in_table) {
            double lg = cell_log_[flat];
            bool better = lg < best_log - 1e-12;
            if (!better && lg < best_log + 1e-12 && best_val >= 0 && cell_ab_[flat] != best_ab) {
                WeightExponents wa{static_cast<int>(cell_ab_[flat] >> 16),
                                   static_cast<int>(cell_ab_[flat] & 0xffff), false};
                WeightExponents wb{static_cast<int>(best_ab >> 16),
                                   static_cast<int>(best_ab & 0xffff), false};
                better = compare_weight(params_, wa, wb) < 0;
            }
            if (best_val < 0 || better) {
                best_log = lg;
                best_val = cell_val_[flat];
                best_ab = cell_ab_[flat];
            }
        }
        int i = n - 1;
        while (i >= 0 && ++pick[i] == cand_n[i]) pick[i--] = 0;
        if (i < 0) break;
    }
    return best_val;
}

std::vector<int> WeightedGrid::direction(std::size_t di) const { return dir_d_[di]; }

double WeightedGrid::run_dijkstra(std::int64_t source, std::int64_t target,
                                  std::vector<double>& dist) const {
    const int n = params_.n;
    dist.assign(node_count_, kInf);
    using Entry = std::pair<double, std::int64_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> queue;
    dist[source] = 0;
    queue.emplace(0.0, source);
    std::vector<std::int64_t> from(n);
    while (!queue.empty()) {
        auto [du, u] = queue.top();
        queue.pop();
        if (du > dist[u]) continue;
        if (u == target) return du;
        std::int64_t rem = u;
        for (int i = 0; i < n; ++i) {
            from[i] = box_.lo[i] + rem / stride_[i];
            rem %= stride_[i];
        }
        for (std::size_t di = 0; di < dir_d_.size(); ++di) {
            const auto& d = dir_d_[di];
            std::int64_t v = u;
            bool ok = true;
            for (int i = 0; i < n; ++i) {
                if (d[i] == 0) continue;
                std::int64_t t = from[i] + d[i];
                if (t < box_.lo[i] || t > box_.hi[i]) {
                    ok = false;
                    break;
                }
                v += static_cast<std::int64_t>(d[i]) * stride_[i];
            }
            if (!ok) continue;
            double factor = edge_factor(from, di);
            if (factor < 0) continue;
            double alt = du + factor * dir_len_[di];
            if (alt < dist[v]) {
                dist[v] = alt;
                queue.emplace(alt, v);
            }
        }
    }
    return target >= 0 ? dist[target] : 0.0;
}

double WeightedGrid::distance(std::int64_t source, std::int64_t target) const {
    if (source < 0 || source >= node_count_ || target < 0 || target >= node_count_)
        throw domain_error("node id out of range");
    std::vector<double> dist;
    return run_dijkstra(source, target, dist);
}

std::vector<double> WeightedGrid::distances_from(std::int64_t source) const {
    if (source < 0 || source >= node_count_) throw domain_error("node id out of range");
    std::vector<double> dist;
    run_dijkstra(source, -1, dist);
    return dist;
}

NodeBox full_box(const Params& params, const GridSpec& spec) {
    std::int64_t side = level_cells(params, spec.resolution_level);
    return NodeBox{std::vector<std::int64_t>(params.n, 0),
                   std::vector<std::int64_t>(params.n, side)};
}

NodeBox window_box(const Params& params, int weight_level, int resolution_level,
                   const std::vector<GridPoint>& points, int margin_cells) {
    if (points.empty()) throw domain_error("window_box needs at least one point");
    const int n = params.n;
    const std::int64_t scale = level_cells(params, resolution_level - weight_level);
    const std::int64_t side = level_cells(params, weight_level);
    std::vector<std::int64_t> clo(n, side), chi(n, -1);
    for (const auto& pt : points) {
        GridPoint r = rebase(params, pt, resolution_level);
        for (int i = 0; i < n; ++i) {
            std::int64_t c = std::min(r.p[i] / scale, side - 1);
            clo[i] = std::min(clo[i], c);
            chi[i] = std::max(chi[i], c);
        }
    }
    NodeBox box{std::vector<std::int64_t>(n), std::vector<std::int64_t>(n)};
    for (int i = 0; i < n; ++i) {
        box.lo[i] = std::max<std::int64_t>(clo[i] - margin_cells, 0) * scale;
        box.hi[i] = std::min(chi[i] + margin_cells + 1, side) * scale;
    }
    return box;
}

WeightedGrid build_weighted_grid(const Params& params, const GridSpec& spec,
                                 std::int64_t node_budget) {
    return WeightedGrid(params, spec, full_box(params, spec), node_budget);
}

WeightedGrid build_window_grid(const Params& params, const GridSpec& spec, const NodeBox& box,
                               std::int64_t node_budget) {
    return WeightedGrid(params, spec, box, node_budget);
}

}  // namespace qsmetric
