#include "qsmetric/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>

#include "qsmetric/constants.hpp"
#include "qsmetric/cubes.hpp"
#include "qsmetric/errors.hpp"
#include "qsmetric/grid.hpp"
#include "qsmetric/metric.hpp"
#include "qsmetric/parallel.hpp"
#include "qsmetric/rng.hpp"
#include "qsmetric/weights.hpp"

namespace qsmetric {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Direction indices of the +-axis steps of an axis-stencil grid.
struct AxisDirs {
    std::vector<std::size_t> plus, minus;

    explicit AxisDirs(const WeightedGrid& grid) {
        const int n = grid.params().n;
        plus.assign(n, 0);
        minus.assign(n, 0);
        for (std::size_t di = 0; di < static_cast<std::size_t>(grid.direction_count()); ++di) {
            const std::vector<int> d = grid.direction(di);
            for (int a = 0; a < n; ++a) {
                if (d[a] == 1) plus[a] = di;
                if (d[a] == -1) minus[a] = di;
            }
        }
    }
};

CubeAddress random_cube(Rng& rng, const Params& params, int level) {
    const std::int64_t side = level_cells(params, level);
    CubeAddress cube{level, std::vector<std::int64_t>(params.n)};
    for (int a = 0; a < params.n; ++a) {
        cube.index[a] = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(side)));
    }
    return cube;
}

// Random node on the boundary of the cube, in node coordinates at level K.
std::vector<std::int64_t> random_boundary_node(Rng& rng, const Params& params,
                                               const CubeAddress& cube, int K) {
    const std::int64_t cell = level_cells(params, K - cube.level);
    std::vector<std::int64_t> x(params.n);
    const int pinned = static_cast<int>(rng.below(static_cast<std::uint64_t>(params.n)));
    const std::int64_t face = static_cast<std::int64_t>(rng.below(2));
    for (int a = 0; a < params.n; ++a) {
        const std::int64_t lo = cube.index[a] * cell;
        x[a] = a == pinned ? lo + face * cell
                           : lo + static_cast<std::int64_t>(
                                      rng.below(static_cast<std::uint64_t>(cell + 1)));
    }
    return x;
}

// Index of the lexicographically smallest level-`level` cube containing the
// node p / M^K along one axis.
std::int64_t lex_cell(std::int64_t coord, std::int64_t cell) {
    if (coord > 0 && coord % cell == 0) return coord / cell - 1;
    return coord / cell;
}

std::int64_t chebyshev_cells(const Params& params, const std::vector<std::int64_t>& x,
                             const std::vector<std::int64_t>& y, int K, int level) {
    const std::int64_t cell = level_cells(params, K - level);
    std::int64_t worst = 0;
    for (int a = 0; a < params.n; ++a) {
        worst = std::max<std::int64_t>(
            worst, std::llabs(lex_cell(x[a], cell) - lex_cell(y[a], cell)));
    }
    return worst;
}

std::vector<std::int64_t> rebased(const std::vector<std::int64_t>& p, std::int64_t factor) {
    std::vector<std::int64_t> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] * factor;
    return out;
}

void finalize(BoundsReport& rep, const std::vector<double>& margin,
              const std::vector<std::uint8_t>& state, double threshold) {
    rep.samples = 0;
    rep.worst_margin = kInf;
    for (std::size_t i = 0; i < margin.size(); ++i) {
        if (state[i] == 2) {
            ++rep.inconclusive;
            continue;
        }
        ++rep.samples;
        rep.worst_margin = std::min(rep.worst_margin, margin[i]);
        if (!(margin[i] >= threshold)) ++rep.violations;
    }
    rep.pass = rep.violations == 0 && rep.inconclusive == 0 && rep.samples > 0;
}

BoundsReport run_path_monotone(const Params& params, const BoundsOptions& opt) {
    BoundsReport rep;
    rep.check = "path_monotone";
    rep.seed = opt.seed;
    const std::uint64_t base = stream_seed(opt.seed, StreamPurpose::paths);

    std::vector<double> margin(static_cast<std::size_t>(opt.samples), kInf);
    std::vector<std::uint8_t> state(static_cast<std::size_t>(opt.samples), 0);
    parallel_for(opt.samples, [&](std::int64_t i) {
        Rng rng(item_seed(base, static_cast<std::uint64_t>(i)));
        const int k = static_cast<int>(i % 3);
        const int K = k + 2;
        try {
            const CubeAddress cube = random_cube(rng, params, k);
            const std::int64_t cell = level_cells(params, K - k);
            std::vector<GridPoint> corners(2);
            corners[0].level = corners[1].level = K;
            corners[0].p = rebased(cube.index, cell);
            corners[1].p = corners[0].p;
            for (auto& c : corners[1].p) c += cell;
            const NodeBox box = window_box(params, k, K, corners, 1);
            const WeightedGrid coarse(params, {k, K, Stencil::axis}, box, opt.node_budget);
            const WeightedGrid fine(params, {k + 1, K, Stencil::axis}, box, opt.node_budget);
            const AxisDirs dirs(fine);

            const std::vector<std::int64_t> x = random_boundary_node(rng, params, cube, K);
            std::vector<std::int64_t> y = x;
            while (y == x) y = random_boundary_node(rng, params, cube, K);

            double length = 0;
            std::vector<std::int64_t> cur = x;
            while (cur != y) {
                int remaining = 0;
                for (int a = 0; a < params.n; ++a) remaining += cur[a] != y[a];
                auto pick = rng.below(static_cast<std::uint64_t>(remaining));
                int axis = -1;
                for (int a = 0; a < params.n; ++a) {
                    if (cur[a] != y[a] && pick-- == 0) {
                        axis = a;
                        break;
                    }
                }
                const bool up = y[axis] > cur[axis];
                const std::size_t di = up ? dirs.plus[axis] : dirs.minus[axis];
                const double factor = fine.edge_factor(cur, di);
                if (factor < 0) {
                    margin[static_cast<std::size_t>(i)] = -kInf;
                    state[static_cast<std::size_t>(i)] = 1;
                    return;
                }
                length += factor * fine.edge_length(di);
                cur[axis] += up ? 1 : -1;
            }

            const double d =
                coarse.distance(coarse.node_id({x, K}), coarse.node_id({y, K}));
            margin[static_cast<std::size_t>(i)] = length * coarse.lambda() / d;
            state[static_cast<std::size_t>(i)] = 1;
        } catch (const resource_error&) {
            state[static_cast<std::size_t>(i)] = 2;
        }
    });
    finalize(rep, margin, state, 1.0);
    return rep;
}

BoundsReport run_metric_monotone(const Params& params, const BoundsOptions& opt) {
    BoundsReport rep;
    rep.check = "metric_monotone";
    rep.seed = opt.seed;
    const std::uint64_t base = stream_seed(opt.seed, StreamPurpose::monotone);
    const double lambda = anisotropy(Stencil::axis, params.n);

    std::vector<double> margin(static_cast<std::size_t>(opt.samples), kInf);
    std::vector<std::uint8_t> state(static_cast<std::size_t>(opt.samples), 0);
    parallel_for(opt.samples, [&](std::int64_t i) {
        Rng rng(item_seed(base, static_cast<std::uint64_t>(i)));
        const int k = static_cast<int>(i % 3);
        const int K = k + 2;
        const std::int64_t cell = level_cells(params, K - k);
        const std::int64_t side = level_cells(params, k);
        const std::int64_t nodes = level_cells(params, K);
        try {
            auto draw = [&] {
                std::vector<std::int64_t> v(params.n);
                const int pinned = static_cast<int>(rng.below(static_cast<std::uint64_t>(params.n)));
                for (int a = 0; a < params.n; ++a) {
                    v[a] = a == pinned
                               ? cell * static_cast<std::int64_t>(
                                            rng.below(static_cast<std::uint64_t>(side + 1)))
                               : static_cast<std::int64_t>(
                                     rng.below(static_cast<std::uint64_t>(nodes + 1)));
                }
                return v;
            };
            std::vector<std::int64_t> x, y;
            do {
                x = draw();
                y = draw();
            } while (x == y || chebyshev_cells(params, x, y, K, k) > 1);

            const double coarse = shortest_distance(params, {x, K}, {y, K},
                                                    {k, K, Stencil::axis}, opt.node_budget);
            const double fine = shortest_distance(params, {rebased(x, params.M), K + 1},
                                                  {rebased(y, params.M), K + 1},
                                                  {k + 1, K + 1, Stencil::axis}, opt.node_budget);
            margin[static_cast<std::size_t>(i)] = lambda * fine / coarse;
            state[static_cast<std::size_t>(i)] = 1;
        } catch (const resource_error&) {
            state[static_cast<std::size_t>(i)] = 2;
        }
    });
    finalize(rep, margin, state, 1.0);
    return rep;
}

BoundsReport run_diameter(const Params& params, const BoundsOptions& opt) {
    BoundsReport rep;
    rep.check = "diameter";
    rep.seed = opt.seed;
    const std::uint64_t base = stream_seed(opt.seed, StreamPurpose::diameter);
    const double lambda = anisotropy(Stencil::axis, params.n);

    std::vector<double> margin(static_cast<std::size_t>(opt.samples), kInf);
    std::vector<std::uint8_t> state(static_cast<std::size_t>(opt.samples), 0);
    parallel_for(opt.samples, [&](std::int64_t i) {
        Rng rng(item_seed(base, static_cast<std::uint64_t>(i)));
        const int k = 1 + static_cast<int>(i % 2);
        try {
            const CubeAddress cube = random_cube(rng, params, k);
            const DiameterReport dia =
                cube_diameter(params, cube, Stencil::axis, true, opt.node_budget);
            margin[static_cast<std::size_t>(i)] = lambda * dia.analytic / dia.graph;
            state[static_cast<std::size_t>(i)] = 1;
        } catch (const resource_error&) {
            state[static_cast<std::size_t>(i)] = 2;
        }
    });
    finalize(rep, margin, state, 1.0);
    return rep;
}

BoundsReport run_two_sided(const Params& params, const BoundsOptions& opt) {
    BoundsReport rep;
    rep.check = "two_sided";
    rep.seed = opt.seed;
    const std::uint64_t base = stream_seed(opt.seed, StreamPurpose::pairs);
    const Constants cs = constants(params);
    const double lambda = anisotropy(Stencil::axis, params.n);
    const double log_lambda = std::log(lambda);
    const double denom = to_double(Rational(2 * params.n * params.M) * cs.R);  // 2nMR
    const int level_lo = 1, level_hi = 3;

    const auto samples = static_cast<std::size_t>(opt.samples);
    std::vector<double> lower(samples, kInf), upper_c1(samples, kInf), upper_c1c2(samples, kInf);
    std::vector<std::uint8_t> state(samples, 0);
    parallel_for(opt.samples, [&](std::int64_t i) {
        Rng rng(item_seed(base, static_cast<std::uint64_t>(i)));
        const int k = level_lo + static_cast<int>(i % (level_hi - level_lo + 1));
        const int K = k + 2;
        const std::int64_t cell = level_cells(params, K - k);
        const std::int64_t nodes = level_cells(params, K);
        try {
            CubeAddress cube{k, {}};
            std::vector<std::int64_t> x, y(params.n);
            int k_near = -1;
            for (int attempt = 0; attempt < 64 && k_near < 0; ++attempt) {
                cube = random_cube(rng, params, k);
                x = random_boundary_node(rng, params, cube, K);
                bool ok = true;
                for (int a = 0; a < params.n; ++a) {
                    const std::int64_t lo = cube.index[a] * cell - cell;
                    y[a] = lo + static_cast<std::int64_t>(
                                    rng.below(static_cast<std::uint64_t>(3 * cell + 1)));
                    ok = ok && y[a] >= 0 && y[a] <= nodes;
                }
                if (!ok || y == x) continue;
                for (int level = 1; level <= level_hi; ++level) {
                    if (chebyshev_cells(params, x, y, K, level) >= 2) {
                        k_near = level;
                        break;
                    }
                }
            }
            if (k_near < 0) {
                state[static_cast<std::size_t>(i)] = 2;
                return;
            }

            const double r_cube = weight_value_d(params, cube_weight(params, cube));
            const CubeAddress near = containing_cube(params, x, K, k_near);
            const double log_r_near = log_weight_value(params, cube_weight(params, near));
            const double dist_e = euclidean(params, {x, K}, {y, K});

            const std::int64_t factor = level_cells(params, k_near - k);
            const int K_near = k_near + 2;
            const double v = shortest_distance(params, {rebased(x, factor), K_near},
                                               {rebased(y, factor), K_near},
                                               {k_near, K_near, Stencil::axis}, opt.node_budget);
            const double log_v = std::log(v);
            const auto slot = static_cast<std::size_t>(i);
            lower[slot] = v * denom / (std::exp(log_r_near) * dist_e);
            upper_c1[slot] = std::exp(log_lambda + cs.log_C1 + std::log(r_cube) +
                                      std::log(dist_e) - log_v);
            upper_c1c2[slot] = std::exp(log_lambda + cs.log_C1 + cs.log_C2 + log_r_near +
                                        std::log(dist_e) - log_v);
            state[slot] = 1;
        } catch (const resource_error&) {
            state[static_cast<std::size_t>(i)] = 2;
        }
    });

    rep.samples = 0;
    rep.worst_margin = kInf;
    double worst_lower = kInf, worst_c1 = kInf, worst_c1c2 = kInf;
    for (std::size_t i = 0; i < samples; ++i) {
        if (state[i] == 2) {
            ++rep.inconclusive;
            continue;
        }
        ++rep.samples;
        worst_lower = std::min(worst_lower, lower[i]);
        worst_c1 = std::min(worst_c1, upper_c1[i]);
        worst_c1c2 = std::min(worst_c1c2, upper_c1c2[i]);
        if (!(lower[i] >= 1.0 - 1e-9)) ++rep.violations;
        if (!(upper_c1[i] >= 1.0)) ++rep.violations;
        if (!(upper_c1c2[i] >= 1.0)) ++rep.violations;
    }
    rep.worst_margin = std::min(worst_lower, std::min(worst_c1, worst_c1c2));
    rep.pass = rep.violations == 0 && rep.inconclusive == 0 && rep.samples > 0;
    rep.extras.emplace_back("worst_lower_margin", worst_lower);
    rep.extras.emplace_back("worst_upper_c1_margin", worst_c1);
    rep.extras.emplace_back("worst_upper_c1c2_margin", worst_c1c2);
    return rep;
}

}  // namespace

BoundsReport check_ratio_bound(const Params& params, int level_cap) {
    if (level_cap < 1 || level_cap > 6) {
        throw domain_error("check_ratio_bound: level_cap must be in [1, 6]");
    }
    BoundsReport rep;
    rep.check = "ratio";
    rep.worst_margin = kInf;
    const Constants cs = constants(params);
    const int n = params.n;

    // Exact verdict per exponent difference, memoized.
    std::map<std::pair<int, int>, std::pair<bool, double>> memo;
    auto verdict = [&](int da, int db) {
        const auto key = std::make_pair(da, db);
        auto it = memo.find(key);
        if (it == memo.end()) {
            const Rational ratio = rational_pow(Rational(params.multiplier()), da) *
                                   rational_pow(params.L, -db);
            const bool ok = ratio <= cs.R && ratio * cs.R >= 1;
            const double margin =
                std::min(to_double(cs.R / ratio), to_double(ratio * cs.R));
            it = memo.emplace(key, std::make_pair(ok, margin)).first;
        }
        return it->second;
    };

    // Neighbor offsets with a positive leading component, so each unordered
    // pair is visited once.
    std::vector<std::vector<int>> offsets;
    {
        std::vector<int> off(n, -1);
        for (;;) {
            int lead = 0;
            for (int a = 0; a < n; ++a) {
                if (off[a] != 0) {
                    lead = off[a];
                    break;
                }
            }
            if (lead > 0) offsets.push_back(off);
            int a = n - 1;
            while (a >= 0 && off[a] == 1) off[a--] = -1;
            if (a < 0) break;
            ++off[a];
        }
    }

    for (int k = 1; k <= level_cap; ++k) {
        const std::int64_t side = level_cells(params, k);
        std::int64_t count = 1;
        for (int a = 0; a < n; ++a) count *= side;

        std::vector<std::pair<std::int16_t, std::int16_t>> ab(
            static_cast<std::size_t>(count));
        CubeAddress cube{k, std::vector<std::int64_t>(n)};
        for (std::int64_t flat = 0; flat < count; ++flat) {
            std::int64_t rest = flat;
            for (int a = n - 1; a >= 0; --a) {
                cube.index[a] = rest % side;
                rest /= side;
            }
            const WeightExponents w = cube_weight(params, cube);
            ab[static_cast<std::size_t>(flat)] = {static_cast<std::int16_t>(w.a),
                                                  static_cast<std::int16_t>(w.b)};
        }

        std::vector<std::int64_t> stride(n, 1);
        for (int a = n - 2; a >= 0; --a) stride[a] = stride[a + 1] * side;
        std::vector<std::int64_t> coord(n);
        for (std::int64_t flat = 0; flat < count; ++flat) {
            std::int64_t rest = flat;
            for (int a = n - 1; a >= 0; --a) {
                coord[a] = rest % side;
                rest /= side;
            }
            for (const auto& off : offsets) {
                std::int64_t other = flat;
                bool in_range = true;
                for (int a = 0; a < n && in_range; ++a) {
                    const std::int64_t c = coord[a] + off[a];
                    in_range = c >= 0 && c < side;
                    other += off[a] * stride[a];
                }
                if (!in_range) continue;
                ++rep.samples;
                const auto& mine = ab[static_cast<std::size_t>(flat)];
                const auto& theirs = ab[static_cast<std::size_t>(other)];
                const auto [ok, margin] = verdict(mine.first - theirs.first,
                                                  mine.second - theirs.second);
                if (!ok) ++rep.violations;
                rep.worst_margin = std::min(rep.worst_margin, margin);
            }
        }
    }
    rep.pass = rep.violations == 0 && rep.samples > 0;
    return rep;
}

std::string bounds_check_name(BoundsCheck check) {
    switch (check) {
        case BoundsCheck::path_monotone: return "path_monotone";
        case BoundsCheck::metric_monotone: return "metric_monotone";
        case BoundsCheck::diameter: return "diameter";
        case BoundsCheck::two_sided: return "two_sided";
    }
    throw domain_error("bounds_check_name: unknown check");
}

BoundsCheck bounds_check_from_name(const std::string& name) {
    if (name == "path_monotone") return BoundsCheck::path_monotone;
    if (name == "metric_monotone") return BoundsCheck::metric_monotone;
    if (name == "diameter") return BoundsCheck::diameter;
    if (name == "two_sided") return BoundsCheck::two_sided;
    throw domain_error("bounds_check_from_name: unknown check '" + name + "'");
}

BoundsReport bounds_report(const Params& params, BoundsCheck check, const BoundsOptions& opt) {
    if (opt.samples <= 0) throw domain_error("bounds_report: samples must be positive");
    switch (check) {
        case BoundsCheck::path_monotone: return run_path_monotone(params, opt);
        case BoundsCheck::metric_monotone: return run_metric_monotone(params, opt);
        case BoundsCheck::diameter: return run_diameter(params, opt);
        case BoundsCheck::two_sided: return run_two_sided(params, opt);
    }
    throw domain_error("bounds_report: unknown check");
}

BoundsReport lipschitz_check(const Params& params, std::int64_t pairs, std::uint64_t seed,
                             std::int64_t node_budget) {
    if (!params.capped) throw domain_error("lipschitz_check: capped weights required");
    if (pairs <= 0) throw domain_error("lipschitz_check: pairs must be positive");

    BoundsReport rep;
    rep.check = "lipschitz";
    rep.seed = seed;
    const int m = 2, K = 4;
    const std::int64_t cell = level_cells(params, K - m);
    const std::int64_t nodes = level_cells(params, K);
    const double bound = anisotropy(Stencil::axis, params.n) * params.multiplier();
    const std::uint64_t base = stream_seed(seed, StreamPurpose::lipschitz);

    std::vector<double> margin(static_cast<std::size_t>(pairs), kInf);
    std::vector<std::uint8_t> state(static_cast<std::size_t>(pairs), 0);
    parallel_for(pairs, [&](std::int64_t i) {
        Rng rng(item_seed(base, static_cast<std::uint64_t>(i)));
        try {
            std::vector<std::int64_t> x(params.n), y(params.n);
            for (int a = 0; a < params.n; ++a) {
                x[a] = static_cast<std::int64_t>(
                    rng.below(static_cast<std::uint64_t>(nodes + 1)));
                const std::int64_t off =
                    static_cast<std::int64_t>(
                        rng.below(static_cast<std::uint64_t>(2 * cell + 1))) -
                    cell;
                y[a] = std::clamp<std::int64_t>(x[a] + off, 0, nodes);
            }
            if (y == x) y[0] = x[0] + (x[0] < nodes ? 1 : -1);

            const double v = shortest_distance(params, {x, K}, {y, K},
                                               {m, K, Stencil::axis}, node_budget);
            margin[static_cast<std::size_t>(i)] =
                bound * euclidean(params, {x, K}, {y, K}) / v;
            state[static_cast<std::size_t>(i)] = 1;
        } catch (const resource_error&) {
            state[static_cast<std::size_t>(i)] = 2;
        }
    });
    finalize(rep, margin, state, 1.0);
    return rep;
}

QsReport qs_scatter(const Params& params, std::int64_t triples, std::uint64_t seed,
                    std::int64_t node_budget) {
    if (triples <= 0) throw domain_error("qs_scatter: triples must be positive");

    QsReport rep;
    rep.seed = seed;
    const std::uint64_t base = stream_seed(seed, StreamPurpose::triples);
    const EtaCurve eta = eta_curve(params);
    const double lambda = anisotropy(Stencil::axis, params.n);
    const std::int64_t side1 = params.M;
    const std::int64_t groups = (triples + 6) / 7;

    const GridSpec den_spec{1, 3, Stencil::axis};
    const WeightedGrid den_grid(params, den_spec, full_box(params, den_spec), node_budget);
    const std::int64_t to_k3 = level_cells(params, 2);

    struct GroupBase {
        std::vector<std::int64_t> x, z;
        double den = 0;
        double xz = 0;
    };
    std::vector<GroupBase> bases(static_cast<std::size_t>(groups));
    parallel_for(groups, [&](std::int64_t g) {
        Rng rng(item_seed(base, (1ull << 40) + static_cast<std::uint64_t>(g)));
        GroupBase gb;
        gb.x.resize(params.n);
        gb.z.resize(params.n);
        for (int attempt = 0;; ++attempt) {
            if (attempt % 8 == 0) {
                for (auto& c : gb.x) {
                    c = static_cast<std::int64_t>(
                        rng.below(static_cast<std::uint64_t>(side1 + 1)));
                }
            }
            std::int64_t d2 = 0;
            for (int a = 0; a < params.n; ++a) {
                gb.z[a] = static_cast<std::int64_t>(
                    rng.below(static_cast<std::uint64_t>(side1 + 1)));
                d2 += (gb.z[a] - gb.x[a]) * (gb.z[a] - gb.x[a]);
            }
            // |x - z| >= 1/4 of the unit cube, exactly
            if (16 * d2 >= side1 * side1) break;
        }
        gb.den = den_grid.distance(den_grid.node_id({rebased(gb.x, to_k3), 3}),
                                   den_grid.node_id({rebased(gb.z, to_k3), 3}));
        gb.xz = euclidean(params, {gb.x, 1}, {gb.z, 1});
        bases[static_cast<std::size_t>(g)] = std::move(gb);
    });

    std::vector<QsTriple> rows(static_cast<std::size_t>(triples));
    std::vector<std::uint8_t> state(static_cast<std::size_t>(triples), 0);
    parallel_for(triples, [&](std::int64_t i) {
        const GroupBase& gb = bases[static_cast<std::size_t>(i / 7)];
        Rng rng(item_seed(base, static_cast<std::uint64_t>(i)));
        const int bucket = static_cast<int>(i % 7);
        const double log10_t = -6.0 + bucket + rng.uniform();
        const double target = std::pow(10.0, log10_t) * gb.xz;  // target |x - y|

        const int jy = std::clamp(
            static_cast<int>(std::ceil(std::log(2.0 / target) /
                                       std::log(static_cast<double>(params.M)))),
            1, 6);
        const std::int64_t side = level_cells(params, jy);
        const double step = target * static_cast<double>(side);
        const std::vector<std::int64_t> xj = rebased(gb.x, side / side1);

        std::vector<std::int64_t> y(params.n);
        std::vector<double> dir(params.n);
        bool distinct = false;
        for (int attempt = 0; attempt < 8 && !distinct; ++attempt) {
            double norm2 = 0;
            for (auto& d : dir) {
                d = 2.0 * rng.uniform() - 1.0;
                norm2 += d * d;
            }
            if (norm2 < 1e-12 || norm2 > 1.0) {
                --attempt;
                continue;
            }
            const double inv = 1.0 / std::sqrt(norm2);
            for (int a = 0; a < params.n; ++a) {
                y[a] = std::clamp<std::int64_t>(
                    xj[a] + std::llround(step * dir[a] * inv), 0, side);
                distinct = distinct || y[a] != xj[a];
            }
        }
        if (!distinct) {
            y = xj;
            y[0] = xj[0] + (xj[0] < side ? 1 : -1);
        }

        const double t = euclidean(params, {xj, jy}, {y, jy}) / gb.xz;
        const auto slot = static_cast<std::size_t>(i);
        try {
            const double num = shortest_distance(params, {xj, jy}, {y, jy},
                                                 {jy, jy + 2, Stencil::axis}, node_budget);
            rows[slot] = {t, lambda * num / gb.den, eta.eta(t)};
            state[slot] = 1;
        } catch (const resource_error&) {
            rows[slot] = {t, 0, eta.eta(t)};
            state[slot] = 2;
        }
    });

    rep.worst_margin = kInf;
    rep.max_ratio_low = 0;
    rep.max_ratio_high = 0;
    bool bounded = true;
    rep.rows.reserve(static_cast<std::size_t>(triples));
    for (std::int64_t i = 0; i < triples; ++i) {
        const auto slot = static_cast<std::size_t>(i);
        if (state[slot] == 2) {
            ++rep.inconclusive;
            continue;
        }
        const QsTriple& row = rows[slot];
        rep.rows.push_back(row);
        ++rep.triples;
        const double margin = std::exp(eta.log_eta(row.t) - std::log(row.ratio));
        rep.worst_margin = std::min(rep.worst_margin, margin);
        if (std::log(row.ratio) > eta.log_eta(row.t)) bounded = false;
        if (row.t >= 1e-3 && row.t <= 1e-2) {
            rep.max_ratio_low = std::max(rep.max_ratio_low, row.ratio);
        }
        if (row.t >= 1e-1 && row.t <= 1.0) {
            rep.max_ratio_high = std::max(rep.max_ratio_high, row.ratio);
        }
    }
    rep.decay_visible = rep.max_ratio_low > 0 && rep.max_ratio_low < rep.max_ratio_high;
    rep.pass = bounded && rep.decay_visible && rep.inconclusive == 0 && rep.triples > 0;
    return rep;
}

namespace {

std::uint64_t small_uint(const BigInt& v, const char* what) {
    if (v < 0 || v > 1'000'000) {
        throw domain_error(std::string("make_plan: ") + what + " out of range");
    }
    return v.convert_to<std::uint64_t>();
}

}  // namespace

DimensionPlan make_plan(int n, const Rational& alpha, int beta, int M, int m_max,
                        std::int64_t km_samples, std::uint64_t seed) {
    if (alpha <= 0 || alpha >= n) throw domain_error("make_plan: alpha must lie in (0, n)");
    if (beta < 1 || beta > 16) throw domain_error("make_plan: beta must be in [1, 16]");
    if (m_max < 0 || m_max > 8) throw domain_error("make_plan: m_max must be in [0, 8]");
    if (km_samples <= 0) throw domain_error("make_plan: km_samples must be positive");

    DimensionPlan plan(Params::from_beta(n, M, beta));
    plan.alpha = alpha;
    plan.beta = beta;
    plan.mu = geometric_mean(plan.params);

    const ZoneCounts zc = zone_counts(plan.params);
    const std::int64_t cells = plan.params.cells_per_cube();
    const int mult = plan.params.multiplier();

    plan.mu_lt_one = Rational(ipow(mult, static_cast<std::uint64_t>(zc.c2))) <
                     rational_pow(plan.params.L, zc.c3);

    using boost::multiprecision::denominator;
    using boost::multiprecision::numerator;
    const std::uint64_t p = small_uint(numerator(alpha), "alpha numerator");
    const std::uint64_t q = small_uint(denominator(alpha), "alpha denominator");
    const std::uint64_t T = static_cast<std::uint64_t>(cells);
    const std::uint64_t e_M = (q * n - p) * T;
    const std::uint64_t e_2 = p * T;
    const std::uint64_t e_mult = p * static_cast<std::uint64_t>(zc.c2);
    const std::int64_t e_L = static_cast<std::int64_t>(p) * zc.c3;
    const BigInt lhs = ipow(M, e_M) * ipow(2, e_2) * ipow(mult, e_mult);
    plan.contraction = Rational(lhs) < rational_pow(plan.params.L, e_L);
    plan.feasible = plan.mu_lt_one && plan.contraction;

    const Float50 l10_M = log10(Float50(M));
    const Float50 l10_2 = log10(Float50(2));
    const Float50 l10_mult = log10(Float50(mult));
    const Float50 l10_L = log10(to_float50(plan.params.L));
    const Float50 l10_mu =
        (Float50(zc.c2) * l10_mult - Float50(zc.c3) * l10_L) / Float50(cells);
    const Float50 alpha_f = to_float50(alpha);
    const Float50 l10_rho = (Float50(n) - alpha_f) * l10_M + alpha_f * (l10_2 + l10_mu);
    plan.log10_rho_star = l10_rho.convert_to<double>();
    plan.rho_star = exp(l10_rho * log(Float50(10))).convert_to<double>();

    {
        const Float50 l10_lhs =
            Float50(e_M) * l10_M + Float50(e_2) * l10_2 + Float50(e_mult) * l10_mult;
        const Float50 l10_rhs = Float50(e_L) * l10_L;
        char buf[256];
        std::snprintf(buf, sizeof(buf),
                      "%d^%llu * 2^%llu * %d^%llu %s %s^%lld (log10 %.6f vs %.6f)", M,
                      static_cast<unsigned long long>(e_M),
                      static_cast<unsigned long long>(e_2), mult,
                      static_cast<unsigned long long>(e_mult),
                      plan.contraction ? "<" : ">=", plan.params.L.str().c_str(),
                      static_cast<long long>(e_L), l10_lhs.convert_to<double>(),
                      l10_rhs.convert_to<double>());
        plan.certificate = buf;
    }

    const Constants cs = constants(plan.params);
    const Float50 l10_2nc1 = log10(Float50(2 * n) * to_float50(cs.C1));
    std::int64_t prev_k = 1;
    for (int m = 1; m <= m_max; ++m) {
        const KmResult km = select_km(plan.params, m, km_samples, seed);
        PlanStage stage;
        stage.m = m;
        stage.k = std::max(km.k, prev_k);
        prev_k = stage.k;
        stage.k_found = km.found;
        const KmProbe& probe = km.probes.back();
        stage.fraction = probe.fraction;
        stage.wilson_lower = probe.wilson_lower;
        stage.eps_log10 =
            (l10_2nc1 + Float50(stage.k) * (l10_2 + l10_mu - l10_M)).convert_to<double>();
        stage.bound_log10 =
            (alpha_f * l10_2nc1 + Float50(m) * l10_rho).convert_to<double>();
        plan.stages.push_back(stage);
    }
    return plan;
}

DimensionPlan choose_parameters(int n, const Rational& alpha, int m_max,
                                std::int64_t km_samples, std::uint64_t seed) {
    if (n < 2) throw domain_error("choose_parameters: n must be at least 2");
    if (alpha <= 0 || alpha >= n) {
        throw domain_error("choose_parameters: alpha must lie in (0, n)");
    }
    static constexpr int kBetas[] = {1, 3, 5, 7, 9};
    static constexpr int kMs[] = {8, 16, 32, 64};
    for (const int beta : kBetas) {
        if (alpha * (1 + beta) <= n) continue;
        for (const int M : kMs) {
            if (M <= 2 * n) continue;
            DimensionPlan probe = make_plan(n, alpha, beta, M, 0, km_samples, seed);
            if (probe.feasible) return make_plan(n, alpha, beta, M, m_max, km_samples, seed);
        }
    }
    DimensionPlan none = make_plan(n, alpha, kBetas[4], kMs[3], 0, km_samples, seed);
    none.feasible = false;
    none.certificate = "no feasible (beta, M) on the ladders; last tried " + none.certificate;
    return none;
}

std::vector<ContentRow> content_table(const DimensionPlan& plan, std::int64_t samples,
                                      std::uint64_t seed) {
    if (samples <= 0) throw domain_error("content_table: samples must be positive");

    const Params& params = plan.params;
    const ZoneCounts zc = zone_counts(params);
    const auto cells = static_cast<std::uint64_t>(params.cells_per_cube());
    const auto t1 = static_cast<std::uint64_t>(zc.c1);
    const auto t2 = static_cast<std::uint64_t>(zc.c1 + zc.c2);
    const Constants cs = constants(params);
    const double l10_2nc1 =
        log10(Float50(2 * params.n) * to_float50(cs.C1)).convert_to<double>();
    const double l10_mult = params.log_multiplier() / std::log(10.0);
    const double l10_L = params.log_L() / std::log(10.0);
    const double l10_M = std::log10(static_cast<double>(params.M));
    const double alpha_d = to_double(plan.alpha);
    const std::uint64_t base = stream_seed(seed, StreamPurpose::content);

    std::vector<ContentRow> rows;
    for (const PlanStage& stage : plan.stages) {
        const SurvivalCut cut(params, stage.m);
        const std::int64_t k = stage.k;
        std::vector<double> term(static_cast<std::size_t>(samples));
        parallel_for(samples, [&](std::int64_t i) {
            Rng rng(item_seed(base, (static_cast<std::uint64_t>(stage.m) << 32) +
                                        static_cast<std::uint64_t>(i)));
            std::int64_t a = 0, b = 0;
            for (std::int64_t j = 0; j < k; ++j) {
                const std::uint64_t v = rng.below(cells);
                if (v >= t2) {
                    ++b;
                } else if (v >= t1) {
                    ++a;
                }
            }
            term[static_cast<std::size_t>(i)] =
                cut.passes(a, b, k)
                    ? alpha_d * (l10_2nc1 + static_cast<double>(a) * l10_mult -
                                 static_cast<double>(b) * l10_L -
                                 static_cast<double>(k) * l10_M)
                    : std::numeric_limits<double>::quiet_NaN();
        });

        std::int64_t survivors = 0;
        double top = -kInf;
        for (const double t : term) {
            if (!std::isnan(t)) {
                ++survivors;
                top = std::max(top, t);
            }
        }
        ContentRow row;
        row.m = stage.m;
        row.k = k;
        row.eps_log10 = stage.eps_log10;
        row.bound_log10 = stage.bound_log10;
        row.fraction = static_cast<double>(survivors) / static_cast<double>(samples);
        if (survivors == 0) {
            row.empirical_log10 = -kInf;
        } else {
            double acc = 0;
            for (const double t : term) {
                if (!std::isnan(t)) acc += std::pow(10.0, t - top);
            }
            row.empirical_log10 = static_cast<double>(params.n * k) * l10_M -
                                  std::log10(static_cast<double>(samples)) + top +
                                  std::log10(acc);
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace qsmetric
