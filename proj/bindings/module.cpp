#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <vector>

#include "qsmetric/constants.hpp"
#include "qsmetric/cubes.hpp"
#include "qsmetric/errors.hpp"
#include "qsmetric/grid.hpp"
#include "qsmetric/heatmap.hpp"
#include "qsmetric/metric.hpp"
#include "qsmetric/params.hpp"
#include "qsmetric/stochastic.hpp"
#include "qsmetric/verifier.hpp"
#include "qsmetric/version.hpp"
#include "qsmetric/weights.hpp"

namespace py = pybind11;
using namespace qsmetric;

namespace {

std::string rat(const Rational& r) { return r.str(); }

Rational parse_ratio(const std::string& text) {
    try {
        const auto slash = text.find('/');
        if (slash == std::string::npos) return Rational(BigInt(text));
        return Rational(BigInt(text.substr(0, slash)), BigInt(text.substr(slash + 1)));
    } catch (const std::exception&) {
        throw domain_error("expected an integer or p/q ratio, got '" + text + "'");
    }
}

CubeAddress make_cube(int level, std::vector<std::int64_t> index) {
    CubeAddress cube;
    cube.level = level;
    cube.index = std::move(index);
    return cube;
}

GridPoint make_point(std::vector<std::int64_t> p, int level) {
    GridPoint point;
    point.p = std::move(p);
    point.level = level;
    return point;
}

py::dict extras_dict(const BoundsReport& r) {
    py::dict d;
    for (const auto& [key, value] : r.extras) d[py::str(key)] = value;
    return d;
}

}  // namespace

PYBIND11_MODULE(_qsmetric, m) {
    m.doc() = "weighted-grid metric toolbox core";
    m.attr("__version__") = kToolVersion;
    m.attr("rng_scheme") = kRngScheme;

    py::register_exception<domain_error>(m, "DomainError", PyExc_ValueError);
    py::register_exception<resource_error>(m, "ResourceError", PyExc_RuntimeError);

    py::class_<Params>(m, "Params")
        .def(py::init([](int n, int M, std::int64_t L, bool capped) {
                 return Params(n, M, Rational(L), capped);
             }),
             py::arg("n"), py::arg("M"), py::arg("L"), py::arg("capped") = false)
        .def_static(
            "from_beta",
            [](int n, int M, int beta, bool capped) {
                return Params::from_beta(n, M, Rational(beta), capped);
            },
            py::arg("n"), py::arg("M"), py::arg("beta"), py::arg("capped") = false)
        .def_readonly("n", &Params::n)
        .def_readonly("M", &Params::M)
        .def_readonly("capped", &Params::capped)
        .def_property_readonly("L", [](const Params& p) { return rat(p.L); })
        .def_property_readonly("R", [](const Params& p) { return rat(p.R()); })
        .def("multiplier", &Params::multiplier)
        .def("cells_per_cube", &Params::cells_per_cube)
        .def("__repr__", [](const Params& p) {
            return "Params(n=" + std::to_string(p.n) + ", M=" + std::to_string(p.M) +
                   ", L=" + rat(p.L) + (p.capped ? ", capped=True)" : ")");
        });

    m.def(
        "zone_counts",
        [](const Params& p) {
            const ZoneCounts z = zone_counts(p);
            return py::make_tuple(z.c1, z.c2, z.c3);
        },
        py::arg("params"), "Ring, buffer and interior cell counts of one subdivision.");

    py::class_<WeightExponents>(m, "WeightExponents")
        .def_readonly("a", &WeightExponents::a)
        .def_readonly("b", &WeightExponents::b)
        .def_readonly("frozen", &WeightExponents::frozen)
        .def("__repr__", [](const WeightExponents& w) {
            return "WeightExponents(a=" + std::to_string(w.a) + ", b=" + std::to_string(w.b) +
                   (w.frozen ? ", frozen=True)" : ")");
        });

    m.def(
        "weight_exponents",
        [](const Params& p, const std::vector<std::vector<int>>& digits) {
            return weight_exponents(p, digits);
        },
        py::arg("params"), py::arg("digits"),
        "Weight of the cube reached by a chain of child offsets.");
    m.def(
        "cube_weight",
        [](const Params& p, int level, std::vector<std::int64_t> index) {
            return cube_weight(p, make_cube(level, std::move(index)));
        },
        py::arg("params"), py::arg("level"), py::arg("index"));
    m.def(
        "weight_value",
        [](const Params& p, const WeightExponents& w) { return rat(weight_value(p, w)); },
        py::arg("params"), py::arg("w"), "Exact value (M-2n+1)^a L^-b as a ratio string.");
    m.def("weight_value_d", &weight_value_d, py::arg("params"), py::arg("w"));
    m.def("log_weight_value", &log_weight_value, py::arg("params"), py::arg("w"));

    m.def(
        "constants",
        [](const Params& p) {
            const Constants c = constants(p);
            py::dict d;
            d["R"] = rat(c.R);
            d["C1"] = rat(c.C1);
            d["log_C1"] = c.log_C1;
            d["log_C2"] = c.log_C2;
            d["log10_C2"] = c.log10_C2;
            d["log_R"] = c.log_R;
            return d;
        },
        py::arg("params"), "Comparison constants R, C1, C2 (C1, R exact; C2 in logs).");
    m.def("eta_bound", &eta_bound, py::arg("params"), py::arg("t"),
          "Distortion envelope eta(t).");
    m.def(
        "eta_curve",
        [](const Params& p) {
            const EtaCurve c = eta_curve(p);
            py::dict d;
            d["t_star"] = c.t_star;
            d["theta"] = c.theta;
            d["log_amplitude"] = c.log_amplitude;
            return d;
        },
        py::arg("params"));

    py::class_<GeometricMean>(m, "GeometricMean")
        .def_readonly("value", &GeometricMean::value)
        .def_readonly("log_value", &GeometricMean::log_value)
        .def_readonly("digits", &GeometricMean::digits)
        .def_readonly("log_digits", &GeometricMean::log_digits);
    m.def("geometric_mean", &geometric_mean, py::arg("params"),
          "Geometric mean mu of the per-digit multiplier law.");
    m.def("log_multiplier_variance", &log_multiplier_variance, py::arg("params"));
    m.def(
        "multiplier_law",
        [](const Params& p) {
            const MultiplierLaw law = multiplier_law(p);
            py::dict d;
            d["p1"] = rat(law.p1);
            d["p2"] = rat(law.p2);
            d["p3"] = rat(law.p3);
            d["v1"] = rat(law.v1);
            d["v2"] = rat(law.v2);
            d["v3"] = rat(law.v3);
            return d;
        },
        py::arg("params"));
    m.def(
        "walk_law",
        [](const Params& p) {
            const WalkLaw law = walk_law(p);
            py::dict d;
            d["p"] = rat(law.p);
            d["q"] = rat(law.q);
            return d;
        },
        py::arg("params"), "Birth-death law of the capped exponent gap.");

    py::class_<LlnStats>(m, "LlnStats")
        .def_readonly("points", &LlnStats::points)
        .def_readonly("steps", &LlnStats::steps)
        .def_readonly("seed", &LlnStats::seed)
        .def_readonly("mean", &LlnStats::mean)
        .def_readonly("stddev", &LlnStats::stddev)
        .def_readonly("log_mu", &LlnStats::log_mu)
        .def_readonly("deviation", &LlnStats::deviation)
        .def_readonly("limit", &LlnStats::limit)
        .def_readonly("pass_", &LlnStats::pass)
        .def_property_readonly("batches",
                               [](const LlnStats& s) { return s.batches.size(); });
    m.def("simulate_lln", &simulate_lln, py::arg("params"), py::arg("points"),
          py::arg("steps"), py::arg("seed"),
          "Law-of-large-numbers check of k^-1 log of digit products.");

    py::class_<WalkReport>(m, "WalkReport")
        .def_readonly("status", &WalkReport::status)
        .def_property_readonly(
            "r",
            [](const WalkReport& w) -> py::object {
                return w.r ? py::cast(rat(*w.r)) : py::none();
            })
        .def_property_readonly(
            "escape",
            [](const WalkReport& w) -> py::object {
                return w.escape ? py::cast(rat(*w.escape)) : py::none();
            })
        .def_readonly("walks", &WalkReport::walks)
        .def_readonly("horizon", &WalkReport::horizon)
        .def_readonly("hits", &WalkReport::hits)
        .def_readonly("hit_fraction", &WalkReport::hit_fraction)
        .def_readonly("hit_se", &WalkReport::hit_se)
        .def_readonly("mean_hit_time", &WalkReport::mean_hit_time)
        .def_readonly("drift", &WalkReport::drift)
        .def_readonly("drift_expected", &WalkReport::drift_expected)
        .def_readonly("pass_", &WalkReport::pass)
        .def_readonly("note", &WalkReport::note);
    m.def("walk_analysis", &walk_analysis, py::arg("params"), py::arg("walks"),
          py::arg("horizon"), py::arg("seed"),
          "Monte Carlo hitting analysis of the exponent-gap walk.");

    py::class_<KmResult>(m, "KmResult")
        .def_readonly("m", &KmResult::m)
        .def_readonly("threshold", &KmResult::threshold)
        .def_readonly("samples", &KmResult::samples)
        .def_readonly("k", &KmResult::k)
        .def_readonly("found", &KmResult::found);
    m.def("select_km", &select_km, py::arg("params"), py::arg("m"), py::arg("samples"),
          py::arg("seed"), py::arg("scan_doublings") = 12,
          "Smallest digit count whose survival fraction clears 1 - 2^-m.");

    m.def(
        "distance",
        [](const Params& p, std::vector<std::int64_t> x, std::vector<std::int64_t> y,
           int weight_level, int resolution_level, std::int64_t node_budget) {
            GridSpec spec;
            spec.weight_level = weight_level;
            spec.resolution_level = resolution_level;
            return shortest_distance(p, make_point(std::move(x), resolution_level),
                                     make_point(std::move(y), resolution_level), spec,
                                     node_budget);
        },
        py::arg("params"), py::arg("x"), py::arg("y"), py::arg("weight_level"),
        py::arg("resolution_level"), py::arg("node_budget") = kDefaultNodeBudget,
        "Weighted graph distance between lattice points at M^-resolution_level.");

    py::class_<MetricEstimate>(m, "MetricEstimate")
        .def_readonly("value", &MetricEstimate::value)
        .def_readonly("lower_bound", &MetricEstimate::lower_bound)
        .def_readonly("upper_bound", &MetricEstimate::upper_bound)
        .def_readonly("levels_used", &MetricEstimate::levels_used);
    m.def(
        "limit_distance",
        [](const Params& p, std::vector<std::int64_t> x, std::vector<std::int64_t> y,
           int level, int level_cap, std::int64_t node_budget) {
            LimitOptions opts;
            opts.level_cap = level_cap;
            opts.node_budget = node_budget;
            return limit_distance(p, make_point(std::move(x), level),
                                  make_point(std::move(y), level), opts);
        },
        py::arg("params"), py::arg("x"), py::arg("y"), py::arg("level"),
        py::arg("level_cap") = 6, py::arg("node_budget") = 400'000,
        "Level-refined distance estimate with a two-sided enclosure.");

    py::class_<BoundsReport>(m, "BoundsReport")
        .def_readonly("check", &BoundsReport::check)
        .def_readonly("samples", &BoundsReport::samples)
        .def_readonly("violations", &BoundsReport::violations)
        .def_readonly("inconclusive", &BoundsReport::inconclusive)
        .def_readonly("worst_margin", &BoundsReport::worst_margin)
        .def_readonly("pass_", &BoundsReport::pass)
        .def_property_readonly("extras", &extras_dict);
    m.def("check_ratio_bound", &check_ratio_bound, py::arg("params"),
          py::arg("level_cap"),
          "Exhaustive neighbor comparability band check up to level_cap.");
    m.def(
        "bounds_report",
        [](const Params& p, const std::string& check, std::int64_t samples,
           std::uint64_t seed, std::int64_t node_budget) {
            BoundsOptions opt;
            opt.samples = samples;
            opt.seed = seed;
            opt.node_budget = node_budget;
            return bounds_report(p, bounds_check_from_name(check), opt);
        },
        py::arg("params"), py::arg("check"), py::arg("samples") = 200,
        py::arg("seed") = 1, py::arg("node_budget") = 1'500'000,
        "Sampled bound check: path_monotone, metric_monotone, diameter or two_sided.");
    m.def("lipschitz_check", &lipschitz_check, py::arg("params"), py::arg("pairs"),
          py::arg("seed"), py::arg("node_budget") = 1'500'000,
          "Capped-weight Lipschitz bound on sampled node pairs.");

    py::class_<QsReport>(m, "QsReport")
        .def_readonly("triples", &QsReport::triples)
        .def_readonly("inconclusive", &QsReport::inconclusive)
        .def_readonly("worst_margin", &QsReport::worst_margin)
        .def_readonly("max_ratio_low", &QsReport::max_ratio_low)
        .def_readonly("max_ratio_high", &QsReport::max_ratio_high)
        .def_readonly("decay_visible", &QsReport::decay_visible)
        .def_readonly("pass_", &QsReport::pass);
    m.def("qs_scatter", &qs_scatter, py::arg("params"), py::arg("triples"),
          py::arg("seed") = 1, py::arg("node_budget") = 1'500'000,
          "Quasisymmetry ratio scatter against the eta envelope.");

    py::class_<PlanStage>(m, "PlanStage")
        .def_readonly("m", &PlanStage::m)
        .def_readonly("k", &PlanStage::k)
        .def_readonly("k_found", &PlanStage::k_found)
        .def_readonly("fraction", &PlanStage::fraction)
        .def_readonly("wilson_lower", &PlanStage::wilson_lower)
        .def_readonly("eps_log10", &PlanStage::eps_log10)
        .def_readonly("bound_log10", &PlanStage::bound_log10);
    py::class_<DimensionPlan>(m, "DimensionPlan")
        .def_property_readonly("alpha", [](const DimensionPlan& p) { return rat(p.alpha); })
        .def_property_readonly("beta", [](const DimensionPlan& p) { return rat(p.beta); })
        .def_readonly("mu", &DimensionPlan::mu)
        .def_readonly("rho_star", &DimensionPlan::rho_star)
        .def_readonly("log10_rho_star", &DimensionPlan::log10_rho_star)
        .def_readonly("mu_lt_one", &DimensionPlan::mu_lt_one)
        .def_readonly("contraction", &DimensionPlan::contraction)
        .def_readonly("feasible", &DimensionPlan::feasible)
        .def_readonly("certificate", &DimensionPlan::certificate)
        .def_readonly("stages", &DimensionPlan::stages)
        .def_property_readonly("params",
                               [](const DimensionPlan& p) { return p.params; });
    m.def(
        "make_plan",
        [](int n, const std::string& alpha, int beta, int M, int m_max,
           std::int64_t km_samples, std::uint64_t seed) {
            return make_plan(n, parse_ratio(alpha), beta, M, m_max, km_samples, seed);
        },
        py::arg("n"), py::arg("alpha"), py::arg("beta"), py::arg("M"),
        py::arg("m_max") = 3, py::arg("km_samples") = 4000, py::arg("seed") = 1,
        "Dimension-drop plan for target exponent alpha (an integer or 'p/q').");
    m.def(
        "choose_parameters",
        [](int n, const std::string& alpha, int m_max, std::int64_t km_samples,
           std::uint64_t seed) {
            return choose_parameters(n, parse_ratio(alpha), m_max, km_samples, seed);
        },
        py::arg("n"), py::arg("alpha"), py::arg("m_max") = 3, py::arg("km_samples") = 4000,
        py::arg("seed") = 1, "First feasible (beta, M) on the built-in ladders.");
    py::class_<ContentRow>(m, "ContentRow")
        .def_readonly("m", &ContentRow::m)
        .def_readonly("k", &ContentRow::k)
        .def_readonly("eps_log10", &ContentRow::eps_log10)
        .def_readonly("bound_log10", &ContentRow::bound_log10)
        .def_readonly("empirical_log10", &ContentRow::empirical_log10)
        .def_readonly("fraction", &ContentRow::fraction);
    m.def("content_table", &content_table, py::arg("plan"), py::arg("samples") = 4000,
          py::arg("seed") = 1, "Sampled content sums against the geometric bound column.");

    m.def(
        "heatmap_svg",
        [](const Params& p, int level, std::vector<std::int64_t> slice) {
            HeatmapOptions opt;
            opt.level = level;
            opt.slice = std::move(slice);
            return heatmap_svg(p, opt);
        },
        py::arg("params"), py::arg("level") = 1,
        py::arg("slice") = std::vector<std::int64_t>{},
        "SVG rendering of one weight level (slice pins axes beyond the first two).");
}
