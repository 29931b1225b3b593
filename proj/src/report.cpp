#include "qsmetric/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <set>

#include "qsmetric/cubes.hpp"
#include "qsmetric/errors.hpp"
#include "qsmetric/heatmap.hpp"
#include "qsmetric/parallel.hpp"
#include "qsmetric/stochastic.hpp"
#include "qsmetric/verifier.hpp"
#include "qsmetric/version.hpp"

namespace qsmetric {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw config_error(path, "expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items()) {
        if (!ok.count(key)) throw config_error(path + "." + key, "unknown key");
    }
}

std::int64_t get_int(const json& obj, const std::string& path, const char* key,
                     std::int64_t fallback, std::int64_t lo, std::int64_t hi) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    const std::string field = path + "." + key;
    if (!v.is_number_integer()) throw config_error(field, "expected an integer");
    const auto value = v.get<std::int64_t>();
    if (value < lo || value > hi) {
        throw config_error(field, "value " + std::to_string(value) + " outside [" +
                                      std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return value;
}

bool get_bool(const json& obj, const std::string& path, const char* key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean()) throw config_error(path + "." + key, "expected a boolean");
    return v.get<bool>();
}

Rational parse_rational(const std::string& text, const std::string& field) {
    try {
        const auto slash = text.find('/');
        if (slash != std::string::npos) {
            const BigInt num(text.substr(0, slash));
            const BigInt den(text.substr(slash + 1));
            if (den == 0) throw domain_error("zero denominator");
            return Rational(num, den);
        }
        const auto dot = text.find('.');
        if (dot != std::string::npos) {
            const std::string frac = text.substr(dot + 1);
            if (frac.empty()) return Rational(BigInt(text.substr(0, dot)));
            BigInt den = 1;
            for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
            const BigInt whole(text.substr(0, dot).empty() ? "0" : text.substr(0, dot));
            const bool negative = !text.empty() && text[0] == '-';
            const BigInt num = whole * den + (negative ? -BigInt(frac) : BigInt(frac));
            return Rational(num, den);
        }
        return Rational(BigInt(text));
    } catch (const std::exception&) {
        throw config_error(field, "cannot parse '" + text + "' as a rational");
    }
}

json rational_json(const Rational& value) {
    using boost::multiprecision::denominator;
    using boost::multiprecision::numerator;
    if (denominator(value) == 1 && numerator(value) >= -(BigInt(1) << 53) &&
        numerator(value) <= (BigInt(1) << 53)) {
        return numerator(value).convert_to<std::int64_t>();
    }
    return value.str();
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json bounds_json(const BoundsReport& r) {
    json j{{"check", r.check},       {"samples", r.samples},
           {"violations", r.violations}, {"inconclusive", r.inconclusive},
           {"seed", r.seed},         {"worst_margin", r.worst_margin},
           {"pass", r.pass}};
    for (const auto& [name, value] : r.extras) j[name] = value;
    return j;
}

json qs_json(const QsReport& r) {
    return json{{"triples", r.triples},
                {"inconclusive", r.inconclusive},
                {"seed", r.seed},
                {"worst_margin", r.worst_margin},
                {"max_ratio_low", r.max_ratio_low},
                {"max_ratio_high", r.max_ratio_high},
                {"decay_visible", r.decay_visible},
                {"pass", r.pass}};
}

json plan_json(const DimensionPlan& plan) {
    json stages = json::array();
    for (const PlanStage& s : plan.stages) {
        stages.push_back(json{{"m", s.m},
                              {"k", s.k},
                              {"k_found", s.k_found},
                              {"fraction", s.fraction},
                              {"wilson_lower", s.wilson_lower},
                              {"eps_log10", s.eps_log10},
                              {"bound_log10", s.bound_log10}});
    }
    return json{{"n", plan.params.n},
                {"M", plan.params.M},
                {"L", rational_json(plan.params.L)},
                {"alpha", plan.alpha.str()},
                {"beta", rational_json(plan.beta)},
                {"mu", plan.mu.digits},
                {"log_mu", plan.mu.log_value},
                {"rho_star", plan.rho_star},
                {"log10_rho_star", plan.log10_rho_star},
                {"mu_lt_one", plan.mu_lt_one},
                {"contraction", plan.contraction},
                {"feasible", plan.feasible},
                {"certificate", plan.certificate},
                {"stages", stages}};
}

json content_json(const std::vector<ContentRow>& rows) {
    json out = json::array();
    for (const ContentRow& r : rows) {
        out.push_back(json{{"m", r.m},
                           {"k", r.k},
                           {"eps_log10", r.eps_log10},
                           {"bound_log10", r.bound_log10},
                           {"empirical_log10", r.empirical_log10},
                           {"fraction", r.fraction}});
    }
    return out;
}

json walk_json(const WalkReport& r) {
    json j{{"p", r.law.p.str()},
           {"q", r.law.q.str()},
           {"status", r.status},
           {"walks", r.walks},
           {"horizon", r.horizon},
           {"seed", r.seed},
           {"hits", r.hits},
           {"hit_fraction", r.hit_fraction},
           {"hit_se", r.hit_se},
           {"mean_hit_time", r.mean_hit_time},
           {"drift", r.drift},
           {"drift_expected", r.drift_expected},
           {"pass", r.pass},
           {"note", r.note}};
    if (r.r) j["r"] = r.r->str();
    if (r.escape) j["escape"] = r.escape->str();
    return j;
}

json lln_json(const LlnStats& r) {
    return json{{"points", r.points},   {"steps", r.steps},
                {"seed", r.seed},       {"mean", r.mean},
                {"stddev", r.stddev},   {"log_mu", r.log_mu},
                {"deviation", r.deviation}, {"limit", r.limit},
                {"pass", r.pass}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw config_error("output", "cannot write " + path.string());
    file << text;
}

}  // namespace

RunConfig parse_run_config(const json& doc) {
    RunConfig config;
    reject_unknown(doc, "config",
                   {"params", "experiment", "sampling", "budgets", "plan", "output"});

    if (doc.contains("params")) {
        const json& p = doc.at("params");
        reject_unknown(p, "params", {"n", "M", "L", "beta", "capped"});
        if (!p.contains("n")) throw config_error("params.n", "required field is missing");
        if (!p.contains("M")) throw config_error("params.M", "required field is missing");
        const int n = static_cast<int>(get_int(p, "params", "n", 0, 2, 3));
        const int M = static_cast<int>(get_int(p, "params", "M", 0, 2, 1024));
        const bool capped = get_bool(p, "params", "capped", false);
        if (p.contains("L") == p.contains("beta")) {
            throw config_error("params", "exactly one of L and beta is required");
        }
        try {
            if (p.contains("L")) {
                const json& l = p.at("L");
                Rational L;
                if (l.is_number_integer()) {
                    L = Rational(l.get<std::int64_t>());
                } else if (l.is_string()) {
                    L = parse_rational(l.get<std::string>(), "params.L");
                } else {
                    throw config_error("params.L", "expected an integer or a string");
                }
                config.params = Params(n, M, L, capped);
            } else {
                const int beta = static_cast<int>(get_int(p, "params", "beta", 0, 1, 16));
                config.params = Params::from_beta(n, M, beta, capped);
            }
        } catch (const domain_error& e) {
            throw config_error("params", e.what());
        }
    }

    if (doc.contains("experiment")) {
        const json& e = doc.at("experiment");
        if (!e.is_string()) throw config_error("experiment", "expected a string");
        config.experiment = e.get<std::string>();
    }
    static const std::set<std::string> kExperiments{"verify", "qs",      "dimension",
                                                    "walk",   "heatmap", "all"};
    if (!kExperiments.count(config.experiment)) {
        throw config_error("experiment", "unknown experiment '" + config.experiment + "'");
    }

    if (doc.contains("sampling")) {
        const json& s = doc.at("sampling");
        reject_unknown(s, "sampling",
                       {"seed", "pairs", "monotone_pairs", "path_samples", "diameter_samples",
                        "triples", "lln_points", "lln_steps", "walks", "walk_horizon",
                        "km_samples", "content_samples", "lipschitz_pairs"});
        if (s.contains("seed")) {
            const json& v = s.at("seed");
            if (!v.is_number_integer() ||
                (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
                throw config_error("sampling.seed", "expected a nonnegative integer");
            }
            config.sampling.seed = v.get<std::uint64_t>();
        }
        auto& c = config.sampling;
        c.pairs = get_int(s, "sampling", "pairs", c.pairs, 1, 1'000'000);
        c.monotone_pairs = get_int(s, "sampling", "monotone_pairs", c.monotone_pairs, 1, 1'000'000);
        c.path_samples = get_int(s, "sampling", "path_samples", c.path_samples, 1, 1'000'000);
        c.diameter_samples =
            get_int(s, "sampling", "diameter_samples", c.diameter_samples, 1, 1'000'000);
        c.triples = get_int(s, "sampling", "triples", c.triples, 1, 10'000'000);
        c.lln_points = get_int(s, "sampling", "lln_points", c.lln_points, 2, 100'000'000);
        c.lln_steps = get_int(s, "sampling", "lln_steps", c.lln_steps, 1, 1'000'000);
        c.walks = get_int(s, "sampling", "walks", c.walks, 1, 100'000'000);
        c.walk_horizon = get_int(s, "sampling", "walk_horizon", c.walk_horizon, 1, 10'000'000);
        c.km_samples = get_int(s, "sampling", "km_samples", c.km_samples, 1, 10'000'000);
        c.content_samples =
            get_int(s, "sampling", "content_samples", c.content_samples, 1, 10'000'000);
        c.lipschitz_pairs =
            get_int(s, "sampling", "lipschitz_pairs", c.lipschitz_pairs, 1, 1'000'000);
    }

    if (doc.contains("budgets")) {
        const json& b = doc.at("budgets");
        reject_unknown(b, "budgets", {"max_nodes", "scan_doublings", "ratio_levels"});
        config.budgets.max_nodes =
            get_int(b, "budgets", "max_nodes", config.budgets.max_nodes, 1000, 100'000'000);
        config.budgets.scan_doublings = static_cast<int>(
            get_int(b, "budgets", "scan_doublings", config.budgets.scan_doublings, 0, 24));
        config.budgets.ratio_levels = static_cast<int>(
            get_int(b, "budgets", "ratio_levels", config.budgets.ratio_levels, 1, 6));
    }

    if (doc.contains("plan")) {
        const json& p = doc.at("plan");
        reject_unknown(p, "plan", {"alpha", "beta", "M", "m_max"});
        if (p.contains("alpha")) {
            const json& a = p.at("alpha");
            if (a.is_number_integer()) {
                config.plan.alpha = Rational(a.get<std::int64_t>());
            } else if (a.is_string()) {
                config.plan.alpha = parse_rational(a.get<std::string>(), "plan.alpha");
            } else {
                throw config_error("plan.alpha",
                                   "expected an integer or a string like \"1.1\" or \"11/10\"");
            }
        }
        config.plan.beta = static_cast<int>(get_int(p, "plan", "beta", config.plan.beta, 1, 16));
        config.plan.M = static_cast<int>(get_int(p, "plan", "M", config.plan.M, 2, 1024));
        config.plan.m_max =
            static_cast<int>(get_int(p, "plan", "m_max", config.plan.m_max, 0, 8));
    }
    if (config.plan.alpha <= 0 || config.plan.alpha >= config.params.n) {
        throw config_error("plan.alpha", "must lie strictly between 0 and n");
    }
    try {
        Params::from_beta(config.params.n, config.plan.M, config.plan.beta, false);
    } catch (const domain_error& e) {
        throw config_error("plan", e.what());
    }

    if (doc.contains("output")) {
        const json& o = doc.at("output");
        reject_unknown(o, "output", {"dir", "heatmap_level", "slice", "csv", "svg"});
        if (o.contains("dir")) {
            if (!o.at("dir").is_string()) throw config_error("output.dir", "expected a string");
            config.output.dir = o.at("dir").get<std::string>();
        }
        config.output.heatmap_level = static_cast<int>(
            get_int(o, "output", "heatmap_level", config.output.heatmap_level, 0, 6));
        if (o.contains("slice")) {
            const json& s = o.at("slice");
            if (!s.is_array()) throw config_error("output.slice", "expected an array");
            config.output.slice.clear();
            for (const json& v : s) {
                if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
                    throw config_error("output.slice", "expected nonnegative integers");
                }
                config.output.slice.push_back(v.get<std::int64_t>());
            }
        }
        config.output.csv = get_bool(o, "output", "csv", config.output.csv);
        config.output.svg = get_bool(o, "output", "svg", config.output.svg);
    }
    if (config.output.slice.empty()) {
        config.output.slice.assign(static_cast<std::size_t>(config.params.n - 2), 0);
    }
    if (static_cast<int>(config.output.slice.size()) != config.params.n - 2) {
        throw config_error("output.slice", "must fix exactly n-2 axes");
    }
    const std::int64_t side = level_cells(config.params, config.output.heatmap_level);
    for (const std::int64_t s : config.output.slice) {
        if (s >= side) throw config_error("output.slice", "index exceeds the level grid");
    }
    return config;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw config_error("config", "cannot read " + path);
    json doc;
    try {
        doc = json::parse(file);
    } catch (const json::parse_error& e) {
        throw config_error("config", std::string("invalid JSON: ") + e.what());
    }
    return parse_run_config(doc);
}

json config_json(const RunConfig& config) {
    return json{
        {"params",
         {{"n", config.params.n},
          {"M", config.params.M},
          {"L", rational_json(config.params.L)},
          {"capped", config.params.capped}}},
        {"experiment", config.experiment},
        {"sampling",
         {{"seed", config.sampling.seed},
          {"pairs", config.sampling.pairs},
          {"monotone_pairs", config.sampling.monotone_pairs},
          {"path_samples", config.sampling.path_samples},
          {"diameter_samples", config.sampling.diameter_samples},
          {"triples", config.sampling.triples},
          {"lln_points", config.sampling.lln_points},
          {"lln_steps", config.sampling.lln_steps},
          {"walks", config.sampling.walks},
          {"walk_horizon", config.sampling.walk_horizon},
          {"km_samples", config.sampling.km_samples},
          {"content_samples", config.sampling.content_samples},
          {"lipschitz_pairs", config.sampling.lipschitz_pairs}}},
        {"budgets",
         {{"max_nodes", config.budgets.max_nodes},
          {"scan_doublings", config.budgets.scan_doublings},
          {"ratio_levels", config.budgets.ratio_levels}}},
        {"plan",
         {{"alpha", config.plan.alpha.str()},
          {"beta", config.plan.beta},
          {"M", config.plan.M},
          {"m_max", config.plan.m_max}}},
        {"output",
         {{"dir", config.output.dir},
          {"heatmap_level", config.output.heatmap_level},
          {"slice", config.output.slice},
          {"csv", config.output.csv},
          {"svg", config.output.svg}}}};
}

RunOutcome run(const RunConfig& config) {
    namespace fs = std::filesystem;
    using Clock = std::chrono::steady_clock;
    const auto t_start = Clock::now();

    const fs::path out_dir(config.output.dir);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw config_error("output.dir", "cannot create " + out_dir.string());

    RunOutcome outcome;
    json results = json::object();
    json seconds = json::object();
    bool pass = true;
    const bool all = config.experiment == "all";
    const auto& s = config.sampling;

    auto timed = [&](const char* name, const std::function<void()>& body) {
        const auto t0 = Clock::now();
        try {
            body();
        } catch (const resource_error& e) {
            results[name] = json{{"pass", false}, {"inconclusive", true}, {"error", e.what()}};
            pass = false;
        }
        seconds[name] = std::chrono::duration<double>(Clock::now() - t0).count();
    };

    if (all || config.experiment == "verify") {
        timed("verify", [&] {
            json block;
            const BoundsReport ratio =
                check_ratio_bound(config.params, config.budgets.ratio_levels);
            block["ratio"] = bounds_json(ratio);
            pass = pass && ratio.pass;

            BoundsOptions opt;
            opt.seed = s.seed;
            opt.node_budget = config.budgets.max_nodes;
            const std::pair<BoundsCheck, std::int64_t> checks[] = {
                {BoundsCheck::path_monotone, s.path_samples},
                {BoundsCheck::metric_monotone, s.monotone_pairs},
                {BoundsCheck::diameter, s.diameter_samples},
                {BoundsCheck::two_sided, s.pairs},
            };
            for (const auto& [check, samples] : checks) {
                opt.samples = samples;
                const BoundsReport r = bounds_report(config.params, check, opt);
                block[r.check] = bounds_json(r);
                pass = pass && r.pass;
            }
            if (config.params.capped) {
                const BoundsReport r = lipschitz_check(config.params, s.lipschitz_pairs,
                                                       s.seed, config.budgets.max_nodes);
                block["lipschitz"] = bounds_json(r);
                pass = pass && r.pass;
            }
            results["verify"] = block;
        });
    }

    if (all || config.experiment == "qs") {
        timed("qs", [&] {
            const QsReport r =
                qs_scatter(config.params, s.triples, s.seed, config.budgets.max_nodes);
            results["qs"] = qs_json(r);
            pass = pass && r.pass;
            if (config.output.csv) {
                std::string csv = "t,ratio,eta_t\n";
                for (const QsTriple& row : r.rows) {
                    csv += fmt17(row.t) + "," + fmt17(row.ratio) + "," + fmt17(row.eta) + "\n";
                }
                const fs::path path = out_dir / "qs.csv";
                write_text(path, csv);
                outcome.files.push_back(path.string());
            }
        });
    }

    if (all || config.experiment == "dimension") {
        timed("dimension", [&] {
            const DimensionPlan plan =
                make_plan(config.params.n, config.plan.alpha, config.plan.beta, config.plan.M,
                          config.plan.m_max, s.km_samples, s.seed);
            const std::vector<ContentRow> rows = content_table(plan, s.content_samples, s.seed);
            results["dimension"] = json{{"plan", plan_json(plan)}, {"content", content_json(rows)}};
            pass = pass && plan.feasible;
            if (config.output.csv) {
                std::string csv = "m,k_m,epsilon_log10,bound_log10,empirical_log10\n";
                for (const ContentRow& row : rows) {
                    csv += std::to_string(row.m) + "," + std::to_string(row.k) + "," +
                           fmt17(row.eps_log10) + "," + fmt17(row.bound_log10) + "," +
                           fmt17(row.empirical_log10) + "\n";
                }
                const fs::path path = out_dir / "content.csv";
                write_text(path, csv);
                outcome.files.push_back(path.string());
            }
        });
    }

    if (all || config.experiment == "walk") {
        timed("walk", [&] {
            const WalkReport walk =
                walk_analysis(config.params, s.walks, s.walk_horizon, s.seed);
            const LlnStats lln =
                simulate_lln(config.params, s.lln_points, s.lln_steps, s.seed);
            results["walk"] = json{{"walk", walk_json(walk)}, {"lln", lln_json(lln)}};
            pass = pass && walk.pass && lln.pass;
            if (config.output.csv) {
                std::string csv = "batch,sum_log,count\n";
                for (const LlnBatch& b : lln.batches) {
                    csv += std::to_string(b.index) + "," + fmt17(b.sum_log) + "," +
                           std::to_string(b.count) + "\n";
                }
                const fs::path path = out_dir / "lln.csv";
                write_text(path, csv);
                outcome.files.push_back(path.string());
            }
        });
    }

    if (config.experiment == "heatmap" || (all && config.output.svg)) {
        timed("heatmap", [&] {
            HeatmapOptions opt;
            opt.level = config.output.heatmap_level;
            opt.slice = config.output.slice;
            const std::string svg = heatmap_svg(config.params, opt);
            const fs::path path = out_dir / "weights.svg";
            write_text(path, svg);
            outcome.files.push_back(path.string());
            const std::int64_t side = level_cells(config.params, opt.level);
            results["heatmap"] =
                json{{"file", "weights.svg"}, {"level", opt.level}, {"cells", side * side}};
        });
    }

    json report;
    report["tool"] =
        json{{"name", kToolName}, {"version", kToolVersion}, {"rng", kRngScheme}};
    report["config"] = config_json(config);
    report["results"] = results;
    report["pass"] = pass;
    report["timing"] = json{{"workers", worker_count()},
                            {"seconds", seconds},
                            {"total_seconds",
                             std::chrono::duration<double>(Clock::now() - t_start).count()}};

    const fs::path report_path = out_dir / "report.json";
    write_text(report_path, report.dump(2) + "\n");
    outcome.files.insert(outcome.files.begin(), report_path.string());

    outcome.report = std::move(report);
    outcome.pass = pass;
    outcome.exit_code = pass ? 0 : 1;
    return outcome;
}

}  // namespace qsmetric
