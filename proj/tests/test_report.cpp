#include "qsmetric/report.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "qsmetric/cubes.hpp"
#include "qsmetric/errors.hpp"
#include "qsmetric/heatmap.hpp"
#include "qsmetric/weights.hpp"

namespace qsmetric {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<std::string> rect_fills(const std::string& svg) {
    std::vector<std::string> fills;
    std::size_t at = 0;
    while ((at = svg.find("fill=\"", at)) != std::string::npos) {
        at += 6;
        fills.push_back(svg.substr(at, svg.find('"', at) - at));
    }
    return fills;
}

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "qsmetric_tests" / name;
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream file(path, std::ios::binary);
    REQUIRE(file.good());
    return {std::istreambuf_iterator<char>(file), std::istreambuf_iterator<char>()};
}

TEST_SUITE("heatmap") {

TEST_CASE("level zero renders one uniform cell") {
    Params p(2, 8, Rational(8), false);
    HeatmapOptions opt;
    opt.level = 0;
    const std::string svg = heatmap_svg(p, opt);
    const auto fills = rect_fills(svg);
    REQUIRE(fills.size() == 2);  // the cell plus one legend swatch
    CHECK(fills[0] == fills[1]);
    CHECK(svg.find("= 1</text>") != std::string::npos);
}

TEST_CASE("level one colors match the zone counts") {
    Params p(2, 8, Rational(8), false);
    HeatmapOptions opt;
    const std::string svg = heatmap_svg(p, opt);
    const auto fills = rect_fills(svg);
    REQUIRE(fills.size() == 64 + 3);
    std::map<std::string, int> counts;
    for (std::size_t i = 0; i < 64; ++i) ++counts[fills[i]];
    REQUIRE(counts.size() == 3);
    std::vector<int> sizes;
    for (const auto& [color, count] : counts) sizes.push_back(count);
    std::sort(sizes.begin(), sizes.end());
    CHECK(sizes == std::vector<int>{16, 20, 28});
    CHECK(svg.find("(5)^1 (8)^-0 = 5") != std::string::npos);
    CHECK(svg.find("(5)^0 (8)^-1 = 1/8") != std::string::npos);
}

TEST_CASE("capped and uncapped differ exactly where capping changed the value") {
    Params unc(2, 8, Rational(8), false);
    Params cap(2, 8, Rational(8), true);
    HeatmapOptions opt;
    opt.level = 2;
    const auto a = rect_fills(heatmap_svg(unc, opt));
    const auto b = rect_fills(heatmap_svg(cap, opt));
    REQUIRE(a.size() >= 64 * 64);
    REQUIRE(b.size() >= 64 * 64);
    int differing = 0;
    CubeAddress cube{2, {0, 0}};
    for (std::int64_t iy = 0; iy < 64; ++iy) {
        for (std::int64_t ix = 0; ix < 64; ++ix) {
            cube.index = {ix, iy};
            const WeightExponents wu = cube_weight(unc, cube);
            const WeightExponents wc = cube_weight(cap, cube);
            const bool value_changed = wu.a != wc.a || wu.b != wc.b;
            const std::size_t at = static_cast<std::size_t>(iy * 64 + ix);
            CHECK((a[at] != b[at]) == value_changed);
            if (value_changed) {
                ++differing;
                CHECK(wc.frozen);
            }
        }
    }
    CHECK(differing > 0);
}

TEST_CASE("output is deterministic and validated") {
    Params p(2, 8, Rational(8), false);
    HeatmapOptions opt;
    opt.level = 1;
    CHECK(heatmap_svg(p, opt) == heatmap_svg(p, opt));

    opt.level = 4;  // 4096^2 cells
    CHECK_THROWS_AS(heatmap_svg(p, opt), resource_error);
    opt.level = 3;  // 512^2 = the budget, still renderable
    opt.cell_budget = 262'144;
    CHECK_NOTHROW(heatmap_svg(p, opt));

    opt.level = 1;
    opt.slice = {0};
    CHECK_THROWS_AS(heatmap_svg(p, opt), domain_error);

    Params q(3, 8, Rational(8), false);
    HeatmapOptions opt3;
    CHECK_THROWS_AS(heatmap_svg(q, opt3), domain_error);  // missing slice
    opt3.slice = {5};
    const auto fills = rect_fills(heatmap_svg(q, opt3));
    CHECK(fills.size() >= 64);
    opt3.slice = {8};
    CHECK_THROWS_AS(heatmap_svg(q, opt3), domain_error);
}

}  // TEST_SUITE

TEST_SUITE("report") {

TEST_CASE("defaults are recorded and round-trip") {
    const RunConfig config = parse_run_config(json::object());
    CHECK(config.params.n == 2);
    CHECK(config.params.M == 8);
    CHECK(config.params.L == Rational(8));
    CHECK_FALSE(config.params.capped);
    CHECK(config.experiment == "verify");
    CHECK(config.sampling.seed == 1);
    CHECK(config.sampling.pairs == 1000);
    CHECK(config.budgets.max_nodes == 1'500'000);
    CHECK(config.plan.alpha == Rational(11, 10));
    CHECK(config.output.dir == "out");

    const json echo = config_json(config);
    CHECK(echo.at("sampling").at("triples") == 10000);
    const RunConfig again = parse_run_config(echo);
    CHECK(config_json(again) == echo);
}

TEST_CASE("unknown keys are rejected with their path") {
    try {
        parse_run_config(json::parse(R"({"params":{"n":2,"M":8,"L":8,"zap":1}})"));
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(e.field == "params.zap");
    }
    CHECK_THROWS_AS(parse_run_config(json::parse(R"({"bogus":{}})")), config_error);
    CHECK_THROWS_AS(parse_run_config(json::parse(R"({"sampling":{"Pairs":3}})")), config_error);
}

TEST_CASE("missing or conflicting parameter fields are diagnosed") {
    try {
        parse_run_config(json::parse(R"({"params":{"n":2,"L":8}})"));
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(e.field == "params.M");
    }
    CHECK_THROWS_AS(parse_run_config(json::parse(R"({"params":{"n":2,"M":8}})")),
                    config_error);
    CHECK_THROWS_AS(
        parse_run_config(json::parse(R"({"params":{"n":2,"M":16,"L":16,"beta":1}})")),
        config_error);
    CHECK_THROWS_AS(parse_run_config(json::parse(R"({"params":{"n":2,"M":4,"L":8}})")),
                    config_error);
}

TEST_CASE("beta expands to the power weight base") {
    const RunConfig config =
        parse_run_config(json::parse(R"({"params":{"n":2,"M":16,"beta":3}})"));
    CHECK(config.params.L == Rational(4096));
    CHECK(config_json(config).at("params").at("L") == 4096);
}

TEST_CASE("plan alpha accepts decimal and fraction strings") {
    auto alpha_of = [](const std::string& text) {
        const json doc = json::parse(R"({"plan":{"alpha":")" + text + R"("}})");
        return parse_run_config(doc).plan.alpha;
    };
    CHECK(alpha_of("1.1") == Rational(11, 10));
    CHECK(alpha_of("11/10") == Rational(11, 10));
    CHECK(alpha_of("1") == Rational(1));
    CHECK_THROWS_AS(alpha_of("x"), config_error);
    CHECK_THROWS_AS(alpha_of("5/2"), config_error);  // >= n
    CHECK_THROWS_AS(parse_run_config(json::parse(R"({"plan":{"alpha":"0"}})")), config_error);
    CHECK_THROWS_AS(parse_run_config(json::parse(R"({"experiment":"tabulate"})")),
                    config_error);
}

TEST_CASE("verify run emits every bounds mode") {
    const fs::path dir = scratch_dir("verify");
    json doc = json::parse(R"({
        "experiment": "verify",
        "sampling": {"pairs": 12, "monotone_pairs": 6, "path_samples": 12,
                     "diameter_samples": 4},
        "budgets": {"ratio_levels": 2}
    })");
    doc["output"] = {{"dir", dir.string()}};
    const RunOutcome outcome = run(parse_run_config(doc));
    CHECK(outcome.pass);
    CHECK(outcome.exit_code == 0);
    const json& verify = outcome.report.at("results").at("verify");
    for (const char* mode :
         {"ratio", "path_monotone", "metric_monotone", "diameter", "two_sided"}) {
        CHECK(verify.at(mode).at("pass") == true);
    }
    CHECK_FALSE(verify.contains("lipschitz"));  // uncapped parameters

    const json on_disk = json::parse(slurp(dir / "report.json"));
    CHECK(on_disk.at("pass") == true);
    CHECK(on_disk.at("tool").at("rng") == "splitmix64-ctr-v1");
    fs::remove_all(dir.parent_path());
}

TEST_CASE("capped verify keeps the Lipschitz claim and flags the rest honestly") {
    const fs::path dir = scratch_dir("capped");
    json doc = json::parse(R"({
        "params": {"n": 2, "M": 16, "L": 16, "capped": true},
        "experiment": "verify",
        "sampling": {"pairs": 8, "monotone_pairs": 6, "path_samples": 8,
                     "diameter_samples": 2, "lipschitz_pairs": 10},
        "budgets": {"ratio_levels": 2}
    })");
    doc["output"] = {{"dir", dir.string()}};
    const RunOutcome outcome = run(parse_run_config(doc));
    const json& verify = outcome.report.at("results").at("verify");
    // what capping preserves: the comparability band and the Lipschitz bound
    CHECK(verify.at("ratio").at("pass") == true);
    CHECK(verify.at("lipschitz").at("pass") == true);
    CHECK(verify.at("diameter").at("pass") == true);
    CHECK(verify.at("two_sided").at("violations") == 0);
    // what it destroys: freezing flattens the buffer ring, so refined paths
    // can undercut the coarse distance
    CHECK(verify.at("path_monotone").at("violations").get<std::int64_t>() > 0);
    // and M=16 refinement windows exceed the node budget at the deepest level
    CHECK(verify.at("metric_monotone").at("violations") == 0);
    CHECK(verify.at("metric_monotone").at("inconclusive").get<std::int64_t>() > 0);
    CHECK_FALSE(outcome.pass);
    CHECK(outcome.exit_code == 1);
    fs::remove_all(dir.parent_path());
}

TEST_CASE("walk run reports the recurrent regime without r") {
    const fs::path dir = scratch_dir("walk8");
    json doc = json::parse(R"({
        "experiment": "walk",
        "sampling": {"walks": 500, "walk_horizon": 100, "lln_points": 2000,
                     "lln_steps": 64}
    })");
    doc["output"] = {{"dir", dir.string()}};
    const RunOutcome outcome = run(parse_run_config(doc));
    CHECK(outcome.exit_code == 0);
    const json& walk = outcome.report.at("results").at("walk").at("walk");
    CHECK(walk.at("status").get<std::string>().find("recurrent/critical") == 0);
    CHECK_FALSE(walk.contains("r"));
    CHECK(outcome.report.at("results").at("walk").at("lln").at("pass") == true);
    CHECK(slurp(dir / "lln.csv").rfind("batch,sum_log,count\n", 0) == 0);
    fs::remove_all(dir.parent_path());
}

TEST_CASE("walk run solves the transient law exactly") {
    const fs::path dir = scratch_dir("walk16");
    json doc = json::parse(R"({
        "params": {"n": 2, "M": 16, "L": 16, "capped": true},
        "experiment": "walk",
        "sampling": {"walks": 4000, "walk_horizon": 400, "lln_points": 2000,
                     "lln_steps": 64},
        "output": {"csv": false}
    })");
    doc["output"]["dir"] = dir.string();
    const RunOutcome outcome = run(parse_run_config(doc));
    CHECK(outcome.exit_code == 0);
    const json& walk = outcome.report.at("results").at("walk").at("walk");
    CHECK(walk.at("status") == "transient");
    CHECK(walk.at("r") == "7/9");
    CHECK(walk.at("escape") == "2/9");
    CHECK_FALSE(fs::exists(dir / "lln.csv"));
    fs::remove_all(dir.parent_path());
}

TEST_CASE("dimension run writes the content table") {
    const fs::path dir = scratch_dir("dimension");
    json doc = json::parse(R"({
        "experiment": "dimension",
        "sampling": {"km_samples": 500, "content_samples": 400},
        "plan": {"alpha": "1.1", "beta": 3, "M": 16, "m_max": 1}
    })");
    doc["output"] = {{"dir", dir.string()}};
    const RunOutcome outcome = run(parse_run_config(doc));
    CHECK(outcome.exit_code == 0);
    const json& plan = outcome.report.at("results").at("dimension").at("plan");
    CHECK(plan.at("feasible") == true);
    CHECK(plan.at("stages").size() == 1);
    const std::string csv = slurp(dir / "content.csv");
    CHECK(csv.rfind("m,k_m,epsilon_log10,bound_log10,empirical_log10\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
    fs::remove_all(dir.parent_path());
}

TEST_CASE("heatmap run writes the svg") {
    const fs::path dir = scratch_dir("heatmap");
    json doc = json::parse(R"({"experiment": "heatmap"})");
    doc["output"] = {{"dir", dir.string()}};
    const RunOutcome outcome = run(parse_run_config(doc));
    CHECK(outcome.exit_code == 0);
    CHECK(outcome.report.at("results").at("heatmap").at("cells") == 64);
    CHECK(slurp(dir / "weights.svg").rfind("<svg", 0) == 0);
    fs::remove_all(dir.parent_path());
}

TEST_CASE("exhausted budgets mark the check inconclusive and fail the run") {
    const fs::path dir = scratch_dir("budget");
    json doc = json::parse(R"({
        "experiment": "qs",
        "sampling": {"triples": 7},
        "budgets": {"max_nodes": 1000}
    })");
    doc["output"] = {{"dir", dir.string()}};
    const RunOutcome outcome = run(parse_run_config(doc));
    CHECK(outcome.exit_code == 1);
    CHECK_FALSE(outcome.pass);
    const json& qs = outcome.report.at("results").at("qs");
    CHECK(qs.at("inconclusive") == true);
    CHECK(qs.at("pass") == false);
    fs::remove_all(dir.parent_path());
}

TEST_CASE("reports are byte-identical across worker counts") {
    json doc = json::parse(R"({
        "experiment": "all",
        "sampling": {"pairs": 10, "monotone_pairs": 4, "path_samples": 8,
                     "diameter_samples": 2, "triples": 14, "lln_points": 2000,
                     "lln_steps": 64, "walks": 1000, "walk_horizon": 200,
                     "km_samples": 400, "content_samples": 300},
        "budgets": {"ratio_levels": 1},
        "plan": {"m_max": 1}
    })");
    const fs::path dir1 = scratch_dir("workers1");
    const fs::path dir8 = scratch_dir("workers8");

    doc["output"] = {{"dir", dir1.string()}};
    setenv("QSMETRIC_THREADS", "1", 1);
    const RunOutcome one = run(parse_run_config(doc));
    doc["output"] = {{"dir", dir8.string()}};
    setenv("QSMETRIC_THREADS", "8", 1);
    const RunOutcome eight = run(parse_run_config(doc));
    unsetenv("QSMETRIC_THREADS");

    CHECK(one.exit_code == 0);
    CHECK(eight.exit_code == 0);

    json a = json::parse(slurp(dir1 / "report.json"));
    json b = json::parse(slurp(dir8 / "report.json"));
    a.erase("timing");
    b.erase("timing");
    a["config"]["output"].erase("dir");
    b["config"]["output"].erase("dir");
    CHECK(a == b);
    CHECK(a.dump(2) == b.dump(2));
    CHECK(slurp(dir1 / "qs.csv") == slurp(dir8 / "qs.csv"));
    CHECK(slurp(dir1 / "content.csv") == slurp(dir8 / "content.csv"));
    CHECK(slurp(dir1 / "lln.csv") == slurp(dir8 / "lln.csv"));
    CHECK(slurp(dir1 / "weights.svg") == slurp(dir8 / "weights.svg"));
    fs::remove_all(dir1.parent_path());
}

}  // TEST_SUITE

}  // namespace
}  // namespace qsmetric
