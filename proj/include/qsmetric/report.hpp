#ifndef QSMETRIC_REPORT_HPP
#define QSMETRIC_REPORT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "qsmetric/params.hpp"

namespace qsmetric {

// Effective run configuration: every field has a recorded default, and the
// emitted report echoes the whole block back.
struct SamplingConfig {
    std::uint64_t seed = 1;
    std::int64_t pairs = 1000;            // two_sided
    std::int64_t monotone_pairs = 200;    // metric_monotone
    std::int64_t path_samples = 200;      // path_monotone
    std::int64_t diameter_samples = 50;
    std::int64_t triples = 10000;
    std::int64_t lln_points = 100000;
    std::int64_t lln_steps = 1000;
    std::int64_t walks = 100000;
    std::int64_t walk_horizon = 10000;
    std::int64_t km_samples = 4000;
    std::int64_t content_samples = 4000;
    std::int64_t lipschitz_pairs = 1000;
};

struct BudgetConfig {
    std::int64_t max_nodes = 1'500'000;
    int scan_doublings = 12;
    int ratio_levels = 3;
};

struct PlanConfig {
    Rational alpha = Rational(11, 10);
    int beta = 3;
    int M = 16;
    int m_max = 3;
};

struct OutputConfig {
    std::string dir = "out";
    int heatmap_level = 1;
    std::vector<std::int64_t> slice;
    bool csv = true;
    bool svg = true;
};

struct RunConfig {
    Params params{2, 8, Rational(8), false};
    std::string experiment = "verify";
    SamplingConfig sampling;
    BudgetConfig budgets;
    PlanConfig plan;
    OutputConfig output;
};

// Strict parse: unknown keys are rejected with their full field path, values
// are validated, defaults fill anything omitted.
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::string& path);

// The effective configuration as echoed into the report.
nlohmann::json config_json(const RunConfig& config);

struct RunOutcome {
    nlohmann::json report;
    bool pass = false;
    int exit_code = 1;
    std::vector<std::string> files;  // everything written, report.json first
};

// Executes the configured experiments, writes report.json plus any CSV/SVG
// into the output directory, and returns the report. Everything except the
// "timing" block is byte-deterministic for a fixed config.
RunOutcome run(const RunConfig& config);

}  // namespace qsmetric

#endif
