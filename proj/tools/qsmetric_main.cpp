#include <cstdint>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "qsmetric/errors.hpp"
#include "qsmetric/report.hpp"
#include "qsmetric/version.hpp"

namespace {

using nlohmann::json;

bool any_key(const json& node, const char* key, bool (*hit)(const json&)) {
    if (node.is_object()) {
        for (const auto& [name, value] : node.items()) {
            if (name == key && hit(value)) return true;
            if (any_key(value, key, hit)) return true;
        }
    } else if (node.is_array()) {
        for (const json& item : node) {
            if (any_key(item, key, hit)) return true;
        }
    }
    return false;
}

bool failed(const json& block) {
    return any_key(block, "pass",
                   [](const json& v) { return v.is_boolean() && !v.get<bool>(); });
}

bool inconclusive(const json& block) {
    return any_key(block, "inconclusive", [](const json& v) {
        return (v.is_boolean() && v.get<bool>()) ||
               (v.is_number_integer() && v.get<std::int64_t>() > 0);
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"weighted-grid metric toolbox"};
    app.set_version_flag("--version", std::string(qsmetric::kToolName) + " " +
                                          qsmetric::kToolVersion);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    app.add_option("--config", config_path, "JSON config file")->required();
    CLI::Option* out_opt =
        app.add_option("--out", out_dir, "output directory (overrides config)");
    CLI::Option* seed_opt =
        app.add_option("--seed", seed, "RNG seed (overrides config)");

    const std::pair<const char*, const char*> kExperiments[] = {
        {"verify", "exhaustive and sampled weight/metric bound checks"},
        {"qs", "quasisymmetry ratio scatter against the modulus bound"},
        {"dimension", "dimension-drop plan and content-sum table"},
        {"walk", "zone walk analysis and log-weight law of large numbers"},
        {"heatmap", "render one weight level as SVG"},
        {"all", "run every experiment"},
    };
    for (const auto& [name, help] : kExperiments) {
        app.add_subcommand(name, help)->fallthrough();
    }
    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        qsmetric::RunConfig config = qsmetric::load_run_config(config_path);
        config.experiment = app.get_subcommands().front()->get_name();
        if (*out_opt) config.output.dir = out_dir;
        if (*seed_opt) config.sampling.seed = seed;

        const qsmetric::RunOutcome outcome = qsmetric::run(config);
        for (const auto& [name, block] : outcome.report.at("results").items()) {
            std::printf("%-10s %s%s\n", name.c_str(), failed(block) ? "FAIL" : "pass",
                        inconclusive(block) ? " (inconclusive)" : "");
        }
        for (const std::string& file : outcome.files) {
            std::printf("wrote %s\n", file.c_str());
        }
        std::printf("overall: %s\n", outcome.pass ? "PASS" : "FAIL");
        return outcome.exit_code;
    } catch (const qsmetric::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
