#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cqm/errors.hpp"
#include "cqm/experiments/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitPartial = 3;

std::string default_output(const std::string& id) {
    const char* root = std::getenv("CQM_OUT_DIR");
    const std::filesystem::path dir = root != nullptr && *root != '\0' ? root : ".";
    return (dir / (id + ".csv")).string();
}

}  // namespace

int main(int argc, char** argv) {
    using namespace cqm::experiments;

    CLI::App app{"Critical quantum metrology experiments for the Rabi model with a quadratic term"};
    std::string experiment;
    std::string config_path;
    std::string out_path;
    std::string engine;
    std::vector<std::string> overrides;
    int jobs = 0;
    bool fresh = false;
    bool quiet = false;

    std::string ids;
    for (const auto& def : registry()) {
        ids += (ids.empty() ? "" : ", ") + def.id;
    }
    app.add_option("experiment", experiment,
                   "experiment id (" + ids + "), 'list' or 'reference'")
        ->required();
    app.add_option("--config", config_path, "key = value config file");
    app.add_option("--jobs", jobs, "worker threads (default: hardware concurrency)")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--out", out_path, "output CSV (default: $CQM_OUT_DIR/<id>.csv)");
    app.add_option("--engine", engine, "closed | oracle | both");
    app.add_option("--set", overrides, "override a config key, key=value (repeatable)");
    app.add_flag("--fresh", fresh, "recompute every cell instead of resuming from --out");
    app.add_flag("-q,--quiet", quiet, "no progress output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    if (experiment == "reference") {
        std::cout << reference_text();
        return kExitOk;
    }
    if (experiment == "list") {
        for (const auto& def : registry()) {
            std::cout << def.id << "\t" << def.summary << "\n";
        }
        return kExitOk;
    }

    try {
        auto config = default_config(experiment);
        if (!config_path.empty()) {
            config.apply_file(config_path);
        }
        for (const auto& o : overrides) {
            config.apply_override(o);
        }
        if (!engine.empty()) {
            config.set("engine", engine);
        }
        if (out_path.empty()) {
            out_path = default_output(experiment);
        }

        RunOptions options;
        options.jobs = jobs;
        if (!fresh) {
            options.resume_path = out_path;
        }
        if (!quiet) {
            options.log = [](const std::string& msg) { std::cerr << msg << "\n"; };
        }
        const auto result = run(config, options);
        result.dataset.write_file(out_path);

        std::cerr << experiment << ": " << result.cells << " cells, " << result.failed_cells
                  << " failed, " << result.saturated_cells << " saturated, "
                  << result.reused_cells << " reused -> " << out_path << "\n";
        return result.failed_cells > 0 ? kExitPartial : kExitOk;
    } catch (const cqm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const cqm::InvalidParams& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
