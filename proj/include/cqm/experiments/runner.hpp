#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cqm/experiments/config.hpp"
#include "cqm/experiments/dataset.hpp"

namespace cqm::experiments {

/// One independent unit of work. `keys` are the values of the leading columns,
/// used to label the row of a cell that fails.
struct Cell {
    std::vector<std::string> keys;
    std::function<std::vector<Row>()> compute;  ///< rows with status ok or saturated
};

struct Plan {
    std::vector<Column> columns;
    std::vector<Cell> cells;
    /// Optional post-processing over the finished dataset; fills metadata["analysis"].
    std::function<void(const Dataset&, nlohmann::ordered_json&)> analyze;
};

struct ExperimentDef {
    std::string id;
    std::string summary;
    std::vector<KeySpec> keys;
    std::vector<Engine> engines;  ///< engines the experiment accepts
    std::function<Plan(const ExperimentConfig&)> plan;
};

[[nodiscard]] const std::vector<ExperimentDef>& registry();
/// Throws ConfigError for an unknown id.
[[nodiscard]] const ExperimentDef& find_experiment(const std::string& id);
/// Configuration holding the experiment's defaults.
[[nodiscard]] ExperimentConfig default_config(const std::string& id);

struct RunOptions {
    int jobs = 0;  ///< 0 = hardware concurrency
    /// Earlier output to resume from: its ok/saturated cells are reused when the
    /// recorded experiment, config and columns match.
    std::optional<std::string> resume_path;
    std::function<void(const std::string&)> log;
};

struct RunResult {
    Dataset dataset;
    std::size_t cells = 0;
    std::size_t failed_cells = 0;
    std::size_t saturated_cells = 0;
    std::size_t reused_cells = 0;
};

/// Runs every grid cell, recording per-cell failures instead of aborting.
/// Throws ConfigError when the configuration is invalid.
[[nodiscard]] RunResult run(const ExperimentConfig& config, const RunOptions& options = {});

/// Calls fn(0..n-1) on at most `jobs` threads (0 = hardware concurrency).
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

/// Markdown reference of every experiment, its engines and configuration keys.
[[nodiscard]] std::string reference_text();

inline constexpr const char* kVersion = "1.0.0";

}  // namespace cqm::experiments
