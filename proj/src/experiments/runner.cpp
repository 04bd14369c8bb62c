#include "cqm/experiments/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <filesystem>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "cqm/errors.hpp"

namespace cqm::experiments {

namespace {

nlohmann::ordered_json columns_json(const std::vector<Column>& columns) {
    auto out = nlohmann::ordered_json::array();
    for (const auto& c : columns) {
        out.push_back({{"name", c.name}, {"unit", c.unit}});
    }
    return out;
}

nlohmann::ordered_json config_json(const ExperimentConfig& config) {
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (const auto& [k, v] : config.values()) {
        out[k] = v;
    }
    return out;
}

// Rows of every fully successful cell in a previous output, keyed by cell index.
std::map<int, std::vector<Row>> reusable_cells(const std::string& path, const std::string& id,
                                               const nlohmann::ordered_json& config,
                                               const nlohmann::ordered_json& columns) {
    std::map<int, std::vector<Row>> out;
    if (!std::filesystem::exists(path)) {
        return out;
    }
    Dataset old;
    try {
        old = Dataset::read_file(path);
    } catch (const std::exception&) {
        return out;
    }
    const auto& meta = old.metadata();
    if (meta.value("experiment", "") != id || meta.value("version", "") != kVersion ||
        !meta.contains("config") || meta["config"] != config || !meta.contains("columns") ||
        meta["columns"] != columns) {
        return out;
    }
    std::map<int, bool> failed;
    for (const auto& r : old.rows()) {
        failed[r.cell] = failed[r.cell] || r.status == CellStatus::failed;
        out[r.cell].push_back(r);
    }
    for (const auto& [cell, bad] : failed) {
        if (bad) {
            out.erase(cell);
        }
    }
    return out;
}

}  // namespace

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs <= 0) {
        jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    }
    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                fn(i);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
}

const ExperimentDef& find_experiment(const std::string& id) {
    for (const auto& def : registry()) {
        if (def.id == id) {
            return def;
        }
    }
    throw ConfigError("unknown experiment '" + id + "'");
}

ExperimentConfig default_config(const std::string& id) {
    const auto& def = find_experiment(id);
    return ExperimentConfig(def.id, def.keys);
}

RunResult run(const ExperimentConfig& config, const RunOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    const auto& def = find_experiment(config.experiment());
    const Engine engine = config.engine();
    if (std::find(def.engines.begin(), def.engines.end(), engine) == def.engines.end()) {
        throw ConfigError("experiment " + def.id + " does not support engine " +
                          to_string(engine));
    }
    Plan plan;
    try {
        plan = def.plan(config);
    } catch (const InvalidParams& e) {
        throw ConfigError(e.what());
    } catch (const RegimeError& e) {
        throw ConfigError(e.what());
    }
    if (plan.cells.empty()) {
        throw ConfigError("experiment " + def.id + " has an empty grid");
    }

    const auto config_meta = config_json(config);
    const auto columns_meta = columns_json(plan.columns);
    std::map<int, std::vector<Row>> reused;
    if (options.resume_path) {
        reused = reusable_cells(*options.resume_path, def.id, config_meta, columns_meta);
    }

    const auto n = plan.cells.size();
    std::vector<std::vector<Row>> results(n);
    std::vector<std::string> errors(n);
    std::vector<char> done(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (auto it = reused.find(static_cast<int>(i)); it != reused.end()) {
            results[i] = std::move(it->second);
            done[i] = 1;
        }
    }
    std::mutex log_mutex;
    std::atomic<std::size_t> finished{0};
    parallel_for(n, options.jobs, [&](std::size_t i) {
        if (done[i]) {
            return;
        }
        const auto& cell = plan.cells[i];
        try {
            results[i] = cell.compute();
            for (auto& r : results[i]) {
                r.cell = static_cast<int>(i);
            }
        } catch (const std::exception& e) {
            errors[i] = e.what();
            Row r;
            r.cell = static_cast<int>(i);
            r.values = cell.keys;
            r.values.resize(plan.columns.size(), "nan");
            r.status = CellStatus::failed;
            results[i] = {std::move(r)};
        }
        const auto count = ++finished;
        if (options.log) {
            std::lock_guard lock(log_mutex);
            std::ostringstream msg;
            msg << def.id << ": cell " << (i + 1) << "/" << n << " done (" << count
                << " computed)";
            if (!errors[i].empty()) {
                msg << " FAILED: " << errors[i];
            }
            options.log(msg.str());
        }
    });

    RunResult out;
    out.cells = n;
    out.reused_cells = reused.size();
    Dataset data(plan.columns);
    auto failures = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < n; ++i) {
        bool failed = false;
        bool saturated = false;
        for (auto& r : results[i]) {
            failed = failed || r.status == CellStatus::failed;
            saturated = saturated || r.status == CellStatus::saturated;
            data.add_row(std::move(r));
        }
        out.failed_cells += failed ? 1 : 0;
        out.saturated_cells += saturated ? 1 : 0;
        if (!errors[i].empty()) {
            failures.push_back({{"cell", i}, {"error", errors[i]}});
        }
    }

    auto& meta = data.metadata();
    meta["experiment"] = def.id;
    meta["version"] = kVersion;
    meta["engine"] = to_string(engine);
    meta["config"] = config_meta;
    meta["columns"] = columns_meta;
    meta["cells"] = n;
    meta["failed_cells"] = out.failed_cells;
    meta["saturated_cells"] = out.saturated_cells;
    meta["failures"] = failures;
    nlohmann::ordered_json analysis = nlohmann::ordered_json::object();
    if (plan.analyze) {
        try {
            plan.analyze(data, analysis);
        } catch (const std::exception& e) {
            analysis["error"] = e.what();
        }
    }
    meta["analysis"] = analysis;
    meta["wall_time_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.dataset = std::move(data);
    return out;
}

std::string reference_text() {
    std::ostringstream out;
    out << "# cqm configuration reference\n\n"
        << "Config files hold one `key = value` per line; `#` starts a comment.\n"
        << "List values are comma-separated numbers or inclusive ranges `start:stop:count`.\n"
        << "`--set key=value` overrides the file; `--engine` overrides the `engine` key.\n";
    for (const auto& def : registry()) {
        out << "\n## " << def.id << "\n\n" << def.summary << "\n\nEngines:";
        for (auto e : def.engines) {
            out << ' ' << to_string(e);
        }
        out << "\n\n| key | default | meaning |\n|---|---|---|\n";
        for (const auto& k : def.keys) {
            out << "| `" << k.name << "` | `" << k.default_value << "` | " << k.description
                << " |\n";
        }
    }
    return out.str();
}

}  // namespace cqm::experiments
