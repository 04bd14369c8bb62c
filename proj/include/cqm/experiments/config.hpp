#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cqm::experiments {

enum class Engine { closed, oracle, both };

[[nodiscard]] std::string to_string(Engine e);
/// Throws ConfigError for anything but closed|oracle|both.
[[nodiscard]] Engine parse_engine(const std::string& text);

/// A documented configuration key with its default value text.
struct KeySpec {
    std::string name;
    std::string default_value;
    std::string description;
};

/// Resolved key/value configuration of one experiment run. Values are kept as
/// text so that the metadata records exactly what was requested.
class ExperimentConfig {
public:
    ExperimentConfig(std::string experiment, const std::vector<KeySpec>& keys);

    [[nodiscard]] const std::string& experiment() const noexcept { return experiment_; }
    [[nodiscard]] const std::map<std::string, std::string>& values() const noexcept {
        return values_;
    }

    /// Throws ConfigError for a key the experiment does not define.
    void set(const std::string& key, const std::string& value);
    /// Applies `key = value` lines; '#' starts a comment, blank lines are skipped.
    void apply_text(const std::string& text, const std::string& origin = "config");
    void apply_file(const std::string& path);
    /// Parses a single `key=value` override.
    void apply_override(const std::string& assignment);

    [[nodiscard]] const std::string& raw(const std::string& key) const;
    [[nodiscard]] double number(const std::string& key) const;
    [[nodiscard]] int integer(const std::string& key) const;
    /// Comma-separated items, each a number or an inclusive range `start:stop:count`.
    /// An empty value gives an empty list.
    [[nodiscard]] std::vector<double> list(const std::string& key) const;
    [[nodiscard]] std::vector<int> int_list(const std::string& key) const;
    [[nodiscard]] Engine engine() const;

private:
    std::string experiment_;
    std::map<std::string, std::string> values_;
};

/// Parses one list expression (see ExperimentConfig::list). Throws ConfigError.
[[nodiscard]] std::vector<double> parse_list(const std::string& text, const std::string& key);

}  // namespace cqm::experiments
