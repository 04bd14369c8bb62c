#include "cqm/experiments/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cqm/errors.hpp"

namespace cqm::experiments {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_number(const std::string& text, const std::string& key) {
    const std::string t = trim(text);
    if (t.empty()) {
        throw ConfigError("key '" + key + "': expected a number, got an empty value");
    }
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v)) {
        throw ConfigError("key '" + key + "': '" + t + "' is not a finite number");
    }
    return v;
}

int to_int(double v, const std::string& key) {
    if (v != std::floor(v) || std::abs(v) > 1e9) {
        throw ConfigError("key '" + key + "': expected an integer");
    }
    return static_cast<int>(v);
}

}  // namespace

std::string to_string(Engine e) {
    switch (e) {
        case Engine::closed:
            return "closed";
        case Engine::oracle:
            return "oracle";
        case Engine::both:
            return "both";
    }
    return "closed";
}

Engine parse_engine(const std::string& text) {
    const auto t = trim(text);
    if (t == "closed") {
        return Engine::closed;
    }
    if (t == "oracle") {
        return Engine::oracle;
    }
    if (t == "both") {
        return Engine::both;
    }
    throw ConfigError("engine must be closed, oracle or both (got '" + t + "')");
}

std::vector<double> parse_list(const std::string& text, const std::string& key) {
    std::vector<double> out;
    if (trim(text).empty()) {
        return out;
    }
    std::stringstream items(text);
    std::string item;
    while (std::getline(items, item, ',')) {
        item = trim(item);
        if (item.find(':') == std::string::npos) {
            out.push_back(parse_number(item, key));
            continue;
        }
        std::stringstream parts(item);
        std::string a, b, c, extra;
        if (!std::getline(parts, a, ':') || !std::getline(parts, b, ':') ||
            !std::getline(parts, c, ':') || std::getline(parts, extra, ':')) {
            throw ConfigError("key '" + key + "': range must be start:stop:count (got '" + item +
                              "')");
        }
        const double start = parse_number(a, key);
        const double stop = parse_number(b, key);
        const int count = to_int(parse_number(c, key), key);
        if (count < 1) {
            throw ConfigError("key '" + key + "': range count must be >= 1");
        }
        if (count == 1) {
            out.push_back(start);
            continue;
        }
        for (int i = 0; i < count; ++i) {
            // endpoints exact, interior points by interpolation
            const double f = static_cast<double>(i) / (count - 1);
            out.push_back(i == count - 1 ? stop : start + (stop - start) * f);
        }
    }
    return out;
}

ExperimentConfig::ExperimentConfig(std::string experiment, const std::vector<KeySpec>& keys)
    : experiment_(std::move(experiment)) {
    for (const auto& k : keys) {
        values_[k.name] = k.default_value;
    }
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        throw ConfigError("unknown key '" + key + "' for experiment " + experiment_);
    }
    it->second = trim(value);
}

void ExperimentConfig::apply_text(const std::string& text, const std::string& origin) {
    std::stringstream lines(text);
    std::string line;
    int number = 0;
    while (std::getline(lines, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        if (trim(line).empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(number) + ": expected key = value");
        }
        set(trim(line.substr(0, eq)), line.substr(eq + 1));
    }
}

void ExperimentConfig::apply_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    apply_text(buf.str(), path);
}

void ExperimentConfig::apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("override '" + assignment + "' must look like key=value");
    }
    set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

const std::string& ExperimentConfig::raw(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        throw ConfigError("unknown key '" + key + "' for experiment " + experiment_);
    }
    return it->second;
}

double ExperimentConfig::number(const std::string& key) const {
    return parse_number(raw(key), key);
}

int ExperimentConfig::integer(const std::string& key) const { return to_int(number(key), key); }

std::vector<double> ExperimentConfig::list(const std::string& key) const {
    return parse_list(raw(key), key);
}

std::vector<int> ExperimentConfig::int_list(const std::string& key) const {
    std::vector<int> out;
    for (double v : list(key)) {
        out.push_back(to_int(v, key));
    }
    return out;
}

Engine ExperimentConfig::engine() const { return parse_engine(raw("engine")); }

}  // namespace cqm::experiments
