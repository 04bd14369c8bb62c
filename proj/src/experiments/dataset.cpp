#include "cqm/experiments/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cqm::experiments {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(item);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

}  // namespace

std::string to_string(CellStatus s) {
    switch (s) {
        case CellStatus::ok:
            return "ok";
        case CellStatus::failed:
            return "failed";
        case CellStatus::saturated:
            return "saturated";
    }
    return "failed";
}

CellStatus parse_status(const std::string& text) {
    if (text == "ok") {
        return CellStatus::ok;
    }
    if (text == "saturated") {
        return CellStatus::saturated;
    }
    if (text == "failed") {
        return CellStatus::failed;
    }
    throw std::runtime_error("unknown cell status '" + text + "'");
}

std::string format_number(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_number(int v) { return std::to_string(v); }

void Dataset::add_row(Row row) {
    if (row.values.size() != columns_.size()) {
        throw std::invalid_argument("row has " + std::to_string(row.values.size()) +
                                    " values for " + std::to_string(columns_.size()) + " columns");
    }
    rows_.push_back(std::move(row));
}

std::size_t Dataset::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (columns_[i].name == name) {
            return i;
        }
    }
    throw std::out_of_range("no column named " + name);
}

std::vector<double> Dataset::numeric(const std::string& name, bool ok_only) const {
    const auto idx = column_index(name);
    std::vector<double> out;
    for (const auto& r : rows_) {
        if (ok_only && r.status != CellStatus::ok) {
            continue;
        }
        const auto& text = r.values[idx];
        char* end = nullptr;
        const double v = std::strtod(text.c_str(), &end);
        out.push_back(end == text.c_str() ? std::nan("") : v);
    }
    return out;
}

std::size_t Dataset::count(CellStatus s) const {
    std::size_t n = 0;
    for (const auto& r : rows_) {
        n += r.status == s ? 1 : 0;
    }
    return n;
}

void Dataset::write(std::ostream& out) const {
    out << "# " << metadata_.dump() << '\n';
    out << "cell";
    for (const auto& c : columns_) {
        out << ',' << c.name;
    }
    out << ",status\n";
    for (const auto& r : rows_) {
        out << r.cell;
        for (const auto& v : r.values) {
            out << ',' << v;
        }
        out << ',' << to_string(r.status) << '\n';
    }
}

void Dataset::write_file(const std::string& path) const {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::filesystem::create_directories(p.parent_path());
    }
    // write to a sibling file first so an interrupted run never truncates old results
    const auto tmp = p.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp);
        }
        write(out);
        if (!out) {
            throw std::runtime_error("write failed for " + tmp);
        }
    }
    std::filesystem::rename(tmp, p);
}

Dataset Dataset::read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path);
    }
    std::string line;
    if (!std::getline(in, line) || line.rfind("# ", 0) != 0) {
        throw std::runtime_error(path + ": missing metadata line");
    }
    Dataset d;
    d.metadata_ = nlohmann::ordered_json::parse(line.substr(2));
    if (!std::getline(in, line)) {
        throw std::runtime_error(path + ": missing header line");
    }
    const auto header = split_csv(line);
    if (header.size() < 2 || header.front() != "cell" || header.back() != "status") {
        throw std::runtime_error(path + ": malformed header");
    }
    std::vector<std::string> units;
    if (d.metadata_.contains("columns")) {
        for (const auto& c : d.metadata_["columns"]) {
            units.push_back(c.value("unit", "1"));
        }
    }
    for (std::size_t i = 1; i + 1 < header.size(); ++i) {
        d.columns_.push_back({header[i], i - 1 < units.size() ? units[i - 1] : "1"});
    }
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        auto fields = split_csv(line);
        if (fields.size() != header.size()) {
            throw std::runtime_error(path + ": row width mismatch");
        }
        Row r;
        r.cell = std::stoi(fields.front());
        r.status = parse_status(fields.back());
        r.values.assign(fields.begin() + 1, fields.end() - 1);
        d.rows_.push_back(std::move(r));
    }
    return d;
}

}  // namespace cqm::experiments
