#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace cqm::experiments {

struct Column {
    std::string name;
    std::string unit;  ///< "1" for dimensionless
};

enum class CellStatus { ok, failed, saturated };

[[nodiscard]] std::string to_string(CellStatus s);
[[nodiscard]] CellStatus parse_status(const std::string& text);

/// One output row: the grid cell it came from, its formatted values and status.
struct Row {
    int cell = 0;
    std::vector<std::string> values;
    CellStatus status = CellStatus::ok;
};

/// Tabular experiment output. Serialized as CSV: a '#'-prefixed JSON metadata
/// line, a header line `cell,<columns...>,status`, then one line per row.
class Dataset {
public:
    Dataset() = default;
    explicit Dataset(std::vector<Column> columns) : columns_(std::move(columns)) {}

    [[nodiscard]] const std::vector<Column>& columns() const noexcept { return columns_; }
    [[nodiscard]] const std::vector<Row>& rows() const noexcept { return rows_; }
    [[nodiscard]] nlohmann::ordered_json& metadata() noexcept { return metadata_; }
    [[nodiscard]] const nlohmann::ordered_json& metadata() const noexcept { return metadata_; }

    /// Throws std::invalid_argument if the row width does not match the columns.
    void add_row(Row row);

    /// Index of a column by name; throws std::out_of_range if absent.
    [[nodiscard]] std::size_t column_index(const std::string& name) const;
    /// Numeric values of a column (NaN for non-numeric text), optionally only ok rows.
    [[nodiscard]] std::vector<double> numeric(const std::string& name, bool ok_only = true) const;

    [[nodiscard]] std::size_t count(CellStatus s) const;

    void write(std::ostream& out) const;
    void write_file(const std::string& path) const;
    /// Parses a file written by write(). Throws std::runtime_error on malformed input.
    static Dataset read_file(const std::string& path);

private:
    std::vector<Column> columns_;
    std::vector<Row> rows_;
    nlohmann::ordered_json metadata_ = nlohmann::ordered_json::object();
};

/// 17 significant digits; nan, inf and -inf spelled out.
[[nodiscard]] std::string format_number(double v);
[[nodiscard]] std::string format_number(int v);

}  // namespace cqm::experiments
