#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sbd/analysis.hpp"
#include "sbd/scenarios.hpp"

namespace sbd {

enum class TableFormat { Csv, JsonLines };

TableFormat parse_table_format(std::string_view text);

/// Empty cell: blank in CSV, null in JSON.
struct Blank {
    friend bool operator==(Blank, Blank) = default;
};

using Cell = std::variant<Blank, double, std::int64_t, bool, std::string>;

class OutputTable {
public:
    explicit OutputTable(std::vector<std::string> header);

    /// Throws std::invalid_argument when the row width differs from the header.
    void add_row(std::vector<Cell> row);

    const std::vector<std::string>& header() const { return header_; }
    const std::vector<std::vector<Cell>>& rows() const { return rows_; }

    /// Every line, including the last, ends with '\n'.
    std::string render(TableFormat format) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<Cell>> rows_;
};

/// 17 significant digits, '.' decimal separator regardless of locale.
std::string format_number(double value);

OutputTable orbit_table(const Orbit& orbit);
OutputTable bifurcation_table(const std::vector<BifurcationRow>& rows);
OutputTable lyapunov_table(const std::vector<LyapunovRow>& rows);
OutputTable collapse_table(const std::string& scenario, const std::optional<CollapseReport>& report,
                           std::size_t steps_run);
OutputTable ped_table(double p1, double p2, const PedResult& result);
OutputTable scenarios_table(const std::vector<Scenario>& scenarios);

}  // namespace sbd
