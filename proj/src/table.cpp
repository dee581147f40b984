#include "sbd/table.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sbd {

namespace {

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string json_string(const std::string& text) {
    std::string out = "\"";
    for (unsigned char c : text) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (c < 0x20) {
                    constexpr char hex[] = "0123456789abcdef";
                    out += "\\u00";
                    out.push_back(hex[c >> 4]);
                    out.push_back(hex[c & 0xF]);
                } else {
                    out.push_back(static_cast<char>(c));
                }
        }
    }
    out.push_back('"');
    return out;
}

std::string render_cell(const Cell& cell, TableFormat format) {
    const bool json = format == TableFormat::JsonLines;
    return std::visit(
        [json](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Blank>) {
                return json ? "null" : "";
            } else if constexpr (std::is_same_v<T, double>) {
                if (json && !std::isfinite(v)) return "null";
                return format_number(v);
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                return std::to_string(v);
            } else if constexpr (std::is_same_v<T, bool>) {
                return v ? "true" : "false";
            } else {
                return json ? json_string(v) : csv_field(v);
            }
        },
        cell);
}

Cell optional_number(double value) {
    if (std::isnan(value)) return Blank{};
    return value;
}

std::int64_t as_index(std::size_t value) { return static_cast<std::int64_t>(value); }

}  // namespace

TableFormat parse_table_format(std::string_view text) {
    if (text == "csv") return TableFormat::Csv;
    if (text == "jsonl") return TableFormat::JsonLines;
    throw std::invalid_argument("unknown format '" + std::string(text) + "' (expected csv or jsonl)");
}

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buffer[64];
    const auto [ptr, ec] =
        std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::general, 17);
    return std::string(buffer, ptr);
}

OutputTable::OutputTable(std::vector<std::string> header) : header_(std::move(header)) {
    if (header_.empty()) throw std::invalid_argument("table needs at least one column");
}

void OutputTable::add_row(std::vector<Cell> row) {
    if (row.size() != header_.size()) {
        throw std::invalid_argument("row has " + std::to_string(row.size()) + " cells, table has " +
                                    std::to_string(header_.size()) + " columns");
    }
    rows_.push_back(std::move(row));
}

std::string OutputTable::render(TableFormat format) const {
    std::string out;
    if (format == TableFormat::Csv) {
        for (std::size_t c = 0; c < header_.size(); ++c) {
            if (c) out.push_back(',');
            out += csv_field(header_[c]);
        }
        out.push_back('\n');
        for (const auto& row : rows_) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (c) out.push_back(',');
                out += render_cell(row[c], format);
            }
            out.push_back('\n');
        }
        return out;
    }
    for (const auto& row : rows_) {
        out.push_back('{');
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out.push_back(',');
            out += json_string(header_[c]);
            out.push_back(':');
            out += render_cell(row[c], format);
        }
        out += "}\n";
    }
    return out;
}

OutputTable orbit_table(const Orbit& orbit) {
    OutputTable table({"step", "demand", "supply", "price", "signal", "collapsed"});
    for (std::size_t n = 0; n < orbit.states.size(); ++n) {
        const MarketState& s = orbit.states[n];
        const Cell signal = s.supply > 0.0 ? Cell{s.demand / s.supply} : Cell{Blank{}};
        table.add_row({as_index(n), s.demand, s.supply, s.price, signal, s.collapsed});
    }
    return table;
}

OutputTable bifurcation_table(const std::vector<BifurcationRow>& rows) {
    OutputTable table({"param_value", "sample_index", "demand", "classification"});
    for (const auto& row : rows) {
        const std::string label = row.classification.label();
        for (std::size_t i = 0; i < row.samples.size(); ++i) {
            table.add_row({row.param_value, as_index(i), row.samples[i], label});
        }
    }
    return table;
}

OutputTable lyapunov_table(const std::vector<LyapunovRow>& rows) {
    OutputTable table({"param_value", "lambda", "method", "defined"});
    for (const auto& row : rows) {
        table.add_row({row.param_value, optional_number(row.lambda), std::string(to_string(row.method)),
                       row.defined});
    }
    return table;
}

OutputTable collapse_table(const std::string& scenario, const std::optional<CollapseReport>& report,
                           std::size_t steps_run) {
    OutputTable table({"scenario", "collapsed", "step", "trigger", "frozen_price", "steps_run"});
    if (report) {
        table.add_row({scenario, true, as_index(report->step), std::string(to_string(report->trigger)),
                       report->frozen_price, as_index(steps_run)});
    } else {
        table.add_row({scenario, false, Blank{}, std::string(to_string(Trigger::None)), Blank{},
                       as_index(steps_run)});
    }
    return table;
}

OutputTable ped_table(double p1, double p2, const PedResult& result) {
    OutputTable table({"p1", "p2", "q1", "q2", "ped", "perfectly_elastic"});
    table.add_row({p1, p2, result.q1, result.q2, optional_number(result.value), result.perfectly_elastic});
    return table;
}

OutputTable scenarios_table(const std::vector<Scenario>& scenarios) {
    OutputTable table({"name", "m", "form", "analysis", "figure"});
    for (const auto& s : scenarios) {
        table.add_row({s.name, s.setup.model.behavior.m, std::string(to_string(s.setup.model.form)),
                       std::string(to_string(s.kind())), s.figure.empty() ? Cell{Blank{}} : Cell{s.figure}});
    }
    return table;
}

}  // namespace sbd
