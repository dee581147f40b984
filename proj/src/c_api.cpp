#include "sbd/sbd.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <limits>
#include <string>

#include "sbd/analysis.hpp"
#include "sbd/scenarios.hpp"
#include "sbd/table.hpp"

struct sbd_scenario {
    sbd::Scenario value;
};

struct sbd_table {
    sbd::OutputTable value;
    std::string rendered;
};

namespace {

thread_local std::string last_error;

sbd_status fail(sbd_status status, std::string message) {
    last_error = std::move(message);
    return status;
}

// Maps the C++ exception hierarchy onto status codes. Order matters:
// ValidationError derives from std::invalid_argument.
template <class F>
sbd_status guarded(F&& body) {
    last_error.clear();
    try {
        return body();
    } catch (const sbd::ValidationError& e) {
        return fail(SBD_ERR_VALIDATION, e.what());
    } catch (const sbd::NotFoundError& e) {
        return fail(SBD_ERR_NOT_FOUND, e.what());
    } catch (const sbd::DomainError& e) {
        return fail(SBD_ERR_NUMERICAL, e.what());
    } catch (const sbd::EscapeError& e) {
        return fail(SBD_ERR_NUMERICAL, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(SBD_ERR_VALIDATION, e.what());
    } catch (const std::exception& e) {
        return fail(SBD_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(SBD_ERR_INTERNAL, "unknown error");
    }
}

sbd_status emit(sbd::OutputTable table, sbd_table** out) {
    *out = new sbd_table{std::move(table), {}};
    return SBD_OK;
}

template <class Spec>
const Spec& require(const sbd::Scenario& scenario, sbd::AnalysisKind kind) {
    const auto* spec = std::get_if<Spec>(&scenario.analysis);
    if (!spec) {
        throw sbd::ValidationError("analysis", "scenario '" + scenario.name + "' runs a " +
                                                   std::string(sbd::to_string(scenario.kind())) +
                                                   " analysis, expected " +
                                                   std::string(sbd::to_string(kind)));
    }
    return *spec;
}

bool null_args(const void* a, const void* b) { return a == nullptr || b == nullptr; }

constexpr const char* kNullMessage = "null argument";

}  // namespace

extern "C" {

const char* sbd_version(void) { return "1.0.0"; }

const char* sbd_last_error(void) { return last_error.c_str(); }

size_t sbd_builtin_count(void) { return sbd::builtin_scenarios().size(); }

const char* sbd_builtin_name(size_t index) {
    const auto& registry = sbd::builtin_scenarios();
    return index < registry.size() ? registry[index].name.c_str() : nullptr;
}

sbd_status sbd_scenario_builtin(const char* name, sbd_scenario** out) {
    if (null_args(name, out)) return fail(SBD_ERR_INVALID_ARGUMENT, kNullMessage);
    return guarded([&] {
        *out = new sbd_scenario{sbd::find_builtin(name)};
        return SBD_OK;
    });
}

sbd_status sbd_scenario_parse(const char* document, sbd_scenario** out) {
    if (null_args(document, out)) return fail(SBD_ERR_INVALID_ARGUMENT, kNullMessage);
    return guarded([&] {
        *out = new sbd_scenario{sbd::load_scenario(document)};
        return SBD_OK;
    });
}

sbd_status sbd_scenario_set(sbd_scenario* scenario, const char* key, const char* value) {
    if (null_args(scenario, key) || value == nullptr) return fail(SBD_ERR_INVALID_ARGUMENT, kNullMessage);
    return guarded([&] {
        sbd::apply_setting(scenario->value, key, value);
        return SBD_OK;
    });
}

sbd_status sbd_scenario_validate(const sbd_scenario* scenario) {
    if (scenario == nullptr) return fail(SBD_ERR_INVALID_ARGUMENT, kNullMessage);
    return guarded([&] {
        scenario->value.validate();
        return SBD_OK;
    });
}

sbd_status sbd_scenario_serialize(const sbd_scenario* scenario, char* buffer, size_t capacity,
                                  size_t* length) {
    if (null_args(scenario, length)) return fail(SBD_ERR_INVALID_ARGUMENT, kNullMessage);
    return guarded([&] {
        const std::string text = sbd::serialize(scenario->value);
        *length = text.size();
        if (buffer == nullptr) return SBD_OK;
        if (capacity <= text.size()) return fail(SBD_ERR_INVALID_ARGUMENT, "buffer too small");
        std::memcpy(buffer, text.c_str(), text.size() + 1);
        return SBD_OK;
    });
}

void sbd_scenario_free(sbd_scenario* scenario) { delete scenario; }

sbd_status sbd_simulate(const sbd_scenario* scenario, sbd_table** out) {
    if (null_args(scenario, out)) return fail(SBD_ERR_INVALID_ARGUMENT, kNullMessage);
    *out = nullptr;
    return guarded([&] {
        const sbd::Scenario& s = scenario->value;
        s.validate();
        const auto& spec = require<sbd::OrbitAnalysis>(s, sbd::AnalysisKind::Orbit);
        const sbd::Orbit orbit =
            sbd::generate_orbit(s.setup.seed(), s.setup.model, spec.steps, spec.bounded, s.name);
        emit(sbd::orbit_table(orbit), out);
        if (!spec.bounded && orbit.failure) {
            return fail(SBD_ERR_NUMERICAL, "orbit left the domain at step " +
                                               std::to_string(orbit.failure->step) + " (" +
                                               std::string(sbd::to_string(orbit.failure->trigger)) + ")");
        }
        return SBD_OK;
    });
}

sbd_status sbd_bifurcate(const sbd_scenario* scenario, unsigned threads, sbd_table** out) {
    if (null_args(scenario, out)) return fail(SBD_ERR_INVALID_ARGUMENT, kNullMessage);
    *out = nullptr;
    return guarded([&] {
        const sbd::Scenario& s = scenario->value;
        s.validate();
        const auto& spec = require<sbd::BifurcationAnalysis>(s, sbd::AnalysisKind::Bifurcation);
        return emit(sbd::bifurcation_table(sbd::bifurcation_scan(spec.scan, s.setup, threads)), out);
    });
}

sbd_status sbd_lyapunov(const sbd_scenario* scenario, sbd_method method, unsigned threads,
                        sbd_table** out) {
    if (null_args(scenario, out)) return fail(SBD_ERR_INVALID_ARGUMENT, kNullMessage);
    *out = nullptr;
    if (method != SBD_METHOD_ANALYTIC && method != SBD_METHOD_FINITE_DIFFERENCE) {
        return fail(SBD_ERR_INVALID_ARGUMENT, "unknown derivative method");
    }
    return guarded([&] {
        const sbd::Scenario& s = scenario->value;
        s.validate();
        const auto& spec = require<sbd::LyapunovAnalysis>(s, sbd::AnalysisKind::Lyapunov);
        const auto m = method == SBD_METHOD_ANALYTIC ? sbd::DerivativeMethod::Analytic
                                                     : sbd::DerivativeMethod::FiniteDifference;
        return emit(sbd::lyapunov_table(sbd::lyapunov_scan(spec.scan, s.setup, m, threads)), out);
    });
}

sbd_status sbd_collapse(const sbd_scenario* scenario, sbd_table** out) {
    if (null_args(scenario, out)) return fail(SBD_ERR_INVALID_ARGUMENT, kNullMessage);
    *out = nullptr;
    return guarded([&] {
        const sbd::Scenario& s = scenario->value;
        s.validate();
        const auto& spec = require<sbd::OrbitAnalysis>(s, sbd::AnalysisKind::Orbit);
        const sbd::Orbit orbit = sbd::generate_orbit(s.setup.seed(), s.setup.model, spec.steps, true, s.name);
        return emit(sbd::collapse_table(s.name, sbd::detect_collapse(orbit), orbit.states.size() - 1), out);
    });
}

sbd_status sbd_ped(const sbd_scenario* scenario, sbd_table** out) {
    if (null_args(scenario, out)) return fail(SBD_ERR_INVALID_ARGUMENT, kNullMessage);
    *out = nullptr;
    return guarded([&] {
        const sbd::Scenario& s = scenario->value;
        s.validate();
        const auto& spec = require<sbd::PedAnalysis>(s, sbd::AnalysisKind::Ped);
        const sbd::PedResult result = sbd::ped(spec.p1, spec.p2, s.setup.model.market);
        return emit(sbd::ped_table(spec.p1, spec.p2, result), out);
    });
}

sbd_status sbd_scenarios_table(sbd_table** out) {
    if (out == nullptr) return fail(SBD_ERR_INVALID_ARGUMENT, kNullMessage);
    return guarded([&] { return emit(sbd::scenarios_table(sbd::builtin_scenarios()), out); });
}

size_t sbd_table_rows(const sbd_table* table) { return table ? table->value.rows().size() : 0; }

size_t sbd_table_columns(const sbd_table* table) { return table ? table->value.header().size() : 0; }

const char* sbd_table_column_name(const sbd_table* table, size_t column) {
    if (table == nullptr || column >= table->value.header().size()) return nullptr;
    return table->value.header()[column].c_str();
}

double sbd_table_number(const sbd_table* table, size_t row, size_t column) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    if (table == nullptr || row >= table->value.rows().size() || column >= table->value.header().size()) {
        return nan;
    }
    const sbd::Cell& cell = table->value.rows()[row][column];
    if (const auto* d = std::get_if<double>(&cell)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&cell)) return static_cast<double>(*i);
    if (const auto* b = std::get_if<bool>(&cell)) return *b ? 1.0 : 0.0;
    return nan;
}

sbd_status sbd_table_render(sbd_table* table, sbd_format format, const char** text, size_t* length) {
    if (null_args(table, text)) return fail(SBD_ERR_INVALID_ARGUMENT, kNullMessage);
    if (format != SBD_FORMAT_CSV && format != SBD_FORMAT_JSONL) {
        return fail(SBD_ERR_INVALID_ARGUMENT, "unknown table format");
    }
    return guarded([&] {
        table->rendered = table->value.render(format == SBD_FORMAT_CSV ? sbd::TableFormat::Csv
                                                                       : sbd::TableFormat::JsonLines);
        *text = table->rendered.c_str();
        if (length) *length = table->rendered.size();
        return SBD_OK;
    });
}

void sbd_table_free(sbd_table* table) { delete table; }

}  // extern "C"
