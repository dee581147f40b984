#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sbd/analysis.hpp"

namespace sbd {

struct OrbitAnalysis {
    std::size_t steps = 100;
    bool bounded = false;

    friend bool operator==(const OrbitAnalysis&, const OrbitAnalysis&) = default;
};

struct BifurcationAnalysis {
    ScanConfig scan;

    friend bool operator==(const BifurcationAnalysis&, const BifurcationAnalysis&) = default;
};

struct LyapunovAnalysis {
    ScanConfig scan;

    friend bool operator==(const LyapunovAnalysis&, const LyapunovAnalysis&) = default;
};

struct PedAnalysis {
    double p1 = 0.0;
    double p2 = 0.0;

    friend bool operator==(const PedAnalysis&, const PedAnalysis&) = default;
};

using AnalysisSpec = std::variant<OrbitAnalysis, BifurcationAnalysis, LyapunovAnalysis, PedAnalysis>;

enum class AnalysisKind { Orbit, Bifurcation, Lyapunov, Ped };

std::string_view to_string(AnalysisKind kind);
AnalysisKind parse_analysis_kind(std::string_view text);

struct Scenario {
    std::string name = "custom";
    Setup setup;
    AnalysisSpec analysis = OrbitAnalysis{};
    /// Figure reproduced by this variant; empty for variants that do not match.
    std::string figure;

    AnalysisKind kind() const { return static_cast<AnalysisKind>(analysis.index()); }
    void validate() const;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Immutable registry of the figure and experiment parameterizations.
/// Every entry exists as `<name>` (canonical form) and `<name>-literal`.
const std::vector<Scenario>& builtin_scenarios();

/// Throws NotFoundError for unknown names.
const Scenario& find_builtin(std::string_view name);

/// Switches the analysis kind. Scan settings (parameter, interval, grid) carry
/// over between bifurcation and lyapunov; everything else resets to defaults.
void retarget(Scenario& scenario, AnalysisKind kind);

/// Applies one `key = value` setting. Throws ValidationError naming the key
/// when the key is unknown, does not apply to the current analysis, or the
/// value does not parse. Range checks happen in Scenario::validate.
void apply_setting(Scenario& scenario, std::string_view key, std::string_view value);

/// Parses a flat `key = value` document (one key per line, `#` comments).
/// Unspecified model fields default to the naive-supplier parameter set with
/// seeds (1, 1) and the canonical form.
Scenario load_scenario(std::string_view document);

/// Writes every field; load_scenario(serialize(s)) == s bit for bit.
std::string serialize(const Scenario& scenario);

}  // namespace sbd
