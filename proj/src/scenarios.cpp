#include "sbd/scenarios.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>

namespace sbd {

namespace {

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

ModelParams naive_params() {
    return {MarketParams{10.0, 0.09}, CostPricing{10.0, 4.0, 0.5}, SupplierBehavior{1.0},
            MapForm::Canonical};
}

ModelParams cautious_params() {
    return {MarketParams{30.0, 0.125}, CostPricing{30.0, 6.0, 0.5}, SupplierBehavior{2.0},
            MapForm::Canonical};
}

ModelParams collapse_params(double m) {
    return {MarketParams{10.0, 0.095}, CostPricing{20.0, 2.0, 0.5}, SupplierBehavior{m},
            MapForm::Canonical};
}

ScanConfig bifurcation_defaults() { return ScanConfig{ScanParameter::B, kUnset, kUnset, 1000, 2500, 500, 3000}; }

ScanConfig lyapunov_defaults() {
    return ScanConfig{ScanParameter::B, kUnset, kUnset, 1000, kLyapunovTransient, kLyapunovSamples,
                      kLyapunovTransient + kLyapunovSamples};
}

AnalysisSpec default_analysis(AnalysisKind kind) {
    switch (kind) {
        case AnalysisKind::Orbit: return OrbitAnalysis{};
        case AnalysisKind::Bifurcation: return BifurcationAnalysis{bifurcation_defaults()};
        case AnalysisKind::Lyapunov: return LyapunovAnalysis{lyapunov_defaults()};
        case AnalysisKind::Ped: return PedAnalysis{kUnset, kUnset};
    }
    return OrbitAnalysis{};
}

Scenario make(std::string name, ModelParams model, AnalysisSpec analysis, std::string figure = {}) {
    Scenario s;
    s.name = std::move(name);
    s.setup.model = model;
    s.analysis = std::move(analysis);
    s.figure = std::move(figure);
    return s;
}

ModelParams with_b(ModelParams params, double b) {
    params.market.b = b;
    return params;
}

ScanConfig scan(ScanParameter parameter, double lo, double hi, std::size_t points, ScanConfig base) {
    base.parameter = parameter;
    base.lo = lo;
    base.hi = hi;
    base.grid_points = points;
    return base;
}

std::vector<Scenario> build_registry() {
    const auto orbit = [](std::size_t steps, bool bounded) { return OrbitAnalysis{steps, bounded}; };
    const auto bif = [](ScanParameter p, double lo, double hi, std::size_t n) {
        return BifurcationAnalysis{scan(p, lo, hi, n, bifurcation_defaults())};
    };
    const auto lyap = [](ScanParameter p, double lo, double hi, std::size_t n) {
        return LyapunovAnalysis{scan(p, lo, hi, n, lyapunov_defaults())};
    };
    using P = ScanParameter;

    const std::vector<Scenario> canonical = {
        make("naive-ts", naive_params(), orbit(20, false), "fig3"),
        make("naive-bif-b", naive_params(), bif(P::B, 0.0418, 0.0918, 10000), "fig4"),
        make("naive-lyap", naive_params(), lyap(P::B, 0.08, 0.092, 100000), "fig5"),
        make("naive-bif-M", with_b(naive_params(), 0.03), bif(P::Margin, 0.6765, 0.8365, 20000), "fig6"),
        make("co-ts", cautious_params(), orbit(30, false), "fig7"),
        make("co-bif-b", cautious_params(), bif(P::B, 0.064, 0.134, 10000), "fig8"),
        make("co-lyap", cautious_params(), lyap(P::B, 0.1, 0.134, 80000), "fig9"),
        make("elastic-b0", with_b(cautious_params(), 0.0), orbit(20, false), "fig10"),
        make("collapse", collapse_params(1.0), orbit(200, true), "fig11"),
        make("collapse-m2", collapse_params(2.0), orbit(200, true)),
        make("naive-equilibrium", with_b(naive_params(), 0.03), orbit(3000, true), "fig4"),
        make("naive-period10", with_b(naive_params(), 0.0843999995), orbit(3000, true), "fig4"),
        make("naive-period6", with_b(naive_params(), 0.08531), orbit(3000, true), "fig4"),
        make("naive-period6-as-printed", with_b(naive_params(), 0.8531), orbit(3000, true)),
        make("co-period3", with_b(cautious_params(), 0.1308), orbit(3000, true), "fig8"),
        make("co-explode", with_b(cautious_params(), 0.14), orbit(3000, true), "fig8"),
        make("co-edge-stable", with_b(cautious_params(), 0.12), orbit(3000, true), "fig8"),
        make("ped-example", naive_params(), PedAnalysis{10.0, 11.0}),
        make("ped-elastic", with_b(naive_params(), 0.0), PedAnalysis{5.0, 6.0}, "fig10"),
    };

    std::vector<Scenario> registry;
    registry.reserve(2 * canonical.size());
    for (const Scenario& s : canonical) {
        registry.push_back(s);
        Scenario literal = s;
        literal.name += "-literal";
        literal.setup.model.form = MapForm::PaperLiteral;
        literal.figure.clear();
        registry.push_back(std::move(literal));
    }
    return registry;
}

std::string_view trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(" \t\r");
    return text.substr(first, last - first + 1);
}

double parse_real(std::string_view key, std::string_view value) {
    double out = 0.0;
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end || value.empty()) {
        throw ValidationError(std::string(key), "not a number: '" + std::string(value) + "'");
    }
    return out;
}

std::size_t parse_count(std::string_view key, std::string_view value) {
    std::size_t out = 0;
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end || value.empty()) {
        throw ValidationError(std::string(key), "not a non-negative integer: '" + std::string(value) + "'");
    }
    return out;
}

bool parse_flag(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ValidationError(std::string(key), "expected true or false, got '" + std::string(value) + "'");
}

std::string format_real(double value) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, ptr);
}

ScanConfig* scan_of(Scenario& s) {
    if (auto* b = std::get_if<BifurcationAnalysis>(&s.analysis)) return &b->scan;
    if (auto* l = std::get_if<LyapunovAnalysis>(&s.analysis)) return &l->scan;
    return nullptr;
}

const ScanConfig* scan_of(const Scenario& s) { return scan_of(const_cast<Scenario&>(s)); }

bool is_orbit_key(std::string_view key) { return key == "steps" || key == "bounded"; }
bool is_ped_key(std::string_view key) { return key == "p1" || key == "p2"; }
bool is_scan_key(std::string_view key) {
    return key == "param" || key == "min" || key == "max" || key == "points" || key == "transient" ||
           key == "keep" || key == "iters";
}

}  // namespace

std::string_view to_string(AnalysisKind kind) {
    switch (kind) {
        case AnalysisKind::Orbit: return "orbit";
        case AnalysisKind::Bifurcation: return "bifurcation";
        case AnalysisKind::Lyapunov: return "lyapunov";
        case AnalysisKind::Ped: return "ped";
    }
    return "unknown";
}

AnalysisKind parse_analysis_kind(std::string_view text) {
    if (text == "orbit") return AnalysisKind::Orbit;
    if (text == "bifurcation") return AnalysisKind::Bifurcation;
    if (text == "lyapunov") return AnalysisKind::Lyapunov;
    if (text == "ped") return AnalysisKind::Ped;
    throw ValidationError("analysis", "unknown analysis '" + std::string(text) +
                                          "' (expected orbit, bifurcation, lyapunov or ped)");
}

void Scenario::validate() const {
    if (name.empty()) throw ValidationError("name", "must not be empty");
    if (name.find_first_of("\n#=") != std::string::npos) {
        throw ValidationError("name", "must not contain newlines, '#' or '='");
    }
    setup.model.validate();
    if (!(setup.seed_demand >= 0.0) || !std::isfinite(setup.seed_demand)) {
        throw ValidationError("seed_d", "must be finite and >= 0");
    }
    if (!(setup.seed_supply > 0.0) || !std::isfinite(setup.seed_supply)) {
        throw ValidationError("seed_s", "must be finite and > 0");
    }
    if (const auto* s = scan_of(*this)) s->validate();
    if (const auto* p = std::get_if<PedAnalysis>(&analysis)) {
        if (!std::isfinite(p->p1)) throw ValidationError("p1", "must be set and finite");
        if (!std::isfinite(p->p2)) throw ValidationError("p2", "must be set and finite");
    }
}

const std::vector<Scenario>& builtin_scenarios() {
    static const std::vector<Scenario> registry = build_registry();
    return registry;
}

const Scenario& find_builtin(std::string_view name) {
    const auto& registry = builtin_scenarios();
    const auto it = std::find_if(registry.begin(), registry.end(),
                                 [&](const Scenario& s) { return s.name == name; });
    if (it == registry.end()) throw NotFoundError("unknown scenario '" + std::string(name) + "'");
    return *it;
}

void retarget(Scenario& scenario, AnalysisKind kind) {
    if (scenario.kind() == kind) return;
    AnalysisSpec next = default_analysis(kind);
    if (const ScanConfig* old = scan_of(scenario)) {
        Scenario probe;
        probe.analysis = next;
        if (ScanConfig* fresh = scan_of(probe)) {
            fresh->parameter = old->parameter;
            fresh->lo = old->lo;
            fresh->hi = old->hi;
            fresh->grid_points = old->grid_points;
            next = probe.analysis;
        }
    }
    scenario.analysis = std::move(next);
}

void apply_setting(Scenario& s, std::string_view key, std::string_view value) {
    const std::string k(key);
    auto& model = s.setup.model;
    if (key == "name") {
        s.name = std::string(value);
    } else if (key == "figure") {
        s.figure = std::string(value);
    } else if (key == "m") {
        model.behavior.m = parse_real(key, value);
    } else if (key == "a") {
        model.market.a = parse_real(key, value);
    } else if (key == "b") {
        model.market.b = parse_real(key, value);
    } else if (key == "v") {
        model.cost.variable_cost = parse_real(key, value);
    } else if (key == "fc") {
        model.cost.fixed_cost = parse_real(key, value);
    } else if (key == "margin") {
        model.cost.margin = parse_real(key, value);
    } else if (key == "seed_d") {
        s.setup.seed_demand = parse_real(key, value);
    } else if (key == "seed_s") {
        s.setup.seed_supply = parse_real(key, value);
    } else if (key == "form") {
        try {
            model.form = parse_map_form(value);
        } catch (const std::invalid_argument& e) {
            throw ValidationError("form", e.what());
        }
    } else if (key == "analysis") {
        retarget(s, parse_analysis_kind(value));
    } else if (is_orbit_key(key)) {
        auto* orbit = std::get_if<OrbitAnalysis>(&s.analysis);
        if (!orbit) throw ValidationError(k, "only applies to orbit analyses");
        if (key == "steps") {
            orbit->steps = parse_count(key, value);
        } else {
            orbit->bounded = parse_flag(key, value);
        }
    } else if (is_ped_key(key)) {
        auto* p = std::get_if<PedAnalysis>(&s.analysis);
        if (!p) throw ValidationError(k, "only applies to ped analyses");
        (key == "p1" ? p->p1 : p->p2) = parse_real(key, value);
    } else if (is_scan_key(key)) {
        ScanConfig* c = scan_of(s);
        if (!c) throw ValidationError(k, "only applies to bifurcation and lyapunov analyses");
        if (key == "param") {
            c->parameter = parse_scan_parameter(value);
        } else if (key == "min") {
            c->lo = parse_real(key, value);
        } else if (key == "max") {
            c->hi = parse_real(key, value);
        } else if (key == "points") {
            c->grid_points = parse_count(key, value);
        } else if (key == "transient") {
            c->transient = parse_count(key, value);
        } else if (key == "keep") {
            c->keep = parse_count(key, value);
        } else {
            c->iterations_total = parse_count(key, value);
        }
    } else {
        throw ValidationError(k, "unknown key");
    }
}

Scenario load_scenario(std::string_view document) {
    std::vector<std::pair<std::string, std::string>> entries;
    std::map<std::string, std::size_t, std::less<>> seen;

    std::size_t line_number = 0;
    while (!document.empty()) {
        ++line_number;
        const auto newline = document.find('\n');
        std::string_view line = document.substr(0, newline);
        document = newline == std::string_view::npos ? std::string_view{} : document.substr(newline + 1);

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ValidationError("line " + std::to_string(line_number), "expected key = value");
        }
        std::string key(trim(line.substr(0, eq)));
        std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) throw ValidationError("line " + std::to_string(line_number), "empty key");
        if (seen.contains(key)) throw ValidationError(key, "appears more than once");
        seen.emplace(key, line_number);
        entries.emplace_back(std::move(key), std::move(value));
    }

    Scenario scenario;
    scenario.setup.model = naive_params();

    // The analysis kind decides which keys are legal, so resolve it first.
    AnalysisKind kind = AnalysisKind::Orbit;
    bool explicit_kind = false;
    for (const auto& [key, value] : entries) {
        if (key == "analysis") {
            kind = parse_analysis_kind(value);
            explicit_kind = true;
        }
    }
    if (!explicit_kind) {
        for (const auto& [key, value] : entries) {
            if (is_scan_key(key)) kind = AnalysisKind::Bifurcation;
            if (is_ped_key(key) && kind == AnalysisKind::Orbit) kind = AnalysisKind::Ped;
        }
    }
    retarget(scenario, kind);

    bool iters_given = false;
    for (const auto& [key, value] : entries) {
        if (key == "analysis") continue;
        apply_setting(scenario, key, value);
        iters_given = iters_given || key == "iters";
    }
    if (ScanConfig* c = scan_of(scenario); c && !iters_given) {
        c->iterations_total = c->transient + c->keep;
    }
    scenario.validate();
    return scenario;
}

std::string serialize(const Scenario& s) {
    const auto& model = s.setup.model;
    std::string out;
    const auto line = [&out](std::string_view key, const std::string& value) {
        out.append(key).append(" = ").append(value).push_back('\n');
    };
    line("name", s.name);
    if (!s.figure.empty()) line("figure", s.figure);
    line("analysis", std::string(to_string(s.kind())));
    line("form", std::string(to_string(model.form)));
    line("m", format_real(model.behavior.m));
    line("a", format_real(model.market.a));
    line("b", format_real(model.market.b));
    line("v", format_real(model.cost.variable_cost));
    line("fc", format_real(model.cost.fixed_cost));
    line("margin", format_real(model.cost.margin));
    line("seed_d", format_real(s.setup.seed_demand));
    line("seed_s", format_real(s.setup.seed_supply));

    if (const auto* o = std::get_if<OrbitAnalysis>(&s.analysis)) {
        line("steps", std::to_string(o->steps));
        line("bounded", o->bounded ? "true" : "false");
    } else if (const auto* p = std::get_if<PedAnalysis>(&s.analysis)) {
        line("p1", format_real(p->p1));
        line("p2", format_real(p->p2));
    } else if (const ScanConfig* c = scan_of(s)) {
        line("param", std::string(to_string(c->parameter)));
        line("min", format_real(c->lo));
        line("max", format_real(c->hi));
        line("points", std::to_string(c->grid_points));
        line("transient", std::to_string(c->transient));
        line("keep", std::to_string(c->keep));
        line("iters", std::to_string(c->iterations_total));
    }
    return out;
}

}  // namespace sbd
