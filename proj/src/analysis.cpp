#include "sbd/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parallel.hpp"

namespace sbd {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

constexpr double kFixedPointResidual = 1e-12;
constexpr double kFixedPointWidth = 1e-13;

double residual(const RealFunction& map, double x) { return map(x) - x; }

bool close(double x, double y, double tolerance) {
    const double scale = std::max({1.0, std::abs(x), std::abs(y)});
    return std::abs(x - y) < tolerance * scale;
}

}  // namespace

// ---------------------------------------------------------------------------
// Orbits

Orbit generate_orbit(const MarketState& initial, const ModelParams& params, std::size_t steps,
                     bool bounded, std::string scenario) {
    Orbit orbit;
    orbit.scenario = std::move(scenario);
    orbit.form = params.form;
    orbit.bounded = bounded;
    orbit.states.reserve(steps + 1);
    orbit.states.push_back(initial);
    if (initial.collapsed) {
        orbit.failure = Orbit::Failure{0, Trigger::None};
        return orbit;
    }
    if (!(initial.supply > 0.0) || !std::isfinite(initial.supply) || !std::isfinite(initial.demand)) {
        throw DomainError("initial state needs a finite positive supply");
    }

    MarketState current = initial;
    for (std::size_t n = 1; n <= steps; ++n) {
        const StepResult next = bounded ? bounded_step(current, params) : step(current, params);
        orbit.states.push_back(next.state);
        if (next.state.collapsed) {
            orbit.failure = Orbit::Failure{n, next.trigger};
            break;
        }
        current = next.state;
    }
    return orbit;
}

std::optional<CollapseReport> detect_collapse(const Orbit& orbit) {
    const auto it = std::find_if(orbit.states.begin(), orbit.states.end(),
                                 [](const MarketState& s) { return s.collapsed; });
    if (it == orbit.states.end()) return std::nullopt;
    const auto index = static_cast<std::size_t>(it - orbit.states.begin());
    Trigger trigger = Trigger::None;
    if (orbit.failure && orbit.failure->step == index) trigger = orbit.failure->trigger;
    return CollapseReport{index, trigger, it->price};
}

// ---------------------------------------------------------------------------
// Fixed points and periods

double find_fixed_point(const RealFunction& map, double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("fixed point search needs lo < hi");
    double g_lo = residual(map, lo);
    const double g_hi = residual(map, hi);
    if (g_lo == 0.0) return lo;
    if (g_hi == 0.0) return hi;
    if (!std::isfinite(g_lo) || !std::isfinite(g_hi) || std::signbit(g_lo) == std::signbit(g_hi)) {
        throw NotFoundError("no sign change of map(x) - x on the search interval");
    }

    double best = std::abs(g_lo) < std::abs(g_hi) ? lo : hi;
    double best_residual = std::min(std::abs(g_lo), std::abs(g_hi));
    while (hi - lo > kFixedPointWidth) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        const double g_mid = residual(map, mid);
        if (g_mid == 0.0) return mid;
        if (std::abs(g_mid) < best_residual) {
            best = mid;
            best_residual = std::abs(g_mid);
        }
        if (std::signbit(g_mid) == std::signbit(g_lo)) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    return best;
}

std::vector<double> find_fixed_points(const RealFunction& map, double lo, double hi,
                                      std::size_t subintervals) {
    if (!(lo < hi) || subintervals == 0) {
        throw std::invalid_argument("fixed point scan needs lo < hi and subintervals > 0");
    }
    const auto safe_residual = [&](double x) {
        try {
            return residual(map, x);
        } catch (const DomainError&) {
            return kNaN;
        }
    };

    std::vector<double> roots;
    double left = lo;
    double g_left = safe_residual(left);
    for (std::size_t i = 1; i <= subintervals; ++i) {
        const double right = lo + (hi - lo) * (static_cast<double>(i) / static_cast<double>(subintervals));
        const double g_right = safe_residual(right);
        if (std::isfinite(g_left) && std::isfinite(g_right)) {
            const bool left_root = g_left == 0.0;
            const bool change = std::signbit(g_left) != std::signbit(g_right) && g_right != 0.0;
            if (left_root && (roots.empty() || roots.back() != left)) {
                roots.push_back(left);
            } else if (change && !left_root) {
                roots.push_back(find_fixed_point(map, left, right));
            }
            if (i == subintervals && g_right == 0.0) roots.push_back(right);
        }
        left = right;
        g_left = g_right;
    }
    return roots;
}

std::optional<std::size_t> detect_period(std::span<const double> tail, double tolerance,
                                         std::size_t max_period) {
    if (max_period == 0 || tail.size() < 2 * max_period) {
        throw std::invalid_argument("period detection needs a tail of at least twice the maximum period");
    }
    for (std::size_t k = 1; k <= max_period; ++k) {
        bool periodic = true;
        for (std::size_t i = 0; i + k < tail.size() && periodic; ++i) {
            periodic = close(tail[i], tail[i + k], tolerance);
        }
        if (periodic) return k;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Lyapunov exponents

std::string_view to_string(DerivativeMethod method) {
    return method == DerivativeMethod::Analytic ? "analytic" : "finite-difference";
}

double lyapunov_exponent(const ScalarMap& map, double x0, std::size_t transient,
                         std::size_t samples, DerivativeMethod method) {
    if (samples == 0) throw std::invalid_argument("lyapunov exponent needs at least one sample");

    double x = x0;
    std::size_t step = 0;
    const auto guarded = [&](const RealFunction& f, double at) {
        double y = kNaN;
        try {
            y = f(at);
        } catch (const DomainError& e) {
            throw EscapeError(step, e.what());
        }
        if (!std::isfinite(y)) throw EscapeError(step, "orbit overflowed");
        return y;
    };
    const auto slope = [&](double at) {
        if (method == DerivativeMethod::Analytic) return guarded(map.derivative, at);
        const double h = 1e-8 * std::max(1.0, std::abs(at));
        return (guarded(map.value, at + h) - guarded(map.value, at - h)) / (2.0 * h);
    };

    for (; step < transient; ++step) x = guarded(map.value, x);

    double sum = 0.0;
    for (std::size_t i = 0; i < samples; ++i, ++step) {
        sum += std::log(std::abs(slope(x)));
        x = guarded(map.value, x);
    }
    return sum / static_cast<double>(samples);
}

ScalarMap reduced_map(const ModelParams& params) {
    if (params.behavior.naive()) {
        return {[params](double d) { return step_naive_demand_1d(d, params); },
                [params](double d) { return derivative_naive_1d(d, params); }};
    }
    return {[params](double s) { return step_supply_1d(s, params); },
            [params](double s) { return derivative_supply_1d(s, params); }};
}

double reduced_seed(const Setup& setup) {
    if (setup.model.behavior.naive()) return setup.seed_demand;
    const StepResult first = step(setup.seed(), setup.model);
    if (first.failed()) throw EscapeError(0, "seed leaves the domain on the first step");
    return first.state.supply;
}

double setup_lyapunov(const Setup& setup, std::size_t transient, std::size_t samples,
                      DerivativeMethod method) {
    return lyapunov_exponent(reduced_map(setup.model), reduced_seed(setup), transient, samples,
                             method);
}

// ---------------------------------------------------------------------------
// Parameter scans

std::string_view to_string(ScanParameter parameter) {
    switch (parameter) {
        case ScanParameter::B: return "b";
        case ScanParameter::Margin: return "margin";
        case ScanParameter::A: return "a";
    }
    return "unknown";
}

ScanParameter parse_scan_parameter(std::string_view text) {
    if (text == "b") return ScanParameter::B;
    if (text == "margin" || text == "M") return ScanParameter::Margin;
    if (text == "a") return ScanParameter::A;
    throw ValidationError("param", "unknown scan parameter '" + std::string(text) +
                                       "' (expected b, margin or a)");
}

void ScanConfig::validate() const {
    if (!std::isfinite(lo)) throw ValidationError("min", "must be set and finite");
    if (!std::isfinite(hi)) throw ValidationError("max", "must be set and finite");
    if (!(lo < hi)) throw ValidationError("min", "must be below max");
    if (lo < 0.0) throw ValidationError("min", "scanned parameter must stay >= 0");
    if (parameter == ScanParameter::Margin && !(hi < 1.0)) {
        throw ValidationError("max", "margin scans must stay below 1");
    }
    if (grid_points == 0) throw ValidationError("points", "must be positive");
    if (keep == 0) throw ValidationError("keep", "must be positive");
    if (iterations_total < transient || keep > iterations_total - transient) {
        throw ValidationError("iters", "must be at least transient + keep");
    }
}

double ScanConfig::grid_value(std::size_t index) const {
    if (grid_points <= 1) return lo;
    return lo + (hi - lo) * (static_cast<double>(index) / static_cast<double>(grid_points - 1));
}

Setup with_parameter(Setup setup, ScanParameter parameter, double value) {
    switch (parameter) {
        case ScanParameter::B: setup.model.market.b = value; break;
        case ScanParameter::Margin: setup.model.cost.margin = value; break;
        case ScanParameter::A: setup.model.market.a = value; break;
    }
    return setup;
}

std::string Classification::label() const {
    switch (behavior) {
        case Behavior::FixedPoint: return "fixed-point";
        case Behavior::Periodic: return "periodic(" + std::to_string(period) + ")";
        case Behavior::Chaotic: return "chaotic";
        case Behavior::Unresolved: return "unresolved";
        case Behavior::Collapsed: return "collapsed";
    }
    return "unknown";
}

BifurcationRow classify_setup(const Setup& setup, std::size_t transient, std::size_t keep) {
    BifurcationRow row;
    row.lambda = kNaN;

    MarketState state = setup.seed();
    const auto collapsed = [&row] {
        row.samples.assign(1, 0.0);
        row.classification = {Behavior::Collapsed, 0};
        return row;
    };
    for (std::size_t t = 0; t < transient; ++t) {
        state = bounded_step(state, setup.model).state;
        if (state.collapsed) return collapsed();
    }
    row.samples.reserve(keep);
    for (std::size_t k = 0; k < keep; ++k) {
        state = bounded_step(state, setup.model).state;
        if (state.collapsed) return collapsed();
        row.samples.push_back(state.demand);
    }

    const std::size_t max_period = std::min(kMaxPeriod, keep / 2);
    if (max_period > 0) {
        if (const auto period = detect_period(row.samples, kPeriodTolerance, max_period)) {
            row.classification = {*period == 1 ? Behavior::FixedPoint : Behavior::Periodic, *period};
            return row;
        }
    }

    try {
        row.lambda = setup_lyapunov(setup);
    } catch (const EscapeError&) {
        row.lambda = kNaN;
    }
    row.classification = {row.lambda > 0.0 ? Behavior::Chaotic : Behavior::Unresolved, 0};
    return row;
}

std::vector<BifurcationRow> bifurcation_scan(const ScanConfig& config, const Setup& setup,
                                             unsigned threads) {
    config.validate();
    std::vector<BifurcationRow> rows(config.grid_points);
    detail::parallel_for(rows.size(), threads, [&](std::size_t i) {
        const double value = config.grid_value(i);
        const Setup point = with_parameter(setup, config.parameter, value);
        point.model.validate();
        rows[i] = classify_setup(point, config.transient, config.keep);
        rows[i].param_value = value;
    });
    return rows;
}

std::vector<LyapunovRow> lyapunov_scan(const ScanConfig& config, const Setup& setup,
                                       DerivativeMethod method, unsigned threads) {
    config.validate();
    std::vector<LyapunovRow> rows(config.grid_points);
    detail::parallel_for(rows.size(), threads, [&](std::size_t i) {
        const double value = config.grid_value(i);
        const Setup point = with_parameter(setup, config.parameter, value);
        point.model.validate();
        LyapunovRow row{value, kNaN, method, false};
        try {
            row.lambda = setup_lyapunov(point, config.transient, config.keep, method);
            row.defined = !std::isnan(row.lambda);
        } catch (const EscapeError&) {
            row.lambda = kNaN;
        }
        rows[i] = row;
    });
    return rows;
}

// ---------------------------------------------------------------------------
// Price elasticity of demand

PedResult ped(double p1, double p2, const MarketParams& market) {
    if (p1 == p2) throw DomainError("elasticity undefined: the two prices are equal");
    PedResult result;
    result.q1 = demand(p1, market);
    result.q2 = demand(p2, market);
    if (market.b == 0.0) {
        result.value = kNaN;
        result.perfectly_elastic = true;
        return result;
    }
    if (p1 == 0.0) throw DomainError("elasticity undefined: zero baseline price");
    if (result.q1 == 0.0) throw DomainError("elasticity undefined: zero baseline quantity");
    result.value = ((result.q2 - result.q1) / result.q1) / ((p2 - p1) / p1);
    return result;
}

}  // namespace sbd
