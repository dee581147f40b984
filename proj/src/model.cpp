#include "sbd/model.hpp"

#include <cmath>
#include <optional>

namespace sbd {

namespace {

bool is_odd_integer(double m) {
    return std::floor(m) == m && std::fmod(m, 2.0) != 0.0;
}

// m-th root of the signal of success. Negative signals only have a real
// root for odd integer m.
std::optional<double> signal_root(double signal, double m) {
    if (m == 1.0) return signal;
    if (signal >= 0.0) return std::pow(signal, 1.0 / m);
    if (is_odd_integer(m)) return -std::pow(-signal, 1.0 / m);
    return std::nullopt;
}

double margin_factor(const CostPricing& cost) { return 1.0 - cost.margin; }

StepResult raw_failure(const MarketState& state, Trigger trigger) {
    MarketState out = state;
    out.collapsed = true;
    return {out, trigger};
}

StepResult collapse(double frozen_price, Trigger trigger) {
    return {MarketState{0.0, 0.0, frozen_price, true}, trigger};
}

struct ExpectedSupply {
    double value = 0.0;
    Trigger trigger = Trigger::None;
};

ExpectedSupply next_supply(const MarketState& state, const SupplierBehavior& behavior) {
    if (!(state.supply > 0.0) || !std::isfinite(state.supply) || !std::isfinite(state.demand)) {
        throw DomainError("step requires a finite positive supply");
    }
    double next = state.demand;
    if (!behavior.naive()) {
        const auto root = signal_root(state.demand / state.supply, behavior.m);
        if (!root) return {0.0, Trigger::UndefinedRoot};
        next = *root * state.supply;
    }
    if (!std::isfinite(next)) return {next, Trigger::NonFinite};
    if (next <= 0.0) return {next, Trigger::NonPositiveExpected};
    return {next, Trigger::None};
}

}  // namespace

void MarketParams::validate() const {
    if (!(a >= 0.0) || !std::isfinite(a)) throw ValidationError("a", "must be finite and >= 0");
    if (!(b >= 0.0) || !std::isfinite(b)) throw ValidationError("b", "must be finite and >= 0");
}

void CostPricing::validate() const {
    if (!(fixed_cost > 0.0) || !std::isfinite(fixed_cost)) {
        throw ValidationError("fc", "must be finite and > 0");
    }
    if (!(variable_cost > 0.0) || !std::isfinite(variable_cost)) {
        throw ValidationError("v", "must be finite and > 0");
    }
    if (!(margin >= 0.0 && margin < 1.0)) throw ValidationError("margin", "must satisfy 0 <= M < 1");
}

void SupplierBehavior::validate() const {
    if (!(m > 0.0) || !std::isfinite(m)) throw ValidationError("m", "must be finite and > 0");
}

void ModelParams::validate() const {
    market.validate();
    cost.validate();
    behavior.validate();
}

std::string_view to_string(MapForm form) {
    return form == MapForm::Canonical ? "canonical" : "paper-literal";
}

MapForm parse_map_form(std::string_view text) {
    if (text == "canonical") return MapForm::Canonical;
    if (text == "paper-literal") return MapForm::PaperLiteral;
    throw std::invalid_argument("unknown map form '" + std::string(text) +
                                "' (expected canonical or paper-literal)");
}

std::string_view to_string(Regime regime) {
    switch (regime) {
        case Regime::NoMarket: return "no-market";
        case Regime::Oversupply: return "oversupply";
        case Regime::Balanced: return "balanced";
        case Regime::StockRupture: return "stock-rupture";
    }
    return "unknown";
}

std::string_view to_string(Trigger trigger) {
    switch (trigger) {
        case Trigger::None: return "none";
        case Trigger::NegativeDemandClamp: return "negative-demand-clamp";
        case Trigger::NonPositiveExpected: return "non-positive-expected-demand";
        case Trigger::SupplyFloor: return "supply-floor";
        case Trigger::NonFinite: return "non-finite";
        case Trigger::UndefinedRoot: return "undefined-root";
    }
    return "unknown";
}

double atc(double q, const CostPricing& cost) {
    if (!(q > 0.0)) throw DomainError("average total cost needs a positive quantity");
    return cost.fixed_cost / q + cost.variable_cost - cost.variable_cost * q + q * q;
}

double atc_derivative(double q, const CostPricing& cost) {
    if (!(q > 0.0)) throw DomainError("average total cost needs a positive quantity");
    return -cost.fixed_cost / (q * q) - cost.variable_cost + 2.0 * q;
}

double price(double q, const CostPricing& cost) { return atc(q, cost) / margin_factor(cost); }

double demand(double p, const MarketParams& market) { return market.a - market.b * p; }

Signal signal_of_success(double d, double s) {
    if (!(s > 0.0)) throw DomainError("signal of success needs a positive supply");
    if (d < 0.0) throw DomainError("signal of success needs a non-negative demand");
    const double value = d / s;
    Regime regime = Regime::Balanced;
    if (value == 0.0) {
        regime = Regime::NoMarket;
    } else if (value < 1.0) {
        regime = Regime::Oversupply;
    } else if (value > 1.0) {
        regime = Regime::StockRupture;
    }
    return {value, regime};
}

double expected_demand(double d, double s, const SupplierBehavior& behavior) {
    if (!(s > 0.0)) throw DomainError("expected demand needs a positive supply");
    if (d < 0.0) throw DomainError("expected demand needs a non-negative demand");
    if (behavior.naive()) return d;
    return std::pow(d / s, 1.0 / behavior.m) * s;
}

double demand_for_supply(double s, const ModelParams& params) {
    if (params.form == MapForm::Canonical) {
        return demand(price(s, params.cost), params.market);
    }
    return (params.market.a - params.market.b * atc(s, params.cost)) / margin_factor(params.cost);
}

MarketState seed_state(double demand, double supply, const CostPricing& cost) {
    return {demand, supply, supply > 0.0 ? price(supply, cost) : 0.0, false};
}

StepResult step(const MarketState& state, const ModelParams& params) {
    if (state.collapsed) return {state, Trigger::None};

    const auto supply = next_supply(state, params.behavior);
    if (supply.trigger != Trigger::None) return raw_failure(state, supply.trigger);

    const double p = price(supply.value, params.cost);
    const double d = demand_for_supply(supply.value, params);
    if (!std::isfinite(p) || !std::isfinite(d)) return raw_failure(state, Trigger::NonFinite);
    return {MarketState{d, supply.value, p, false}, Trigger::None};
}

StepResult bounded_step(const MarketState& state, const ModelParams& params) {
    if (state.collapsed) return {state, Trigger::None};

    ExpectedSupply supply;
    try {
        supply = next_supply(state, params.behavior);
    } catch (const DomainError&) {
        return collapse(state.price, Trigger::SupplyFloor);
    }
    if (supply.trigger != Trigger::None) return collapse(state.price, supply.trigger);
    if (supply.value < kSupplyFloor) return collapse(state.price, Trigger::SupplyFloor);

    const double p = price(supply.value, params.cost);
    if (!std::isfinite(p)) return collapse(state.price, Trigger::NonFinite);

    // Demand is clamped at zero once the price exceeds the zero-demand price;
    // with nothing demanded the supplier expects nothing and stops producing.
    bool clamped = false;
    double d = 0.0;
    if (params.form == MapForm::Canonical) {
        clamped = p * params.market.b > params.market.a;
        if (!clamped) d = demand(p, params.market);
    } else {
        d = demand_for_supply(supply.value, params);
        clamped = d < 0.0;
    }
    if (clamped) return collapse(p, Trigger::NegativeDemandClamp);
    if (!std::isfinite(d)) return collapse(state.price, Trigger::NonFinite);
    if (d <= 0.0) return collapse(p, Trigger::NonPositiveExpected);
    return {MarketState{d, supply.value, p, false}, Trigger::None};
}

double step_naive_demand_1d(double d, const ModelParams& params) {
    if (!(d > 0.0)) throw DomainError("naive demand map needs a positive demand");
    const double m = margin_factor(params.cost);
    if (params.form == MapForm::Canonical) {
        return params.market.a - (params.market.b / m) * atc(d, params.cost);
    }
    return (params.market.a - params.market.b * atc(d, params.cost)) / m;
}

double derivative_naive_1d(double d, const ModelParams& params) {
    if (!(d > 0.0)) throw DomainError("naive demand map needs a positive demand");
    // Both forms share the slope; they differ only by a constant offset.
    return -(params.market.b / margin_factor(params.cost)) * atc_derivative(d, params.cost);
}

double step_naive_price_1d(double p, const MarketParams& market, const CostPricing& cost) {
    const double q = demand(p, market);
    if (!(q > 0.0)) throw DomainError("price map needs a positive quantity a - bP");
    return price(q, cost);
}

double step_supply_1d(double s, const ModelParams& params) {
    if (!(s > 0.0)) throw DomainError("supply map needs a positive supply");
    const double d = demand_for_supply(s, params);
    if (params.behavior.naive()) return d;
    const auto root = signal_root(d / s, params.behavior.m);
    if (!root) throw DomainError("supply map: root of a negative signal");
    return *root * s;
}

double derivative_supply_1d(double s, const ModelParams& params) {
    if (!(s > 0.0)) throw DomainError("supply map needs a positive supply");
    const double slope =
        -(params.market.b / margin_factor(params.cost)) * atc_derivative(s, params.cost);
    if (params.behavior.naive()) return slope;
    const double d = demand_for_supply(s, params);
    if (!(d > 0.0)) throw DomainError("supply map derivative needs positive demand");
    const double m = params.behavior.m;
    const double g = std::pow(d / s, 1.0 / m) * s;
    return g * (slope / (m * d) + (1.0 - 1.0 / m) / s);
}

}  // namespace sbd
