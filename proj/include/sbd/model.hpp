#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace sbd {

/// Thrown when a map is evaluated outside its economic domain
/// (non-positive quantity, zero supply, undefined root).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A parameter or configuration value is out of range. Carries the field name.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Linear demand curve D = a - b P.
struct MarketParams {
    double a = 0.0;  // quantity demanded at zero price
    double b = 0.0;  // goods lost per unit of price

    void validate() const;

    friend bool operator==(const MarketParams&, const MarketParams&) = default;
};

/// Average-total-cost pricing with a gross margin.
struct CostPricing {
    double fixed_cost = 1.0;
    double variable_cost = 1.0;
    double margin = 0.0;  // 0 <= margin < 1

    void validate() const;

    friend bool operator==(const CostPricing&, const CostPricing&) = default;
};

/// Root exponent applied to the signal of success. m == 1 is the naive supplier.
struct SupplierBehavior {
    double m = 1.0;

    void validate() const;

    friend bool operator==(const SupplierBehavior&, const SupplierBehavior&) = default;
    bool naive() const { return m == 1.0; }
};

struct MarketState {
    double demand = 1.0;
    double supply = 1.0;
    double price = 0.0;
    bool collapsed = false;

    friend bool operator==(const MarketState&, const MarketState&) = default;
};

/// Canonical composes demand, expected demand and margin pricing directly.
/// PaperLiteral applies the 1/(1-M) factor to the whole demand expression,
/// which is how the simplified closed-form maps are printed.
enum class MapForm { Canonical, PaperLiteral };

std::string_view to_string(MapForm form);
MapForm parse_map_form(std::string_view text);  // throws std::invalid_argument

/// Everything a single step needs besides the state.
struct ModelParams {
    MarketParams market;
    CostPricing cost;
    SupplierBehavior behavior;
    MapForm form = MapForm::Canonical;

    void validate() const;

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

enum class Regime { NoMarket, Oversupply, Balanced, StockRupture };

std::string_view to_string(Regime regime);

struct Signal {
    double value;
    Regime regime;
};

/// Reasons a step can leave the meaningful domain.
enum class Trigger {
    None,
    NegativeDemandClamp,   // b P > a, demand clamped to zero
    NonPositiveExpected,   // expected demand <= 0, production stops
    SupplyFloor,           // expected demand below kSupplyFloor
    NonFinite,             // overflow or NaN in an intermediate
    UndefinedRoot,         // root of a negative signal
};

std::string_view to_string(Trigger trigger);

struct StepResult {
    MarketState state;
    Trigger trigger = Trigger::None;

    bool failed() const { return trigger != Trigger::None; }
};

/// Supplies below this are treated as zero by bounded_step.
inline constexpr double kSupplyFloor = 1e-9;

double atc(double q, const CostPricing& cost);
double atc_derivative(double q, const CostPricing& cost);
double price(double q, const CostPricing& cost);
double demand(double p, const MarketParams& market);
Signal signal_of_success(double d, double s);
double expected_demand(double d, double s, const SupplierBehavior& behavior);

/// Raw step. Failures come back as a collapsed state holding the last finite
/// values, tagged with the trigger that fired.
StepResult step(const MarketState& state, const ModelParams& params);

/// Step with the demand clamp and production stop applied. Every failure
/// folds into an absorbing collapsed state (demand = supply = 0, price frozen).
StepResult bounded_step(const MarketState& state, const ModelParams& params);

/// Seed state with the price the seed supply would have been sold at.
MarketState seed_state(double demand, double supply, const CostPricing& cost);

/// Demand generated by supplying s goods, in the given map form.
double demand_for_supply(double s, const ModelParams& params);

// One-dimensional reductions.

/// Naive supplier demand map D -> D'.
double step_naive_demand_1d(double d, const ModelParams& params);
double derivative_naive_1d(double d, const ModelParams& params);

/// Naive supplier price map P -> P', conjugate to the demand map via D = a - bP.
double step_naive_price_1d(double p, const MarketParams& market, const CostPricing& cost);

/// Supply map S -> S' = (D(S)/S)^(1/m) S, with D(S) the demand at the price
/// charged for S. Throws DomainError when the root is undefined.
double step_supply_1d(double s, const ModelParams& params);
double derivative_supply_1d(double s, const ModelParams& params);

}  // namespace sbd
