#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbd/model.hpp"

namespace sbd {

/// Model parameters plus the seed the supplier starts from.
struct Setup {
    ModelParams model;
    double seed_demand = 1.0;
    double seed_supply = 1.0;

    MarketState seed() const { return seed_state(seed_demand, seed_supply, model.cost); }

    friend bool operator==(const Setup&, const Setup&) = default;
};

// ---------------------------------------------------------------------------
// Orbits

struct Orbit {
    struct Failure {
        std::size_t step;
        Trigger trigger;
    };

    std::vector<MarketState> states;  // states[0] is the seed
    std::string scenario;
    MapForm form = MapForm::Canonical;
    bool bounded = false;
    /// First step whose state is collapsed (bounded) or failed (unbounded).
    std::optional<Failure> failure;
};

/// Iterates step (or bounded_step) `steps` times, stopping after the first
/// collapsed or failed state.
Orbit generate_orbit(const MarketState& initial, const ModelParams& params, std::size_t steps,
                     bool bounded, std::string scenario = {});

struct CollapseReport {
    std::size_t step;
    Trigger trigger;
    double frozen_price;
};

std::optional<CollapseReport> detect_collapse(const Orbit& orbit);

// ---------------------------------------------------------------------------
// Fixed points and periods

class NotFoundError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using RealFunction = std::function<double(double)>;

/// Bisection on map(x) - x over [lo, hi]; requires a sign change.
/// Returns x with |map(x) - x| < 1e-12 or an interval narrower than 1e-13.
double find_fixed_point(const RealFunction& map, double lo, double hi);

/// Scans [lo, hi] in `subintervals` pieces and bisects every sign change.
/// Pieces where the map leaves its domain are skipped.
std::vector<double> find_fixed_points(const RealFunction& map, double lo, double hi,
                                      std::size_t subintervals = 64);

inline constexpr std::size_t kMaxPeriod = 64;
inline constexpr double kPeriodTolerance = 1e-6;

/// Smallest k <= max_period with |x[i] - x[i+k]| < tol * max(1, |x[i]|, |x[i+k]|)
/// across the whole tail, or nullopt when no such k exists.
/// Throws std::invalid_argument if the tail is shorter than 2 * max_period.
std::optional<std::size_t> detect_period(std::span<const double> tail,
                                         double tolerance = kPeriodTolerance,
                                         std::size_t max_period = kMaxPeriod);

// ---------------------------------------------------------------------------
// Lyapunov exponents

struct ScalarMap {
    RealFunction value;
    RealFunction derivative;
};

enum class DerivativeMethod { Analytic, FiniteDifference };

std::string_view to_string(DerivativeMethod method);

/// The orbit left the map's domain (or overflowed) at `step`.
class EscapeError : public std::runtime_error {
public:
    EscapeError(std::size_t step, const std::string& what)
        : std::runtime_error(what), step_(step) {}

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

inline constexpr std::size_t kLyapunovTransient = 1000;
inline constexpr std::size_t kLyapunovSamples = 10000;

/// Mean of ln|f'(x_i)| over `samples` iterates following `transient` discarded ones.
double lyapunov_exponent(const ScalarMap& map, double x0,
                         std::size_t transient = kLyapunovTransient,
                         std::size_t samples = kLyapunovSamples,
                         DerivativeMethod method = DerivativeMethod::Analytic);

/// One-dimensional reduction of the model: the naive demand map for m == 1,
/// otherwise the supply map.
ScalarMap reduced_map(const ModelParams& params);

/// Starting point of the reduced map that corresponds to the setup's seed.
double reduced_seed(const Setup& setup);

double setup_lyapunov(const Setup& setup, std::size_t transient = kLyapunovTransient,
                      std::size_t samples = kLyapunovSamples,
                      DerivativeMethod method = DerivativeMethod::Analytic);

// ---------------------------------------------------------------------------
// Parameter scans

enum class ScanParameter { B, Margin, A };

std::string_view to_string(ScanParameter parameter);
ScanParameter parse_scan_parameter(std::string_view text);

struct ScanConfig {
    ScanParameter parameter = ScanParameter::B;
    double lo = 0.0;
    double hi = 0.0;
    std::size_t grid_points = 1;
    std::size_t transient = 2500;
    std::size_t keep = 500;
    std::size_t iterations_total = 3000;

    void validate() const;
    /// Evenly spaced, endpoints included. Grid values of a coarse scan are
    /// bit-identical to the matching values of any refinement sharing the interval.
    double grid_value(std::size_t index) const;

    friend bool operator==(const ScanConfig&, const ScanConfig&) = default;
};

Setup with_parameter(Setup setup, ScanParameter parameter, double value);

enum class Behavior { FixedPoint, Periodic, Chaotic, Unresolved, Collapsed };

struct Classification {
    Behavior behavior = Behavior::Unresolved;
    std::size_t period = 0;  // 1 for fixed points, k for periodic rows, 0 otherwise

    std::string label() const;
    friend bool operator==(const Classification&, const Classification&) = default;
};

struct BifurcationRow {
    double param_value = 0.0;
    std::vector<double> samples;  // demand values on the attractor
    Classification classification;
    /// Estimated only for aperiodic rows; NaN elsewhere.
    double lambda = 0.0;
};

/// Classifies the long-run demand of one setup. Exposed for single-point checks.
BifurcationRow classify_setup(const Setup& setup, std::size_t transient, std::size_t keep);

std::vector<BifurcationRow> bifurcation_scan(const ScanConfig& config, const Setup& setup,
                                             unsigned threads = 1);

struct LyapunovRow {
    double param_value = 0.0;
    double lambda = 0.0;  // NaN when undefined
    DerivativeMethod method = DerivativeMethod::Analytic;
    bool defined = false;
};

/// Uses config.transient as the discarded prefix and config.keep as the sample count.
std::vector<LyapunovRow> lyapunov_scan(const ScanConfig& config, const Setup& setup,
                                       DerivativeMethod method = DerivativeMethod::Analytic,
                                       unsigned threads = 1);

// ---------------------------------------------------------------------------
// Price elasticity of demand

struct PedResult {
    double q1 = 0.0;
    double q2 = 0.0;
    double value = 0.0;  // NaN when perfectly elastic
    bool perfectly_elastic = false;
};

/// Arc elasticity ((Q2-Q1)/Q1) / ((P2-P1)/P1) on the linear demand curve.
/// b == 0 yields the perfectly-elastic marker.
PedResult ped(double p1, double p2, const MarketParams& market);

}  // namespace sbd
