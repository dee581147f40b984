// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any gated
// criterion fails. Informational lines are prefixed with [INFO].

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sbd/analysis.hpp"
#include "sbd/scenarios.hpp"

using namespace sbd;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& title, const std::string& detail) {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << id << ' ' << title << " -- " << detail << std::endl;
    if (!ok) ++failures;
}

void info(const std::string& text) { std::cout << "[INFO] " << text << std::endl; }

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double x) {
    std::ostringstream out;
    out.precision(10);
    out << x;
    return out.str();
}

Setup setup_of(const char* name) { return find_builtin(name).setup; }

const ScanConfig& scan_of(const Scenario& s) {
    if (const auto* b = std::get_if<BifurcationAnalysis>(&s.analysis)) return b->scan;
    return std::get<LyapunovAnalysis>(s.analysis).scan;
}

// Smallest index of each label in a scan, or SIZE_MAX.
std::size_t first_of(const std::vector<BifurcationRow>& rows, const std::function<bool(const Classification&)>& p) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (p(rows[i].classification)) return i;
    }
    return static_cast<std::size_t>(-1);
}

void criterion_1() {
    std::mt19937_64 rng(20240501);
    std::uniform_real_distribution<double> a(5.0, 40.0), b(0.0, 0.15), fc(5.0, 40.0), v(1.0, 8.0),
        margin(0.0, 0.8), q(0.5, 15.0);
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const ModelParams p{MarketParams{a(rng), b(rng)}, CostPricing{fc(rng), v(rng), margin(rng)},
                            SupplierBehavior{1.0}, MapForm::Canonical};
        const MarketState s{q(rng), q(rng), 0.0, false};
        const StepResult r = step(s, p);
        if (r.failed()) {
            worst = INFINITY;
            continue;
        }
        worst = std::max(worst, std::abs(r.state.demand - step_naive_demand_1d(s.demand, p)));
    }
    const double elapsed = seconds_since(start);
    report(1, worst <= 1e-12 && elapsed < 1.0, "m=1 reduction",
           "max |diff| " + fmt(worst) + " over 1000 draws in " + fmt(elapsed) + " s");
}

void criterion_2() {
    const Setup base = setup_of("naive-equilibrium");
    bool any = false;
    std::string detail;
    for (MapForm form : {MapForm::Canonical, MapForm::PaperLiteral}) {
        Setup s = base;
        s.model.form = form;
        MarketState state = s.seed();
        std::size_t settled = 0;
        for (std::size_t n = 1; n <= 3000; ++n) {
            const MarketState next = bounded_step(state, s.model).state;
            if (next.collapsed) break;
            if (std::abs(next.demand - state.demand) < 1e-9) {
                settled = n;
                state = next;
                break;
            }
            state = next;
        }
        std::string verdict = "no convergence";
        if (settled) {
            const double x = find_fixed_point([&](double d) { return step_naive_demand_1d(d, s.model); }, 0.5, 10.0);
            const bool match = std::abs(state.demand - x) < 1e-9;
            any = any || match;
            verdict = "settled at step " + std::to_string(settled) + ", D=" + fmt(state.demand) + ", bisection " +
                      fmt(x) + (match ? "" : " (mismatch)");
        }
        detail += std::string(to_string(form)) + ": " + verdict + "; ";
    }
    report(2, any, "equilibrium at b=0.03", detail);
}

void criterion_3() {
    const Scenario& s = find_builtin("naive-bif-b");
    const ScanConfig& scan = scan_of(s);
    const auto start = std::chrono::steady_clock::now();
    const auto rows = bifurcation_scan(scan, s.setup, 0);
    const double elapsed = seconds_since(start);
    const auto fixed = first_of(rows, [](const Classification& c) { return c.behavior == Behavior::FixedPoint; });
    const auto two = first_of(rows, [](const Classification& c) { return c.behavior == Behavior::Periodic && c.period == 2; });
    const auto four = first_of(rows, [](const Classification& c) { return c.behavior == Behavior::Periodic && c.period == 4; });
    const auto chaos = first_of(rows, [](const Classification& c) { return c.behavior == Behavior::Chaotic; });
    const bool ordered = fixed < two && two < four && four < chaos && chaos < rows.size();
    report(3, ordered && elapsed < 10.0, "period doubling before chaos",
           std::to_string(rows.size()) + " rows; first fixed/2/4/chaotic at b=" + fmt(rows[fixed].param_value) + "/" +
               (two < rows.size() ? fmt(rows[two].param_value) : "-") + "/" +
               (four < rows.size() ? fmt(rows[four].param_value) : "-") + "/" +
               (chaos < rows.size() ? fmt(rows[chaos].param_value) : "-") + " in " + fmt(elapsed) + " s");
}

void criterion_4() {
    const auto label_at = [](const char* name) { return classify_setup(setup_of(name), 2500, 500).classification; };
    const Classification ten = label_at("naive-period10");
    const Classification three = label_at("co-period3");
    const Classification six = label_at("naive-period6");
    const bool ok = ten == Classification{Behavior::Periodic, 10} && three == Classification{Behavior::Periodic, 3};
    report(4, ok, "named cycles",
           "naive b=0.0843999995 -> " + ten.label() + " (want periodic(10)); cautious b=0.1308 -> " + three.label() +
               " (want periodic(3))");
    info("period-6 check at b=0.08531 (not gated): " + six.label());

    // Where period 10 actually lives near the claimed value.
    Setup s = setup_of("naive-period10");
    double lo = NAN, hi = NAN;
    for (int i = 0; i <= 200; ++i) {
        const double b = 0.08430 + 0.0001 * i / 200.0;
        s.model.market.b = b;
        if (classify_setup(s, 2500, 500).classification == Classification{Behavior::Periodic, 10}) {
            if (std::isnan(lo)) lo = b;
            hi = b;
        }
    }
    info("period-10 rows near that value (step 5e-7): b in [" + fmt(lo) + ", " + fmt(hi) + "]");
}

void criterion_5() {
    bool positive_naive = false, positive_cautious = false, periodic_ok = true;
    std::string detail;
    std::size_t periodic_rows = 0;
    double worst_periodic = -INFINITY;
    for (const auto& [name, lo, hi] : {std::tuple{"naive-lyap", 0.08, 0.092}, std::tuple{"co-lyap", 0.1, 0.134}}) {
        const Setup s = setup_of(name);
        const ScanConfig config{ScanParameter::B, lo, hi, 1000, kLyapunovTransient, kLyapunovSamples,
                                kLyapunovTransient + kLyapunovSamples};
        const auto lyap = lyapunov_scan(config, s, DerivativeMethod::Analytic, 0);
        ScanConfig classify = config;
        classify.transient = 2500;
        classify.keep = 500;
        classify.iterations_total = 3000;
        const auto rows = bifurcation_scan(classify, s, 0);
        std::size_t positive = 0, undefined = 0;
        for (std::size_t i = 0; i < lyap.size(); ++i) {
            if (!lyap[i].defined) {
                ++undefined;
                continue;
            }
            if (lyap[i].lambda > 0.01) ++positive;
            if (rows[i].classification.behavior == Behavior::Periodic ||
                rows[i].classification.behavior == Behavior::FixedPoint) {
                ++periodic_rows;
                worst_periodic = std::max(worst_periodic, lyap[i].lambda);
                if (lyap[i].lambda > 1e-3) periodic_ok = false;
            }
        }
        (std::string(name) == "naive-lyap" ? positive_naive : positive_cautious) = positive > 0;
        detail += std::string(name) + ": " + std::to_string(positive) + " rows with lambda > 0.01, " +
                  std::to_string(undefined) + " undefined; ";
    }
    detail += "max lambda over " + std::to_string(periodic_rows) + " periodic rows " + fmt(worst_periodic) + "; ";

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> pick(0.0, 1.0);
    std::size_t compared = 0;
    double worst = 0.0;
    while (compared < 100) {
        const bool naive = pick(rng) < 0.5;
        Setup s = setup_of(naive ? "naive-lyap" : "co-lyap");
        s.model.market.b = naive ? 0.08 + 0.012 * pick(rng) : 0.1 + 0.034 * pick(rng);
        try {
            const double an = setup_lyapunov(s, kLyapunovTransient, kLyapunovSamples, DerivativeMethod::Analytic);
            const double fd =
                setup_lyapunov(s, kLyapunovTransient, kLyapunovSamples, DerivativeMethod::FiniteDifference);
            worst = std::max(worst, std::abs(an - fd));
            ++compared;
        } catch (const EscapeError&) {
            // collapsing point, draw again
        }
    }
    detail += "analytic vs finite difference max |diff| " + fmt(worst) + " over 100 points";
    report(5, positive_naive && positive_cautious && periodic_ok && worst < 1e-4, "positive Lyapunov exponents",
           detail);
}

void criterion_6() {
    const ScalarMap logistic{[](double x) { return 4.0 * x * (1.0 - x); }, [](double x) { return 4.0 - 8.0 * x; }};
    const ScalarMap half{[](double x) { return x / 2.0; }, [](double) { return 0.5; }};
    const double l1 = lyapunov_exponent(logistic, 0.3141, 1000, 100000);
    const double l2 = lyapunov_exponent(half, 1.0, 100, 1000);
    report(6, std::abs(l1 - std::log(2.0)) < 1e-2 && std::abs(l2 - std::log(0.5)) < 1e-12, "estimator oracles",
           "logistic " + fmt(l1) + " vs ln 2, x/2 error " + fmt(std::abs(l2 - std::log(0.5))));
}

void criterion_7() {
    const Setup s = setup_of("naive-bif-M");
    // 0.0005 spacing
    const ScanConfig config{ScanParameter::Margin, 0.0, 0.8365, 1674};
    const auto rows = bifurcation_scan(config, s, 0);
    bool below_ok = true, above_seen = false;
    double first_non_fixed = NAN;
    for (const auto& r : rows) {
        const bool fixed = r.classification.behavior == Behavior::FixedPoint;
        if (r.param_value <= 0.6765 && !fixed) below_ok = false;
        if (!fixed && std::isnan(first_non_fixed)) first_non_fixed = r.param_value;
        if (r.param_value > 0.6765 && !fixed) above_seen = true;
    }
    report(7, below_ok && above_seen, "margin destabilization",
           std::to_string(rows.size()) + " rows over M in [0, 0.8365]; first non-fixed row at M=" +
               fmt(first_non_fixed));
}

void criterion_8() {
    const Scenario& scenario = find_builtin("collapse");
    const Setup& s = scenario.setup;
    const Orbit bounded = generate_orbit(s.seed(), s.model, 200, true);
    const auto collapse = detect_collapse(bounded);
    if (!collapse) {
        report(8, false, "market collapse", "no collapse within 200 steps");
        return;
    }
    constexpr std::size_t kPinned = 68;

    std::vector<double> transient;
    bool finite = true;
    for (std::size_t n = 0; n < collapse->step; ++n) {
        transient.push_back(bounded.states[n].demand);
        finite = finite && std::isfinite(bounded.states[n].demand) && std::isfinite(bounded.states[n].supply);
    }
    const bool aperiodic = !detect_period(transient, kPeriodTolerance, transient.size() / 2);

    MarketState dead = bounded.states.back();
    bool absorbing = true;
    for (int n = 0; n < 100; ++n) {
        const MarketState next = bounded_step(dead, s.model).state;
        absorbing = absorbing && next == dead;
        dead = next;
    }

    const Orbit raw = generate_orbit(s.seed(), s.model, 200, false);
    const bool raw_fails = raw.failure && raw.failure->step <= collapse->step + 1 &&
                           raw.failure->step + 1 >= collapse->step;

    const bool ok = finite && aperiodic && absorbing && collapse->step >= 50 && collapse->step <= 90 &&
                    collapse->step == kPinned && raw_fails;
    report(8, ok, "market collapse",
           "bounded collapse at step " + std::to_string(collapse->step) + " (pinned " + std::to_string(kPinned) +
               ", trigger " + std::string(to_string(collapse->trigger)) + ", frozen price " +
               fmt(collapse->frozen_price) + "); transient " + (aperiodic ? "aperiodic" : "periodic") +
               (absorbing ? ", absorbing" : ", NOT absorbing") + "; unbounded run fails at step " +
               (raw.failure ? std::to_string(raw.failure->step) + " (" +
                                  std::string(to_string(raw.failure->trigger)) + ")"
                            : std::string("never")));
}

void criterion_9() {
    const Scenario& scenario = find_builtin("elastic-b0");
    const Setup& s = scenario.setup;
    constexpr std::size_t kPinned = 10;
    const Orbit o = generate_orbit(s.seed(), s.model, 20, false);
    std::size_t first = 0;
    // The seed (1, 1) is balanced by construction; the market opens at step 1.
    for (std::size_t n = 1; n < o.states.size(); ++n) {
        const MarketState& st = o.states[n];
        if (std::abs(st.supply - st.demand) / st.demand < 0.01) {
            first = n;
            break;
        }
    }
    report(9, first > 0 && first <= 20 && first == kPinned, "perfectly elastic convergence",
           "|S-D|/D < 1% first at period " + std::to_string(first) + " (pinned " + std::to_string(kPinned) +
               "), demand " + fmt(o.states.back().demand));
}

void criterion_10() {
    Setup s = setup_of("co-explode");
    const auto hot = detect_collapse(generate_orbit(s.seed(), s.model, 3000, true));
    s = setup_of("co-edge-stable");
    const auto edge = detect_collapse(generate_orbit(s.seed(), s.model, 3000, true));
    report(10, hot.has_value() && !edge.has_value(), "explosion boundary",
           "b=0.14 " + (hot ? "collapses at step " + std::to_string(hot->step) : std::string("survives")) +
               "; b=0.12 " + (edge ? "collapses at step " + std::to_string(edge->step) : std::string("survives")) +
               " 3000 steps");
}

struct Run {
    int status;
    std::size_t bytes;
    std::size_t hash;
};

Run run_cli(const std::string& args) {
    const std::string command = std::string(SBD_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(command.c_str(), "r");
    if (!pipe) return {-1, 0, 0};
    std::string out;
    char buffer[1 << 16];
    for (std::size_t n; (n = std::fread(buffer, 1, sizeof buffer, pipe)) > 0;) out.append(buffer, n);
    const int raw = pclose(pipe);
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out.size(), std::hash<std::string>{}(out)};
}

void criterion_11() {
    bool ok = true;
    std::string detail;
    for (const std::string base : {"bifurcate --scenario naive-bif-b --points 2000",
                                   "lyapunov --scenario naive-lyap --points 2000"}) {
        std::vector<Run> runs;
        for (const char* threads : {"1", "8", "8", "8"}) runs.push_back(run_cli(base + " --threads " + threads));
        bool same = runs[0].status == 0 && runs[0].bytes > 0;
        for (const Run& r : runs) same = same && r.status == 0 && r.hash == runs[0].hash && r.bytes == runs[0].bytes;
        ok = ok && same;
        detail += base.substr(0, base.find(' ')) + ": " + std::to_string(runs[0].bytes) + " bytes, " +
                  (same ? "identical" : "DIFFERENT") + "; ";
    }
    report(11, ok, "deterministic scans", detail + "threads 1 once, threads 8 three times");
}

void criterion_12() {
    const Scenario& s = find_builtin("ped-example");
    const auto& spec = std::get<PedAnalysis>(s.analysis);
    const PedResult r = ped(spec.p1, spec.p2, s.setup.model.market);
    report(12, std::abs(r.value + 0.098901) < 1e-6, "elasticity example",
           "a=10 b=0.09 p 10->11 gives " + fmt(r.value));
}

}  // namespace

int main() {
    const std::vector<void (*)()> criteria{criterion_1, criterion_2, criterion_3,  criterion_4,
                                           criterion_5, criterion_6, criterion_7,  criterion_8,
                                           criterion_9, criterion_10, criterion_11, criterion_12};
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        try {
            criteria[i]();
        } catch (const std::exception& e) {
            report(static_cast<int>(i + 1), false, "criterion", std::string("threw: ") + e.what());
        }
    }
    std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failures == 0 ? 0 : 1;
}
