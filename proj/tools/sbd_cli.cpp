// Command-line front end. Talks to the engine exclusively through sbd.h.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sbd/sbd.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct ScenarioDeleter {
    void operator()(sbd_scenario* s) const { sbd_scenario_free(s); }
};
struct TableDeleter {
    void operator()(sbd_table* t) const { sbd_table_free(t); }
};
using ScenarioHandle = std::unique_ptr<sbd_scenario, ScenarioDeleter>;
using TableHandle = std::unique_ptr<sbd_table, TableDeleter>;

int exit_code(sbd_status status) {
    switch (status) {
        case SBD_OK: return kExitOk;
        case SBD_ERR_VALIDATION:
        case SBD_ERR_NOT_FOUND:
        case SBD_ERR_INVALID_ARGUMENT: return kExitConfig;
        case SBD_ERR_NUMERICAL: return kExitNumerical;
        default: return kExitInternal;
    }
}

int report(sbd_status status) {
    std::cerr << "error: " << sbd_last_error() << '\n';
    return exit_code(status);
}

// Flags that map one-to-one onto scenario config keys.
struct Override {
    const char* flag;
    const char* key;
    const char* help;
};

constexpr Override kOverrides[] = {
    {"--a", "a", "Demand at zero price"},
    {"--b", "b", "Demand slope"},
    {"--v", "v", "Variable cost per unit"},
    {"--fc", "fc", "Fixed cost"},
    {"--margin", "margin", "Gross margin M in [0, 1)"},
    {"--m", "m", "Root exponent of the signal of success"},
    {"--seed-d", "seed_d", "Seed demand"},
    {"--seed-s", "seed_s", "Seed supply"},
    {"--param", "param", "Scanned parameter: b, margin or a"},
    {"--min", "min", "Scan interval start"},
    {"--max", "max", "Scan interval end"},
    {"--points", "points", "Grid points"},
    {"--transient", "transient", "Discarded iterations"},
    {"--keep", "keep", "Retained samples"},
    {"--iters", "iters", "Total iterations"},
    {"--steps", "steps", "Orbit length"},
    {"--p1", "p1", "Baseline price"},
    {"--p2", "p2", "New price"},
};

struct Options {
    std::string scenario;
    std::string config;
    std::string form;
    std::string out;
    std::string format = "csv";
    std::string method = "analytic";
    unsigned threads = 0;
    bool bounded = false;
    std::vector<std::string> values = std::vector<std::string>(std::size(kOverrides));
};

bool read_file(const std::string& path, std::string& text) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream buffer;
    buffer << in.rdbuf();
    text = buffer.str();
    return true;
}

int write_output(const std::string& path, const char* text, std::size_t length) {
    if (path.empty() || path == "-") {
        std::fwrite(text, 1, length, stdout);
        std::fflush(stdout);
        return kExitOk;
    }
    std::ofstream out(path, std::ios::binary);
    out.write(text, static_cast<std::streamsize>(length));
    if (!out) {
        std::cerr << "error: cannot write " << path << '\n';
        return kExitConfig;
    }
    return kExitOk;
}

int render(sbd_table* table, const Options& options) {
    const sbd_format format = options.format == "jsonl" ? SBD_FORMAT_JSONL : SBD_FORMAT_CSV;
    const char* text = nullptr;
    std::size_t length = 0;
    if (const auto status = sbd_table_render(table, format, &text, &length); status != SBD_OK) {
        return report(status);
    }
    return write_output(options.out, text, length);
}

int run(const std::string& command, const Options& options, const std::vector<bool>& given) {
    if (command == "scenarios") {
        sbd_table* raw = nullptr;
        if (const auto status = sbd_scenarios_table(&raw); status != SBD_OK) return report(status);
        TableHandle table(raw);
        return render(table.get(), options);
    }

    if (!options.scenario.empty() && !options.config.empty()) {
        std::cerr << "error: --scenario and --config are mutually exclusive\n";
        return kExitConfig;
    }

    sbd_scenario* raw = nullptr;
    sbd_status status = SBD_OK;
    if (!options.scenario.empty()) {
        status = sbd_scenario_builtin(options.scenario.c_str(), &raw);
    } else {
        std::string document;
        if (!options.config.empty() && !read_file(options.config, document)) {
            std::cerr << "error: cannot read " << options.config << '\n';
            return kExitConfig;
        }
        status = sbd_scenario_parse(document.c_str(), &raw);
    }
    if (status != SBD_OK) return report(status);
    ScenarioHandle scenario(raw);

    const char* kind = "orbit";
    if (command == "bifurcate") kind = "bifurcation";
    if (command == "lyapunov") kind = "lyapunov";
    if (command == "ped") kind = "ped";
    if ((status = sbd_scenario_set(scenario.get(), "analysis", kind)) != SBD_OK) return report(status);

    if (!options.form.empty() &&
        (status = sbd_scenario_set(scenario.get(), "form", options.form.c_str())) != SBD_OK) {
        return report(status);
    }
    if (options.bounded && (status = sbd_scenario_set(scenario.get(), "bounded", "true")) != SBD_OK) {
        return report(status);
    }
    for (std::size_t i = 0; i < std::size(kOverrides); ++i) {
        if (!given[i]) continue;
        status = sbd_scenario_set(scenario.get(), kOverrides[i].key, options.values[i].c_str());
        if (status != SBD_OK) return report(status);
    }

    sbd_table* table_raw = nullptr;
    if (command == "simulate") {
        status = sbd_simulate(scenario.get(), &table_raw);
    } else if (command == "bifurcate") {
        status = sbd_bifurcate(scenario.get(), options.threads, &table_raw);
    } else if (command == "lyapunov") {
        const sbd_method method =
            options.method == "finite-difference" ? SBD_METHOD_FINITE_DIFFERENCE : SBD_METHOD_ANALYTIC;
        status = sbd_lyapunov(scenario.get(), method, options.threads, &table_raw);
    } else if (command == "collapse") {
        status = sbd_collapse(scenario.get(), &table_raw);
    } else {
        status = sbd_ped(scenario.get(), &table_raw);
    }
    TableHandle table(table_raw);

    // A failed unbounded orbit still yields the steps computed so far.
    const std::string message = sbd_last_error();
    if (table) {
        if (const int written = render(table.get(), options); written != kExitOk) return written;
    }
    if (status != SBD_OK) {
        std::cerr << "error: " << message << '\n';
        return exit_code(status);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Supply-based-on-demand market dynamics: orbits, bifurcation scans, "
                 "Lyapunov spectra, collapse detection and price elasticity"};
    app.require_subcommand(1);
    app.fallthrough();

    Options options;
    app.add_option("--scenario", options.scenario, "Builtin scenario name (see `scenarios`)");
    app.add_option("--config", options.config, "Scenario config file (key = value lines)");
    app.add_option("--form", options.form, "Map form")->check(CLI::IsMember({"canonical", "paper-literal"}));
    app.add_option("--out", options.out, "Output path (default: standard output)");
    app.add_option("--format", options.format, "Table format")->check(CLI::IsMember({"csv", "jsonl"}));
    app.add_option("--threads", options.threads, "Worker threads for scans (0 = all cores)");
    app.add_option("--method", options.method, "Lyapunov derivative")
        ->check(CLI::IsMember({"analytic", "finite-difference"}));
    app.add_flag("--bounded", options.bounded, "Clamp demand and stop production on collapse");

    std::vector<CLI::Option*> override_options;
    for (std::size_t i = 0; i < std::size(kOverrides); ++i) {
        override_options.push_back(app.add_option(kOverrides[i].flag, options.values[i], kOverrides[i].help));
    }

    const std::pair<const char*, const char*> commands[] = {
        {"simulate", "Iterate the model and print the orbit"},
        {"bifurcate", "Scan a parameter and print attractor samples"},
        {"lyapunov", "Scan a parameter and print Lyapunov exponents"},
        {"collapse", "Run a bounded orbit and report the first collapse"},
        {"ped", "Price elasticity of demand between two prices"},
        {"scenarios", "List builtin scenarios"},
    };
    for (const auto& [name, help] : commands) app.add_subcommand(name, help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    std::vector<bool> given;
    given.reserve(override_options.size());
    for (const auto* option : override_options) given.push_back(option->count() > 0);

    return run(app.get_subcommands().front()->get_name(), options, given);
}
