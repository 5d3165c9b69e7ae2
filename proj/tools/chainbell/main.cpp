#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chainbell/bounds.hpp"
#include "chainbell/event_io.hpp"
#include "chainbell/experiment.hpp"
#include "chainbell/report_io.hpp"
#include "chainbell/version.hpp"

namespace {

using namespace chainbell;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

/// Flag-level problems: wrong values for options, impossible static domains.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CommonFlags {
    int n = 2;
    std::uint64_t trials = 10000;
    std::uint64_t seed = 1;
    double delta_t = 1.5;
    std::string mode = "sync";
    std::string sampling = "chained";
};

MatchMode parse_mode(const std::string& mode) {
    if (mode == "sync") return MatchMode::TrialSynchronized;
    if (mode == "stream") return MatchMode::StreamWindowed;
    throw UsageError("--mode must be 'sync' or 'stream', got '" + mode + "'");
}

SamplingMode parse_sampling(const std::string& sampling) {
    if (sampling == "chained") return SamplingMode::ChainedOnly;
    if (sampling == "uniform") return SamplingMode::UniformSettings;
    throw UsageError("--sampling must be 'chained' or 'uniform', got '" + sampling + "'");
}

SettingsCount checked_n(int n) {
    try {
        return SettingsCount(n);
    } catch (const std::domain_error& error) {
        throw UsageError(error.what());
    }
}

double checked_gamma_flag(double gamma) {
    if (!(gamma > 0.0) || gamma > 1.0) {
        throw UsageError("--gamma must be in (0, 1], got " + std::to_string(gamma));
    }
    return gamma;
}

void check_trials(std::uint64_t trials) {
    if (trials < 1) throw UsageError("--trials must be >= 1");
}

void check_delta_t(double delta_t) {
    if (!(delta_t > 0.0)) throw UsageError("--delta-t must be positive");
}

void print_summary(const ExperimentReport& report) {
    char line[256];
    if (report.has_estimate) {
        std::snprintf(line, sizeof(line), "s_hat      = %.6f +- %.6f\n", report.s_hat,
                      report.s_se);
        std::cout << line;
        std::snprintf(line, sizeof(line), "gamma_hat  = %.6f\n", report.gamma_hat.value_or(0.0));
        std::cout << line;
        std::snprintf(line, sizeof(line), "local      = %.6f   quantum = %.6f\n",
                      report.bounds.local, report.bounds.quantum);
        std::cout << line;
        if (report.bounds.bound_at_gamma_hat) {
            std::snprintf(line, sizeof(line), "bound(gamma_hat) = %.6f%s\n",
                          report.bounds.bound_at_gamma_hat->clamped,
                          report.bounds.bound_at_gamma_hat->vacuous ? " (vacuous)" : "");
            std::cout << line;
        }
        std::cout << "verdicts: exceeds_local=" << (report.verdicts.exceeds_local ? "yes" : "no")
                  << " exceeds_coincidence_bound="
                  << (report.verdicts.exceeds_coincidence_bound ? "yes" : "no")
                  << " loophole_free=" << (report.verdicts.loophole_free ? "yes" : "no") << "\n";
    } else {
        std::cout << "error: " << report.error << "\n";
    }
    if (report.non_chained_trials > 0 || report.incomplete_trials > 0) {
        std::cout << "warnings: non_chained_trials=" << report.non_chained_trials
                  << " incomplete_trials=" << report.incomplete_trials << "\n";
    }
}

int cmd_table(int max_n, const std::string& out_path) {
    if (max_n < 2) throw UsageError("max_n must be >= 2");
    char line[128];
    std::printf("  N          gamma_crit    eta_crit\n");
    std::string csv = "n,gamma_crit,eta_crit\n";
    for (int n = 2; n <= max_n; ++n) {
        const SettingsCount sc(n);
        const double gamma = gamma_crit(sc);
        const double eta = eta_crit(sc);
        std::snprintf(line, sizeof(line), "%3d        %9.2f%%   %8.2f%%%s\n", n, 100.0 * gamma,
                      100.0 * eta, n == 2 ? "   (CHSH)" : "");
        std::fputs(line, stdout);
        char row[128];
        std::snprintf(row, sizeof(row), "%d,%.15g,%.15g\n", n, gamma, eta);
        csv += row;
    }
    if (!out_path.empty()) {
        write_text_file(out_path, csv);
    }
    return kExitOk;
}

int cmd_bounds(int n_flag, std::optional<double> gamma, const std::string& out_path) {
    const SettingsCount n = checked_n(n_flag);
    std::optional<CoincidenceProbability> gamma_checked;
    if (gamma) {
        gamma_checked = CoincidenceProbability(checked_gamma_flag(*gamma));
    }
    const BoundsReport report = make_bounds_report(n, gamma_checked);

    char line[160];
    std::snprintf(line, sizeof(line), "n            = %d\n", report.n);
    std::fputs(line, stdout);
    std::snprintf(line, sizeof(line), "local bound  = %.6f\n", report.local);
    std::fputs(line, stdout);
    std::snprintf(line, sizeof(line), "quantum      = %.6f\n", report.quantum);
    std::fputs(line, stdout);
    std::snprintf(line, sizeof(line), "gamma_crit   = %.2f%%  (%.15g)\n",
                  100.0 * report.gamma_critical, report.gamma_critical);
    std::fputs(line, stdout);
    std::snprintf(line, sizeof(line), "eta_crit     = %.2f%%  (%.15g)\n",
                  100.0 * report.eta_critical, report.eta_critical);
    std::fputs(line, stdout);
    std::snprintf(line, sizeof(line), "p_crit       = %.15g\n", report.p_critical);
    std::fputs(line, stdout);
    if (report.bound_at_gamma) {
        std::snprintf(line, sizeof(line), "bound(gamma=%.6g) = %.6f raw, %.6f clamped%s\n",
                      *report.gamma, report.bound_at_gamma->raw, report.bound_at_gamma->clamped,
                      report.bound_at_gamma->vacuous ? " (vacuous)" : "");
        std::fputs(line, stdout);
    }
    if (!out_path.empty()) {
        write_text_file(out_path, format_bounds_report(report));
    }
    return kExitOk;
}

int cmd_simulate(const CommonFlags& flags, std::optional<double> p, std::optional<double> gamma,
                 const std::string& out_path, std::string report_path) {
    const SettingsCount n = checked_n(flags.n);
    check_trials(flags.trials);
    check_delta_t(flags.delta_t);
    if (p && gamma) throw UsageError("give either --p or --gamma, not both");
    if (!p && !gamma) throw UsageError("one of --p or --gamma is required");
    if (p && (*p < 0.0 || *p > 1.0)) throw UsageError("--p must be in [0, 1]");
    if (gamma) checked_gamma_flag(*gamma);
    if (out_path.empty()) throw UsageError("--out is required");

    GeneratorConfig config;
    config.n = n.value();
    if (p) {
        config.p = *p;
    } else {
        const ResolvedModel model = resolve_gamma_target(n, *gamma);  // throws above critical
        config.p = model.p;
        config.thinning_q = model.thinning_q;
        config.requested_gamma = *gamma;
    }
    config.trials_per_pair = flags.trials;
    config.seed = flags.seed;
    config.delta_t = flags.delta_t;
    config.mode = parse_mode(flags.mode);
    config.sampling = parse_sampling(flags.sampling);

    const std::vector<DetectionEvent> events = generate_events(config);
    ExperimentReport report = analyze(AnalysisConfig{config.n, config.delta_t, config.mode}, events);
    report.generator = config;

    write_events(out_path, events);
    if (report_path.empty()) report_path = out_path + ".report.json";
    write_text_file(report_path, format_report(report));

    std::cout << "events -> " << out_path << "\n";
    std::cout << "report -> " << report_path << "\n";
    print_summary(report);
    return kExitOk;
}

int cmd_analyze(const std::string& events_path, int n_flag, double delta_t,
                const std::string& mode, const std::string& out_path) {
    const SettingsCount n = checked_n(n_flag);
    check_delta_t(delta_t);
    const MatchMode match_mode = parse_mode(mode);
    if (out_path.empty()) throw UsageError("--out is required");

    const std::vector<DetectionEvent> events = read_events(events_path);
    const ExperimentReport report = analyze(AnalysisConfig{n.value(), delta_t, match_mode}, events);
    write_text_file(out_path, format_report(report));

    std::cout << "report -> " << out_path << "\n";
    print_summary(report);
    return kExitOk;
}

int cmd_sweep(const CommonFlags& flags, const std::vector<double>& gamma_grid,
              const std::string& out_path) {
    const SettingsCount n = checked_n(flags.n);
    check_trials(flags.trials);
    check_delta_t(flags.delta_t);
    const MatchMode mode = parse_mode(flags.mode);
    if (gamma_grid.empty()) throw UsageError("--gamma-grid needs at least one value");
    for (double gamma : gamma_grid) checked_gamma_flag(gamma);
    if (out_path.empty()) throw UsageError("--out is required");

    std::string table = format_sweep_header();
    bool any_error = false;
    for (std::size_t i = 0; i < gamma_grid.size(); ++i) {
        try {
            const SweepRow row =
                sweep_row(n, gamma_grid[i], flags.trials, flags.seed, i, flags.delta_t, mode);
            table += format_sweep_row(row);
        } catch (const ValidationError& error) {
            table += format_sweep_error_row(gamma_grid[i], error.what());
            std::cerr << "row " << i << ": " << error.what() << "\n";
            any_error = true;
        }
    }
    write_text_file(out_path, table);
    std::cout << "sweep -> " << out_path << "\n";
    std::cout << table;
    return any_error ? kExitData : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chained Bell inequality toolkit: coincidence-loophole bounds, the adversarial "
                 "local model, and Monte Carlo experiments"};
    app.set_version_flag("--version", std::string(kToolkitVersion));
    app.require_subcommand(1);

    // table
    auto* table = app.add_subcommand("table", "Critical probabilities gamma_crit and eta_crit");
    int table_max_n = 5;
    std::string table_out;
    table->add_option("max_n", table_max_n, "largest settings count (rows run n = 2..max_n)");
    table->add_option("--out", table_out, "also write machine-readable CSV here");

    // bounds
    auto* bounds = app.add_subcommand("bounds", "Closed-form bounds for one settings count");
    int bounds_n = 2;
    double bounds_gamma = -1.0;
    std::string bounds_out;
    bounds->add_option("--n", bounds_n, "settings per observer")->required();
    auto* bounds_gamma_opt =
        bounds->add_option("--gamma", bounds_gamma, "evaluate the adjusted bound at this gamma");
    bounds->add_option("--out", bounds_out, "write the report as JSON here");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Run the adversarial model and write events");
    CommonFlags sim_flags;
    double sim_p = -1.0, sim_gamma = -1.0;
    std::string sim_out, sim_report;
    simulate->add_option("--n", sim_flags.n, "settings per observer")->required();
    auto* sim_p_opt = simulate->add_option("--p", sim_p, "gating parameter in [0,1]");
    auto* sim_gamma_opt =
        simulate->add_option("--gamma", sim_gamma, "target coincidence probability");
    simulate->add_option("--trials", sim_flags.trials, "trials per chained pair")->required();
    simulate->add_option("--seed", sim_flags.seed, "rng seed");
    simulate->add_option("--delta-t", sim_flags.delta_t, "coincidence window");
    simulate->add_option("--mode", sim_flags.mode, "matching mode: sync | stream");
    simulate->add_option("--sampling", sim_flags.sampling, "setting sampling: chained | uniform");
    simulate->add_option("--out", sim_out, "event file path")->required();
    simulate->add_option("--report", sim_report, "report path (default: <out>.report.json)");

    // analyze
    auto* analyze_cmd = app.add_subcommand("analyze", "Recompute statistics from an event file");
    std::string analyze_events, analyze_out, analyze_mode = "sync";
    int analyze_n = 2;
    double analyze_delta_t = 1.5;
    analyze_cmd->add_option("events", analyze_events, "event file to analyze")->required();
    analyze_cmd->add_option("--n", analyze_n, "settings per observer")->required();
    analyze_cmd->add_option("--delta-t", analyze_delta_t, "coincidence window");
    analyze_cmd->add_option("--mode", analyze_mode, "matching mode: sync | stream");
    analyze_cmd->add_option("--out", analyze_out, "report path")->required();

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "Fake the quantum value across a gamma grid");
    CommonFlags sweep_flags;
    std::vector<double> sweep_grid;
    std::string sweep_out;
    sweep_cmd->add_option("--n", sweep_flags.n, "settings per observer")->required();
    sweep_cmd->add_option("--gamma-grid", sweep_grid, "comma-separated gamma values")
        ->required()
        ->delimiter(',');
    sweep_cmd->add_option("--trials", sweep_flags.trials, "trials per chained pair")->required();
    sweep_cmd->add_option("--seed", sweep_flags.seed, "rng seed");
    sweep_cmd->add_option("--delta-t", sweep_flags.delta_t, "coincidence window");
    sweep_cmd->add_option("--mode", sweep_flags.mode, "matching mode: sync | stream");
    sweep_cmd->add_option("--out", sweep_out, "sweep table path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& error) {
        if (error.get_exit_code() == 0) {
            return app.exit(error);  // --help / --version
        }
        std::cerr << error.what() << "\n";
        return kExitUsage;
    }

    try {
        if (table->parsed()) {
            return cmd_table(table_max_n, table_out);
        }
        if (bounds->parsed()) {
            std::optional<double> gamma;
            if (bounds_gamma_opt->count() > 0) gamma = bounds_gamma;
            return cmd_bounds(bounds_n, gamma, bounds_out);
        }
        if (simulate->parsed()) {
            std::optional<double> p, gamma;
            if (sim_p_opt->count() > 0) p = sim_p;
            if (sim_gamma_opt->count() > 0) gamma = sim_gamma;
            return cmd_simulate(sim_flags, p, gamma, sim_out, sim_report);
        }
        if (analyze_cmd->parsed()) {
            return cmd_analyze(analyze_events, analyze_n, analyze_delta_t, analyze_mode,
                               analyze_out);
        }
        if (sweep_cmd->parsed()) {
            return cmd_sweep(sweep_flags, sweep_grid, sweep_out);
        }
        std::cerr << "no subcommand\n";
        return kExitUsage;
    } catch (const UsageError& error) {
        std::cerr << "usage error: " << error.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& error) {
        std::cerr << "usage error: " << error.what() << "\n";
        return kExitUsage;
    } catch (const ValidationError& error) {
        std::cerr << "validation error: " << error.what() << "\n";
        return kExitData;
    } catch (const EventFileError& error) {
        std::cerr << "data error: " << error.what() << "\n";
        return kExitData;
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return kExitData;
    }
}
