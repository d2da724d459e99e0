#include "dpcpower/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "dpcpower/config.hpp"
#include "dpcpower/errors.hpp"
#include "dpcpower/experiment.hpp"
#include "dpcpower/report.hpp"

namespace dpcpower {

namespace {

enum class LogLevel { quiet, info, debug };

// DPCPOWER_LOG=quiet|info|debug; verbosity only, never a parameter.
LogLevel log_level() {
    const char* env = std::getenv("DPCPOWER_LOG");
    if (env == nullptr) {
        return LogLevel::info;
    }
    const std::string v(env);
    if (v == "quiet" || v == "0") {
        return LogLevel::quiet;
    }
    if (v == "debug") {
        return LogLevel::debug;
    }
    return LogLevel::info;
}

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> trials;
    int workers = 1;
    std::string out_dir;
    bool strict = false;
    std::optional<int> M;
    std::optional<int> K;
    std::optional<int> Ks;
    std::optional<double> gamma_db;
    std::optional<double> sigma_sq;
    std::optional<std::string> algorithms;
    std::optional<std::string> power_method;
    double rel_tol = 0.02;
    double z = 3.0;
    int figure_id = 0;
    bool plot_script = false;
    std::string results_path;
};

ConfigOverrides overrides_of(const Options& o) {
    ConfigOverrides ov;
    ov.M = o.M;
    ov.K = o.K;
    ov.Ks = o.Ks;
    ov.gamma_db = o.gamma_db;
    ov.sigma_sq = o.sigma_sq;
    ov.algorithms = o.algorithms;
    ov.power_method = o.power_method;
    ov.trials = o.trials;
    ov.seed = o.seed;
    return ov;
}

void add_parameters(CLI::App* app, Options& o) {
    app->add_option("--config", o.config_path, "key=value config file");
    app->add_option("--seed", o.seed, "master seed (u64)");
    app->add_option("--trials", o.trials, "Monte Carlo trials per point");
    app->add_option("--M", o.M, "base station antennas");
    app->add_option("--K", o.K, "users");
    app->add_option("--Ks", o.Ks, "users selected per block");
    app->add_option("--gamma-db", o.gamma_db, "common SINR target in dB");
    app->add_option("--sigma-sq", o.sigma_sq, "noise variance");
    app->add_option("--algorithms", o.algorithms, "comma list of NUS,SUS,AUS,RUS,EXHAUSTIVE");
    app->add_option("--power-method", o.power_method, "exact, approx or both");
}

void add_run_options(CLI::App* app, Options& o) {
    app->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
    app->add_option("--out", o.out_dir, "output directory");
    app->add_flag("--strict", o.strict, "exit 4 when validation fails");
    app->add_option("--rel-tol", o.rel_tol, "relative tolerance for two-sided checks");
    app->add_option("--z", o.z, "stderr multiplier");
}

std::string command_line(const std::vector<std::string>& args) {
    std::string s = "dpcpower";
    for (const auto& a : args) {
        s += ' ';
        s += a;
    }
    return s;
}

std::filesystem::path output_dir(const Options& o) {
    std::filesystem::path dir(o.out_dir.empty() ? std::string("dpcpower-out") : o.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());
    }
    return dir;
}

template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
    std::ostringstream text;
    writer(text);
    write_text_file(path.string(), text.str());
}

int finish_validation(const ValidationReport& report, const Options& o, std::ostream& out) {
    const auto passed = std::count_if(report.rows.begin(), report.rows.end(),
                                      [](const ValidationRow& r) { return r.pass; });
    out << "validation: " << passed << "/" << report.rows.size() << " rows pass\n";
    for (const auto& row : report.rows) {
        if (!row.pass) {
            out << "  FAIL " << row.algorithm << " " << row.power_method << " at " << row.sweep_value
                << ": mc=" << format_number(row.mc_mean) << " analytic=" << format_number(row.analytic)
                << " allowed=" << format_number(row.allowed) << " (" << row.check << ")\n";
        }
    }
    if (o.strict && !report.all_pass()) {
        return kExitValidation;
    }
    return kExitOk;
}

int run_experiment(const ExperimentConfig& config, const Options& o, const std::string& command,
                   std::ostream& out, std::ostream& err, int figure_id) {
    RunOptions run;
    run.workers = o.workers;
    const LogLevel level = log_level();
    if (level != LogLevel::quiet) {
        run.on_point = [&err, &config](int value, std::size_t rows) {
            err << "point " << to_string(config.sweep_axis) << "=" << value << ": " << rows
                << " rows\n";
        };
    }
    const ResultTable table = run_sweep(config, run);
    const ValidationReport report = validate(table, Tolerances{o.rel_tol, o.z});
    const auto dir = output_dir(o);
    write_file(dir / "results.csv", [&](std::ostream& s) { write_results_csv(s, table); });
    write_file(dir / "validation.csv", [&](std::ostream& s) { write_validation_csv(s, report); });
    write_file(dir / "manifest.txt",
               [&](std::ostream& s) { write_manifest(s, make_manifest(config, command)); });
    if (figure_id > 0) {
        const std::string name = "figure" + std::to_string(figure_id) + ".csv";
        write_file(dir / name, [&](std::ostream& s) { write_figure_csv(s, table, config); });
        if (o.plot_script) {
            write_file(dir / ("plot_figure" + std::to_string(figure_id) + ".py"),
                       [&](std::ostream& s) { write_plot_script(s, name, config); });
        }
    }
    const auto flagged =
        std::count_if(table.begin(), table.end(), [](const ResultRow& r) { return r.flagged; });
    out << "wrote " << table.size() << " rows to " << (dir / "results.csv").string();
    if (flagged > 0) {
        out << " (" << flagged << " flagged)";
    }
    out << "\n";
    return finish_validation(report, o, out);
}

int cmd_analytic(const Options& o, std::ostream& out) {
    ParseOptions parse;
    parse.check_points = false;
    const ExperimentConfig config = parse_config(o.config_path, overrides_of(o), parse);
    const ResultTable table = analytic_table(config);
    std::ostringstream text;
    write_analytic_csv(text, table);
    out << text.str();
    if (!o.out_dir.empty()) {
        write_text_file((output_dir(o) / "analytic.csv").string(), text.str());
    }
    return kExitOk;
}

int cmd_validate(const Options& o, std::ostream& out) {
    std::filesystem::path results = o.results_path;
    if (results.empty()) {
        results = std::filesystem::path(o.out_dir.empty() ? "dpcpower-out" : o.out_dir) / "results.csv";
    }
    std::ifstream in(results, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open results file '" + results.string() + "'");
    }
    const ResultTable table = read_results_csv(in);
    const ValidationReport report = validate(table, Tolerances{o.rel_tol, o.z});
    const auto dir = o.out_dir.empty() ? results.parent_path() : output_dir(o);
    write_file(dir / "validation.csv", [&](std::ostream& s) { write_validation_csv(s, report); });
    return finish_validation(report, o, out);
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Minimum-power user selection for DPC multiuser MIMO downlinks", "dpcpower"};
    app.require_subcommand(1);
    app.set_version_flag("--version", DPCPOWER_VERSION);
    Options o;

    auto* analytic = app.add_subcommand("analytic", "closed-form average power table");
    add_parameters(analytic, o);
    analytic->add_option("--out", o.out_dir, "also write <out>/analytic.csv");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo run with validation");
    add_parameters(simulate, o);
    add_run_options(simulate, o);

    auto* figure = app.add_subcommand("figure", "pre-registered figure sweep (1-4)");
    figure->add_option("figure_id", o.figure_id, "figure number")->required();
    add_parameters(figure, o);
    add_run_options(figure, o);
    figure->add_flag("--plot-script", o.plot_script, "also write a matplotlib script");

    auto* check = app.add_subcommand("validate", "re-check an existing results.csv");
    check->add_option("--results", o.results_path, "results file (default <out>/results.csv)");
    check->add_option("--out", o.out_dir, "directory holding results.csv");
    check->add_flag("--strict", o.strict, "exit 4 when validation fails");
    check->add_option("--rel-tol", o.rel_tol, "relative tolerance for two-sided checks");
    check->add_option("--z", o.z, "stderr multiplier");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    const std::string command = command_line(args);
    try {
        if (*analytic) {
            return cmd_analytic(o, out);
        }
        if (*simulate) {
            const ExperimentConfig config = parse_config(o.config_path, overrides_of(o));
            return run_experiment(config, o, command, out, err, 0);
        }
        if (*figure) {
            const std::string text(figure_config_text(o.figure_id));
            if (!o.config_path.empty()) {
                throw ConfigError("figure takes its config from the figure id; drop --config");
            }
            const ExperimentConfig config = parse_config_text(
                text, "figure " + std::to_string(o.figure_id), overrides_of(o));
            return run_experiment(config, o, command, out, err, o.figure_id);
        }
        if (*check) {
            return cmd_validate(o, out);
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitConfig;
}

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        args.emplace_back(argv[i]);
    }
    return run_cli(args, std::cout, std::cerr);
}

} // namespace dpcpower
