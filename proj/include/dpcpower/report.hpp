#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "dpcpower/experiment.hpp"

namespace dpcpower {

// 9 significant digits, locale independent; "NA" for NaN / infinity.
std::string format_number(double value);
// Shortest text that round-trips to the same double.
std::string format_exact(double value);

// RFC 4180 quoting when the field needs it.
std::string csv_field(std::string_view text);
std::vector<std::string> split_csv_line(std::string_view line);

inline constexpr std::string_view kResultsHeader =
    "sweep_value,M,K,Ks,algorithm,power_method,mc_mean,mc_stderr,analytic_value,analytic_status,"
    "trials,failures,flagged,seed,note";

// analytic_status is "exact_model" for rows without an analytic binding.
void write_results_csv(std::ostream& out, const ResultTable& table);
ResultTable read_results_csv(std::istream& in);

void write_validation_csv(std::ostream& out, const ValidationReport& report);

// Analytic-only table: non-ok values carry their status as the value cell.
void write_analytic_csv(std::ostream& out, const ResultTable& table);

struct RunManifest {
    std::string config_hash;
    std::string tool_version;
    std::string timestamp;
    std::uint64_t master_seed = 0;
    std::string command;
    std::string canonical_config;
};

RunManifest make_manifest(const ExperimentConfig& config, std::string command);
void write_manifest(std::ostream& out, const RunManifest& manifest);

/// One row per sweep value; for each algorithm <A>_mc, <A>_stderr,
/// <A>_analytic, then p_L_analytic. Approx-model rows only.
void write_figure_csv(std::ostream& out, const ResultTable& table, const ExperimentConfig& config);
// Matplotlib script that reads the figure table written next to it.
void write_plot_script(std::ostream& out, std::string_view csv_name, const ExperimentConfig& config);

void write_text_file(const std::string& path, const std::string& contents);

} // namespace dpcpower
