#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dpcpower/analytic.hpp"
#include "dpcpower/power.hpp"
#include "dpcpower/selection.hpp"

namespace dpcpower {

enum class PowerMethodChoice { exact, approx, both };
enum class SweepAxis { none, M, K };

std::string_view to_string(PowerMethodChoice choice) noexcept;
std::string_view to_string(SweepAxis axis) noexcept;

struct ExperimentConfig {
    int M = 4;
    int K = 10;
    int Ks = 2;
    double gamma_db = 10.0;
    double gamma_linear = 10.0;
    double sigma_sq = 0.1;
    std::vector<Algorithm> algorithms;
    PowerMethodChoice power_method = PowerMethodChoice::approx;
    std::uint64_t trials = 10000;
    std::uint64_t master_seed = 1;
    SweepAxis sweep_axis = SweepAxis::none;
    std::vector<int> sweep_values;
    std::uint64_t exhaustive_budget = kDefaultExhaustiveBudget;

    // Sweep values, or the single fixed value of the (absent) axis.
    std::vector<int> points() const;
    // Copy with the sweep axis pinned to `value`.
    ExperimentConfig at(int value) const;
    std::vector<PowerModel> models() const;

    // trials >= 1, sweep values present, gamma/sigma positive. With
    // `check_points` also requires 1 <= K_s <= min(M, K) at every point.
    void validate(bool check_points = true) const;
};

struct RunOptions {
    int workers = 1;
    // Called after each sweep point with its value and row count.
    std::function<void(int, std::size_t)> on_point;
};

// Per-trial totals of one (algorithm, power model) pair; NaN marks a trial
// whose power could not be computed.
struct TrialColumn {
    Algorithm algorithm = Algorithm::nus;
    PowerModel model = PowerModel::approx;
    std::vector<double> totals;
    // Set when the whole column was skipped (e.g. exhaustive budget).
    std::string skipped;
};

struct PointSamples {
    int sweep_value = 0;
    std::vector<TrialColumn> columns;
};

// Channels of trial t come from stream 2t of master_seed, the random
// selection of trial t from stream 2t+1. Results do not depend on workers.
PointSamples simulate_point(const ExperimentConfig& point, int sweep_value,
                            const RunOptions& options = {});

inline constexpr double kFlagFraction = 1e-4;
inline constexpr std::string_view kLowerBoundName = "LOWER_BOUND";

struct ResultRow {
    int sweep_value = 0;
    int M = 0;
    int K = 0;
    int Ks = 0;
    std::string algorithm;
    std::string power_method;
    double mc_mean = 0.0;
    double mc_stderr = 0.0;
    // Absent for exact-model rows; analytic values describe the approx model.
    std::optional<AnalyticValue> analytic;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::uint64_t failures = 0;
    bool flagged = false;
    std::string note;
};

using ResultTable = std::vector<ResultRow>;

// Mean and standard error (sample std / sqrt(n)) over the finite entries.
struct Summary {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::uint64_t count = 0;
    std::uint64_t failures = 0;
};
Summary summarize(const std::vector<double>& totals);

ResultTable run_point(const ExperimentConfig& point, int sweep_value,
                      const RunOptions& options = {});
ResultTable run_sweep(const ExperimentConfig& config, const RunOptions& options = {});

// Analytic rows only, no simulation.
ResultTable analytic_table(const ExperimentConfig& config);

struct Tolerances {
    double rel_tol = 0.02;
    double z = 3.0;
};

struct ValidationRow {
    int sweep_value = 0;
    std::string algorithm;
    std::string power_method;
    double mc_mean = 0.0;
    double mc_stderr = 0.0;
    double analytic = 0.0;
    double allowed = 0.0;
    std::string check; // "two_sided" or "upper_bound"
    bool pass = false;
};

struct ValidationReport {
    std::vector<ValidationRow> rows;
    bool all_pass() const noexcept;
};

// Rows with an ok analytic value and a finite Monte Carlo mean are checked:
// |mc - a| <= max(rel_tol a, z se); SUS is an upper bound, mc <= a + z se.
ValidationReport validate(const ResultTable& table, const Tolerances& tolerances = {});

} // namespace dpcpower
