#include "dpcpower/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "dpcpower/channel.hpp"
#include "dpcpower/errors.hpp"

namespace dpcpower {

std::string_view to_string(PowerMethodChoice choice) noexcept {
    switch (choice) {
    case PowerMethodChoice::exact: return "exact";
    case PowerMethodChoice::approx: return "approx";
    case PowerMethodChoice::both: return "both";
    }
    return "unknown";
}

std::string_view to_string(SweepAxis axis) noexcept {
    switch (axis) {
    case SweepAxis::none: return "none";
    case SweepAxis::M: return "M";
    case SweepAxis::K: return "K";
    }
    return "unknown";
}

std::vector<int> ExperimentConfig::points() const {
    switch (sweep_axis) {
    case SweepAxis::M:
    case SweepAxis::K: return sweep_values;
    case SweepAxis::none: break;
    }
    return {0};
}

ExperimentConfig ExperimentConfig::at(int value) const {
    ExperimentConfig point = *this;
    if (sweep_axis == SweepAxis::M) {
        point.M = value;
    } else if (sweep_axis == SweepAxis::K) {
        point.K = value;
    }
    point.sweep_axis = SweepAxis::none;
    point.sweep_values.clear();
    return point;
}

std::vector<PowerModel> ExperimentConfig::models() const {
    switch (power_method) {
    case PowerMethodChoice::exact: return {PowerModel::exact};
    case PowerMethodChoice::approx: return {PowerModel::approx};
    case PowerMethodChoice::both: return {PowerModel::approx, PowerModel::exact};
    }
    return {};
}

void ExperimentConfig::validate(bool check_points) const {
    if (trials < 1) {
        throw ConfigError("trials: must be >= 1");
    }
    if (!(gamma_linear > 0.0) || !std::isfinite(gamma_linear)) {
        throw ConfigError("gamma_db: must give a finite positive target");
    }
    if (!(sigma_sq > 0.0) || !std::isfinite(sigma_sq)) {
        throw ConfigError("sigma_sq: must be positive");
    }
    if (sweep_axis != SweepAxis::none && sweep_values.empty()) {
        throw ConfigError("sweep.values: must be non-empty when sweep.axis is set");
    }
    for (int value : points()) {
        const ExperimentConfig p = at(value);
        const std::string where =
            sweep_axis == SweepAxis::none
                ? std::string()
                : " at " + std::string(to_string(sweep_axis)) + "=" + std::to_string(value);
        if (p.M < 1) {
            throw ConfigError("M: must be >= 1" + where);
        }
        if (p.K < 1) {
            throw ConfigError("K: must be >= 1" + where);
        }
        if (p.Ks < 1) {
            throw ConfigError("Ks: must be >= 1" + where);
        }
        if (!check_points) {
            continue;
        }
        if (p.Ks > p.M) {
            throw ConfigError("Ks=" + std::to_string(p.Ks) + " exceeds M=" + std::to_string(p.M) +
                              where + " (need Ks <= min(M, K))");
        }
        if (p.Ks > p.K) {
            throw ConfigError("Ks=" + std::to_string(p.Ks) + " exceeds K=" + std::to_string(p.K) +
                              where + " (need Ks <= min(M, K))");
        }
    }
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

SelectionResult select(Algorithm algorithm, const ChannelSet& channels, int Ks, Engine& rus_engine,
                       const SinrTargets& targets, PowerModel model, std::uint64_t budget) {
    switch (algorithm) {
    case Algorithm::nus: return select_nus(channels, Ks);
    case Algorithm::sus: return select_sus(channels, Ks);
    case Algorithm::aus: return select_aus(channels, Ks);
    case Algorithm::rus: return select_rus(channels, Ks, rus_engine);
    case Algorithm::exhaustive: return select_exhaustive(channels, Ks, targets, model, budget);
    }
    throw ConfigError("unknown algorithm");
}

} // namespace

PointSamples simulate_point(const ExperimentConfig& point, int sweep_value,
                            const RunOptions& options) {
    const int M = point.M;
    const int K = point.K;
    const int Ks = point.Ks;
    const std::uint64_t trials = point.trials;
    const SinrTargets targets =
        SinrTargets::uniform(point.gamma_linear, point.sigma_sq, static_cast<std::size_t>(Ks));
    const auto models = point.models();

    PointSamples samples;
    samples.sweep_value = sweep_value;
    for (Algorithm algorithm : point.algorithms) {
        for (PowerModel model : models) {
            TrialColumn column;
            column.algorithm = algorithm;
            column.model = model;
            if (algorithm == Algorithm::exhaustive &&
                exhaustive_evaluations(K, Ks) > point.exhaustive_budget) {
                column.skipped = "exhaustive budget exceeded: " +
                                 std::to_string(exhaustive_evaluations(K, Ks)) + " > " +
                                 std::to_string(point.exhaustive_budget);
            } else {
                column.totals.assign(trials, kNaN);
            }
            samples.columns.push_back(std::move(column));
        }
    }
    if (samples.columns.empty()) {
        return samples;
    }

    const auto run_trial = [&](std::uint64_t t) {
        const ChannelSet channels =
            sample_channel_set(M, K, SeedSpec{point.master_seed, 2 * t});
        Engine rus_engine = make_engine(SeedSpec{point.master_seed, 2 * t + 1});
        // One RUS draw per trial, shared by every power model.
        std::optional<SelectionResult> rus_pick;
        for (auto& column : samples.columns) {
            if (!column.skipped.empty()) {
                continue;
            }
            try {
                SelectionResult pick;
                if (column.algorithm == Algorithm::rus) {
                    if (!rus_pick) {
                        rus_pick = select_rus(channels, Ks, rus_engine);
                    }
                    pick = *rus_pick;
                } else {
                    pick = select(column.algorithm, channels, Ks, rus_engine, targets, column.model,
                                  point.exhaustive_budget);
                }
                const auto ordered = channels.gather(pick.encoding_order);
                column.totals[t] = total_power(ordered, targets, column.model);
            } catch (const BudgetError&) {
                throw;
            } catch (const Error&) {
                column.totals[t] = kNaN;
            }
        }
    };

    const auto workers = static_cast<std::uint64_t>(
        std::clamp<std::uint64_t>(static_cast<std::uint64_t>(std::max(options.workers, 1)), 1,
                                  trials));
    if (workers == 1) {
        for (std::uint64_t t = 0; t < trials; ++t) {
            run_trial(t);
        }
        return samples;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::uint64_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::uint64_t t = w; t < trials; t += workers) {
                    run_trial(t);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& thread : pool) {
        thread.join();
    }
    for (const auto& error : errors) {
        if (error) {
            std::rethrow_exception(error);
        }
    }
    return samples;
}

Summary summarize(const std::vector<double>& totals) {
    Summary s;
    double sum = 0.0;
    for (double v : totals) {
        if (std::isfinite(v)) {
            sum += v;
            ++s.count;
        } else {
            ++s.failures;
        }
    }
    if (s.count == 0) {
        s.mean = kNaN;
        s.stderr_ = kNaN;
        return s;
    }
    s.mean = sum / static_cast<double>(s.count);
    if (s.count < 2) {
        s.stderr_ = 0.0;
        return s;
    }
    double ss = 0.0;
    for (double v : totals) {
        if (std::isfinite(v)) {
            ss += (v - s.mean) * (v - s.mean);
        }
    }
    const double n = static_cast<double>(s.count);
    s.stderr_ = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    return s;
}

namespace {

ResultRow base_row(const ExperimentConfig& point, int sweep_value) {
    ResultRow row;
    row.sweep_value = sweep_value;
    row.M = point.M;
    row.K = point.K;
    row.Ks = point.Ks;
    row.trials = point.trials;
    row.seed = point.master_seed;
    return row;
}

void append_lower_bound(ResultTable& table, const ExperimentConfig& point, int sweep_value) {
    ResultRow row = base_row(point, sweep_value);
    row.algorithm = std::string(kLowerBoundName);
    row.power_method = "approx";
    row.mc_mean = kNaN;
    row.mc_stderr = kNaN;
    row.trials = 0;
    row.analytic =
        analytic_lower_bound(point.M, point.K, point.Ks, point.gamma_linear, point.sigma_sq);
    table.push_back(std::move(row));
}

bool wants_approx(const ExperimentConfig& config) {
    return config.power_method != PowerMethodChoice::exact;
}

} // namespace

ResultTable run_point(const ExperimentConfig& point, int sweep_value, const RunOptions& options) {
    ResultTable table;
    if (point.algorithms.empty()) {
        return table;
    }
    PointSamples samples;
    try {
        samples = simulate_point(point, sweep_value, options);
    } catch (const Error& e) {
        // Whole point failed; one flagged row per requested column.
        for (Algorithm algorithm : point.algorithms) {
            for (PowerModel model : point.models()) {
                ResultRow row = base_row(point, sweep_value);
                row.algorithm = std::string(to_string(algorithm));
                row.power_method = std::string(to_string(model));
                row.mc_mean = kNaN;
                row.mc_stderr = kNaN;
                row.flagged = true;
                row.failures = point.trials;
                row.note = e.what();
                table.push_back(std::move(row));
            }
        }
        return table;
    }
    for (const auto& column : samples.columns) {
        ResultRow row = base_row(point, sweep_value);
        row.algorithm = std::string(to_string(column.algorithm));
        row.power_method = std::string(to_string(column.model));
        if (column.model == PowerModel::approx) {
            row.analytic = analytic_average_power(column.algorithm, point.M, point.K, point.Ks,
                                                  point.gamma_linear, point.sigma_sq);
        }
        if (!column.skipped.empty()) {
            row.mc_mean = kNaN;
            row.mc_stderr = kNaN;
            row.trials = 0;
            row.flagged = true;
            row.note = column.skipped;
        } else {
            const Summary s = summarize(column.totals);
            row.mc_mean = s.mean;
            row.mc_stderr = s.stderr_;
            row.failures = s.failures;
            if (static_cast<double>(s.failures) > kFlagFraction * static_cast<double>(point.trials)) {
                row.flagged = true;
                row.note = std::to_string(s.failures) + " infeasible trials";
            }
        }
        table.push_back(std::move(row));
    }
    if (wants_approx(point)) {
        append_lower_bound(table, point, sweep_value);
    }
    return table;
}

ResultTable run_sweep(const ExperimentConfig& config, const RunOptions& options) {
    config.validate(true);
    ResultTable table;
    for (int value : config.points()) {
        auto rows = run_point(config.at(value), value, options);
        if (options.on_point) {
            options.on_point(value, rows.size());
        }
        table.insert(table.end(), std::make_move_iterator(rows.begin()),
                     std::make_move_iterator(rows.end()));
    }
    return table;
}

ResultTable analytic_table(const ExperimentConfig& config) {
    config.validate(false);
    ResultTable table;
    if (config.algorithms.empty()) {
        return table;
    }
    for (int value : config.points()) {
        const ExperimentConfig point = config.at(value);
        for (Algorithm algorithm : config.algorithms) {
            ResultRow row = base_row(point, value);
            row.algorithm = std::string(to_string(algorithm));
            row.power_method = "approx";
            row.mc_mean = kNaN;
            row.mc_stderr = kNaN;
            row.trials = 0;
            row.analytic = analytic_average_power(algorithm, point.M, point.K, point.Ks,
                                                  point.gamma_linear, point.sigma_sq);
            table.push_back(std::move(row));
        }
        append_lower_bound(table, point, value);
    }
    return table;
}

bool ValidationReport::all_pass() const noexcept {
    return std::all_of(rows.begin(), rows.end(), [](const ValidationRow& r) { return r.pass; });
}

ValidationReport validate(const ResultTable& table, const Tolerances& tolerances) {
    ValidationReport report;
    for (const auto& row : table) {
        if (!row.analytic || !row.analytic->ok() || !std::isfinite(row.mc_mean)) {
            continue;
        }
        ValidationRow v;
        v.sweep_value = row.sweep_value;
        v.algorithm = row.algorithm;
        v.power_method = row.power_method;
        v.mc_mean = row.mc_mean;
        v.mc_stderr = row.mc_stderr;
        v.analytic = row.analytic->value;
        if (row.algorithm == to_string(Algorithm::sus)) {
            v.check = "upper_bound";
            v.allowed = tolerances.z * row.mc_stderr;
            v.pass = row.mc_mean <= v.analytic + v.allowed;
        } else {
            v.check = "two_sided";
            v.allowed = std::max(tolerances.rel_tol * std::abs(v.analytic), tolerances.z * row.mc_stderr);
            v.pass = std::abs(row.mc_mean - v.analytic) <= v.allowed;
        }
        report.rows.push_back(std::move(v));
    }
    return report;
}

} // namespace dpcpower
