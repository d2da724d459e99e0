// Acceptance suite. Each criterion prints one line:
//   [PASS|FAIL] <n> <name>: <measured values>
// Run with no arguments for all criteria, or with criterion numbers.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "dpcpower/analytic.hpp"
#include "dpcpower/channel.hpp"
#include "dpcpower/cli.hpp"
#include "dpcpower/config.hpp"
#include "dpcpower/distributions.hpp"
#include "dpcpower/experiment.hpp"
#include "dpcpower/power.hpp"
#include "dpcpower/selection.hpp"

using namespace dpcpower;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + std::string("violated: ") + what;
        }
    }
    void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string num(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

int workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

ExperimentConfig fig_point(int M, int K, int Ks, std::vector<Algorithm> algorithms,
                           std::uint64_t trials, std::uint64_t seed) {
    ExperimentConfig c;
    c.M = M;
    c.K = K;
    c.Ks = Ks;
    c.gamma_db = 10;
    c.gamma_linear = db_to_linear(10);
    c.sigma_sq = 0.1;
    c.algorithms = std::move(algorithms);
    c.power_method = PowerMethodChoice::approx;
    c.trials = trials;
    c.master_seed = seed;
    return c;
}

const ResultRow& row(const ResultTable& t, std::string_view algorithm, int value = 0) {
    for (const auto& r : t) {
        if (r.algorithm == algorithm && r.power_method == "approx" && r.sweep_value == value) {
            return r;
        }
    }
    throw std::runtime_error("missing row " + std::string(algorithm));
}

template <class Cdf>
double ks_statistic(std::vector<double> xs, Cdf&& cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return d;
}

std::vector<ChannelVector> draw(int M, int n, Engine& engine) {
    std::vector<ChannelVector> hs;
    for (int i = 0; i < n; ++i) {
        hs.push_back(sample_channel_vector(M, engine));
    }
    return hs;
}

// 1. RUS closed form
Outcome rus_closed_form() {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    const auto t = run_point(fig_point(4, 10, 2, {Algorithm::rus}, 100000, 101), 0, RunOptions{1, {}});
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double mc = row(t, "RUS").mc_mean;
    const double target = 0.1 * 10 * (1.0 / 3 + 1.0 / 2);
    const double rel = std::abs(mc - target) / target;
    o.note("mc=" + num(mc) + " stderr=" + num(row(t, "RUS").mc_stderr) + " closed=" + num(target) +
           " rel_err=" + num(rel, 3) + " time=" + num(seconds, 3) + "s");
    o.require(rel <= 0.02, "|mc - 0.8333| <= 2%");
    o.require(seconds < 30.0, "runtime < 30 s");
    return o;
}

// 2. NUS corollary and Monte Carlo
Outcome nus_corollary() {
    Outcome o;
    double worst = 0.0;
    for (int M = 4; M <= 8; ++M) {
        for (int K = 8; K <= 16; ++K) {
            const double sum = nus_theorem_sum(M, K, 2);
            worst = std::max(worst, std::abs(nus_two_user_alpha_form(M, K) - sum) / sum);
        }
    }
    o.note("max corollary rel diff=" + num(worst, 3));
    o.require(worst <= 1e-6, "corollary within 1e-6");
    const auto t = run_point(fig_point(4, 10, 2, {Algorithm::nus}, 100000, 202), 0, RunOptions{workers(), {}});
    const auto& r = row(t, "NUS");
    const double rel = std::abs(r.mc_mean - r.analytic->value) / r.analytic->value;
    o.note("mc=" + num(r.mc_mean) + " analytic=" + num(r.analytic->value) + " rel_err=" + num(rel, 3));
    o.require(rel <= 0.02, "MC within 2%");
    return o;
}

// 3. SUS one-sided bound on every figure point
Outcome sus_upper_bound() {
    Outcome o;
    int points = 0;
    double worst_margin = -INFINITY;
    for (int id = 1; id <= 4; ++id) {
        auto c = parse_config_text(figure_config_text(id), "figure");
        c.algorithms = {Algorithm::sus};
        const auto t = run_sweep(c, RunOptions{workers(), {}});
        for (int v : c.points()) {
            const auto& r = row(t, "SUS", v);
            if (!r.analytic || !r.analytic->ok()) {
                o.require(false, "p_S defined at figure " + std::to_string(id) + " point " + std::to_string(v));
                continue;
            }
            ++points;
            const double margin = (r.mc_mean - r.analytic->value) / r.mc_stderr;
            worst_margin = std::max(worst_margin, margin);
            o.require(r.mc_mean <= r.analytic->value + 3 * r.mc_stderr,
                      "figure " + std::to_string(id) + " point " + std::to_string(v) + " mc=" +
                          num(r.mc_mean) + " > p_S+3se=" + num(r.analytic->value + 3 * r.mc_stderr));
        }
    }
    o.note(std::to_string(points) + " points, max (mc - p_S)/stderr=" + num(worst_margin, 3));
    return o;
}

// 4. Duality and SINR attainment
Outcome duality() {
    Outcome o;
    Engine engine = make_engine(SeedSpec{404, 0});
    double worst_total = 0.0;
    double worst_sinr = 0.0;
    int instances = 0;
    for (int Ks : {1, 2, 4}) {
        for (int n = 0; n < 1000; ++n) {
            const auto hs = draw(4, Ks, engine);
            const auto t = SinrTargets::uniform(10, 0.1, static_cast<std::size_t>(Ks));
            const auto dl = downlink_dual_solution(hs, t);
            const double ul = exact_min_power(hs, t).total_power;
            worst_total = std::max(worst_total, std::abs(dl.total_power - ul) / ul);
            const auto sinr = evaluate_sinr(hs, dl.beamformers, dl.per_user_power, t.sigma_sq);
            for (std::size_t k = 0; k < sinr.size(); ++k) {
                worst_sinr = std::max(worst_sinr, std::abs(sinr[k] - t.gamma[k]) / t.gamma[k]);
            }
            ++instances;
        }
    }
    o.note(std::to_string(instances) + " instances, max total rel diff=" + num(worst_total, 3) +
           ", max SINR rel diff=" + num(worst_sinr, 3));
    o.require(worst_total <= 1e-9, "totals within 1e-9");
    o.require(worst_sinr <= 1e-9, "SINR within 1e-9");
    return o;
}

// 5. Approximation dominance and convergence
Outcome approximation() {
    Outcome o;
    Engine engine = make_engine(SeedSpec{505, 0});
    int violations = 0;
    std::vector<double> gap10;
    std::vector<double> gap30;
    for (int n = 0; n < 10000; ++n) {
        const auto hs = draw(4, 2, engine);
        for (double db : {0.0, 10.0, 20.0, 30.0}) {
            const auto t = SinrTargets::uniform(db_to_linear(db), 0.1, 2);
            const double exact = exact_total_power(hs, t);
            const double approx = approx_total_power(hs, t);
            if (exact > approx) {
                ++violations;
            }
            const double gap = (approx - exact) / exact;
            if (db == 10.0) {
                gap10.push_back(gap);
            } else if (db == 30.0) {
                gap30.push_back(gap);
            }
        }
    }
    const auto median = [](std::vector<double> v) {
        std::nth_element(v.begin(), v.begin() + static_cast<long>(v.size() / 2), v.end());
        return v[v.size() / 2];
    };
    const double m10 = median(gap10);
    const double m30 = median(gap30);
    o.note("exact>approx on " + std::to_string(violations) + " of 40000; median gap 10 dB=" + num(m10, 4) +
           " 30 dB=" + num(m30, 4));
    o.require(violations == 0, "exact <= approx everywhere");
    o.require(m30 < 0.01, "median gap at 30 dB < 1%");
    o.require(m30 < m10, "gap shrinks from 10 dB to 30 dB");
    return o;
}

// 6. Figure-2 ordering
Outcome figure_two_ordering() {
    Outcome o;
    for (int K : {4, 8, 12, 16, 20}) {
        const auto t = run_point(
            fig_point(4, K, 2, {Algorithm::nus, Algorithm::sus, Algorithm::aus, Algorithm::rus}, 100000, 606),
            K, RunOptions{workers(), {}});
        const auto& nus = row(t, "NUS", K);
        const auto& sus = row(t, "SUS", K);
        const auto& aus = row(t, "AUS", K);
        const double pl = row(t, "LOWER_BOUND", K).analytic->value;
        const double pr = row(t, "RUS", K).analytic->value;
        const double mc_pair = [](const ResultRow& a, const ResultRow& b) {
            return std::sqrt(a.mc_stderr * a.mc_stderr + b.mc_stderr * b.mc_stderr);
        }(sus, nus);
        const double mc_pair_aus = std::sqrt(sus.mc_stderr * sus.mc_stderr + aus.mc_stderr * aus.mc_stderr);
        const std::string at = "K=" + std::to_string(K) + " ";
        o.require(sus.mc_mean - pl > 3 * sus.mc_stderr, at + "p_L < SUS by 3se");
        o.require(nus.mc_mean - sus.mc_mean > 3 * mc_pair, at + "SUS < NUS by 3se");
        o.require(aus.mc_mean - sus.mc_mean > 3 * mc_pair_aus, at + "SUS < AUS by 3se");
        o.require(pr - aus.mc_mean > 3 * aus.mc_stderr, at + "AUS < p_R by 3se");
        o.note(at + "pL=" + num(pl, 4) + " SUS=" + num(sus.mc_mean, 4) + " NUS=" + num(nus.mc_mean, 4) +
               " AUS=" + num(aus.mc_mean, 4) + " pR=" + num(pr, 4));
    }
    const auto t = run_point(fig_point(4, 8, 2, {Algorithm::sus, Algorithm::exhaustive}, 10000, 607), 8,
                             RunOptions{workers(), {}});
    const double ratio = row(t, "SUS", 8).mc_mean / row(t, "EXHAUSTIVE", 8).mc_mean;
    o.note("SUS/EXHAUSTIVE at K=8: " + num(ratio, 4));
    o.require(ratio <= 1.10, "SUS/EXHAUSTIVE <= 1.10");
    return o;
}

// 7. Distribution suite
Outcome distributions() {
    Outcome o;
    int grid_failures = 0;
    int families = 0;
    for (int M = 1; M <= 8; ++M) {
        std::vector<DistributionSpec> specs{DistributionSpec::chisq(M)};
        for (int K : {2, 5, 10}) {
            for (int r = 1; r <= K; ++r) {
                specs.push_back(DistributionSpec::order_stat(M, r, K));
            }
            specs.push_back(DistributionSpec::not_largest(M, K));
            if (M >= 2) {
                specs.push_back(DistributionSpec::angle_max(M, K));
            }
        }
        for (int i = 1; i < M; ++i) {
            specs.push_back(DistributionSpec::angle(M, i));
        }
        for (const auto& s : specs) {
            ++families;
            const double hi = std::isfinite(s.support_upper()) ? 1.0 : 60.0 + 4.0 * M;
            double prev = cdf(s, 0.0);
            bool ok = std::abs(prev) < 1e-15 && std::abs(cdf(s, hi) - 1.0) < 1e-12;
            for (int n = 1; n <= 200 && ok; ++n) {
                const double f = cdf(s, hi * n / 200.0);
                ok = f >= prev - 1e-14 && f <= 1.0;
                prev = f;
            }
            grid_failures += ok ? 0 : 1;
        }
    }
    o.note(std::to_string(families) + " CDFs on grid, " + std::to_string(grid_failures) + " failures");
    o.require(grid_failures == 0, "monotone CDFs with 0/1 limits");

    const int n = 100000;
    Engine engine = make_engine(SeedSpec{707, 0});
    std::vector<double> norm;
    std::vector<double> second;
    std::vector<double> angle1;
    std::vector<double> angle2;
    std::vector<double> max_proj;
    for (int s = 0; s < n; ++s) {
        norm.push_back(squared_norm(sample_channel_vector(4, engine)));

        const auto set = sample_channel_set(4, 10, engine);
        std::vector<double> norms;
        for (const auto& h : set.vectors()) {
            norms.push_back(squared_norm(h));
        }
        std::nth_element(norms.begin(), norms.begin() + 1, norms.end(), std::greater<>());
        second.push_back(norms[1]);

        const auto h = sample_channel_vector(4, engine);
        const std::vector<ChannelVector> b1{sample_channel_vector(4, engine)};
        angle1.push_back(sin_sq_angle(h, b1));
        const std::vector<ChannelVector> b2{sample_channel_vector(4, engine), sample_channel_vector(4, engine)};
        angle2.push_back(sin_sq_angle(sample_channel_vector(4, engine), b2));

        // Largest of 9 projections onto the complement of a common first user.
        const std::vector<ChannelVector> first{sample_channel_vector(4, engine)};
        double best = 0.0;
        for (int k = 0; k < 9; ++k) {
            best = std::max(best, sin_sq_angle(sample_channel_vector(4, engine), first));
        }
        max_proj.push_back(best);
    }
    const struct {
        const char* name;
        std::vector<double>* xs;
        DistributionSpec spec;
    } cases[] = {
        {"norm M=4", &norm, DistributionSpec::chisq(4)},
        {"order r=2 K=10", &second, DistributionSpec::order_stat(4, 2, 10)},
        {"sin2 theta1 M=4", &angle1, DistributionSpec::angle(4, 1)},
        {"sin2 theta2 M=4", &angle2, DistributionSpec::angle(4, 2)},
        {"max projection K-1=9", &max_proj, DistributionSpec::angle_max(4, 9)},
    };
    for (const auto& c : cases) {
        const double d = ks_statistic(*c.xs, [&](double x) { return cdf(c.spec, x); });
        o.note(std::string(c.name) + " KS=" + num(d, 3));
        o.require(d < 0.01, std::string(c.name) + " KS < 0.01");
    }
    return o;
}

// 8. alpha oracle
Outcome alpha_oracle() {
    Outcome o;
    double worst = 0.0;
    for (int M = 2; M <= 10; ++M) {
        worst = std::max(worst, std::abs(alpha(M, 1) - 1.0 / (M - 1)));
    }
    o.note("max |alpha(M,1) - 1/(M-1)|=" + num(worst, 3));
    o.require(worst <= 1e-9, "alpha(M,1) = 1/(M-1)");

    // |h|^2 of a CN(0, I_4) vector is Gamma(4, 1).
    Engine engine = make_engine(SeedSpec{808, 0});
    std::gamma_distribution<double> norm_sq(4.0, 1.0);
    const long n = 10000000;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (long s = 0; s < n; ++s) {
        double best = 0.0;
        for (int k = 0; k < 10; ++k) {
            best = std::max(best, norm_sq(engine));
        }
        const double v = 1.0 / best;
        sum += v;
        sum_sq += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum_sq / n - mean * mean) / (n - 1));
    const double a = alpha(4, 10);
    o.note("alpha(4,10)=" + num(a, 12) + " MC=" + num(mean, 8) + " stderr=" + num(se, 3) +
           " z=" + num((mean - a) / se, 3));
    o.require(std::abs(mean - a) <= 3 * se, "quadrature within 3 oracle stderr");
    return o;
}

// 9. Determinism of simulate output
Outcome determinism() {
    Outcome o;
    const auto root = std::filesystem::temp_directory_path() / "dpcpower_acceptance_det";
    std::filesystem::remove_all(root);
    std::vector<std::string> digests;
    const auto run_once = [&](const std::string& tag, int w) {
        const auto dir = root / tag;
        std::ostringstream out;
        std::ostringstream err;
        const int code = run_cli({"simulate", "--M", "4", "--K", "8", "--Ks", "2", "--trials", "2000",
                                  "--seed", "9", "--algorithms", "NUS,SUS,AUS,RUS,EXHAUSTIVE",
                                  "--power-method", "both", "--workers", std::to_string(w), "--out",
                                  dir.string()},
                                 out, err);
        o.require(code == 0, "simulate exit code 0 (" + tag + ")");
        std::ifstream in(dir / "results.csv", std::ios::binary);
        std::ostringstream bytes;
        bytes << in.rdbuf();
        digests.push_back(bytes.str());
    };
    run_once("w1_a", 1);
    run_once("w1_b", 1);
    run_once("w4", 4);
    run_once("w16", 16);
    bool same = !digests.front().empty();
    for (const auto& d : digests) {
        same = same && d == digests.front();
    }
    o.note(std::to_string(digests.size()) + " runs, " + std::to_string(digests.front().size()) +
           " bytes each");
    o.require(same, "byte-identical results.csv across runs and workers {1,4,16}");
    std::filesystem::remove_all(root);
    return o;
}

} // namespace

int main(int argc, char** argv) {
    setenv("DPCPOWER_LOG", "quiet", 1);
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"RUS closed form", rus_closed_form},
        {"NUS corollary cross-validation", nus_corollary},
        {"SUS one-sided bound", sus_upper_bound},
        {"duality and SINR attainment", duality},
        {"approximation dominance and convergence", approximation},
        {"Figure-2 ordering", figure_two_ordering},
        {"distribution suite", distributions},
        {"alpha oracle", alpha_oracle},
        {"determinism", determinism},
    };
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) {
        selected.push_back(std::atoi(argv[i]));
    }
    if (selected.empty()) {
        for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) {
            selected.push_back(i);
        }
    }
    int failures = 0;
    for (int id : selected) {
        if (id < 1 || id > static_cast<int>(criteria.size())) {
            std::printf("FAIL %d unknown criterion\n", id);
            ++failures;
            continue;
        }
        const auto& [name, fn] = criteria[static_cast<std::size_t>(id - 1)];
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
