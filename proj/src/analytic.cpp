#include "dpcpower/analytic.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "dpcpower/errors.hpp"
#include "dpcpower/quadrature.hpp"

namespace dpcpower {

namespace {

std::string mk(int M, int K) {
    return "M=" + std::to_string(M) + ", K=" + std::to_string(K);
}

class AlphaCache {
public:
    double get(int M, int K) {
        {
            std::lock_guard lock(mutex_);
            if (auto it = values_.find({M, K}); it != values_.end()) {
                return it->second;
            }
        }
        const double value = alpha_by_quadrature(M, K);
        std::lock_guard lock(mutex_);
        values_.emplace(std::make_pair(M, K), value);
        return value;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<int, int>, double> values_;
};

AlphaCache& alpha_cache() {
    static AlphaCache cache;
    return cache;
}

} // namespace

double alpha_by_quadrature(int M, int K) {
    if (K < 1) {
        throw ConfigError("alpha needs K >= 1 (" + mk(M, K) + ")");
    }
    if (M < 2) {
        throw DivergenceError("alpha diverges for M < 2 (" + mk(M, K) + ")");
    }
    const double log_gamma_m = std::lgamma(static_cast<double>(M));
    const auto integrand = [M, K, log_gamma_m](double x) {
        if (x <= 0.0) {
            return M == 2 ? static_cast<double>(K == 1) * std::exp(-log_gamma_m) : 0.0;
        }
        const double base = std::exp(-x + (M - 2) * std::log(x) - log_gamma_m);
        return K * base * std::pow(boost::math::gamma_p(static_cast<double>(M), x), K - 1);
    };
    QuadratureOptions opts;
    opts.rel_tol = 1e-13;
    const double upper = 2.0 * (M + std::log(static_cast<double>(K)) + 5.0);
    return integrate_to_infinity(integrand, 0.0, upper, opts, 1e-15).value;
}

double alpha(int M, int K) {
    if (K < 1) {
        throw ConfigError("alpha needs K >= 1 (" + mk(M, K) + ")");
    }
    if (M < 2) {
        throw DivergenceError("alpha diverges for M < 2 (" + mk(M, K) + ")");
    }
    return alpha_cache().get(M, K);
}

std::vector<AlphaTerm> order_stat_alpha_terms(int r, int K) {
    if (K < 1 || r < 1 || r > K) {
        throw ConfigError("order statistic needs 1 <= r <= K");
    }
    namespace bm = boost::math;
    // coefficient of G^n for n = K+1-r .. K
    std::vector<double> coeff(static_cast<std::size_t>(K + 1), 0.0);
    for (int j = K + 1 - r; j <= K; ++j) {
        const double cj = bm::binomial_coefficient<double>(static_cast<unsigned>(K), static_cast<unsigned>(j));
        for (int l = 0; l <= K - j; ++l) {
            const double sign = (l % 2 == 0) ? 1.0 : -1.0;
            coeff[static_cast<std::size_t>(j + l)] +=
                sign * cj *
                bm::binomial_coefficient<double>(static_cast<unsigned>(K - j), static_cast<unsigned>(l));
        }
    }
    std::vector<AlphaTerm> terms;
    for (int n = K + 1 - r; n <= K; ++n) {
        if (coeff[static_cast<std::size_t>(n)] != 0.0) {
            terms.push_back({n, coeff[static_cast<std::size_t>(n)]});
        }
    }
    return terms;
}

double order_stat_mean_inverse_from_alpha(int M, int r, int K) {
    double sum = 0.0;
    for (const auto& term : order_stat_alpha_terms(r, K)) {
        sum += term.coefficient * alpha(M, term.K);
    }
    return sum;
}

double nus_two_user_alpha_form(int M, int K) {
    const double k = K;
    return k * alpha(M, K - 1) - (k - 2.0 - 1.0 / (M - 2)) * alpha(M, K);
}

double nus_four_user_alpha_form(int M, int K) {
    const double k = K;
    const double m = M;
    const double a0 = alpha(M, K);
    const double a1 = alpha(M, K - 1);
    const double a2 = alpha(M, K - 2);
    const double a3 = alpha(M, K - 3);
    return (m - 1) / (m - 4) * a0 + (k * a1 - (k - 1) * a0) * (m - 1) / (m - 3) +
           (k * (k - 1) / 2 * a2 - k * (k - 2) * a1 + (k - 1) * (k - 2) / 2 * a0) * (m - 1) /
               (m - 2) +
           (k * (k - 1) * (k - 2) / 6 * a3 - k * (k - 1) * (k - 3) / 2 * a2 +
            k * (k - 2) * (k - 3) / 2 * a1 - (k - 1) * (k - 2) * (k - 3) / 6 * a0);
}

double sus_two_user_alpha_form(int M, int K) {
    const double k = K;
    return alpha(M, K) + k * alpha(M - 1, K - 1) - (k - 1) * alpha(M - 1, K);
}

double sus_four_user_alpha_form(int M, int K) {
    const double k = K;
    return alpha(M, K) + k * alpha(M - 1, K - 1) - (k - 1) * alpha(M - 1, K) +
           k * (k - 1) / 2 * alpha(M - 2, K - 2) - k * (k - 2) * alpha(M - 2, K - 1) +
           (k - 1) * (k - 2) / 2 * alpha(M - 2, K) +
           k * (k - 1) * (k - 2) / 6 * alpha(M - 3, K - 3) -
           k * (k - 1) * (k - 3) / 2 * alpha(M - 3, K - 2) +
           k * (k - 2) * (k - 3) / 2 * alpha(M - 3, K - 1) -
           (k - 1) * (k - 2) * (k - 3) / 6 * alpha(M - 3, K);
}

namespace {

void check_common(int M, int K, int Ks, const char* who) {
    if (M < 1 || K < 1 || Ks < 1 || Ks > K) {
        throw ConfigError(std::string(who) + " needs M >= 1 and 1 <= Ks <= K (M=" +
                          std::to_string(M) + ", K=" + std::to_string(K) + ", Ks=" +
                          std::to_string(Ks) + ")");
    }
}

void check_scale(double gamma, double sigma_sq) {
    if (!(gamma > 0.0) || !(sigma_sq > 0.0)) {
        throw ConfigError("gamma and sigma_sq must be positive");
    }
}

template <class Fn>
double term_or_rethrow(const char* who, int i, Fn&& fn) {
    try {
        return fn();
    } catch (const DivergenceError& e) {
        throw DivergenceError(std::string(who) + " term i=" + std::to_string(i) + ": " + e.what());
    }
}

void cross_check(const char* who, double sum, double form, int M, int K, int Ks) {
    const double rel = std::abs(sum - form) / std::abs(sum);
    if (!(rel <= kCorollaryTolerance)) {
        throw NumericalError(std::string(who) + " corollary disagrees with theorem sum at M=" +
                             std::to_string(M) + ", K=" + std::to_string(K) + ", Ks=" +
                             std::to_string(Ks) + ": " + std::to_string(sum) + " vs " +
                             std::to_string(form));
    }
}

} // namespace

double nus_theorem_sum(int M, int K, int Ks) {
    check_common(M, K, Ks, "NUS");
    double sum = 0.0;
    for (int i = 1; i <= Ks; ++i) {
        sum += term_or_rethrow("NUS", i, [&] {
            // User decoded i-th was picked at step Ks+1-i and faces i-1 interferers.
            const double norm_part = mean_inverse(DistributionSpec::order_stat(M, Ks + 1 - i, K));
            if (i == 1) {
                return norm_part;
            }
            if (i - 1 > M - 1) {
                throw DivergenceError("interference subspace of dimension " +
                                      std::to_string(i - 1) + " fills C^" + std::to_string(M));
            }
            return norm_part * mean_inverse(DistributionSpec::angle(M, i - 1));
        });
    }
    return sum;
}

double sus_theorem_sum(int M, int K, int Ks) {
    check_common(M, K, Ks, "SUS");
    if (Ks > M) {
        throw ConfigError("SUS needs Ks <= M (M=" + std::to_string(M) + ", Ks=" +
                          std::to_string(Ks) + ")");
    }
    double sum = 0.0;
    for (int i = 1; i <= Ks; ++i) {
        sum += term_or_rethrow("SUS", i, [&] {
            return mean_inverse(DistributionSpec::order_stat(M + 1 - i, i, K));
        });
    }
    return sum;
}

double p_nus(int M, int K, int Ks, double gamma, double sigma_sq) {
    check_scale(gamma, sigma_sq);
    const double sum = nus_theorem_sum(M, K, Ks);
    if (Ks == 2) {
        cross_check("NUS", sum, nus_two_user_alpha_form(M, K), M, K, Ks);
    } else if (Ks == 4) {
        cross_check("NUS", sum, nus_four_user_alpha_form(M, K), M, K, Ks);
    }
    return sigma_sq * gamma * sum;
}

double p_sus(int M, int K, int Ks, double gamma, double sigma_sq) {
    check_scale(gamma, sigma_sq);
    const double sum = sus_theorem_sum(M, K, Ks);
    // The alpha forms need every alpha_{M+1-Ks, .} finite.
    if (M + 1 - Ks >= 2) {
        if (Ks == 2) {
            cross_check("SUS", sum, sus_two_user_alpha_form(M, K), M, K, Ks);
        } else if (Ks == 4) {
            cross_check("SUS", sum, sus_four_user_alpha_form(M, K), M, K, Ks);
        }
    }
    return sigma_sq * gamma * sum;
}

double p_rus(int M, int Ks, double gamma, double sigma_sq) {
    check_scale(gamma, sigma_sq);
    if (M < 1 || Ks < 1) {
        throw ConfigError("RUS needs M >= 1 and Ks >= 1");
    }
    if (Ks >= M) {
        throw DivergenceError("RUS average power diverges for Ks >= M (M=" + std::to_string(M) +
                              ", Ks=" + std::to_string(Ks) + "): term 1/(M-Ks) undefined");
    }
    double sum = 0.0;
    for (int i = 1; i <= Ks; ++i) {
        sum += 1.0 / (M - i);
    }
    return sigma_sq * gamma * sum;
}

namespace {

void check_two_user(int M, int K, const char* who) {
    if (M < 3 || K < 2 || (M - 1) * (K - 1) <= 1) {
        throw ConfigError(std::string(who) + " needs M >= 3, K >= 2 and (M-1)(K-1) > 1 (" +
                          mk(M, K) + ")");
    }
}

} // namespace

double p_aus_2(int M, int K, double gamma, double sigma_sq) {
    check_scale(gamma, sigma_sq);
    check_two_user(M, K, "AUS");
    const double k = K;
    const double m = M;
    const double n = (m - 1) * (k - 1);
    const double a = alpha(M, K);
    return sigma_sq * gamma * ((k / (m - 1) - a) / (k - 1) + n * a / (n - 1));
}

double p_lower_bound_2(int M, int K, double gamma, double sigma_sq) {
    check_scale(gamma, sigma_sq);
    check_two_user(M, K, "lower bound");
    const double k = K;
    const double m = M;
    const double n = (m - 1) * (k - 1);
    return sigma_sq * gamma * (k * alpha(M, K - 1) - (k - 1) * (1 - (m - 1) / (n - 1)) * alpha(M, K));
}

std::string_view to_string(AnalyticStatus status) noexcept {
    switch (status) {
    case AnalyticStatus::ok: return "ok";
    case AnalyticStatus::no_closed_form: return "no_closed_form";
    case AnalyticStatus::divergent: return "divergent";
    case AnalyticStatus::invalid: return "invalid";
    }
    return "unknown";
}

namespace {

template <class Fn>
AnalyticValue guarded(Fn&& fn) {
    try {
        return AnalyticValue{AnalyticStatus::ok, fn(), {}};
    } catch (const DivergenceError& e) {
        return AnalyticValue{AnalyticStatus::divergent, 0.0, e.what()};
    } catch (const ConfigError& e) {
        return AnalyticValue{AnalyticStatus::invalid, 0.0, e.what()};
    }
}

} // namespace

AnalyticValue analytic_average_power(Algorithm algorithm, int M, int K, int Ks, double gamma,
                                     double sigma_sq) {
    switch (algorithm) {
    case Algorithm::nus: return guarded([&] { return p_nus(M, K, Ks, gamma, sigma_sq); });
    case Algorithm::sus: return guarded([&] { return p_sus(M, K, Ks, gamma, sigma_sq); });
    case Algorithm::rus:
        return guarded([&] {
            if (Ks > K) {
                throw ConfigError("RUS needs Ks <= K");
            }
            return p_rus(M, Ks, gamma, sigma_sq);
        });
    case Algorithm::aus:
        if (Ks != 2) {
            return {AnalyticStatus::no_closed_form, 0.0, "AUS closed form exists for Ks=2 only"};
        }
        return guarded([&] { return p_aus_2(M, K, gamma, sigma_sq); });
    case Algorithm::exhaustive:
        return {AnalyticStatus::no_closed_form, 0.0, "exhaustive search has no closed form"};
    }
    return {};
}

AnalyticValue analytic_lower_bound(int M, int K, int Ks, double gamma, double sigma_sq) {
    if (Ks != 2) {
        return {AnalyticStatus::no_closed_form, 0.0, "lower bound exists for Ks=2 only"};
    }
    return guarded([&] { return p_lower_bound_2(M, K, gamma, sigma_sq); });
}

} // namespace dpcpower
