#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dpcpower/distributions.hpp"
#include "dpcpower/selection.hpp"

namespace dpcpower {

/// alpha_{M,K} = int_0^inf K e^{-x} x^{M-2} / Gamma(M) [G(M,x)]^{K-1} dx,
/// i.e. E[1/X] for the largest of K squared norms in M complex dimensions.
/// Requires M >= 2 (DivergenceError otherwise) and K >= 1. Memoized; the cache
/// is write-once per key and safe for concurrent callers.
double alpha(int M, int K);

// Same integral, never cached.
double alpha_by_quadrature(int M, int K);

struct AlphaTerm {
    int K;
    double coefficient;
};

// E_{F(M, r, K)}[1/x] = sum_n c_n alpha_{M, n}, from expanding the binomial
// order-statistic CDF into powers of G(M, x).
std::vector<AlphaTerm> order_stat_alpha_terms(int r, int K);
double order_stat_mean_inverse_from_alpha(int M, int r, int K);

// Bracketed sums with the sigma^2 gamma factor removed.
double nus_theorem_sum(int M, int K, int Ks);
double sus_theorem_sum(int M, int K, int Ks);

// Two- and four-user corollary forms written in alpha constants.
double nus_two_user_alpha_form(int M, int K);
double nus_four_user_alpha_form(int M, int K);
double sus_two_user_alpha_form(int M, int K);
double sus_four_user_alpha_form(int M, int K);

// Average minimum transmit power under each selection rule. p_nus and p_sus
// also evaluate the corollary form for K_s in {2, 4} and throw NumericalError
// if it disagrees with the quadrature sum by more than 1e-6 relative.
double p_nus(int M, int K, int Ks, double gamma, double sigma_sq);
double p_sus(int M, int K, int Ks, double gamma, double sigma_sq);
double p_rus(int M, int Ks, double gamma, double sigma_sq);
double p_aus_2(int M, int K, double gamma, double sigma_sq);
double p_lower_bound_2(int M, int K, double gamma, double sigma_sq);

inline constexpr double kCorollaryTolerance = 1e-6;

enum class AnalyticStatus { ok, no_closed_form, divergent, invalid };

std::string_view to_string(AnalyticStatus status) noexcept;

struct AnalyticValue {
    AnalyticStatus status = AnalyticStatus::no_closed_form;
    double value = 0.0;
    std::string detail;

    bool ok() const noexcept { return status == AnalyticStatus::ok; }
};

// Closed-form average power for (algorithm, M, K, K_s), or the reason there is none.
AnalyticValue analytic_average_power(Algorithm algorithm, int M, int K, int Ks, double gamma,
                                     double sigma_sq);
// Two-user benchmark; no_closed_form for K_s != 2.
AnalyticValue analytic_lower_bound(int M, int K, int Ks, double gamma, double sigma_sq);

} // namespace dpcpower
