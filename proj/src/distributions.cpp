#include "dpcpower/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "dpcpower/analytic.hpp"
#include "dpcpower/errors.hpp"
#include "dpcpower/quadrature.hpp"

namespace dpcpower {

namespace bm = boost::math;

DistributionSpec DistributionSpec::chisq(int M) {
    return {DistributionKind::norm_chisq, M, 0, 0, 0};
}
DistributionSpec DistributionSpec::order_stat(int M, int r, int K) {
    return {DistributionKind::norm_order_stat, M, r, K, 0};
}
DistributionSpec DistributionSpec::not_largest(int M, int K) {
    return {DistributionKind::norm_not_largest, M, 0, K, 0};
}
DistributionSpec DistributionSpec::angle(int M, int i) {
    return {DistributionKind::sin_sq_angle, M, 0, 0, i};
}
DistributionSpec DistributionSpec::angle_max(int M, int K) {
    return {DistributionKind::sin_sq_angle_max, M, 0, K, 0};
}

std::string DistributionSpec::describe() const {
    const std::string m = "M=" + std::to_string(M);
    switch (kind) {
    case DistributionKind::norm_chisq: return "norm_chisq(" + m + ")";
    case DistributionKind::norm_order_stat:
        return "norm_order_stat(" + m + ", r=" + std::to_string(r) + ", K=" + std::to_string(K) + ")";
    case DistributionKind::norm_not_largest:
        return "norm_not_largest(" + m + ", K=" + std::to_string(K) + ")";
    case DistributionKind::sin_sq_angle:
        return "sin_sq_angle(" + m + ", i=" + std::to_string(i) + ")";
    case DistributionKind::sin_sq_angle_max:
        return "sin_sq_angle_max(" + m + ", K=" + std::to_string(K) + ")";
    }
    return "unknown";
}

void DistributionSpec::validate() const {
    auto fail = [this](const std::string& why) {
        throw ConfigError("invalid " + describe() + ": " + why);
    };
    if (M < 1) {
        fail("M must be >= 1");
    }
    switch (kind) {
    case DistributionKind::norm_chisq: break;
    case DistributionKind::norm_order_stat:
        if (K < 1 || r < 1 || r > K) {
            fail("need 1 <= r <= K");
        }
        break;
    case DistributionKind::norm_not_largest:
        if (K < 2) {
            fail("need K >= 2");
        }
        break;
    case DistributionKind::sin_sq_angle:
        if (i < 1 || i > M - 1) {
            fail("need 1 <= i <= M-1");
        }
        break;
    case DistributionKind::sin_sq_angle_max:
        if (M < 2 || K < 1) {
            fail("need M >= 2 and K >= 1");
        }
        break;
    }
}

double DistributionSpec::support_upper() const {
    switch (kind) {
    case DistributionKind::sin_sq_angle:
    case DistributionKind::sin_sq_angle_max: return 1.0;
    default: return std::numeric_limits<double>::infinity();
    }
}

double regularized_gamma(int M, double x) {
    return x <= 0.0 ? 0.0 : bm::gamma_p(static_cast<double>(M), x);
}

double regularized_gamma_complement(int M, double x) {
    return x <= 0.0 ? 1.0 : bm::gamma_q(static_cast<double>(M), x);
}

namespace {

double chisq_pdf(int M, double x) {
    return x <= 0.0 ? (M == 1 ? 1.0 : 0.0) : bm::gamma_p_derivative(static_cast<double>(M), x);
}

// P(r-th largest <= x) = sum_{j=K+1-r}^{K} C(K, j) G^j (1-G)^{K-j}.
double order_stat_cdf(int M, int r, int K, double x) {
    const double g = regularized_gamma(M, x);
    const double q = regularized_gamma_complement(M, x);
    double sum = 0.0;
    for (int j = K + 1 - r; j <= K; ++j) {
        sum += bm::binomial_coefficient<double>(static_cast<unsigned>(K), static_cast<unsigned>(j)) *
               std::pow(g, j) * std::pow(q, K - j);
    }
    return std::min(sum, 1.0);
}

double order_stat_pdf(int M, int r, int K, double x) {
    const double g = regularized_gamma(M, x);
    const double q = regularized_gamma_complement(M, x);
    const double coeff =
        K * bm::binomial_coefficient<double>(static_cast<unsigned>(K - 1), static_cast<unsigned>(r - 1));
    return coeff * std::pow(g, K - r) * std::pow(q, r - 1) * chisq_pdf(M, x);
}

} // namespace

double cdf(const DistributionSpec& spec, double x) {
    spec.validate();
    switch (spec.kind) {
    case DistributionKind::norm_chisq: return regularized_gamma(spec.M, x);
    case DistributionKind::norm_order_stat: return order_stat_cdf(spec.M, spec.r, spec.K, x);
    case DistributionKind::norm_not_largest: {
        const double g = regularized_gamma(spec.M, x);
        const double k = spec.K;
        return std::clamp(k / (k - 1.0) * g - std::pow(g, spec.K) / (k - 1.0), 0.0, 1.0);
    }
    case DistributionKind::sin_sq_angle: {
        const double t = std::clamp(x, 0.0, 1.0);
        return bm::ibeta(static_cast<double>(spec.M - spec.i), static_cast<double>(spec.i), t);
    }
    case DistributionKind::sin_sq_angle_max: {
        const double t = std::clamp(x, 0.0, 1.0);
        return std::pow(t, spec.K * (spec.M - 1));
    }
    }
    return 0.0;
}

double pdf(const DistributionSpec& spec, double x) {
    spec.validate();
    switch (spec.kind) {
    case DistributionKind::norm_chisq: return x < 0.0 ? 0.0 : chisq_pdf(spec.M, x);
    case DistributionKind::norm_order_stat:
        return x < 0.0 ? 0.0 : order_stat_pdf(spec.M, spec.r, spec.K, x);
    case DistributionKind::norm_not_largest: {
        if (x < 0.0) {
            return 0.0;
        }
        // d/dx [K/(K-1) G - G^K/(K-1)] = K g (1 - G^{K-1}) / (K-1)
        const double g = regularized_gamma(spec.M, x);
        const double k = spec.K;
        return k / (k - 1.0) * chisq_pdf(spec.M, x) * (1.0 - std::pow(g, spec.K - 1));
    }
    case DistributionKind::sin_sq_angle:
        if (x < 0.0 || x > 1.0) {
            return 0.0;
        }
        return bm::ibeta_derivative(static_cast<double>(spec.M - spec.i),
                                    static_cast<double>(spec.i), x);
    case DistributionKind::sin_sq_angle_max: {
        if (x < 0.0 || x > 1.0) {
            return 0.0;
        }
        const int n = spec.K * (spec.M - 1);
        return n * std::pow(x, n - 1);
    }
    }
    return 0.0;
}

int density_leading_exponent(const DistributionSpec& spec) {
    spec.validate();
    switch (spec.kind) {
    case DistributionKind::norm_chisq: return spec.M - 1;
    case DistributionKind::norm_order_stat: return spec.M * (spec.K + 1 - spec.r) - 1;
    case DistributionKind::norm_not_largest: return spec.M - 1;
    case DistributionKind::sin_sq_angle: return spec.M - spec.i - 1;
    case DistributionKind::sin_sq_angle_max: return spec.K * (spec.M - 1) - 1;
    }
    return 0;
}

namespace {

void require_convergent(const DistributionSpec& spec) {
    const int p = density_leading_exponent(spec);
    if (p < 1) {
        throw DivergenceError("E[1/x] diverges for " + spec.describe() + ": density ~ x^" +
                              std::to_string(p) + " near 0");
    }
}

} // namespace

std::optional<double> mean_inverse_closed_form(const DistributionSpec& spec) {
    require_convergent(spec);
    switch (spec.kind) {
    case DistributionKind::norm_chisq: return 1.0 / (spec.M - 1);
    case DistributionKind::sin_sq_angle:
        return static_cast<double>(spec.M - 1) / static_cast<double>(spec.M - spec.i - 1);
    case DistributionKind::sin_sq_angle_max: {
        const double n = spec.K * (spec.M - 1);
        return n / (n - 1.0);
    }
    case DistributionKind::norm_not_largest: {
        const double k = spec.K;
        return (k / (spec.M - 1) - alpha(spec.M, spec.K)) / (k - 1.0);
    }
    case DistributionKind::norm_order_stat:
        if (spec.r == 1 && spec.M >= 2) {
            return alpha(spec.M, spec.K);
        }
        return std::nullopt;
    }
    return std::nullopt;
}

double mean_inverse_by_quadrature(const DistributionSpec& spec) {
    require_convergent(spec);
    const auto integrand = [&spec](double x) { return x > 0.0 ? pdf(spec, x) / x : 0.0; };
    QuadratureOptions opts;
    opts.rel_tol = 1e-12;
    if (spec.support_upper() == 1.0) {
        return integrate(integrand, 0.0, 1.0, opts).value;
    }
    // Mass of the largest of K chi-square norms sits near M + ln K.
    const double scale = 2.0 * (spec.M + std::log(std::max(spec.K, 1)) + 5.0);
    return integrate_to_infinity(integrand, 0.0, scale, opts, 1e-14).value;
}

double mean_inverse(const DistributionSpec& spec) {
    if (auto closed = mean_inverse_closed_form(spec)) {
        return *closed;
    }
    return mean_inverse_by_quadrature(spec);
}

} // namespace dpcpower
