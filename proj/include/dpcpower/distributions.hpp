#pragma once

#include <optional>
#include <string>

namespace dpcpower {

// Families of squared-norm and sin^2-angle laws for i.i.d. CN(0, I_M) channels.
enum class DistributionKind {
    norm_chisq,        // |h|^2, CDF G(M, x)
    norm_order_stat,   // r-th largest of K squared norms
    norm_not_largest,  // a random user among K that is not the strongest
    sin_sq_angle,      // sin^2 to an independent i-dimensional subspace, Beta(M-i, i)
    sin_sq_angle_max,  // largest of K independent sin^2 theta_1 values, x^{K(M-1)}
};

struct DistributionSpec {
    DistributionKind kind = DistributionKind::norm_chisq;
    int M = 1;
    int r = 0; // order-statistic rank (1 = largest)
    int K = 0; // population size; for sin_sq_angle_max the number of competing projections
    int i = 0; // subspace dimension

    static DistributionSpec chisq(int M);
    static DistributionSpec order_stat(int M, int r, int K);
    static DistributionSpec not_largest(int M, int K);
    static DistributionSpec angle(int M, int i);
    static DistributionSpec angle_max(int M, int K);

    // Throws ConfigError for parameters outside the family's domain.
    void validate() const;
    std::string describe() const;
    // 1 for angle families, +inf for norm families.
    double support_upper() const;
};

// Regularized lower incomplete gamma G(M, x) and its complement.
double regularized_gamma(int M, double x);
double regularized_gamma_complement(int M, double x);

double cdf(const DistributionSpec& spec, double x);
double pdf(const DistributionSpec& spec, double x);

// p with pdf(x) ~ c x^p as x -> 0+. E[1/X] converges iff p >= 1.
int density_leading_exponent(const DistributionSpec& spec);

/// E[1/X]. Uses the closed form where the family has one, otherwise
/// quadrature of pdf(x)/x. Throws DivergenceError when the integral diverges.
double mean_inverse(const DistributionSpec& spec);

// E[1/X] by quadrature only (relative tolerance 1e-10).
double mean_inverse_by_quadrature(const DistributionSpec& spec);

// Closed form of E[1/X] when one exists (alpha-based forms included).
std::optional<double> mean_inverse_closed_form(const DistributionSpec& spec);

} // namespace dpcpower
