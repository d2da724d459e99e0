#pragma once

#include <functional>

namespace dpcpower {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
};

struct QuadratureOptions {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    int max_intervals = 20000;
};

/// Globally adaptive 15-point Gauss-Kronrod on [a, b]: the interval with the
/// largest error estimate is bisected until the summed estimate meets the
/// tolerance. Throws NumericalError when max_intervals is exhausted.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& options = {});

/// Integral over [a, inf) for integrands with an exponentially decaying tail.
/// Integrates [a, upper] and then successive doublings [X, 2X] until a piece
/// contributes less than tail_tol of the running total.
QuadratureResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                       double upper, const QuadratureOptions& options = {},
                                       double tail_tol = 1e-12);

} // namespace dpcpower
