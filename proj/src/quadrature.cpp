#include "dpcpower/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "dpcpower/errors.hpp"

namespace dpcpower {

namespace {

// Kronrod abscissae (descending, last is the centre) and weights; every
// second abscissa is a 7-point Gauss node.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gauss_kronrod(const std::function<double(double)>& f, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(centre);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    double abs_sum = std::abs(kronrod);
    std::array<double, 7> f1{};
    std::array<double, 7> f2{};
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[static_cast<std::size_t>(j)];
        const double lo = f(centre - dx);
        const double hi = f(centre + dx);
        f1[static_cast<std::size_t>(j)] = lo;
        f2[static_cast<std::size_t>(j)] = hi;
        kronrod += kWgk[static_cast<std::size_t>(j)] * (lo + hi);
        abs_sum += kWgk[static_cast<std::size_t>(j)] * (std::abs(lo) + std::abs(hi));
        if (j % 2 == 1) {
            gauss += kWg[static_cast<std::size_t>(j / 2)] * (lo + hi);
        }
    }
    const double mean = 0.5 * kronrod;
    double asc = kWgk[7] * std::abs(fc - mean);
    for (std::size_t j = 0; j < 7; ++j) {
        asc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
    }
    const double value = kronrod * half;
    abs_sum *= std::abs(half);
    asc *= std::abs(half);
    // QUADPACK error heuristic with a round-off floor.
    double err = std::abs((kronrod - gauss) * half);
    if (asc != 0.0 && err != 0.0) {
        err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    }
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (abs_sum > std::numeric_limits<double>::min() / (50.0 * eps)) {
        err = std::max(50.0 * eps * abs_sum, err);
    }
    return Segment{a, b, value, err};
}

} // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& options) {
    if (a == b) {
        return {};
    }
    std::priority_queue<Segment> heap;
    Segment first = gauss_kronrod(f, a, b);
    double total = first.value;
    double error = first.error;
    heap.push(first);
    int intervals = 1;
    while (error > std::max(options.abs_tol, options.rel_tol * std::abs(total))) {
        if (intervals >= options.max_intervals) {
            throw NumericalError("adaptive quadrature did not converge on [" + std::to_string(a) +
                                 ", " + std::to_string(b) + "]: estimate " +
                                 std::to_string(total) + " +/- " + std::to_string(error));
        }
        const Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const Segment left = gauss_kronrod(f, worst.a, mid);
        const Segment right = gauss_kronrod(f, mid, worst.b);
        heap.push(left);
        heap.push(right);
        ++intervals;
        // Re-sum from the heap contents periodically to avoid drift.
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        if (intervals % 64 == 0) {
            auto copy = heap;
            total = 0.0;
            error = 0.0;
            while (!copy.empty()) {
                total += copy.top().value;
                error += copy.top().error;
                copy.pop();
            }
        }
    }
    return QuadratureResult{total, error, intervals};
}

QuadratureResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                       double upper, const QuadratureOptions& options,
                                       double tail_tol) {
    if (!(upper > a)) {
        upper = a + 1.0;
    }
    QuadratureResult out = integrate(f, a, upper, options);
    double x = upper;
    double width = upper - a;
    for (int round = 0; round < 64; ++round) {
        // Tail pieces are judged against the running total, not their own size.
        QuadratureOptions piece_options = options;
        piece_options.abs_tol = std::max(options.abs_tol, options.rel_tol * std::abs(out.value));
        const QuadratureResult piece = integrate(f, x, x + width, piece_options);
        out.value += piece.value;
        out.error += piece.error;
        out.intervals += piece.intervals;
        if (std::abs(piece.value) <= tail_tol * std::abs(out.value) && out.value != 0.0) {
            return out;
        }
        x += width;
        width *= 2.0;
    }
    throw NumericalError("semi-infinite quadrature tail did not decay");
}

} // namespace dpcpower
