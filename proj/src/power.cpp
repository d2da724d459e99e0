#include "dpcpower/power.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "dpcpower/errors.hpp"

namespace dpcpower {

SinrTargets SinrTargets::uniform(double gamma, double sigma_sq, std::size_t users) {
    return SinrTargets{std::vector<double>(users, gamma), sigma_sq};
}

void SinrTargets::validate(std::size_t users) const {
    if (gamma.size() != users) {
        throw DimensionError("expected " + std::to_string(users) + " SINR targets, got " +
                             std::to_string(gamma.size()));
    }
    for (double g : gamma) {
        if (!(g > 0.0) || !std::isfinite(g)) {
            throw DomainError("SINR targets must be positive and finite");
        }
    }
    if (!(sigma_sq > 0.0) || !std::isfinite(sigma_sq)) {
        throw DomainError("noise variance must be positive and finite");
    }
}

std::string_view to_string(PowerMethod method) noexcept {
    switch (method) {
    case PowerMethod::exact_dual_ul: return "exact_dual_ul";
    case PowerMethod::approx_lemma1: return "approx_lemma1";
    case PowerMethod::downlink_dual: return "downlink_dual";
    }
    return "unknown";
}

std::string_view to_string(PowerModel model) noexcept {
    return model == PowerModel::exact ? "exact" : "approx";
}

namespace {

void check_channels(std::span<const ChannelVector> channels, const SinrTargets& targets) {
    targets.validate(channels.size());
    if (channels.empty()) {
        return;
    }
    const auto dim = channels.front().size();
    for (std::size_t i = 0; i < channels.size(); ++i) {
        if (channels[i].size() != dim) {
            throw DimensionError("channels must share one dimension");
        }
        if (!(channels[i].squaredNorm() > 0.0)) {
            throw DomainError("channel at position " + std::to_string(i) + " has zero norm");
        }
    }
}

struct UplinkRecursion {
    std::vector<double> powers;        // physical powers
    std::vector<double> gains;         // h_i^H Z_i^{-1} h_i
    std::vector<ChannelVector> filters; // Z_i^{-1} h_i
};

// Back-substitution in the sigma^2 = 1 frame.
UplinkRecursion run_uplink(std::span<const ChannelVector> channels, const SinrTargets& targets,
                           bool keep_filters) {
    UplinkRecursion out;
    if (channels.empty()) {
        return out;
    }
    const auto dim = channels.front().size();
    Eigen::MatrixXcd z_inv = Eigen::MatrixXcd::Identity(dim, dim);
    out.powers.reserve(channels.size());
    out.gains.reserve(channels.size());
    for (std::size_t i = 0; i < channels.size(); ++i) {
        const ChannelVector& h = channels[i];
        ChannelVector w = z_inv * h;
        const double gain = h.dot(w).real();
        const double p = targets.gamma[i] / gain;
        out.powers.push_back(p * targets.sigma_sq);
        out.gains.push_back(gain);
        if (i + 1 < channels.size()) {
            // (Z + p h h^H)^{-1} = Z^{-1} - p w w^H / (1 + p h^H w)
            z_inv.noalias() -= (p / (1.0 + p * gain)) * (w * w.adjoint());
        }
        if (keep_filters) {
            out.filters.push_back(std::move(w));
        }
    }
    return out;
}

double sum_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0);
}

} // namespace

PowerSolution exact_min_power(std::span<const ChannelVector> channels, const SinrTargets& targets) {
    check_channels(channels, targets);
    UplinkRecursion up = run_uplink(channels, targets, false);
    PowerSolution sol;
    sol.method = PowerMethod::exact_dual_ul;
    sol.achieved_sinr.reserve(channels.size());
    for (std::size_t i = 0; i < channels.size(); ++i) {
        sol.achieved_sinr.push_back(up.powers[i] / targets.sigma_sq * up.gains[i]);
    }
    sol.per_user_power = std::move(up.powers);
    sol.total_power = sum_of(sol.per_user_power);
    return sol;
}

namespace {

std::vector<double> approx_powers(std::span<const ChannelVector> channels,
                                  const SinrTargets& targets) {
    std::vector<double> powers;
    if (channels.empty()) {
        return powers;
    }
    const int dim = static_cast<int>(channels.front().size());
    OrthonormalBasis basis(dim);
    powers.reserve(channels.size());
    for (std::size_t i = 0; i < channels.size(); ++i) {
        const ChannelVector& h = channels[i];
        const double residual = basis.residual_squared_norm(h);
        const double tol = OrthonormalBasis::kRankTolerance;
        if (!(residual > tol * tol * h.squaredNorm())) {
            throw InfeasibleGeometryError("channel at position " + std::to_string(i) +
                                          " lies in the span of its " + std::to_string(i) +
                                          " predecessors (sin^2 theta = 0)");
        }
        // |h|^2 sin^2 theta is exactly the residual energy.
        powers.push_back(targets.sigma_sq * targets.gamma[i] / residual);
        if (i + 1 < channels.size()) {
            basis.append(h);
        }
    }
    return powers;
}

} // namespace

PowerSolution approx_min_power(std::span<const ChannelVector> channels,
                               const SinrTargets& targets) {
    check_channels(channels, targets);
    PowerSolution sol;
    sol.method = PowerMethod::approx_lemma1;
    sol.per_user_power = approx_powers(channels, targets);
    sol.total_power = sum_of(sol.per_user_power);
    sol.achieved_sinr = uplink_sinr(channels, sol.per_user_power, targets.sigma_sq);
    return sol;
}

PowerSolution downlink_dual_solution(std::span<const ChannelVector> channels,
                                     const SinrTargets& targets) {
    check_channels(channels, targets);
    UplinkRecursion up = run_uplink(channels, targets, true);
    const std::size_t n = channels.size();

    PowerSolution sol;
    sol.method = PowerMethod::downlink_dual;
    sol.beamformers.reserve(n);
    for (auto& w : up.filters) {
        sol.beamformers.push_back(w / w.norm());
    }

    // Last position sees no downlink interference; solve backwards.
    std::vector<double> q(n, 0.0);
    for (std::size_t k = n; k-- > 0;) {
        double interference = targets.sigma_sq;
        for (std::size_t j = k + 1; j < n; ++j) {
            interference += q[j] * std::norm(channels[k].dot(sol.beamformers[j]));
        }
        const double signal_gain = std::norm(channels[k].dot(sol.beamformers[k]));
        q[k] = targets.gamma[k] * interference / signal_gain;
    }
    sol.per_user_power = std::move(q);
    sol.total_power = sum_of(sol.per_user_power);
    sol.achieved_sinr =
        evaluate_sinr(channels, sol.beamformers, sol.per_user_power, targets.sigma_sq);
    return sol;
}

std::vector<double> evaluate_sinr(std::span<const ChannelVector> channels,
                                  std::span<const ChannelVector> beamformers,
                                  std::span<const double> powers, double sigma_sq) {
    if (channels.size() != beamformers.size() || channels.size() != powers.size()) {
        throw DimensionError("evaluate_sinr: channels, beamformers and powers differ in length");
    }
    if (!(sigma_sq > 0.0)) {
        throw DomainError("noise variance must be positive");
    }
    const std::size_t n = channels.size();
    std::vector<double> sinr(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (channels[k].size() != beamformers[k].size()) {
            throw DimensionError("evaluate_sinr: channel/beamformer dimension mismatch");
        }
        double denom = sigma_sq;
        for (std::size_t j = k + 1; j < n; ++j) {
            denom += powers[j] * std::norm(channels[k].dot(beamformers[j]));
        }
        sinr[k] = powers[k] * std::norm(channels[k].dot(beamformers[k])) / denom;
    }
    return sinr;
}

std::vector<double> uplink_sinr(std::span<const ChannelVector> channels,
                                std::span<const double> powers, double sigma_sq) {
    if (channels.size() != powers.size()) {
        throw DimensionError("uplink_sinr: channels and powers differ in length");
    }
    std::vector<double> sinr;
    if (channels.empty()) {
        return sinr;
    }
    const auto dim = channels.front().size();
    Eigen::MatrixXcd z_inv = Eigen::MatrixXcd::Identity(dim, dim);
    sinr.reserve(channels.size());
    for (std::size_t i = 0; i < channels.size(); ++i) {
        const ChannelVector& h = channels[i];
        const ChannelVector w = z_inv * h;
        const double gain = h.dot(w).real();
        const double p = powers[i] / sigma_sq;
        sinr.push_back(p * gain);
        z_inv.noalias() -= (p / (1.0 + p * gain)) * (w * w.adjoint());
    }
    return sinr;
}

double exact_total_power(std::span<const ChannelVector> channels, const SinrTargets& targets) {
    check_channels(channels, targets);
    return sum_of(run_uplink(channels, targets, false).powers);
}

double approx_total_power(std::span<const ChannelVector> channels, const SinrTargets& targets) {
    check_channels(channels, targets);
    return sum_of(approx_powers(channels, targets));
}

double total_power(std::span<const ChannelVector> channels, const SinrTargets& targets,
                   PowerModel model) {
    return model == PowerModel::exact ? exact_total_power(channels, targets)
                                      : approx_total_power(channels, targets);
}

} // namespace dpcpower
