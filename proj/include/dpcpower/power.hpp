#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "dpcpower/channel.hpp"

namespace dpcpower {

// Per-user SINR targets (linear scale) and the common noise variance.
struct SinrTargets {
    std::vector<double> gamma;
    double sigma_sq = 1.0;

    static SinrTargets uniform(double gamma, double sigma_sq, std::size_t users);

    // Throws DimensionError / DomainError.
    void validate(std::size_t users) const;
};

enum class PowerMethod { exact_dual_ul, approx_lemma1, downlink_dual };

std::string_view to_string(PowerMethod method) noexcept;

// Which per-instance power model a caller wants evaluated.
enum class PowerModel { exact, approx };

std::string_view to_string(PowerModel model) noexcept;

struct PowerSolution {
    std::vector<double> per_user_power;
    double total_power = 0.0;
    // Unit-norm transmit directions; filled only by downlink_dual_solution.
    std::vector<ChannelVector> beamformers;
    std::vector<double> achieved_sinr;
    PowerMethod method = PowerMethod::exact_dual_ul;
};

// Channels are given in encoding order: position 0 is interference-free,
// position i is interfered by positions 0..i-1 in the uplink (SIC) view.

/// Minimum total power by back-substitution,
/// p_i = sigma^2 gamma_i / (h_i^H Z_i^{-1} h_i) with
/// Z_i = I + (1/sigma^2) sum_{j<i} p_j h_j h_j^H.
/// Z_i^{-1} is carried by rank-one Sherman-Morrison updates in the
/// sigma^2 = 1 frame; powers are scaled by sigma^2 on exit.
PowerSolution exact_min_power(std::span<const ChannelVector> channels, const SinrTargets& targets);

/// High-SINR approximation p_i = sigma^2 gamma_i / (|h_i|^2 sin^2 theta_{i-1}),
/// theta_{i-1} measured against span{h_0, ..., h_{i-1}}. Throws
/// InfeasibleGeometryError when a channel lies in its predecessors' span.
/// achieved_sinr holds the MMSE-SIC SINR these powers actually deliver.
PowerSolution approx_min_power(std::span<const ChannelVector> channels, const SinrTargets& targets);

/// Downlink beamformers v_i = Z_i^{-1} h_i / |Z_i^{-1} h_i| taken from the exact
/// uplink solution, with downlink powers solved so every user meets its target.
/// In the downlink the user at position k is interfered by the beams of
/// positions j > k (dirty-paper coding pre-cancels j < k), the transpose of
/// the uplink interference pattern, so the total equals exact_min_power.
PowerSolution downlink_dual_solution(std::span<const ChannelVector> channels,
                                     const SinrTargets& targets);

// SINR_k = q_k |h_k^H v_k|^2 / (sigma^2 + sum_{j>k} q_j |h_k^H v_j|^2).
std::vector<double> evaluate_sinr(std::span<const ChannelVector> channels,
                                  std::span<const ChannelVector> beamformers,
                                  std::span<const double> powers, double sigma_sq);

// MMSE-SIC uplink SINR of each position for given uplink powers.
std::vector<double> uplink_sinr(std::span<const ChannelVector> channels,
                                std::span<const double> powers, double sigma_sq);

// Total power only; skips beamformers and SINR bookkeeping.
double exact_total_power(std::span<const ChannelVector> channels, const SinrTargets& targets);
double approx_total_power(std::span<const ChannelVector> channels, const SinrTargets& targets);
double total_power(std::span<const ChannelVector> channels, const SinrTargets& targets,
                   PowerModel model);

} // namespace dpcpower
