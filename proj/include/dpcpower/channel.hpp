#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace dpcpower {

using Complex = std::complex<double>;

// One user's M-dimensional complex channel h_k.
using ChannelVector = Eigen::VectorXcd;

using Engine = std::mt19937_64;

// (master_seed, stream_index) -> generator state is a pure function.
struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_index = 0;
};

Engine make_engine(const SeedSpec& seed);

// K user channels of common dimension M (rows of the forward channel matrix).
class ChannelSet {
public:
    ChannelSet(int antennas, std::vector<ChannelVector> users);

    int antennas() const noexcept { return antennas_; }
    int user_count() const noexcept { return static_cast<int>(users_.size()); }

    const ChannelVector& operator[](std::size_t k) const { return users_[k]; }
    const ChannelVector& at(std::size_t k) const { return users_.at(k); }
    std::span<const ChannelVector> vectors() const noexcept { return users_; }

    // Channels of the given users, in the given order.
    std::vector<ChannelVector> gather(std::span<const int> indices) const;

private:
    int antennas_;
    std::vector<ChannelVector> users_;
};

// I.i.d. CN(0, 1) entries; a zero vector is redrawn.
ChannelVector sample_channel_vector(int antennas, Engine& engine);
ChannelSet sample_channel_set(int antennas, int users, Engine& engine);
ChannelSet sample_channel_set(int antennas, int users, const SeedSpec& seed);

double squared_norm(const ChannelVector& h) noexcept;

/// Orthonormal basis grown one vector at a time by modified Gram-Schmidt with
/// a second orthogonalization pass. A candidate whose residual falls below
/// kRankTolerance of its own norm is rejected as dependent.
class OrthonormalBasis {
public:
    static constexpr double kRankTolerance = 1e-12;

    explicit OrthonormalBasis(int dimension);

    int dimension() const noexcept { return dimension_; }
    int size() const noexcept { return static_cast<int>(q_.size()); }
    bool empty() const noexcept { return q_.empty(); }

    // Throws FullSpaceError when the basis already spans C^M and
    // RankDeficiencyError when v is (numerically) inside the span.
    void append(const ChannelVector& v);

    // h minus its orthogonal projection onto the span.
    ChannelVector residual(const ChannelVector& h) const;
    double residual_squared_norm(const ChannelVector& h) const;

private:
    int dimension_;
    std::vector<ChannelVector> q_;
};

// Residual of h after orthogonal projection onto span(basis); basis.size() < M.
ChannelVector project_out(const ChannelVector& h, std::span<const ChannelVector> basis);

// sin^2 of the angle between h and span(basis); exactly 1 for an empty basis.
double sin_sq_angle(const ChannelVector& h, std::span<const ChannelVector> basis);

} // namespace dpcpower
