#include "dpcpower/channel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "dpcpower/errors.hpp"

namespace dpcpower {

namespace {

void check_dimensions(int antennas, int users) {
    if (antennas < 1 || users < 1) {
        throw DimensionError("channel set needs M >= 1 and K >= 1 (got M=" + std::to_string(antennas) +
                             ", K=" + std::to_string(users) + ")");
    }
}

} // namespace

Engine make_engine(const SeedSpec& seed) {
    const std::array<std::uint32_t, 4> words = {
        static_cast<std::uint32_t>(seed.master_seed),
        static_cast<std::uint32_t>(seed.master_seed >> 32),
        static_cast<std::uint32_t>(seed.stream_index),
        static_cast<std::uint32_t>(seed.stream_index >> 32),
    };
    std::seed_seq seq(words.begin(), words.end());
    return Engine(seq);
}

ChannelSet::ChannelSet(int antennas, std::vector<ChannelVector> users)
    : antennas_(antennas), users_(std::move(users)) {
    check_dimensions(antennas_, static_cast<int>(users_.size()));
    for (std::size_t k = 0; k < users_.size(); ++k) {
        if (users_[k].size() != antennas_) {
            throw DimensionError("user " + std::to_string(k) + " has dimension " +
                                 std::to_string(users_[k].size()) + ", expected " +
                                 std::to_string(antennas_));
        }
    }
}

std::vector<ChannelVector> ChannelSet::gather(std::span<const int> indices) const {
    std::vector<ChannelVector> out;
    out.reserve(indices.size());
    for (int k : indices) {
        out.push_back(users_.at(static_cast<std::size_t>(k)));
    }
    return out;
}

ChannelVector sample_channel_vector(int antennas, Engine& engine) {
    check_dimensions(antennas, 1);
    // Real and imaginary parts each carry half of the unit variance.
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    ChannelVector h(antennas);
    do {
        for (int m = 0; m < antennas; ++m) {
            const double re = normal(engine);
            const double im = normal(engine);
            h[m] = Complex(re, im);
        }
    } while (h.squaredNorm() == 0.0);
    return h;
}

ChannelSet sample_channel_set(int antennas, int users, Engine& engine) {
    check_dimensions(antennas, users);
    std::vector<ChannelVector> hs;
    hs.reserve(static_cast<std::size_t>(users));
    for (int k = 0; k < users; ++k) {
        hs.push_back(sample_channel_vector(antennas, engine));
    }
    return ChannelSet(antennas, std::move(hs));
}

ChannelSet sample_channel_set(int antennas, int users, const SeedSpec& seed) {
    check_dimensions(antennas, users);
    Engine engine = make_engine(seed);
    return sample_channel_set(antennas, users, engine);
}

double squared_norm(const ChannelVector& h) noexcept {
    return h.squaredNorm();
}

OrthonormalBasis::OrthonormalBasis(int dimension) : dimension_(dimension) {
    if (dimension < 1) {
        throw DimensionError("basis dimension must be >= 1");
    }
}

void OrthonormalBasis::append(const ChannelVector& v) {
    if (v.size() != dimension_) {
        throw DimensionError("basis vector dimension mismatch");
    }
    if (size() >= dimension_) {
        throw FullSpaceError("basis already spans the full " + std::to_string(dimension_) +
                             "-dimensional space");
    }
    const double norm = v.norm();
    ChannelVector r = residual(v);
    const double rnorm = r.norm();
    if (!(rnorm > kRankTolerance * norm)) {
        throw RankDeficiencyError("vector is linearly dependent on the current basis (residual " +
                                  std::to_string(rnorm) + " of norm " + std::to_string(norm) + ")");
    }
    q_.push_back(r / rnorm);
}

ChannelVector OrthonormalBasis::residual(const ChannelVector& h) const {
    ChannelVector r = h;
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto& q : q_) {
            r -= q * q.dot(r);
        }
    }
    return r;
}

double OrthonormalBasis::residual_squared_norm(const ChannelVector& h) const {
    return residual(h).squaredNorm();
}

namespace {

OrthonormalBasis build_basis(int dimension, std::span<const ChannelVector> basis) {
    if (static_cast<int>(basis.size()) >= dimension) {
        throw FullSpaceError("projection basis of size " + std::to_string(basis.size()) +
                             " leaves no orthogonal complement in dimension " +
                             std::to_string(dimension));
    }
    OrthonormalBasis q(dimension);
    for (const auto& b : basis) {
        q.append(b);
    }
    return q;
}

} // namespace

ChannelVector project_out(const ChannelVector& h, std::span<const ChannelVector> basis) {
    return build_basis(static_cast<int>(h.size()), basis).residual(h);
}

double sin_sq_angle(const ChannelVector& h, std::span<const ChannelVector> basis) {
    const double hn = h.squaredNorm();
    if (!(hn > 0.0)) {
        throw DomainError("angle undefined for a zero-norm channel");
    }
    if (basis.empty()) {
        return 1.0;
    }
    const double r = build_basis(static_cast<int>(h.size()), basis).residual_squared_norm(h);
    return std::clamp(r / hn, 0.0, 1.0);
}

} // namespace dpcpower
