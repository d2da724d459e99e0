#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "dpcpower/channel.hpp"
#include "dpcpower/power.hpp"

namespace dpcpower {

enum class Algorithm { nus, sus, aus, rus, exhaustive };

std::string_view to_string(Algorithm algorithm) noexcept;
// Accepts NUS/SUS/AUS/RUS/EXHAUSTIVE in any case.
std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept;

// User indices are 0-based positions in the ChannelSet.
struct SelectionResult {
    // Position 0 is encoded/decoded without interference.
    std::vector<int> encoding_order;
    // Order in which the algorithm picked the users.
    std::vector<int> selection_order;
    Algorithm algorithm = Algorithm::nus;
};

inline constexpr std::uint64_t kDefaultExhaustiveBudget = 1'000'000;

// K_s strongest users; encoded weakest first. Ties go to the lower index.
SelectionResult select_nus(const ChannelSet& channels, int selected);

// Greedy max residual energy after projecting out the already selected users.
// Encoding order equals selection order.
SelectionResult select_sus(const ChannelSet& channels, int selected);

// Strongest user first, then greedy max sin^2 against the selected span
// regardless of strength. Encoded weakest first.
SelectionResult select_aus(const ChannelSet& channels, int selected);

// Uniform random K_s-subset, independent of the channel values. The users are
// encoded in draw order, which is itself uniformly random.
SelectionResult select_rus(const ChannelSet& channels, int selected, Engine& engine);
SelectionResult select_rus(const ChannelSet& channels, int selected, const SeedSpec& seed);

// Number of (subset, encoding order) pairs: C(K, K_s) * K_s!, saturating.
std::uint64_t exhaustive_evaluations(int users, int selected) noexcept;

/// Minimum-total-power (subset, encoding order) over every K_s-subset and every
/// permutation of it. Ties resolve to the lexicographically smallest encoding
/// sequence. Partial sums prune branches that cannot beat the incumbent, which
/// never changes the result because every per-user power is positive.
/// targets.gamma holds one target per encoding position (K_s entries).
SelectionResult select_exhaustive(const ChannelSet& channels, int selected,
                                  const SinrTargets& targets, PowerModel model,
                                  std::uint64_t budget = kDefaultExhaustiveBudget);

// Throws ConfigError unless 1 <= selected <= min(M, K).
void check_selection_size(const ChannelSet& channels, int selected);

} // namespace dpcpower
