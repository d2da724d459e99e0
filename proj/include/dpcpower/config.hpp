#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dpcpower/experiment.hpp"

namespace dpcpower {

// Command-line values; any that are set replace the file's keys.
struct ConfigOverrides {
    std::optional<int> M;
    std::optional<int> K;
    std::optional<int> Ks;
    std::optional<double> gamma_db;
    std::optional<double> sigma_sq;
    std::optional<std::string> algorithms;
    std::optional<std::string> power_method;
    std::optional<std::int64_t> trials;
    std::optional<std::uint64_t> seed;
};

struct ParseOptions {
    // Require 1 <= Ks <= min(M, K) at every point. The analytic table turns
    // such points into per-row markers instead.
    bool check_points = true;
};

double db_to_linear(double db) noexcept;

/// Flat key=value text. Blank lines and '#' comments are ignored. Keys:
///   M, K, Ks (alias K_s), gamma_db, sigma_sq, algorithms (comma list),
///   power_method, trials, seed, exhaustive_budget
/// and in a [sweep] section: axis (M, K or none), values ("3,4,5" or "3..8").
/// `source` names the text in error messages.
ExperimentConfig parse_config_text(std::string_view text, std::string_view source,
                                   const ConfigOverrides& overrides = {},
                                   const ParseOptions& options = {});

// Reads `path`; an empty path means built-in defaults plus overrides.
ExperimentConfig parse_config(const std::string& path, const ConfigOverrides& overrides = {},
                              const ParseOptions& options = {});

// One key=value per line in a fixed order; equal configs give equal text.
std::string canonical_config(const ExperimentConfig& config);
std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::string config_hash(const ExperimentConfig& config);

// Pre-registered figure configs, ids 1..4. Throws ConfigError otherwise.
std::string_view figure_config_text(int figure_id);

} // namespace dpcpower
