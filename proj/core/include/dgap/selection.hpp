#pragma once

#include "dgap/gap_analyzer.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dgap {

enum class SelectionMode { kGapWeighted, kUniformRandom };

std::string_view to_string(SelectionMode mode) noexcept;
SelectionMode parse_selection_mode(std::string_view text);

struct SelectionConfig {
  std::size_t count = 1;
  SelectionMode mode = SelectionMode::kGapWeighted;
  /// Gap-weighted draws use weight exp(-m^2 / (2 * temperature)).
  double temperature = 1.0;
  std::uint64_t seed = 0;
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed of Monte Carlo trial `trial`: mix64(seed + golden * (trial + 1)).
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) noexcept;

/// Uniform double in [0, 1) from the top 53 bits of one engine output.
double uniform01(std::mt19937_64& engine) noexcept;

/// Positions (into per_item) of `count` distinct items drawn without
/// replacement, in draw order.
std::vector<std::size_t> select_indices(std::span<const SampleGap> per_item, const SelectionConfig& config);

/// Ids of the selected items, in draw order.
std::vector<std::string> select(std::span<const SampleGap> per_item, const SelectionConfig& config);

struct SelectionBias {
  double mean_selected_gap = 0.0;
  double mean_pool_gap = 0.0;
  /// Standard error of mean_selected_gap across trials.
  double selected_stderr = 0.0;
  std::size_t trials = 0;
};

/// Averages the squared distance of the selected items over `trials`
/// independent draws seeded with trial_seed(config.seed, i).
SelectionBias selection_bias_report(std::span<const SampleGap> per_item, const SelectionConfig& config,
                                    std::size_t trials, unsigned threads = 1);

}  // namespace dgap
