#include "dgap/selection.hpp"

#include "dgap/error.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace dgap {

namespace {

void validate(std::span<const SampleGap> per_item, const SelectionConfig& config) {
  if (per_item.empty()) throw Error(ErrorKind::kInsufficientData, "selection pool is empty");
  if (config.count < 1) throw Error(ErrorKind::kInvalidArgument, "selection count must be positive");
  if (config.count > per_item.size()) {
    throw Error(ErrorKind::kInvalidArgument, "selection count " + std::to_string(config.count) +
                                                 " exceeds pool size " + std::to_string(per_item.size()));
  }
  if (config.mode == SelectionMode::kGapWeighted &&
      (!(config.temperature > 0.0) || !std::isfinite(config.temperature))) {
    throw Error(ErrorKind::kInvalidArgument, "temperature must be a finite positive number");
  }
  std::unordered_set<std::string_view> seen;
  seen.reserve(per_item.size());
  for (const auto& item : per_item) {
    if (!std::isfinite(item.mahalanobis_sq) || item.mahalanobis_sq < 0.0) {
      throw Error(ErrorKind::kInvalidArgument, "item '" + item.id + "' has an invalid distance");
    }
    if (!seen.insert(item.id).second) {
      throw Error(ErrorKind::kDuplicateId, "item id '" + item.id + "' appears more than once");
    }
  }
}

std::vector<std::size_t> draw(std::span<const SampleGap> per_item, const SelectionConfig& config) {
  std::mt19937_64 engine(config.seed);
  std::vector<std::size_t> remaining(per_item.size());
  for (std::size_t i = 0; i < remaining.size(); ++i) remaining[i] = i;
  std::vector<std::size_t> chosen;
  chosen.reserve(config.count);

  if (config.mode == SelectionMode::kUniformRandom) {
    // Partial Fisher-Yates.
    for (std::size_t k = 0; k < config.count; ++k) {
      const std::size_t span = remaining.size() - k;
      const std::size_t j = k + std::min(span - 1, static_cast<std::size_t>(uniform01(engine) * static_cast<double>(span)));
      std::swap(remaining[k], remaining[j]);
      chosen.push_back(remaining[k]);
    }
    return chosen;
  }

  std::vector<double> weights;
  for (std::size_t k = 0; k < config.count; ++k) {
    // Weights relative to the closest remaining item: same distribution, no
    // underflow of the whole pool at small temperatures.
    double closest = per_item[remaining.front()].mahalanobis_sq;
    for (std::size_t idx : remaining) closest = std::min(closest, per_item[idx].mahalanobis_sq);
    weights.resize(remaining.size());
    double total = 0.0;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      weights[i] = std::exp(-(per_item[remaining[i]].mahalanobis_sq - closest) / (2.0 * config.temperature));
      total += weights[i];
    }
    const double target = uniform01(engine) * total;
    std::size_t pick = remaining.size() - 1;
    double cumulative = 0.0;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      cumulative += weights[i];
      if (target < cumulative) {
        pick = i;
        break;
      }
    }
    chosen.push_back(remaining[pick]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return chosen;
}

}  // namespace

std::string_view to_string(SelectionMode mode) noexcept {
  return mode == SelectionMode::kGapWeighted ? "gap-weighted" : "uniform-random";
}

SelectionMode parse_selection_mode(std::string_view text) {
  if (text == "gap-weighted") return SelectionMode::kGapWeighted;
  if (text == "uniform-random") return SelectionMode::kUniformRandom;
  throw Error(ErrorKind::kInvalidArgument,
              "unknown selection mode '" + std::string(text) + "' (expected gap-weighted or uniform-random)");
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) noexcept {
  return mix64(seed + 0x9e3779b97f4a7c15ULL * (trial + 1));
}

double uniform01(std::mt19937_64& engine) noexcept {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

std::vector<std::size_t> select_indices(std::span<const SampleGap> per_item, const SelectionConfig& config) {
  validate(per_item, config);
  return draw(per_item, config);
}

std::vector<std::string> select(std::span<const SampleGap> per_item, const SelectionConfig& config) {
  const auto picked = select_indices(per_item, config);
  std::vector<std::string> ids;
  ids.reserve(picked.size());
  for (std::size_t i : picked) ids.push_back(per_item[i].id);
  return ids;
}

SelectionBias selection_bias_report(std::span<const SampleGap> per_item, const SelectionConfig& config,
                                    std::size_t trials, unsigned threads) {
  validate(per_item, config);
  if (trials < 1) throw Error(ErrorKind::kInvalidArgument, "trials must be positive");

  std::vector<double> trial_means(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    SelectionConfig trial = config;
    trial.seed = trial_seed(config.seed, t);
    const auto picked = draw(per_item, trial);
    std::vector<double> values(picked.size());
    for (std::size_t i = 0; i < picked.size(); ++i) values[i] = per_item[picked[i]].mahalanobis_sq;
    trial_means[t] = pairwise_sum(values) / static_cast<double>(values.size());
  });

  std::vector<double> pool(per_item.size());
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = per_item[i].mahalanobis_sq;

  SelectionBias out;
  out.trials = trials;
  out.mean_pool_gap = pairwise_sum(pool) / static_cast<double>(pool.size());
  out.mean_selected_gap = pairwise_sum(trial_means) / static_cast<double>(trials);
  if (trials > 1) {
    std::vector<double> sq(trials);
    for (std::size_t t = 0; t < trials; ++t) {
      const double dev = trial_means[t] - out.mean_selected_gap;
      sq[t] = dev * dev;
    }
    const double variance = pairwise_sum(sq) / static_cast<double>(trials - 1);
    out.selected_stderr = std::sqrt(variance / static_cast<double>(trials));
  }
  return out;
}

}  // namespace dgap
