#pragma once

#include "dgap/feature_store.hpp"
#include "dgap/gaussian.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dgap {

struct SampleGap {
  std::string id;
  double mahalanobis_sq = 0.0;
};

/// Squared Mahalanobis distance of every test row, in input order. Rows are
/// evaluated on up to `threads` workers; the result does not depend on it.
std::vector<SampleGap> per_sample_gaps(const GaussianModel& model, const FeatureSet& test,
                                       unsigned threads = 1);

/// (1 / 2n) * sum of squared distances, summed pairwise in input order.
double distribution_gap(std::span<const SampleGap> per_sample);
double distribution_gap(const GaussianModel& model, const FeatureSet& test, unsigned threads = 1);

/// distribution_gap + model.normalizer(); equal to the mean negative
/// log-density of the test rows.
double cross_entropy(const GaussianModel& model, const FeatureSet& test, unsigned threads = 1);

/// Number of samples kept by a filtering fraction: max(1, floor(fraction * n)).
std::size_t filtered_count(std::size_t n, double fraction);

/// Gap over the filtered_count(n, fraction) samples closest to the model.
/// Ties are broken by ascending id. fraction == 1 reproduces
/// distribution_gap bit for bit.
double filtered_gap(std::span<const SampleGap> per_sample, double fraction);
double filtered_gap(const GaussianModel& model, const FeatureSet& test, double fraction,
                    unsigned threads = 1);

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
};

struct Histogram {
  std::vector<HistogramBin> bins;
  /// Samples outside [lo, hi], counted in the first/last bin.
  std::size_t clamped_low = 0;
  std::size_t clamped_high = 0;
};

/// Equal-width histogram of Mahalanobis distances (square roots of the
/// per-sample values). Default range is [0, max distance]; a degenerate
/// default range collapses to a single bin.
Histogram histogram(std::span<const SampleGap> per_sample, std::size_t bins,
                    std::optional<std::pair<double, double>> range = std::nullopt);

struct ScatterPoint {
  double score = 0.0;
  double distance = 0.0;
};

/// (detection score, Mahalanobis distance) per test row, input order.
std::vector<ScatterPoint> scatter_export(const GaussianModel& model, const FeatureSet& test,
                                         unsigned threads = 1);

struct GapOptions {
  std::vector<double> fractions{0.5, 1.0};
  std::size_t bins = 20;
  std::optional<std::pair<double, double>> range;
  bool scatter = true;
  unsigned threads = 1;
};

struct GapReport {
  std::size_t dim = 0;
  std::vector<SampleGap> per_sample;
  double gap_all = 0.0;
  std::map<double, double> gap_filtered;
  double cross_entropy = 0.0;
  double constant_term = 0.0;
  Histogram histogram;
  std::optional<std::vector<ScatterPoint>> scatter;
  std::vector<std::string> warnings;
};

GapReport analyze_gap(const GaussianModel& model, const FeatureSet& test, const GapOptions& options);

}  // namespace dgap
