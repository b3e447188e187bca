#include "dgap/gap_analyzer.hpp"

#include "dgap/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dgap {

namespace {

void check_compatible(const GaussianModel& model, const FeatureSet& test) {
  if (test.dim() != model.dim()) {
    throw Error(ErrorKind::kDimensionMismatch, "test set has dimension " + std::to_string(test.dim()) +
                                                   ", model has dimension " + std::to_string(model.dim()));
  }
  if (test.size() == 0) throw Error(ErrorKind::kInsufficientData, "test set is empty");
}

void check_nonempty(std::span<const SampleGap> per_sample) {
  if (per_sample.empty()) throw Error(ErrorKind::kInsufficientData, "no samples to aggregate");
}

}  // namespace

std::vector<SampleGap> per_sample_gaps(const GaussianModel& model, const FeatureSet& test,
                                       unsigned threads) {
  check_compatible(model, test);
  std::vector<SampleGap> out(test.size());
  parallel_for(test.size(), threads, [&](std::size_t i) {
    out[i].id = test.ids()[i];
    out[i].mahalanobis_sq = model.mahalanobis_sq(test.row(i));
  });
  return out;
}

double distribution_gap(std::span<const SampleGap> per_sample) {
  check_nonempty(per_sample);
  std::vector<double> values(per_sample.size());
  std::transform(per_sample.begin(), per_sample.end(), values.begin(),
                 [](const SampleGap& s) { return s.mahalanobis_sq; });
  return pairwise_sum(values) / (2.0 * static_cast<double>(values.size()));
}

double distribution_gap(const GaussianModel& model, const FeatureSet& test, unsigned threads) {
  return distribution_gap(per_sample_gaps(model, test, threads));
}

double cross_entropy(const GaussianModel& model, const FeatureSet& test, unsigned threads) {
  return distribution_gap(model, test, threads) + model.normalizer();
}

std::size_t filtered_count(std::size_t n, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "filter fraction must lie in (0, 1], got " + std::to_string(fraction));
  }
  // The small slack keeps products such as 0.29 * 100 from flooring to 28.
  const auto kept = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
  return std::clamp<std::size_t>(kept, 1, n);
}

double filtered_gap(std::span<const SampleGap> per_sample, double fraction) {
  check_nonempty(per_sample);
  const std::size_t m = filtered_count(per_sample.size(), fraction);
  if (m == per_sample.size()) return distribution_gap(per_sample);

  std::vector<std::size_t> order(per_sample.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (per_sample[a].mahalanobis_sq != per_sample[b].mahalanobis_sq) {
      return per_sample[a].mahalanobis_sq < per_sample[b].mahalanobis_sq;
    }
    return per_sample[a].id < per_sample[b].id;
  });
  std::vector<double> kept(m);
  for (std::size_t i = 0; i < m; ++i) kept[i] = per_sample[order[i]].mahalanobis_sq;
  return pairwise_sum(kept) / (2.0 * static_cast<double>(m));
}

double filtered_gap(const GaussianModel& model, const FeatureSet& test, double fraction,
                    unsigned threads) {
  return filtered_gap(per_sample_gaps(model, test, threads), fraction);
}

Histogram histogram(std::span<const SampleGap> per_sample, std::size_t bins,
                    std::optional<std::pair<double, double>> range) {
  if (bins < 1) throw Error(ErrorKind::kInvalidArgument, "histogram needs at least one bin");
  std::vector<double> distance(per_sample.size());
  std::transform(per_sample.begin(), per_sample.end(), distance.begin(),
                 [](const SampleGap& s) { return std::sqrt(s.mahalanobis_sq); });

  Histogram h;
  double lo = 0.0;
  double hi = 0.0;
  if (range) {
    std::tie(lo, hi) = *range;
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
      throw Error(ErrorKind::kInvalidArgument, "histogram range needs lo < hi");
    }
  } else {
    hi = distance.empty() ? 0.0 : *std::max_element(distance.begin(), distance.end());
    if (!(hi > lo)) {
      h.bins.push_back({lo, hi, distance.size()});
      return h;
    }
  }

  const double width = (hi - lo) / static_cast<double>(bins);
  h.bins.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    h.bins[b].lo = lo + width * static_cast<double>(b);
    h.bins[b].hi = b + 1 == bins ? hi : lo + width * static_cast<double>(b + 1);
  }
  for (double v : distance) {
    std::size_t b = 0;
    if (v < lo) {
      ++h.clamped_low;
    } else if (v > hi) {
      ++h.clamped_high;
      b = bins - 1;
    } else {
      b = std::min(bins - 1, static_cast<std::size_t>((v - lo) / width));
    }
    ++h.bins[b].count;
  }
  return h;
}

std::vector<ScatterPoint> scatter_export(const GaussianModel& model, const FeatureSet& test,
                                         unsigned threads) {
  if (!test.has_scores()) {
    throw Error(ErrorKind::kInvalidArgument, "scatter export needs detection scores in the test set");
  }
  const auto gaps = per_sample_gaps(model, test, threads);
  std::vector<ScatterPoint> out(gaps.size());
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    out[i] = {(*test.scores())[i], std::sqrt(gaps[i].mahalanobis_sq)};
  }
  return out;
}

GapReport analyze_gap(const GaussianModel& model, const FeatureSet& test, const GapOptions& options) {
  GapReport report;
  report.dim = model.dim();
  report.per_sample = per_sample_gaps(model, test, options.threads);
  report.gap_all = distribution_gap(report.per_sample);
  report.constant_term = model.normalizer();
  report.cross_entropy = report.gap_all + report.constant_term;
  for (double f : options.fractions) report.gap_filtered[f] = filtered_gap(report.per_sample, f);
  report.histogram = histogram(report.per_sample, options.bins, options.range);
  if (report.histogram.clamped_low + report.histogram.clamped_high > 0) {
    report.warnings.push_back(std::to_string(report.histogram.clamped_low + report.histogram.clamped_high) +
                              " distances fell outside the histogram range and were clamped");
  }
  if (options.scatter) {
    if (test.has_scores()) {
      std::vector<ScatterPoint> points(report.per_sample.size());
      for (std::size_t i = 0; i < points.size(); ++i) {
        points[i] = {(*test.scores())[i], std::sqrt(report.per_sample[i].mahalanobis_sq)};
      }
      report.scatter = std::move(points);
    } else {
      report.warnings.emplace_back("scatter requested but the test set has no scores; scatter omitted");
    }
  }
  return report;
}

}  // namespace dgap
