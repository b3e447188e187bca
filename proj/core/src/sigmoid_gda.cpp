#include "dgap/sigmoid_gda.hpp"

#include "dgap/error.hpp"
#include "dgap/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace dgap {

namespace {

void validate(const LdaParams& lda) {
  const Eigen::Index d = lda.mu0.size();
  if (d < 1 || lda.mu1.size() != d || lda.cov.rows() != d || lda.cov.cols() != d) {
    throw Error(ErrorKind::kDimensionMismatch, "LDA parameters have inconsistent dimensions");
  }
  if (!(lda.beta0 > 0.0) || !(lda.beta1 > 0.0) || !std::isfinite(lda.beta0) ||
      !std::isfinite(lda.beta1)) {
    throw Error(ErrorKind::kInvalidArgument, "class priors beta0 and beta1 must be positive");
  }
}

Matrix factor(const Matrix& cov) {
  Matrix lower;
  if (!cholesky(cov, lower)) {
    throw Error(ErrorKind::kFactorization, "shared covariance is not positive definite");
  }
  return lower;
}

void check_dim(Eigen::Index expected, Eigen::Index got) {
  if (expected != got) {
    throw Error(ErrorKind::kDimensionMismatch, "input has dimension " + std::to_string(got) +
                                                   ", classifier has dimension " + std::to_string(expected));
  }
}

}  // namespace

SigmoidClassifier lda_to_sigmoid(const LdaParams& lda) {
  validate(lda);
  const Matrix lower = factor(lda.cov);
  const auto tri = lower.triangularView<Eigen::Lower>();
  // Whitened means: cov^{-1} = L^{-T} L^{-1}.
  const Vector z0 = tri.solve(lda.mu0);
  const Vector z1 = tri.solve(lda.mu1);
  SigmoidClassifier clf;
  clf.w = lower.transpose().triangularView<Eigen::Upper>().solve(z1 - z0);
  clf.b = -0.5 * z1.squaredNorm() + 0.5 * z0.squaredNorm() + std::log(lda.beta1 / lda.beta0);
  return clf;
}

double stable_sigmoid(double z) noexcept {
  // Clamped to the open interval (0, 1) for saturated logits.
  constexpr double kLo = std::numeric_limits<double>::min();
  const double kHi = std::nextafter(1.0, 0.0);
  double p = 0.0;
  if (z >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-z));
  } else {
    const double e = std::exp(z);
    p = e / (1.0 + e);
  }
  return std::clamp(p, kLo, kHi);
}

double posterior_sigmoid(const SigmoidClassifier& clf, const Eigen::Ref<const Vector>& x) {
  check_dim(clf.w.size(), x.size());
  return stable_sigmoid(clf.w.dot(x) + clf.b);
}

double posterior_gda(const LdaParams& lda, const Eigen::Ref<const Vector>& x) {
  validate(lda);
  check_dim(lda.mu0.size(), x.size());
  const Matrix lower = factor(lda.cov);
  const auto tri = lower.triangularView<Eigen::Lower>();
  const double m0 = tri.solve(x - lda.mu0).squaredNorm();
  const double m1 = tri.solve(x - lda.mu1).squaredNorm();
  // Full log joint densities; the normalizer cancels in the difference.
  const double log_norm = 0.5 * static_cast<double>(x.size()) * std::log(2.0 * std::numbers::pi) +
                          lower.diagonal().array().log().sum();
  const double log_joint0 = std::log(lda.beta0) - 0.5 * m0 - log_norm;
  const double log_joint1 = std::log(lda.beta1) - 0.5 * m1 - log_norm;
  return stable_sigmoid(log_joint1 - log_joint0);
}

}  // namespace dgap

namespace dgap {

namespace {

double uniform(std::mt19937_64& engine, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(engine() >> 11) * 0x1.0p-53);
}

}  // namespace

LdaParams random_lda(std::mt19937_64& engine, std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  LdaParams lda;
  lda.mu0.resize(d);
  lda.mu1.resize(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    lda.mu0(i) = uniform(engine, -3.0, 3.0);
    lda.mu1(i) = uniform(engine, -3.0, 3.0);
  }
  Matrix a(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) a(r, c) = uniform(engine, -1.0, 1.0);
  }
  lda.cov = a * a.transpose() / static_cast<double>(d);
  lda.cov = 0.5 * (lda.cov + lda.cov.transpose()).eval();
  lda.cov.diagonal().array() += 0.5;
  lda.beta0 = std::exp(uniform(engine, std::log(0.05), std::log(20.0)));
  lda.beta1 = std::exp(uniform(engine, std::log(0.05), std::log(20.0)));
  return lda;
}

EquivalenceSummary equivalence_trials(std::size_t trials, std::size_t dim_max, std::uint64_t seed) {
  if (trials < 1) throw Error(ErrorKind::kInvalidArgument, "trials must be >= 1");
  if (dim_max < 1) throw Error(ErrorKind::kInvalidArgument, "dim-max must be >= 1");
  std::mt19937_64 engine(seed);
  EquivalenceSummary summary;
  summary.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t dim = 1 + t % dim_max;
    const LdaParams lda = random_lda(engine, dim);
    Vector x(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = uniform(engine, -5.0, 5.0);
    const double gda = posterior_gda(lda, x);
    const double sig = posterior_sigmoid(lda_to_sigmoid(lda), x);
    const double dev = std::abs(gda - sig);
    if (dev > summary.max_abs_deviation || t == 0) {
      summary.max_abs_deviation = dev;
      summary.worst_trial = t;
      summary.worst_dim = dim;
    }
  }
  return summary;
}

}  // namespace dgap
