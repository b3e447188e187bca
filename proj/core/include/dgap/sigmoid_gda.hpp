#pragma once

#include "dgap/numeric.hpp"

#include <cstdint>
#include <random>

namespace dgap {

/// Two-class Gaussian discriminant model with one covariance shared by the
/// background (class 0) and the category (class 1). beta0/beta1 are
/// unnormalized class priors.
struct LdaParams {
  Vector mu0;
  Vector mu1;
  Matrix cov;
  double beta0 = 1.0;
  double beta1 = 1.0;
};

/// Linear classifier with posterior sigmoid(w . x + b).
struct SigmoidClassifier {
  Vector w;
  double b = 0.0;
};

/// w = cov^{-1} (mu1 - mu0),
/// b = -1/2 mu1^T cov^{-1} mu1 + 1/2 mu0^T cov^{-1} mu0 + ln(beta1 / beta0).
/// Throws Error(kFactorization) if cov is not positive definite.
SigmoidClassifier lda_to_sigmoid(const LdaParams& lda);

/// 1 / (1 + exp(-z)) without overflow for either sign of z, kept strictly
/// inside (0, 1).
double stable_sigmoid(double z) noexcept;

double posterior_sigmoid(const SigmoidClassifier& clf, const Eigen::Ref<const Vector>& x);

/// beta1 N(x|mu1) / (beta0 N(x|mu0) + beta1 N(x|mu1)), evaluated from the two
/// log-joint terms so neither density has to be representable on its own.
double posterior_gda(const LdaParams& lda, const Eigen::Ref<const Vector>& x);

/// Random well-conditioned shared-covariance instance of dimension `dim`:
/// means in [-3, 3]^d, cov = A A^T / d + 0.5 I with A ~ U[-1, 1], priors in
/// [0.05, 20].
LdaParams random_lda(std::mt19937_64& engine, std::size_t dim);

struct EquivalenceSummary {
  std::size_t trials = 0;
  double max_abs_deviation = 0.0;
  std::size_t worst_trial = 0;
  std::size_t worst_dim = 0;
};

/// Compares posterior_gda with posterior_sigmoid(lda_to_sigmoid(.)) on
/// `trials` random instances (dimension cycling through 1..dim_max) and one
/// random point per instance.
EquivalenceSummary equivalence_trials(std::size_t trials, std::size_t dim_max, std::uint64_t seed);

}  // namespace dgap
