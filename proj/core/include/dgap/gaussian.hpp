#pragma once

#include "dgap/feature_store.hpp"
#include "dgap/numeric.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace dgap {

struct FitDiagnostics {
  /// Ridge values tried in order; the last one succeeded.
  std::vector<double> ridges_tried;
  /// n <= d: the sample covariance is singular and only the ridge makes it
  /// positive definite.
  bool rank_deficient = false;
  std::size_t samples = 0;
};

/// Multivariate Gaussian N(mean, cov) with a cached lower Cholesky factor.
/// `cov` already contains `ridge` on its diagonal.
class GaussianModel {
 public:
  /// Factorizes `cov`; throws Error(kFactorization) if it is not numerically
  /// positive definite.
  GaussianModel(Vector mean, Matrix cov, double ridge = 0.0, FitDiagnostics diagnostics = {});

  std::size_t dim() const noexcept { return static_cast<std::size_t>(mean_.size()); }
  const Vector& mean() const noexcept { return mean_; }
  const Matrix& cov() const noexcept { return cov_; }
  const Matrix& chol() const noexcept { return chol_; }
  double ridge() const noexcept { return ridge_; }
  const FitDiagnostics& diagnostics() const noexcept { return diagnostics_; }

  /// ln det(cov) = 2 * sum(ln L_ii).
  double log_det() const noexcept { return log_det_; }

  /// (x - mean)^T cov^{-1} (x - mean) via a forward substitution with L.
  double mahalanobis_sq(const Eigen::Ref<const Vector>& x) const;

  /// ln N(x | mean, cov).
  double log_density(const Eigen::Ref<const Vector>& x) const;

  /// ln((2 pi)^{d/2} det(cov)^{1/2}); the test-set independent part of the
  /// cross-entropy against this model.
  double normalizer() const noexcept;

  /// L^{-1} v.
  Vector whiten(const Eigen::Ref<const Vector>& v) const;

 private:
  void check_dim(Eigen::Index n) const;

  Vector mean_;
  Matrix cov_;
  Matrix chol_;
  double ridge_ = 0.0;
  double log_det_ = 0.0;
  FitDiagnostics diagnostics_;
};

/// Lower Cholesky factor of an SPD matrix. Fails (returns false) when a pivot
/// is not positive or falls below a relative tolerance of the largest
/// diagonal entry, so numerically singular matrices are rejected.
bool cholesky(const Matrix& a, Matrix& lower);

/// Maximum-likelihood fit: mean and (1/n) scatter. If the covariance plus
/// `ridge` does not factorize, escalates through 1e-10, 1e-8, 1e-6, 1e-4
/// times trace(cov)/d.
GaussianModel fit_gaussian(const FeatureSet& reference, double ridge = 0.0);
GaussianModel fit_gaussian(const RowMatrix& rows, double ridge = 0.0);

std::string model_to_json(const GaussianModel& model);
GaussianModel model_from_json(const std::string& text);
void save_model(const GaussianModel& model, const std::filesystem::path& path);
GaussianModel load_model(const std::filesystem::path& path);

}  // namespace dgap
