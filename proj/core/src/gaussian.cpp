#include "dgap/gaussian.hpp"

#include "dgap/error.hpp"

#include "json.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace dgap {

namespace {

using nlohmann::json;

std::string condition_report(const Matrix& cov) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov, Eigen::EigenvaluesOnly);
  std::ostringstream msg;
  msg.precision(6);
  msg << "trace=" << cov.trace();
  if (eig.info() == Eigen::Success) {
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    msg << ", eigenvalues in [" << lo << ", " << hi << "]";
    if (lo > 0) msg << ", condition number " << hi / lo;
    else msg << ", condition number inf";
  }
  return msg.str();
}

}  // namespace

bool cholesky(const Matrix& a, Matrix& lower) {
  const Eigen::Index n = a.rows();
  lower.setZero(n, n);
  if (n == 0 || a.cols() != n) return false;
  const double scale = a.diagonal().cwiseAbs().maxCoeff();
  const double tol = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * scale;
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = a(j, j) - lower.row(j).head(j).squaredNorm();
    if (!(pivot > tol)) return false;
    const double ljj = std::sqrt(pivot);
    lower(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      lower(i, j) = (a(i, j) - lower.row(i).head(j).dot(lower.row(j).head(j))) / ljj;
    }
  }
  return true;
}

GaussianModel::GaussianModel(Vector mean, Matrix cov, double ridge, FitDiagnostics diagnostics)
    : mean_(std::move(mean)), cov_(std::move(cov)), ridge_(ridge), diagnostics_(std::move(diagnostics)) {
  const Eigen::Index d = mean_.size();
  if (d < 1) throw Error(ErrorKind::kInvalidArgument, "model dimension must be >= 1");
  if (cov_.rows() != d || cov_.cols() != d) {
    throw Error(ErrorKind::kDimensionMismatch, "covariance is " + std::to_string(cov_.rows()) + "x" +
                                                   std::to_string(cov_.cols()) + ", mean has length " +
                                                   std::to_string(d));
  }
  if (!mean_.allFinite() || !cov_.allFinite()) {
    throw Error(ErrorKind::kInvalidArgument, "model parameters must be finite");
  }
  if (!(ridge_ >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "ridge must be non-negative");
  const double scale = std::max(1.0, cov_.cwiseAbs().maxCoeff());
  if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorKind::kInvalidArgument, "covariance is not symmetric");
  }
  if (!cholesky(cov_, chol_)) {
    throw Error(ErrorKind::kFactorization,
                "covariance is not positive definite (" + condition_report(cov_) + ")");
  }
  log_det_ = 2.0 * chol_.diagonal().array().log().sum();
}

void GaussianModel::check_dim(Eigen::Index n) const {
  if (n != mean_.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "vector has dimension " + std::to_string(n) +
                                                   ", model has dimension " + std::to_string(mean_.size()));
  }
}

Vector GaussianModel::whiten(const Eigen::Ref<const Vector>& v) const {
  check_dim(v.size());
  return chol_.triangularView<Eigen::Lower>().solve(v);
}

double GaussianModel::mahalanobis_sq(const Eigen::Ref<const Vector>& x) const {
  check_dim(x.size());
  const Vector diff = x - mean_;
  return chol_.triangularView<Eigen::Lower>().solve(diff).squaredNorm();
}

double GaussianModel::normalizer() const noexcept {
  return 0.5 * static_cast<double>(dim()) * std::log(2.0 * std::numbers::pi) + 0.5 * log_det_;
}

double GaussianModel::log_density(const Eigen::Ref<const Vector>& x) const {
  return -0.5 * mahalanobis_sq(x) - normalizer();
}

GaussianModel fit_gaussian(const FeatureSet& reference, double ridge) {
  return fit_gaussian(reference.rows(), ridge);
}

GaussianModel fit_gaussian(const RowMatrix& rows, double ridge) {
  const Eigen::Index n = rows.rows();
  const Eigen::Index d = rows.cols();
  if (n < 2) {
    throw Error(ErrorKind::kInsufficientData,
                "fit_gaussian needs at least 2 reference rows, got " + std::to_string(n));
  }
  if (d < 1) throw Error(ErrorKind::kInvalidArgument, "fit_gaussian needs dimension >= 1");
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
    throw Error(ErrorKind::kInvalidArgument, "ridge must be a finite non-negative number");
  }

  Vector mean(d);
  for (Eigen::Index c = 0; c < d; ++c) {
    const auto col = rows.col(c);
    // Constant columns get their exact value so the scatter is exactly zero.
    if (col.minCoeff() == col.maxCoeff()) {
      mean(c) = col(0);
    } else {
      std::vector<double> values(static_cast<std::size_t>(n));
      for (Eigen::Index r = 0; r < n; ++r) values[static_cast<std::size_t>(r)] = col(r);
      mean(c) = pairwise_sum(values) / static_cast<double>(n);
    }
  }
  const Matrix centered = rows.rowwise() - mean.transpose();
  Matrix scatter = (centered.transpose() * centered) / static_cast<double>(n);
  scatter = 0.5 * (scatter + scatter.transpose()).eval();

  FitDiagnostics diag;
  diag.samples = static_cast<std::size_t>(n);
  diag.rank_deficient = n <= d;

  double mean_variance = scatter.trace() / static_cast<double>(d);
  if (!(mean_variance > 0.0)) mean_variance = 1.0;

  std::vector<double> schedule{ridge};
  for (double factor : {1e-10, 1e-8, 1e-6, 1e-4}) schedule.push_back(factor * mean_variance);

  Matrix lower;
  double last = -1.0;
  for (double candidate : schedule) {
    if (candidate <= last) continue;
    last = candidate;
    diag.ridges_tried.push_back(candidate);
    // A singular scatter cannot become definite without a positive ridge.
    if (diag.rank_deficient && candidate <= 0.0) continue;
    Matrix cov = scatter;
    cov.diagonal().array() += candidate;
    if (cholesky(cov, lower)) {
      return GaussianModel(std::move(mean), std::move(cov), candidate, std::move(diag));
    }
  }
  std::ostringstream msg;
  msg << "covariance factorization failed up to ridge " << last << " (" << condition_report(scatter)
      << ", n=" << n << ", d=" << d << ")";
  throw Error(ErrorKind::kFactorization, msg.str());
}

std::string model_to_json(const GaussianModel& model) {
  json doc;
  doc["dim"] = model.dim();
  doc["mean"] = std::vector<double>(model.mean().data(), model.mean().data() + model.mean().size());
  std::vector<double> cov;
  cov.reserve(model.dim() * model.dim());
  for (Eigen::Index r = 0; r < model.cov().rows(); ++r) {
    for (Eigen::Index c = 0; c < model.cov().cols(); ++c) cov.push_back(model.cov()(r, c));
  }
  doc["cov"] = std::move(cov);
  doc["ridge"] = model.ridge();
  doc["diagnostics"] = {
      {"samples", model.diagnostics().samples},
      {"rank_deficient", model.diagnostics().rank_deficient},
      {"ridges_tried", model.diagnostics().ridges_tried},
  };
  return doc.dump(2);
}

GaussianModel model_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParse, std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    const auto dim = doc.at("dim").get<std::size_t>();
    const auto mean = doc.at("mean").get<std::vector<double>>();
    const auto cov = doc.at("cov").get<std::vector<double>>();
    const double ridge = doc.value("ridge", 0.0);
    if (dim < 1 || mean.size() != dim || cov.size() != dim * dim) {
      throw Error(ErrorKind::kParse, "model file: 'mean' must have dim entries and 'cov' dim*dim");
    }
    FitDiagnostics diag;
    if (doc.contains("diagnostics")) {
      const auto& jd = doc["diagnostics"];
      diag.samples = jd.value("samples", std::size_t{0});
      diag.rank_deficient = jd.value("rank_deficient", false);
      diag.ridges_tried = jd.value("ridges_tried", std::vector<double>{});
    }
    const auto d = static_cast<Eigen::Index>(dim);
    Vector m = Eigen::Map<const Vector>(mean.data(), d);
    Matrix c = Eigen::Map<const RowMatrix>(cov.data(), d, d);
    return GaussianModel(std::move(m), std::move(c), ridge, std::move(diag));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("model file: ") + e.what());
  }
}

void save_model(const GaussianModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");
  out << model_to_json(model) << '\n';
}

GaussianModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return model_from_json(text.str());
}

}  // namespace dgap
