#include "doctest.h"

#include "dgap/error.hpp"
#include "dgap/gaussian.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

#include <cmath>
#include <numbers>

using namespace dgap;

namespace {

RowMatrix rows_of(std::initializer_list<std::initializer_list<double>> values) {
  RowMatrix m(values.size(), values.begin()->size());
  Eigen::Index r = 0;
  for (const auto& row : values) {
    Eigen::Index c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

GaussianModel model_with(const Vector& mean, const Matrix& cov) { return GaussianModel(mean, cov); }

}  // namespace

TEST_SUITE("gaussian-core") {
  TEST_CASE("fit on the square corners") {
    const auto model = fit_gaussian(rows_of({{0, 0}, {2, 0}, {0, 2}, {2, 2}}), 0.0);
    CHECK(model.mean().isApprox(Vector::Constant(2, 1.0)));
    CHECK((model.cov() - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(model.ridge() == 0.0);
    CHECK_FALSE(model.diagnostics().rank_deficient);
  }

  TEST_CASE("identical rows escalate the ridge") {
    const auto model = fit_gaussian(rows_of({{0.1, 3}, {0.1, 3}, {0.1, 3}, {0.1, 3}}), 0.0);
    CHECK(model.ridge() > 0.0);
    CHECK(model.ridge() == doctest::Approx(1e-10));
    CHECK((model.cov() - model.ridge() * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(model.diagnostics().ridges_tried.front() == 0.0);
    CHECK(model.diagnostics().ridges_tried.size() == 2);
  }

  TEST_CASE("rank deficient data is flagged and rescued") {
    const auto model = fit_gaussian(rows_of({{1, 2, 3}, {4, 5, 7}, {0, 1, 1}}), 0.0);
    CHECK(model.diagnostics().rank_deficient);
    CHECK(model.ridge() > 0.0);
  }

  TEST_CASE("fit needs two rows") {
    CHECK_THROWS_AS(fit_gaussian(rows_of({{1, 2}}), 0.0), Error);
    try {
      fit_gaussian(rows_of({{1, 2}}), 0.0);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kInsufficientData);
      CHECK(e.exit_code() == 2);
    }
  }

  TEST_CASE("sampled covariance within 5% of diag(1, 4)") {
    std::mt19937_64 rng(20240601);
    Matrix cov(2, 2);
    cov << 1, 0, 0, 4;
    const Matrix x = oracle::sample_gaussian(rng, Vector::Zero(2), cov, 100000);
    const auto model = fit_gaussian(RowMatrix(x), 0.0);
    CHECK(std::abs(model.cov()(0, 0) - 1.0) <= 0.05);
    CHECK(std::abs(model.cov()(1, 1) - 4.0) <= 0.05 * 4.0);
    CHECK(std::abs(model.cov()(0, 1)) <= 0.05);
  }

  TEST_CASE("mahalanobis examples") {
    Matrix cov(2, 2);
    cov << 2, 0, 0, 0.5;
    const Vector mu = Vector::Constant(2, 0.5);
    const auto m = model_with(mu, cov);
    CHECK(m.mahalanobis_sq(mu) == 0.0);
    CHECK(m.mahalanobis_sq(mu + Vector::Constant(2, 1.0)) == doctest::Approx(2.5).epsilon(1e-14));
    const auto iso = model_with(Vector::Zero(2), Matrix::Identity(2, 2));
    CHECK(iso.mahalanobis_sq((Vector(2) << 3, 4).finished()) == doctest::Approx(25.0).epsilon(1e-15));
    CHECK_THROWS_AS(iso.mahalanobis_sq(Vector::Zero(3)), Error);
  }

  TEST_CASE("log density examples") {
    const auto std_normal = model_with(Vector::Zero(1), Matrix::Identity(1, 1));
    CHECK(std_normal.log_density(Vector::Zero(1)) == doctest::Approx(-0.9189385332046727).epsilon(1e-14));
    const auto iso = model_with(Vector::Zero(2), Matrix::Identity(2, 2));
    CHECK(iso.log_density(Vector::Zero(2)) == doctest::Approx(-std::log(2 * std::numbers::pi)).epsilon(1e-14));
  }

  TEST_CASE("log density identity: ld(mu) - ld(x) = m2(x) / 2") {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 200; ++t) {
      const int d = 1 + t % 6;
      const auto m = model_with(oracle::random_vector(rng, d), oracle::random_spd(rng, d));
      const Vector x = oracle::random_vector(rng, d, -4, 4);
      const double lhs = m.log_density(m.mean()) - m.log_density(x);
      CHECK(lhs == doctest::Approx(0.5 * m.mahalanobis_sq(x)).epsilon(1e-10));
    }
  }

  TEST_CASE("model invariants on random fits") {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 50; ++t) {
      const int d = 1 + t % 7;
      const Matrix x = oracle::sample_gaussian(rng, oracle::random_vector(rng, d), oracle::random_spd(rng, d), 30);
      const auto m = fit_gaussian(RowMatrix(x), 0.0);
      const double scale = std::max(1.0, m.cov().cwiseAbs().maxCoeff());
      CHECK((m.cov() - m.cov().transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale);
      CHECK((m.chol() * m.chol().transpose() - m.cov()).cwiseAbs().maxCoeff() <= 1e-10 * scale);
      CHECK(m.chol().diagonal().minCoeff() > 0.0);
      CHECK(m.log_det() == doctest::Approx(std::log(oracle::laplace_det(oracle::to_grid(m.cov())))).epsilon(1e-9));
    }
  }

  TEST_CASE("triangular solve matches explicit inverses") {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 300; ++t) {
      const int d = 1 + t % 6;
      const Matrix cov = oracle::random_spd(rng, d);
      const auto m = model_with(oracle::random_vector(rng, d), cov);
      const Vector x = oracle::random_vector(rng, d, -5, 5);
      const Vector diff = x - m.mean();
      const std::vector<double> v(diff.data(), diff.data() + d);
      const double cofactor = oracle::quadratic_form(oracle::cofactor_inverse(oracle::to_grid(cov)), v);
      const double gauss_jordan = oracle::quadratic_form(oracle::gauss_jordan_inverse(oracle::to_grid(cov)), v);
      CHECK(oracle::relative_error(m.mahalanobis_sq(x), cofactor) <= 1e-8);
      CHECK(oracle::relative_error(m.mahalanobis_sq(x), gauss_jordan) <= 1e-8);
    }
  }

  TEST_CASE("affine transformation leaves distances unchanged") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 40; ++t) {
      const int d = 2 + t % 4;
      const Matrix x = oracle::sample_gaussian(rng, oracle::random_vector(rng, d), oracle::random_spd(rng, d), 200);
      Matrix a = oracle::random_spd(rng, d, 0.5);  // SPD implies invertible
      a(0, d - 1) += 0.3;
      const Vector probe = oracle::random_vector(rng, d, -3, 3);
      const auto base = fit_gaussian(RowMatrix(x), 0.0);
      const Matrix moved = x * a.transpose();
      const auto transformed = fit_gaussian(RowMatrix(moved), 0.0);
      REQUIRE(base.ridge() == 0.0);
      REQUIRE(transformed.ridge() == 0.0);
      CHECK(oracle::relative_error(transformed.mahalanobis_sq(a * probe), base.mahalanobis_sq(probe)) <= 1e-6);
    }
  }

  TEST_CASE("larger ridge never increases the distance") {
    std::mt19937_64 rng(77);
    for (int t = 0; t < 60; ++t) {
      const int d = 1 + t % 5;
      const Matrix x = oracle::sample_gaussian(rng, Vector::Zero(d), oracle::random_spd(rng, d), 40);
      const Vector probe = oracle::random_vector(rng, d, -3, 3);
      double previous = std::numeric_limits<double>::infinity();
      for (double ridge : {0.0, 1e-3, 1e-2, 0.1, 1.0, 10.0}) {
        const double m2 = fit_gaussian(RowMatrix(x), ridge).mahalanobis_sq(probe);
        CHECK(m2 <= previous * (1 + 1e-12));
        previous = m2;
      }
    }
  }

  TEST_CASE("json round trip reproduces the model") {
    std::mt19937_64 rng(2);
    const Matrix x = oracle::sample_gaussian(rng, oracle::random_vector(rng, 3), oracle::random_spd(rng, 3), 25);
    const auto model = fit_gaussian(RowMatrix(x), 1e-3);
    const auto dir = testing_support::scratch_dir("model");
    save_model(model, dir / "m.json");
    const auto back = load_model(dir / "m.json");
    CHECK(back.mean() == model.mean());
    CHECK(back.cov() == model.cov());
    CHECK(back.ridge() == model.ridge());
    CHECK(back.chol() == model.chol());
    CHECK(back.diagnostics().samples == 25);
  }

  TEST_CASE("invalid models") {
    Matrix bad(2, 2);
    bad << 1, 2, 2, 1;  // indefinite
    try {
      GaussianModel(Vector::Zero(2), bad);
      FAIL("no error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kFactorization);
      CHECK(e.exit_code() == 3);
    }
    Matrix asym(2, 2);
    asym << 1, 0.5, 0, 1;
    CHECK_THROWS_AS(GaussianModel(Vector::Zero(2), asym), Error);
    CHECK_THROWS_AS(model_from_json("{\"dim\": 2, \"mean\": [0], \"cov\": [1,0,0,1]}"), Error);
  }
}
