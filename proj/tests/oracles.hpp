#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library's factorization or enumeration code.

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

using Grid = std::vector<std::vector<double>>;

inline Grid to_grid(const Eigen::MatrixXd& m) {
  Grid g(static_cast<std::size_t>(m.rows()), std::vector<double>(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) g[r][c] = m(r, c);
  return g;
}

inline Grid minor_of(const Grid& a, std::size_t row, std::size_t col) {
  Grid out;
  for (std::size_t r = 0; r < a.size(); ++r) {
    if (r == row) continue;
    std::vector<double> line;
    for (std::size_t c = 0; c < a.size(); ++c)
      if (c != col) line.push_back(a[r][c]);
    out.push_back(std::move(line));
  }
  return out;
}

/// Laplace expansion along the first row. Exponential cost; d <= 7 only.
inline double laplace_det(const Grid& a) {
  const std::size_t n = a.size();
  if (n == 1) return a[0][0];
  if (n == 2) return a[0][0] * a[1][1] - a[0][1] * a[1][0];
  double det = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    const double sign = (c % 2 == 0) ? 1.0 : -1.0;
    det += sign * a[0][c] * laplace_det(minor_of(a, 0, c));
  }
  return det;
}

/// inverse = adjugate / det.
inline Grid cofactor_inverse(const Grid& a) {
  const std::size_t n = a.size();
  const double det = laplace_det(a);
  if (det == 0.0) throw std::runtime_error("singular");
  Grid inv(n, std::vector<double>(n));
  if (n == 1) {
    inv[0][0] = 1.0 / a[0][0];
    return inv;
  }
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const double sign = ((r + c) % 2 == 0) ? 1.0 : -1.0;
      inv[c][r] = sign * laplace_det(minor_of(a, r, c)) / det;
    }
  }
  return inv;
}

/// Gauss-Jordan elimination with partial pivoting.
inline Grid gauss_jordan_inverse(Grid a) {
  const std::size_t n = a.size();
  Grid inv(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (a[pivot][col] == 0.0) throw std::runtime_error("singular");
    std::swap(a[pivot], a[col]);
    std::swap(inv[pivot], inv[col]);
    const double p = a[col][col];
    for (std::size_t c = 0; c < n; ++c) {
      a[col][c] /= p;
      inv[col][c] /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      for (std::size_t c = 0; c < n; ++c) {
        a[r][c] -= f * a[col][c];
        inv[r][c] -= f * inv[col][c];
      }
    }
  }
  return inv;
}

/// v^T M v with plain loops.
inline double quadratic_form(const Grid& m, const std::vector<double>& v) {
  double acc = 0.0;
  for (std::size_t r = 0; r < v.size(); ++r)
    for (std::size_t c = 0; c < v.size(); ++c) acc += v[r] * m[r][c] * v[c];
  return acc;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Random SPD matrix B B^T / d + floor * I.
inline Eigen::MatrixXd random_spd(std::mt19937_64& rng, int d, double floor = 0.2, double scale = 1.0) {
  Eigen::MatrixXd b(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) b(r, c) = uniform(rng, -scale, scale);
  Eigen::MatrixXd s = b * b.transpose() / d;
  s = 0.5 * (s + s.transpose()).eval();
  s.diagonal().array() += floor;
  return s;
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, int d, double lo = -2.0, double hi = 2.0) {
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v(i) = uniform(rng, lo, hi);
  return v;
}

/// Samples from N(mean, cov) through an Eigen LLT factor and standard
/// normals drawn from `rng`.
inline Eigen::MatrixXd sample_gaussian(std::mt19937_64& rng, const Eigen::VectorXd& mean,
                                       const Eigen::MatrixXd& cov, int n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::MatrixXd l = cov.llt().matrixL();
  Eigen::MatrixXd out(n, mean.size());
  Eigen::VectorXd z(mean.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < z.size(); ++j) z(j) = normal(rng);
    out.row(i) = (mean + l * z).transpose();
  }
  return out;
}

/// All unordered pairs of grid positions (i < j in mixed-radix order) that
/// differ in exactly one coordinate by one step (or by wrap-around for
/// cyclic coordinates with >= 3 values). O(N^2) by design.
inline std::vector<std::pair<std::size_t, std::size_t>> brute_force_adjacency(
    const std::vector<std::size_t>& sizes, const std::vector<bool>& cyclic) {
  std::size_t total = 1;
  for (auto s : sizes) total *= s;
  auto decode = [&](std::size_t flat) {
    std::vector<std::size_t> c(sizes.size());
    for (std::size_t p = sizes.size(); p-- > 0;) {
      c[p] = flat % sizes[p];
      flat /= sizes[p];
    }
    return c;
  };
  std::vector<std::vector<std::size_t>> combos(total);
  for (std::size_t i = 0; i < total; ++i) combos[i] = decode(i);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < total; ++i) {
    for (std::size_t j = i + 1; j < total; ++j) {
      std::size_t diffs = 0;
      bool adjacent = false;
      for (std::size_t p = 0; p < sizes.size() && diffs <= 1; ++p) {
        if (combos[i][p] == combos[j][p]) continue;
        ++diffs;
        const std::size_t lo = std::min(combos[i][p], combos[j][p]);
        const std::size_t hi = std::max(combos[i][p], combos[j][p]);
        adjacent = hi - lo == 1 || (cyclic[p] && sizes[p] >= 3 && lo == 0 && hi == sizes[p] - 1);
      }
      if (diffs == 1 && adjacent) out.emplace_back(i, j);
    }
  }
  return out;
}

inline double relative_error(double got, double expected) {
  const double denom = std::max(std::abs(expected), std::abs(got));
  return denom == 0.0 ? 0.0 : std::abs(got - expected) / denom;
}

}  // namespace oracle
