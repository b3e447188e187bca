#include "dgap/pool_analyzer.hpp"

#include "dgap/error.hpp"
#include "dgap/gap_analyzer.hpp"

#include "json.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <fstream>
#include <sstream>

namespace dgap {

namespace {

using nlohmann::json;

std::size_t steps(const GridParameter& p) {
  const std::size_t m = p.values.size();
  if (m < 2) return 0;
  return (p.cyclic && m >= 3) ? m : m - 1;
}

std::vector<GridValue> numbers(std::initializer_list<double> values) {
  return {values.begin(), values.end()};
}

std::vector<GridValue> labels(std::initializer_list<const char*> values) {
  std::vector<GridValue> out;
  for (const char* v : values) out.emplace_back(std::string(v));
  return out;
}

}  // namespace

AdjacencyPairs adjacency_pairs(const GridManifest& grid) {
  const auto& params = grid.parameters();
  AdjacencyPairs out;
  out.pairs.reserve(adjacency_count(grid));
  for (std::size_t flat = 0; flat < grid.combination_count(); ++flat) {
    auto combo = grid.combination(flat);
    for (std::size_t p = 0; p < params.size(); ++p) {
      const std::size_t m = params[p].values.size();
      const std::size_t pos = combo[p];
      std::size_t next = pos + 1;
      if (next == m) {
        if (!(params[p].cyclic && m >= 3)) continue;
        next = 0;
      }
      combo[p] = next;
      out.pairs.emplace_back(grid.id_at(flat), grid.id_at(combo));
      combo[p] = pos;
    }
  }
  return out;
}

std::size_t adjacency_count(const GridManifest& grid) {
  const auto& params = grid.parameters();
  std::size_t total = 0;
  for (std::size_t p = 0; p < params.size(); ++p) {
    std::size_t term = steps(params[p]);
    for (std::size_t q = 0; q < params.size(); ++q) {
      if (q != p) term *= params[q].values.size();
    }
    total += term;
  }
  return total;
}

double density(const FeatureSet& pool, const AdjacencyPairs& pairs, unsigned threads) {
  if (pairs.pairs.empty()) throw Error(ErrorKind::kInvalidArgument, "density needs at least one adjacent pair");
  std::vector<std::pair<std::size_t, std::size_t>> rows(pairs.pairs.size());
  auto lookup = [&pool](const std::string& id) {
    const auto row = pool.find(id);
    if (!row) throw Error(ErrorKind::kUnknownId, "id '" + id + "' is in the grid but not in the pool");
    return *row;
  };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i] = {lookup(pairs.pairs[i].first), lookup(pairs.pairs[i].second)};
  }
  std::vector<double> dots(rows.size());
  parallel_for(rows.size(), threads, [&](std::size_t i) {
    dots[i] = pool.row(rows[i].first).dot(pool.row(rows[i].second));
  });
  return pairwise_sum(dots) / static_cast<double>(dots.size());
}

double diversity(const FeatureSet& pool, const DiversityConfig& config) {
  if (!(config.exponent > 0.0) || !std::isfinite(config.exponent)) {
    throw Error(ErrorKind::kInvalidArgument, "diversity exponent must be positive");
  }
  if (pool.size() == 0) throw Error(ErrorKind::kInsufficientData, "diversity needs a non-empty pool");
  const Vector mean = pool.rows().colwise().mean().transpose();
  std::vector<double> terms(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const double r = (pool.row(i) - mean).norm();
    terms[i] = r > 0.0 ? std::exp(config.exponent * std::log(r)) : 0.0;
  }
  return pairwise_sum(terms) / static_cast<double>(pool.size());
}

double pool_domain_gap(const GaussianModel& reference, const FeatureSet& pool, unsigned threads) {
  return distribution_gap(reference, pool, threads);
}

Matrix sqrt_psd(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorKind::kEigendecomposition, "symmetric eigendecomposition did not converge");
  }
  const Vector roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  Matrix out = eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

double frechet_gaussian(const GaussianModel& a, const GaussianModel& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorKind::kDimensionMismatch, "models have dimensions " + std::to_string(a.dim()) +
                                                   " and " + std::to_string(b.dim()));
  }
  const Matrix root_a = sqrt_psd(a.cov());
  Matrix inner = root_a * b.cov() * root_a;
  inner = 0.5 * (inner + inner.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(inner, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorKind::kEigendecomposition, "symmetric eigendecomposition did not converge");
  }
  const double cross = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  const double value =
      (a.mean() - b.mean()).squaredNorm() + a.cov().trace() + b.cov().trace() - 2.0 * cross;
  return std::max(0.0, value);
}

std::vector<std::string> sample_subset(const GridManifest& grid, const SubsetScheme& scheme) {
  const auto& params = grid.parameters();
  std::vector<std::vector<bool>> allowed(params.size());
  for (std::size_t p = 0; p < params.size(); ++p) allowed[p].assign(params[p].values.size(), true);

  std::vector<bool> restricted(params.size(), false);
  for (const auto& [name, values] : scheme.kept) {
    const auto p = grid.parameter_index(name);
    if (!p) throw Error(ErrorKind::kGridMismatch, "scheme '" + scheme.name + "': unknown parameter '" + name + "'");
    if (restricted[*p]) {
      throw Error(ErrorKind::kInvalidArgument, "scheme '" + scheme.name + "' restricts '" + name + "' twice");
    }
    if (values.empty()) {
      throw Error(ErrorKind::kInvalidArgument, "scheme '" + scheme.name + "' keeps no value of '" + name + "'");
    }
    restricted[*p] = true;
    allowed[*p].assign(params[*p].values.size(), false);
    for (const auto& v : values) {
      const auto pos = grid.value_index(*p, v);
      if (!pos) {
        throw Error(ErrorKind::kGridMismatch, "scheme '" + scheme.name + "': value " + format_value(v) +
                                                  " is not in parameter '" + name + "'");
      }
      allowed[*p][*pos] = true;
    }
  }

  std::vector<std::string> ids;
  for (std::size_t flat = 0; flat < grid.combination_count(); ++flat) {
    const auto combo = grid.combination(flat);
    bool keep = true;
    for (std::size_t p = 0; p < params.size() && keep; ++p) keep = allowed[p][combo[p]];
    if (keep) ids.push_back(grid.id_at(flat));
  }
  return ids;
}

const std::vector<SubsetScheme>& builtin_schemes() {
  static const std::vector<SubsetScheme> schemes{
      {"SAlt", {{"altitude", numbers({10, 20, 30, 40, 50})}}},
      {"SRad", {{"radius", numbers({10, 20, 30})}}},
      {"SAng", {{"angle", numbers({0, 60, 120, 180, 240, 300})}}},
      {"SCha", {{"character", labels({"Juliet", "Kelly", "Romeo", "Scott"})}}},
      {"SPos", {{"pose", labels({"stand"})}}},
      {"BSAlt", {{"altitude", numbers({30, 35, 40, 45, 50})}}},
      {"BSRad", {{"radius", numbers({20, 25, 30})}}},
      {"BSAng", {{"angle", numbers({300, 330, 0, 30, 60})}}},
  };
  return schemes;
}

std::optional<SubsetScheme> find_builtin_scheme(const std::string& name) {
  if (name == "original") return SubsetScheme{"original", {}};
  for (const auto& s : builtin_schemes()) {
    if (s.name == name) return s;
  }
  return std::nullopt;
}

std::vector<SubsetScheme> parse_schemes(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParse, std::string("scheme file is not valid JSON: ") + e.what());
  }
  const json list = doc.is_array() ? doc : json::array({doc});
  std::vector<SubsetScheme> out;
  for (const auto& js : list) {
    if (!js.is_object() || !js.contains("name") || !js["name"].is_string() || !js.contains("kept") ||
        !js["kept"].is_object()) {
      throw Error(ErrorKind::kParse, "each scheme needs a string 'name' and a 'kept' object");
    }
    SubsetScheme scheme;
    scheme.name = js["name"].get<std::string>();
    for (const auto& [param, values] : js["kept"].items()) {
      if (!values.is_array()) throw Error(ErrorKind::kParse, "scheme '" + scheme.name + "': kept values must be a list");
      std::vector<GridValue> kept;
      for (const auto& v : values) {
        if (v.is_number()) kept.emplace_back(v.get<double>());
        else if (v.is_string()) kept.emplace_back(v.get<std::string>());
        else throw Error(ErrorKind::kParse, "scheme '" + scheme.name + "': values must be numbers or strings");
      }
      scheme.kept.emplace_back(param, std::move(kept));
    }
    out.push_back(std::move(scheme));
  }
  return out;
}

std::vector<SubsetScheme> read_schemes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_schemes(text.str());
}

}  // namespace dgap
