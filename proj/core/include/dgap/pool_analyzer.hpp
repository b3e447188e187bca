#pragma once

#include "dgap/feature_store.hpp"
#include "dgap/gaussian.hpp"
#include "dgap/grid_manifest.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dgap {

/// Unordered pairs of renders that differ in exactly one parameter, by
/// neighbouring positions of that parameter's value list.
struct AdjacencyPairs {
  std::vector<std::pair<std::string, std::string>> pairs;
};

AdjacencyPairs adjacency_pairs(const GridManifest& grid);

/// Pair count without enumeration: sum over parameters of
/// (neighbour steps of p) * product of the other list lengths. A linear
/// parameter with m values has m - 1 steps, a cyclic one m steps when m >= 3.
std::size_t adjacency_count(const GridManifest& grid);

/// Mean raw inner product f(p) . f(q) over the adjacency pairs.
double density(const FeatureSet& pool, const AdjacencyPairs& pairs, unsigned threads = 1);

struct DiversityConfig {
  double exponent = 10.0;
};

/// (1/n) sum ||f(x) - mean||^k.
double diversity(const FeatureSet& pool, const DiversityConfig& config = {});

/// Distribution gap of the pool against a reference model.
double pool_domain_gap(const GaussianModel& reference, const FeatureSet& pool, unsigned threads = 1);

/// Squared 2-Wasserstein distance between two Gaussians:
/// ||mu_a - mu_b||^2 + tr(S_a + S_b - 2 (S_a^{1/2} S_b S_a^{1/2})^{1/2}).
double frechet_gaussian(const GaussianModel& a, const GaussianModel& b);

/// Symmetric PSD square root via eigendecomposition; negative eigenvalues
/// from rounding are clamped to zero.
Matrix sqrt_psd(const Matrix& a);

/// A sub-pool: parameters listed in `kept` are restricted to those values,
/// all others keep their full value list.
struct SubsetScheme {
  std::string name;
  std::vector<std::pair<std::string, std::vector<GridValue>>> kept;
};

/// Ids of every combination whose values are all kept, in grid order.
std::vector<std::string> sample_subset(const GridManifest& grid, const SubsetScheme& scheme);

/// SAlt, SRad, SAng, SCha, SPos, BSAlt, BSRad, BSAng over the parameter names
/// used by archangel_grid().
const std::vector<SubsetScheme>& builtin_schemes();

/// Builtin lookup by name; "original" resolves to the unrestricted scheme.
std::optional<SubsetScheme> find_builtin_scheme(const std::string& name);

// Scheme file: one object or an array of objects
//   {"name": "SAlt", "kept": {"altitude": [10, 20, 30, 40, 50]}}
std::vector<SubsetScheme> parse_schemes(const std::string& json_text);
std::vector<SubsetScheme> read_schemes(const std::filesystem::path& path);

}  // namespace dgap
