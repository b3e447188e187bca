#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dgap::cli {

struct GlobalOptions {
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out;
};

struct FitArgs {
  std::string reference;
  double ridge = 0.0;
};

struct GapArgs {
  std::string model;
  std::string test;
  std::vector<double> fractions{0.5, 1.0};
  std::size_t bins = 20;
  std::vector<double> range;
  bool no_scatter = false;
};

struct PoolArgs {
  std::string model;
  std::string pool;
  std::string grid;
  double exponent = 10.0;
};

struct SubsetArgs {
  std::string grid;
  std::string scheme;
  std::string scheme_name;
};

struct EquivArgs {
  std::size_t trials = 1000;
  std::size_t dim_max = 8;
};

struct SelectArgs {
  std::string per_item;
  std::size_t count = 0;
  std::string mode = "gap-weighted";
  double temperature = 1.0;
  std::size_t bias_trials = 0;
};

struct FrechetArgs {
  std::string model_a;
  std::string model_b;
};

// Each command returns the process exit status and throws dgap::Error on
// failure; main() turns errors into the machine-readable error object.
int run_fit(const GlobalOptions& g, const FitArgs& a);
int run_gap(const GlobalOptions& g, const GapArgs& a);
int run_pool(const GlobalOptions& g, const PoolArgs& a);
int run_subset(const GlobalOptions& g, const SubsetArgs& a);
int run_equiv_check(const GlobalOptions& g, const EquivArgs& a);
int run_select(const GlobalOptions& g, const SelectArgs& a);
int run_frechet(const GlobalOptions& g, const FrechetArgs& a);

}  // namespace dgap::cli
