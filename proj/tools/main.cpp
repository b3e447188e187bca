#include "commands.hpp"

#include "dgap/error.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <iostream>

namespace {

int report_error(std::string_view kind, const std::string& message, int code) {
  nlohmann::json err = {{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}};
  std::cerr << err.dump() << std::endl;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace dgap::cli;

  CLI::App app{"dgap: Gaussian distribution-gap, pool and selection analysis for feature embeddings"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", DGAP_VERSION);

  GlobalOptions global;
  app.add_option("--seed", global.seed, "Seed for every random draw")->capture_default_str();
  app.add_option("--threads", global.threads, "Worker threads for data-parallel loops")
      ->capture_default_str()
      ->check(CLI::Range(1u, 1024u));
  app.add_option("--out", global.out, "Output path");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a Gaussian reference model to a feature set");
  fit_cmd->add_option("--reference", fit.reference, "Reference features (CSV or FSET)")->required();
  fit_cmd->add_option("--ridge", fit.ridge, "Diagonal ridge added to the covariance")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);

  GapArgs gap;
  auto* gap_cmd = app.add_subcommand("gap", "Distribution gap, cross-entropy and filtered gaps of a test set");
  gap_cmd->add_option("--model", gap.model, "Model JSON written by fit")->required();
  gap_cmd->add_option("--test", gap.test, "Test features (CSV or FSET)")->required();
  gap_cmd->add_option("--fractions", gap.fractions, "Filter fractions in (0, 1]")
      ->delimiter(',')
      ->capture_default_str();
  gap_cmd->add_option("--bins", gap.bins, "Histogram bins")->capture_default_str()->check(CLI::PositiveNumber);
  gap_cmd->add_option("--range", gap.range, "Histogram range lo,hi over Mahalanobis distance")->delimiter(',');
  gap_cmd->add_flag("--no-scatter", gap.no_scatter, "Skip the score/distance scatter export");

  PoolArgs pool;
  auto* pool_cmd = app.add_subcommand("pool", "Density, diversity and domain gap of a synthetic pool");
  pool_cmd->add_option("--model", pool.model, "Reference model JSON")->required();
  pool_cmd->add_option("--pool", pool.pool, "Pool features (CSV or FSET)")->required();
  pool_cmd->add_option("--grid", pool.grid, "Grid manifest JSON")->required();
  pool_cmd->add_option("--exponent", pool.exponent, "Diversity exponent k")->capture_default_str();

  SubsetArgs subset;
  auto* subset_cmd = app.add_subcommand("subset", "Ids of a sub-pool over a rendering-parameter grid");
  subset_cmd->add_option("--grid", subset.grid, "Grid manifest JSON")->required();
  subset_cmd->add_option("--scheme", subset.scheme, "Builtin scheme name or scheme file")->required();
  subset_cmd->add_option("--scheme-name", subset.scheme_name, "Scheme to use from a multi-scheme file");

  EquivArgs equiv;
  auto* equiv_cmd = app.add_subcommand("equiv-check", "Randomized sigmoid/GDA posterior equivalence check");
  equiv_cmd->add_option("--trials", equiv.trials, "Random instances")->capture_default_str();
  equiv_cmd->add_option("--dim-max", equiv.dim_max, "Largest dimension")->capture_default_str();

  SelectArgs sel;
  auto* select_cmd = app.add_subcommand("select", "Gap-weighted or uniform selection from a per-item list");
  select_cmd->add_option("--per-item", sel.per_item, "Gap report JSON or id,mahalanobis_sq CSV")->required();
  select_cmd->add_option("--count", sel.count, "Items to select")->required();
  select_cmd->add_option("--mode", sel.mode, "gap-weighted | uniform-random")->capture_default_str();
  select_cmd->add_option("--temperature", sel.temperature, "Gap-weighted temperature")->capture_default_str();
  select_cmd->add_option("--bias-trials", sel.bias_trials, "Also report selection bias over N trials");

  FrechetArgs fr;
  auto* frechet_cmd = app.add_subcommand("frechet", "Frechet distance between two Gaussian models");
  frechet_cmd->add_option("--model-a", fr.model_a, "First model JSON")->required();
  frechet_cmd->add_option("--model-b", fr.model_b, "Second model JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("invalid_argument", e.what(), 2);
  }

  try {
    if (*fit_cmd) return run_fit(global, fit);
    if (*gap_cmd) return run_gap(global, gap);
    if (*pool_cmd) return run_pool(global, pool);
    if (*subset_cmd) return run_subset(global, subset);
    if (*equiv_cmd) {
      if (equiv.trials < 1) return report_error("invalid_argument", "--trials must be >= 1", 2);
      return run_equiv_check(global, equiv);
    }
    if (*select_cmd) return run_select(global, sel);
    if (*frechet_cmd) return run_frechet(global, fr);
  } catch (const dgap::Error& e) {
    return report_error(dgap::to_string(e.kind()), e.what(), e.exit_code());
  } catch (const nlohmann::json::exception& e) {
    return report_error("parse", e.what(), 2);
  } catch (const std::exception& e) {
    return report_error("internal", e.what(), 2);
  }
  return 2;
}
