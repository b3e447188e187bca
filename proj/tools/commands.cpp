#include "commands.hpp"

#include "dgap/error.hpp"
#include "dgap/feature_store.hpp"
#include "dgap/gap_analyzer.hpp"
#include "dgap/gaussian.hpp"
#include "dgap/grid_manifest.hpp"
#include "dgap/pool_analyzer.hpp"
#include "dgap/report_io.hpp"
#include "dgap/selection.hpp"
#include "dgap/sigmoid_gda.hpp"

#include "json.hpp"

#include <chrono>
#include <filesystem>
#include <iostream>

namespace dgap::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr double kEquivalenceTolerance = 1e-9;

// Embedded in every report. Thread count and output path are not recorded so
// reports compare equal across both.
class RunManifest {
 public:
  RunManifest(std::string command, json inputs, json parameters)
      : start_(std::chrono::steady_clock::now()) {
    doc_["command"] = std::move(command);
    doc_["inputs"] = std::move(inputs);
    doc_["parameters"] = std::move(parameters);
    doc_["tool_version"] = DGAP_VERSION;
  }

  void set(const std::string& key, json value) { doc_[key] = std::move(value); }

  json finish() {
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
    doc_["duration_seconds"] = elapsed.count();
    return doc_;
  }

 private:
  json doc_;
  std::chrono::steady_clock::time_point start_;
};

fs::path require_out(const GlobalOptions& g, const char* command) {
  if (g.out.empty()) {
    throw Error(ErrorKind::kInvalidArgument, std::string(command) + " needs --out");
  }
  return g.out;
}

fs::path side_file(const fs::path& out, const std::string& suffix) {
  fs::path p = out;
  p.replace_extension(suffix);
  return p;
}

void write_json(const fs::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

void print_summary(const json& summary) { std::cout << summary.dump() << std::endl; }

void write_ids(const fs::path& path, const std::vector<std::string>& ids) {
  std::string text;
  for (const auto& id : ids) text += id + "\n";
  write_text(path, text);
}

}  // namespace

int run_fit(const GlobalOptions& g, const FitArgs& a) {
  const fs::path out = require_out(g, "fit");
  RunManifest manifest("fit", {{"reference", a.reference}}, {{"ridge", a.ridge}});
  const FeatureSet reference = read_features(a.reference);
  const GaussianModel model = fit_gaussian(reference, a.ridge);

  manifest.set("ridge_used", model.ridge());
  manifest.set("ridge_escalated", model.ridge() != a.ridge);
  json doc = json::parse(model_to_json(model));
  doc["manifest"] = manifest.finish();
  write_json(out, doc);
  print_summary({{"command", "fit"}, {"dim", model.dim()}, {"samples", reference.size()},
                 {"ridge_used", model.ridge()}, {"rank_deficient", model.diagnostics().rank_deficient}});
  return 0;
}

int run_gap(const GlobalOptions& g, const GapArgs& a) {
  const fs::path out = require_out(g, "gap");
  GapOptions options;
  options.fractions = a.fractions;
  options.bins = a.bins;
  options.scatter = !a.no_scatter;
  options.threads = g.threads;
  if (!a.range.empty()) {
    if (a.range.size() != 2) throw Error(ErrorKind::kInvalidArgument, "--range takes lo,hi");
    options.range = std::make_pair(a.range[0], a.range[1]);
  }
  json params = {{"fractions", a.fractions}, {"bins", a.bins}, {"scatter", options.scatter}};
  if (options.range) params["range"] = a.range;
  RunManifest manifest("gap", {{"model", a.model}, {"test", a.test}}, params);

  const GaussianModel model = load_model(a.model);
  const FeatureSet test = read_features(a.test);
  const GapReport report = analyze_gap(model, test, options);

  write_text(side_file(out, ".histogram.csv"), histogram_csv(report.histogram));
  write_text(side_file(out, ".per_sample.csv"), per_sample_csv(report.per_sample));
  if (report.scatter) write_text(side_file(out, ".scatter.csv"), scatter_csv(*report.scatter));

  json doc = to_json(report);
  doc["manifest"] = manifest.finish();
  write_json(out, doc);
  print_summary({{"command", "gap"}, {"n", report.per_sample.size()}, {"gap_all", report.gap_all},
                 {"cross_entropy", report.cross_entropy}, {"warnings", report.warnings}});
  return 0;
}

int run_pool(const GlobalOptions& g, const PoolArgs& a) {
  const fs::path out = require_out(g, "pool");
  RunManifest manifest("pool", {{"model", a.model}, {"pool", a.pool}, {"grid", a.grid}},
                       {{"exponent", a.exponent}});
  const GaussianModel model = load_model(a.model);
  const FeatureSet pool = read_features(a.pool);
  const GridManifest grid = read_grid_manifest(a.grid);
  for (std::size_t flat = 0; flat < grid.combination_count(); ++flat) {
    if (!pool.find(grid.id_at(flat))) {
      throw Error(ErrorKind::kUnknownId, "grid id '" + grid.id_at(flat) + "' is not in the pool");
    }
  }

  const AdjacencyPairs pairs = adjacency_pairs(grid);
  json doc;
  doc["pool_size"] = pool.size();
  doc["grid_size"] = grid.combination_count();
  doc["adjacency_pairs"] = pairs.pairs.size();
  doc["density"] = pairs.pairs.empty() ? json(nullptr) : json(density(pool, pairs, g.threads));
  doc["diversity"] = diversity(pool, {a.exponent});
  doc["exponent"] = a.exponent;
  doc["domain_gap"] = pool_domain_gap(model, pool, g.threads);
  doc["manifest"] = manifest.finish();
  write_json(out, doc);
  print_summary({{"command", "pool"}, {"density", doc["density"]}, {"diversity", doc["diversity"]},
                 {"domain_gap", doc["domain_gap"]}, {"adjacency_pairs", doc["adjacency_pairs"]}});
  return 0;
}

int run_subset(const GlobalOptions& g, const SubsetArgs& a) {
  const fs::path out = require_out(g, "subset");
  RunManifest manifest("subset", {{"grid", a.grid}}, {{"scheme", a.scheme}, {"scheme_name", a.scheme_name}});

  std::optional<SubsetScheme> scheme = find_builtin_scheme(a.scheme);
  if (!scheme) {
    if (!fs::is_regular_file(a.scheme)) {
      std::string names = "original";
      for (const auto& s : builtin_schemes()) names += ", " + s.name;
      throw Error(ErrorKind::kInvalidArgument,
                  "unknown scheme '" + a.scheme + "'; builtin schemes: " + names + "; or pass a scheme file");
    }
    const auto schemes = read_schemes(a.scheme);
    if (a.scheme_name.empty()) {
      if (schemes.size() != 1) {
        throw Error(ErrorKind::kInvalidArgument, "scheme file holds several schemes; pick one with --scheme-name");
      }
      scheme = schemes.front();
    } else {
      for (const auto& s : schemes) {
        if (s.name == a.scheme_name) scheme = s;
      }
      if (!scheme) throw Error(ErrorKind::kInvalidArgument, "no scheme named '" + a.scheme_name + "' in " + a.scheme);
    }
  }

  const GridManifest grid = read_grid_manifest(a.grid);
  const auto ids = sample_subset(grid, *scheme);
  write_ids(out, ids);
  json doc = {{"scheme", scheme->name}, {"count", ids.size()}, {"grid_size", grid.combination_count()}};
  doc["manifest"] = manifest.finish();
  write_json(side_file(out, ".json"), doc);
  print_summary({{"command", "subset"}, {"scheme", scheme->name}, {"count", ids.size()}});
  return 0;
}

int run_equiv_check(const GlobalOptions& g, const EquivArgs& a) {
  RunManifest manifest("equiv-check", json::object(),
                       {{"trials", a.trials}, {"dim_max", a.dim_max}, {"seed", g.seed}});
  const EquivalenceSummary summary = equivalence_trials(a.trials, a.dim_max, g.seed);
  const bool pass = summary.max_abs_deviation <= kEquivalenceTolerance;
  json doc = {{"trials", summary.trials},
              {"max_abs_deviation", summary.max_abs_deviation},
              {"worst_trial", summary.worst_trial},
              {"worst_dim", summary.worst_dim},
              {"tolerance", kEquivalenceTolerance},
              {"pass", pass}};
  doc["manifest"] = manifest.finish();
  if (!g.out.empty()) write_json(g.out, doc);
  std::cout << "max_abs_deviation " << format_double(summary.max_abs_deviation) << '\n';
  print_summary({{"command", "equiv-check"}, {"pass", pass}, {"max_abs_deviation", summary.max_abs_deviation}});
  return pass ? 0 : 3;
}

int run_select(const GlobalOptions& g, const SelectArgs& a) {
  const fs::path out = require_out(g, "select");
  SelectionConfig config;
  config.count = a.count;
  config.mode = parse_selection_mode(a.mode);
  config.temperature = a.temperature;
  config.seed = g.seed;
  json params = {{"count", a.count}, {"mode", std::string(to_string(config.mode))}, {"seed", g.seed}};
  if (config.mode == SelectionMode::kGapWeighted) params["temperature"] = a.temperature;
  if (a.bias_trials > 0) params["bias_trials"] = a.bias_trials;
  RunManifest manifest("select", {{"per_item", a.per_item}}, params);

  const auto items = read_per_item(a.per_item);
  const auto ids = select(items, config);
  write_ids(out, ids);

  json doc = {{"count", ids.size()}, {"pool_size", items.size()}};
  if (a.bias_trials > 0) {
    const auto bias = selection_bias_report(items, config, a.bias_trials, g.threads);
    doc["bias"] = {{"trials", bias.trials},
                   {"mean_selected_gap", bias.mean_selected_gap},
                   {"mean_pool_gap", bias.mean_pool_gap},
                   {"selected_stderr", bias.selected_stderr}};
  }
  doc["manifest"] = manifest.finish();
  write_json(side_file(out, ".json"), doc);
  json summary = {{"command", "select"}, {"count", ids.size()}};
  if (doc.contains("bias")) summary["bias"] = doc["bias"];
  print_summary(summary);
  return 0;
}

int run_frechet(const GlobalOptions& g, const FrechetArgs& a) {
  RunManifest manifest("frechet", {{"model_a", a.model_a}, {"model_b", a.model_b}}, json::object());
  const GaussianModel ma = load_model(a.model_a);
  const GaussianModel mb = load_model(a.model_b);
  const double distance = frechet_gaussian(ma, mb);
  json doc = {{"frechet_gaussian", distance}, {"dim", ma.dim()}};
  doc["manifest"] = manifest.finish();
  if (!g.out.empty()) write_json(g.out, doc);
  print_summary({{"command", "frechet"}, {"frechet_gaussian", distance}});
  return 0;
}

}  // namespace dgap::cli
