#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace dgap {

/// A rendering-parameter value: either a number (altitude, angle, ...) or a
/// label (character, pose, ...).
using GridValue = std::variant<double, std::string>;

std::string format_value(const GridValue& value);

struct GridParameter {
  std::string name;
  std::vector<GridValue> values;
  /// Last and first values are neighbours (e.g. 330 deg and 0 deg).
  bool cyclic = false;
};

/// Ordered rendering parameters plus a bijection between every parameter
/// combination and a feature id. Combinations are addressed by a mixed-radix
/// flat index with the last parameter varying fastest.
class GridManifest {
 public:
  using Combination = std::vector<std::size_t>;

  struct Entry {
    std::string id;
    Combination combination;
  };

  GridManifest(std::vector<GridParameter> parameters, std::vector<Entry> assignment);

  const std::vector<GridParameter>& parameters() const noexcept { return parameters_; }
  std::size_t combination_count() const noexcept { return ids_by_flat_.size(); }

  const std::string& id_at(std::size_t flat_index) const { return ids_by_flat_.at(flat_index); }
  const std::string& id_at(const Combination& combination) const;

  std::size_t flat_index(const Combination& combination) const;
  Combination combination(std::size_t flat_index) const;

  std::optional<std::size_t> parameter_index(const std::string& name) const;
  std::optional<std::size_t> value_index(std::size_t parameter, const GridValue& value) const;

 private:
  std::vector<GridParameter> parameters_;
  std::vector<std::string> ids_by_flat_;
};

/// Builds a manifest whose ids are produced by `id_for(combination)`.
template <typename IdFn>
GridManifest make_grid(std::vector<GridParameter> parameters, IdFn&& id_for) {
  std::size_t total = 1;
  for (const auto& p : parameters) total *= p.values.size();
  std::vector<GridManifest::Entry> entries;
  entries.reserve(total);
  GridManifest::Combination combo(parameters.size(), 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rest = flat;
    for (std::size_t p = parameters.size(); p-- > 0;) {
      combo[p] = rest % parameters[p].values.size();
      rest /= parameters[p].values.size();
    }
    entries.push_back({id_for(combo), combo});
  }
  return GridManifest(std::move(parameters), std::move(entries));
}

// JSON manifest:
// {
//   "parameters": [{"name": "altitude", "values": [5, 10], "cyclic": false}, ...],
//   "assignment": [{"id": "img_0001", "values": {"altitude": 5, ...}}, ...]
// }
GridManifest read_grid_manifest(const std::filesystem::path& path);
void write_grid_manifest(const GridManifest& grid, const std::filesystem::path& path);
GridManifest parse_grid_manifest(const std::string& json_text);

/// The five-parameter Archangel-synthetic grid: 10 altitudes (5..50 m), 6 radii
/// (5..30 m), 12 angles (0..330 deg), 8 characters, 3 poses; 17,280 renders.
/// Ids are "alt<a>_rad<r>_ang<g>_<character>_<pose>".
GridManifest archangel_grid(bool cyclic_angles = false);

}  // namespace dgap
