#include "dgap/grid_manifest.hpp"

#include "dgap/error.hpp"

#include "json.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace dgap {

namespace {

using nlohmann::json;

GridValue value_from_json(const json& j, const std::string& context) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw Error(ErrorKind::kParse, context + ": values must be numbers or strings");
}

json value_to_json(const GridValue& v) {
  if (const double* d = std::get_if<double>(&v)) return *d;
  return std::get<std::string>(v);
}

std::string combination_label(const std::vector<GridParameter>& params,
                              const GridManifest::Combination& combo) {
  std::string out = "(";
  for (std::size_t p = 0; p < params.size(); ++p) {
    if (p) out += ", ";
    out += params[p].name + "=" + format_value(params[p].values[combo[p]]);
  }
  return out + ")";
}

}  // namespace

std::string format_value(const GridValue& value) {
  if (const double* d = std::get_if<double>(&value)) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), *d);
    return std::string(buf.data(), res.ptr);
  }
  return std::get<std::string>(value);
}

GridManifest::GridManifest(std::vector<GridParameter> parameters, std::vector<Entry> assignment)
    : parameters_(std::move(parameters)) {
  if (parameters_.empty()) throw Error(ErrorKind::kInvalidArgument, "grid has no parameters");
  std::unordered_set<std::string> names;
  std::size_t total = 1;
  for (const auto& p : parameters_) {
    if (p.name.empty()) throw Error(ErrorKind::kInvalidArgument, "grid parameter with empty name");
    if (!names.insert(p.name).second) {
      throw Error(ErrorKind::kInvalidArgument, "grid parameter '" + p.name + "' declared twice");
    }
    if (p.values.empty()) {
      throw Error(ErrorKind::kInvalidArgument, "grid parameter '" + p.name + "' has no values");
    }
    for (std::size_t i = 0; i < p.values.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (p.values[i] == p.values[j]) {
          throw Error(ErrorKind::kInvalidArgument, "grid parameter '" + p.name +
                                                       "' repeats value " + format_value(p.values[i]));
        }
      }
    }
    total *= p.values.size();
  }

  if (assignment.size() != total) {
    throw Error(ErrorKind::kGridMismatch,
                "combination count mismatch: grid has " + std::to_string(total) +
                    " combinations but " + std::to_string(assignment.size()) + " ids are assigned");
  }

  ids_by_flat_.assign(total, std::string());
  std::vector<bool> filled(total, false);
  std::unordered_set<std::string> seen_ids;
  seen_ids.reserve(total);
  for (const auto& entry : assignment) {
    if (entry.id.empty()) throw Error(ErrorKind::kInvalidArgument, "grid assignment with empty id");
    const std::size_t flat = flat_index(entry.combination);
    if (filled[flat]) {
      throw Error(ErrorKind::kGridMismatch,
                  "assignment is not a bijection: combination " +
                      combination_label(parameters_, entry.combination) +
                      " is assigned to both '" + ids_by_flat_[flat] + "' and '" + entry.id + "'");
    }
    if (!seen_ids.insert(entry.id).second) {
      throw Error(ErrorKind::kGridMismatch, "assignment is not injective: id '" + entry.id +
                                                "' is assigned to more than one combination");
    }
    filled[flat] = true;
    ids_by_flat_[flat] = entry.id;
  }
}

std::size_t GridManifest::flat_index(const Combination& combination) const {
  if (combination.size() != parameters_.size()) {
    throw Error(ErrorKind::kGridMismatch, "combination has " + std::to_string(combination.size()) +
                                              " coordinates, grid has " +
                                              std::to_string(parameters_.size()) + " parameters");
  }
  std::size_t flat = 0;
  for (std::size_t p = 0; p < parameters_.size(); ++p) {
    if (combination[p] >= parameters_[p].values.size()) {
      throw Error(ErrorKind::kGridMismatch, "value position " + std::to_string(combination[p]) +
                                                " out of range for parameter '" +
                                                parameters_[p].name + "'");
    }
    flat = flat * parameters_[p].values.size() + combination[p];
  }
  return flat;
}

GridManifest::Combination GridManifest::combination(std::size_t flat_index) const {
  Combination combo(parameters_.size(), 0);
  for (std::size_t p = parameters_.size(); p-- > 0;) {
    combo[p] = flat_index % parameters_[p].values.size();
    flat_index /= parameters_[p].values.size();
  }
  return combo;
}

const std::string& GridManifest::id_at(const Combination& combination) const {
  return ids_by_flat_[flat_index(combination)];
}

std::optional<std::size_t> GridManifest::parameter_index(const std::string& name) const {
  for (std::size_t p = 0; p < parameters_.size(); ++p) {
    if (parameters_[p].name == name) return p;
  }
  return std::nullopt;
}

std::optional<std::size_t> GridManifest::value_index(std::size_t parameter,
                                                     const GridValue& value) const {
  const auto& values = parameters_.at(parameter).values;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == value) return i;
  }
  return std::nullopt;
}

GridManifest parse_grid_manifest(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParse, std::string("grid manifest is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("parameters") || !doc["parameters"].is_array()) {
    throw Error(ErrorKind::kParse, "grid manifest needs a 'parameters' array");
  }
  if (!doc.contains("assignment") || !doc["assignment"].is_array()) {
    throw Error(ErrorKind::kParse, "grid manifest needs an 'assignment' array");
  }

  std::vector<GridParameter> params;
  for (const auto& jp : doc["parameters"]) {
    if (!jp.is_object() || !jp.contains("name") || !jp["name"].is_string() ||
        !jp.contains("values") || !jp["values"].is_array()) {
      throw Error(ErrorKind::kParse, "each grid parameter needs 'name' and 'values'");
    }
    GridParameter p;
    p.name = jp["name"].get<std::string>();
    for (const auto& v : jp["values"]) p.values.push_back(value_from_json(v, "parameter '" + p.name + "'"));
    if (jp.contains("cyclic")) {
      if (!jp["cyclic"].is_boolean()) throw Error(ErrorKind::kParse, "'cyclic' must be a boolean");
      p.cyclic = jp["cyclic"].get<bool>();
    }
    params.push_back(std::move(p));
  }

  // Resolve values against the declared lists; an unknown value is a grid error.
  std::vector<GridManifest::Entry> entries;
  entries.reserve(doc["assignment"].size());
  for (const auto& ja : doc["assignment"]) {
    if (!ja.is_object() || !ja.contains("id") || !ja["id"].is_string()) {
      throw Error(ErrorKind::kParse, "each assignment entry needs a string 'id'");
    }
    GridManifest::Entry entry;
    entry.id = ja["id"].get<std::string>();
    entry.combination.resize(params.size());
    if (ja.contains("index")) {
      const auto& idx = ja["index"];
      if (!idx.is_array() || idx.size() != params.size()) {
        throw Error(ErrorKind::kParse, "assignment '" + entry.id + "': 'index' must list one position per parameter");
      }
      for (std::size_t p = 0; p < params.size(); ++p) {
        if (!idx[p].is_number_unsigned()) {
          throw Error(ErrorKind::kParse, "assignment '" + entry.id + "': 'index' entries must be non-negative integers");
        }
        entry.combination[p] = idx[p].get<std::size_t>();
      }
    } else if (ja.contains("values") && ja["values"].is_object()) {
      const auto& jv = ja["values"];
      if (jv.size() != params.size()) {
        throw Error(ErrorKind::kGridMismatch, "assignment '" + entry.id + "' must give exactly one value per parameter");
      }
      for (std::size_t p = 0; p < params.size(); ++p) {
        if (!jv.contains(params[p].name)) {
          throw Error(ErrorKind::kGridMismatch, "assignment '" + entry.id + "' lacks parameter '" + params[p].name + "'");
        }
        const GridValue v = value_from_json(jv[params[p].name], "assignment '" + entry.id + "'");
        std::size_t pos = params[p].values.size();
        for (std::size_t i = 0; i < params[p].values.size(); ++i) {
          if (params[p].values[i] == v) pos = i;
        }
        if (pos == params[p].values.size()) {
          throw Error(ErrorKind::kGridMismatch, "assignment '" + entry.id + "': value " + format_value(v) +
                                                    " is not declared for parameter '" + params[p].name + "'");
        }
        entry.combination[p] = pos;
      }
    } else {
      throw Error(ErrorKind::kParse, "assignment '" + entry.id + "' needs 'values' or 'index'");
    }
    entries.push_back(std::move(entry));
  }
  return GridManifest(std::move(params), std::move(entries));
}

GridManifest read_grid_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_grid_manifest(text.str());
}

void write_grid_manifest(const GridManifest& grid, const std::filesystem::path& path) {
  json doc;
  doc["parameters"] = json::array();
  for (const auto& p : grid.parameters()) {
    json jp;
    jp["name"] = p.name;
    jp["values"] = json::array();
    for (const auto& v : p.values) jp["values"].push_back(value_to_json(v));
    jp["cyclic"] = p.cyclic;
    doc["parameters"].push_back(std::move(jp));
  }
  doc["assignment"] = json::array();
  for (std::size_t flat = 0; flat < grid.combination_count(); ++flat) {
    const auto combo = grid.combination(flat);
    json values = json::object();
    for (std::size_t p = 0; p < combo.size(); ++p) {
      values[grid.parameters()[p].name] = value_to_json(grid.parameters()[p].values[combo[p]]);
    }
    doc["assignment"].push_back({{"id", grid.id_at(flat)}, {"values", std::move(values)}});
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");
  out << doc.dump(1) << '\n';
}

GridManifest archangel_grid(bool cyclic_angles) {
  auto numbers = [](double first, double step, int count) {
    std::vector<GridValue> out;
    for (int i = 0; i < count; ++i) out.emplace_back(first + step * i);
    return out;
  };
  std::vector<GridParameter> params{
      {"altitude", numbers(5, 5, 10), false},
      {"radius", numbers(5, 5, 6), false},
      {"angle", numbers(0, 30, 12), cyclic_angles},
      {"character",
       {"Juliet", "Kelly", "Lucy", "Mary", "Romeo", "Scott", "Troy", "Victor"},
       false},
      {"pose", {"stand", "prone", "squat"}, false},
  };
  const auto snapshot = params;
  return make_grid(std::move(params), [&snapshot](const GridManifest::Combination& c) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "alt%02d_rad%02d_ang%03d_%s_%s",
                  static_cast<int>(std::get<double>(snapshot[0].values[c[0]])),
                  static_cast<int>(std::get<double>(snapshot[1].values[c[1]])),
                  static_cast<int>(std::get<double>(snapshot[2].values[c[2]])),
                  std::get<std::string>(snapshot[3].values[c[3]]).c_str(),
                  std::get<std::string>(snapshot[4].values[c[4]]).c_str());
    return std::string(buf);
  });
}

}  // namespace dgap
