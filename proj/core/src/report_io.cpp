#include "dgap/report_io.hpp"

#include "dgap/error.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dgap {

using nlohmann::json;

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

json to_json(const Histogram& histogram) {
  json bins = json::array();
  for (const auto& b : histogram.bins) bins.push_back({{"lo", b.lo}, {"hi", b.hi}, {"count", b.count}});
  return {{"bins", std::move(bins)},
          {"clamped_low", histogram.clamped_low},
          {"clamped_high", histogram.clamped_high},
          {"axis", "mahalanobis_distance"}};
}

json to_json(const GapReport& report) {
  json doc;
  doc["dim"] = report.dim;
  doc["n"] = report.per_sample.size();
  doc["gap_all"] = report.gap_all;
  json filtered = json::object();
  for (const auto& [fraction, gap] : report.gap_filtered) filtered[format_double(fraction)] = gap;
  doc["gap_filtered"] = std::move(filtered);
  doc["cross_entropy"] = report.cross_entropy;
  doc["constant_term"] = report.constant_term;
  json samples = json::array();
  for (const auto& s : report.per_sample) samples.push_back({{"id", s.id}, {"mahalanobis_sq", s.mahalanobis_sq}});
  doc["per_sample"] = std::move(samples);
  doc["histogram"] = to_json(report.histogram);
  if (report.scatter) {
    json rows = json::array();
    for (const auto& p : *report.scatter) rows.push_back({{"score", p.score}, {"distance", p.distance}});
    doc["scatter"] = std::move(rows);
  }
  doc["warnings"] = report.warnings;
  return doc;
}

std::string histogram_csv(const Histogram& histogram) {
  std::ostringstream out;
  out << "lo,hi,count\n";
  for (const auto& b : histogram.bins) out << format_double(b.lo) << ',' << format_double(b.hi) << ',' << b.count << '\n';
  return out.str();
}

std::string scatter_csv(const std::vector<ScatterPoint>& scatter) {
  std::ostringstream out;
  out << "score,distance\n";
  for (const auto& p : scatter) out << format_double(p.score) << ',' << format_double(p.distance) << '\n';
  return out.str();
}

std::string per_sample_csv(const std::vector<SampleGap>& per_sample) {
  std::ostringstream out;
  out << "id,mahalanobis_sq\n";
  for (const auto& s : per_sample) out << s.id << ',' << format_double(s.mahalanobis_sq) << '\n';
  return out.str();
}

std::vector<SampleGap> read_per_item(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  const auto first = text.find_first_not_of(" \t\r\n");
  std::vector<SampleGap> items;
  if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::kParse, std::string("per-item file is not valid JSON: ") + e.what());
    }
    const json& list = doc.is_object() ? doc.value("per_sample", json::array()) : doc;
    if (!list.is_array()) throw Error(ErrorKind::kParse, "per-item JSON needs a 'per_sample' array");
    for (const auto& e : list) {
      if (!e.is_object() || !e.contains("id") || !e["id"].is_string() || !e.contains("mahalanobis_sq") ||
          !e["mahalanobis_sq"].is_number()) {
        throw Error(ErrorKind::kParse, "per-item entries need 'id' and numeric 'mahalanobis_sq'");
      }
      items.push_back({e["id"].get<std::string>(), e["mahalanobis_sq"].get<double>()});
    }
    return items;
  }

  std::istringstream lines(text);
  std::string line;
  std::size_t row = 0;
  bool header = true;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      if (line != "id,mahalanobis_sq") {
        throw Error(ErrorKind::kParse, "per-item CSV header must be 'id,mahalanobis_sq'");
      }
      header = false;
      continue;
    }
    ++row;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw Error(ErrorKind::kParse, "row " + std::to_string(row) + ": expected 2 fields");
    }
    double value = 0.0;
    const char* begin = line.data() + comma + 1;
    const char* end = line.data() + line.size();
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc() || res.ptr != end) {
      throw Error(ErrorKind::kParse, "row " + std::to_string(row) + ": not a number");
    }
    items.push_back({line.substr(0, comma), value});
  }
  return items;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorKind::kIo, "write failed for '" + path.string() + "'");
}

}  // namespace dgap
