#pragma once

#include "dgap/gap_analyzer.hpp"
#include "dgap/selection.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace dgap {

/// Shortest round-trip decimal text of a double ("0.5", "1", "1e-10").
std::string format_double(double value);

nlohmann::json to_json(const GapReport& report);
nlohmann::json to_json(const Histogram& histogram);

/// `lo,hi,count` with a header row.
std::string histogram_csv(const Histogram& histogram);
/// `score,distance` with a header row.
std::string scatter_csv(const std::vector<ScatterPoint>& scatter);
/// `id,mahalanobis_sq` with a header row.
std::string per_sample_csv(const std::vector<SampleGap>& per_sample);

/// Reads (id, squared distance) lists either from a gap report JSON
/// (its "per_sample" array) or from an `id,mahalanobis_sq` CSV.
std::vector<SampleGap> read_per_item(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace dgap
