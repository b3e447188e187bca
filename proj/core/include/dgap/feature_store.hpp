#pragma once

#include "dgap/numeric.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace dgap {

/// n rows of d-dimensional embeddings keyed by opaque, unique ids, with
/// optional per-row detection scores in [0, 1]. Immutable once built; the
/// constructor enforces every invariant and throws dgap::Error otherwise.
class FeatureSet {
 public:
  FeatureSet(std::vector<std::string> ids, RowMatrix rows,
             std::optional<std::vector<double>> scores = std::nullopt);

  std::size_t size() const noexcept { return ids_.size(); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(rows_.cols()); }

  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const RowMatrix& rows() const noexcept { return rows_; }
  const std::optional<std::vector<double>>& scores() const noexcept { return scores_; }
  bool has_scores() const noexcept { return scores_.has_value(); }

  /// Row i as a contiguous view.
  Eigen::Map<const Vector> row(std::size_t i) const {
    return Eigen::Map<const Vector>(rows_.row(static_cast<Eigen::Index>(i)).data(), rows_.cols());
  }

  /// Row index of an id, if present.
  std::optional<std::size_t> find(const std::string& id) const;

 private:
  std::vector<std::string> ids_;
  RowMatrix rows_;
  std::optional<std::vector<double>> scores_;
  std::unordered_map<std::string, std::size_t> index_;
};

// CSV: header `id,f0,...,f{d-1}[,score]`, comma separated, '.' decimal point.
FeatureSet read_csv(const std::filesystem::path& path);
void write_csv(const FeatureSet& set, const std::filesystem::path& path);

// Binary container, little-endian:
//   "FSET" | u32 version=1 | u32 flags | u64 n | u64 d
//   | n*d f64 row-major | [n f64 scores] | [id table] | u32 CRC32(payload)
// flags bit0: scores present; bit1: id table present (u32 length + UTF-8
// bytes per id). Without an id table, ids are the decimal row indices.
inline constexpr std::uint32_t kBinaryVersion = 1;
inline constexpr std::uint32_t kFlagScores = 1u << 0;
inline constexpr std::uint32_t kFlagIds = 1u << 1;

FeatureSet read_binary(const std::filesystem::path& path);
void write_binary(const FeatureSet& set, const std::filesystem::path& path);

/// Dispatches on the leading magic: binary if the file starts with "FSET",
/// CSV otherwise.
FeatureSet read_features(const std::filesystem::path& path);

}  // namespace dgap
