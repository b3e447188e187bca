#include "dgap/feature_store.hpp"

#include "dgap/error.hpp"

#include <zlib.h>

#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string_view>

namespace dgap {

namespace {

std::string row_label(std::size_t row) { return "row " + std::to_string(row + 1); }

std::vector<char> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "'");
  return std::vector<char>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view cell, std::size_t row, std::string_view column) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
    throw Error(ErrorKind::kParse, row_label(row) + ", column '" + std::string(column) +
                                       "': not a number: '" + std::string(cell) + "'");
  }
  if (!std::isfinite(value)) {
    throw Error(ErrorKind::kParse, row_label(row) + ", column '" + std::string(column) +
                                       "': non-finite value '" + std::string(cell) + "'");
  }
  return value;
}

// Little-endian byte buffer helpers.
void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}
void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}
void put_f64(std::vector<unsigned char>& out, double v) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &v, sizeof bits);
  put_u64(out, bits);
}

class ByteReader {
 public:
  ByteReader(const unsigned char* data, std::size_t size) : data_(data), size_(size) {}

  std::size_t remaining() const noexcept { return size_ - pos_; }
  std::size_t position() const noexcept { return pos_; }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }
  double f64() {
    const std::uint64_t bits = u64();
    double v = 0.0;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }
  std::string bytes(std::size_t count) {
    need(count);
    std::string s(reinterpret_cast<const char*>(data_ + pos_), count);
    pos_ += count;
    return s;
  }

 private:
  void need(std::size_t count) const {
    if (remaining() < count) {
      throw Error(ErrorKind::kTruncated, "binary feature file truncated at byte " +
                                             std::to_string(pos_) + " (needed " +
                                             std::to_string(count) + " more bytes)");
    }
  }

  const unsigned char* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

constexpr std::size_t kHeaderBytes = 4 + 4 + 4 + 8 + 8;

}  // namespace

FeatureSet::FeatureSet(std::vector<std::string> ids, RowMatrix rows,
                       std::optional<std::vector<double>> scores)
    : ids_(std::move(ids)), rows_(std::move(rows)), scores_(std::move(scores)) {
  if (rows_.cols() < 1) throw Error(ErrorKind::kInvalidArgument, "feature dimension must be >= 1");
  if (static_cast<Eigen::Index>(ids_.size()) != rows_.rows()) {
    throw Error(ErrorKind::kInvalidArgument,
                "id count " + std::to_string(ids_.size()) + " does not match row count " +
                    std::to_string(rows_.rows()));
  }
  index_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (ids_[i].empty()) throw Error(ErrorKind::kParse, row_label(i) + ": missing id");
    const auto [it, inserted] = index_.emplace(ids_[i], i);
    if (!inserted) {
      throw Error(ErrorKind::kDuplicateId, "duplicate id '" + ids_[i] + "' at " +
                                               row_label(it->second) + " and " + row_label(i));
    }
  }
  for (Eigen::Index r = 0; r < rows_.rows(); ++r) {
    for (Eigen::Index c = 0; c < rows_.cols(); ++c) {
      if (!std::isfinite(rows_(r, c))) {
        throw Error(ErrorKind::kParse, row_label(static_cast<std::size_t>(r)) + ", column f" +
                                           std::to_string(c) + ": non-finite value");
      }
    }
  }
  if (scores_) {
    if (scores_->size() != ids_.size()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "score count " + std::to_string(scores_->size()) +
                      " does not match row count " + std::to_string(ids_.size()));
    }
    for (std::size_t i = 0; i < scores_->size(); ++i) {
      const double s = (*scores_)[i];
      if (!(s >= 0.0 && s <= 1.0)) {
        std::ostringstream msg;
        msg << row_label(i) << ": score " << s << " outside [0, 1]";
        throw Error(ErrorKind::kOutOfRange, msg.str());
      }
    }
  }
}

std::optional<std::size_t> FeatureSet::find(const std::string& id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

FeatureSet read_csv(const std::filesystem::path& path) {
  const std::vector<char> raw = slurp(path);
  std::string_view text(raw.data(), raw.size());
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = nl + 1;
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw Error(ErrorKind::kParse, "'" + path.string() + "': missing header");

  const auto header = split_fields(lines.front());
  if (trim(header.front()) != "id") {
    throw Error(ErrorKind::kParse, "header must start with 'id'");
  }
  bool with_scores = header.size() >= 2 && trim(header.back()) == "score";
  const std::size_t dim = header.size() - 1 - (with_scores ? 1 : 0);
  if (dim < 1) throw Error(ErrorKind::kParse, "header declares no feature columns");
  for (std::size_t c = 0; c < dim; ++c) {
    const std::string expected = "f" + std::to_string(c);
    if (trim(header[c + 1]) != expected) {
      throw Error(ErrorKind::kParse, "header column " + std::to_string(c + 2) + " is '" +
                                         std::string(trim(header[c + 1])) + "', expected '" +
                                         expected + "'");
    }
  }

  const std::size_t n = lines.size() - 1;
  std::vector<std::string> ids;
  ids.reserve(n);
  RowMatrix rows(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  std::optional<std::vector<double>> scores;
  if (with_scores) scores.emplace(n);

  for (std::size_t r = 0; r < n; ++r) {
    const auto fields = split_fields(lines[r + 1]);
    if (fields.size() != header.size()) {
      throw Error(ErrorKind::kParse, row_label(r) + ": expected " + std::to_string(header.size()) +
                                         " fields, found " + std::to_string(fields.size()));
    }
    const std::string_view id = trim(fields[0]);
    if (id.empty()) throw Error(ErrorKind::kParse, row_label(r) + ": missing id");
    ids.emplace_back(id);
    for (std::size_t c = 0; c < dim; ++c) {
      rows(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          parse_number(fields[c + 1], r, "f" + std::to_string(c));
    }
    if (with_scores) (*scores)[r] = parse_number(fields.back(), r, "score");
  }
  return FeatureSet(std::move(ids), std::move(rows), std::move(scores));
}

void write_csv(const FeatureSet& set, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");
  out << "id";
  for (std::size_t c = 0; c < set.dim(); ++c) out << ",f" << c;
  if (set.has_scores()) out << ",score";
  out << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t r = 0; r < set.size(); ++r) {
    out << set.ids()[r];
    for (std::size_t c = 0; c < set.dim(); ++c) {
      out << ',' << set.rows()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
    if (set.has_scores()) out << ',' << (*set.scores())[r];
    out << '\n';
  }
}

void write_binary(const FeatureSet& set, const std::filesystem::path& path) {
  std::vector<unsigned char> header;
  header.insert(header.end(), {'F', 'S', 'E', 'T'});
  put_u32(header, kBinaryVersion);
  put_u32(header, (set.has_scores() ? kFlagScores : 0u) | kFlagIds);
  put_u64(header, set.size());
  put_u64(header, set.dim());

  std::vector<unsigned char> payload;
  payload.reserve(8 * set.size() * (set.dim() + 1));
  for (Eigen::Index r = 0; r < set.rows().rows(); ++r) {
    for (Eigen::Index c = 0; c < set.rows().cols(); ++c) put_f64(payload, set.rows()(r, c));
  }
  if (set.has_scores()) {
    for (double s : *set.scores()) put_f64(payload, s);
  }
  for (const auto& id : set.ids()) {
    put_u32(payload, static_cast<std::uint32_t>(id.size()));
    payload.insert(payload.end(), id.begin(), id.end());
  }
  const auto crc = static_cast<std::uint32_t>(
      crc32(0L, payload.data(), static_cast<uInt>(payload.size())));

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(header.data()), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  std::vector<unsigned char> trailer;
  put_u32(trailer, crc);
  out.write(reinterpret_cast<const char*>(trailer.data()), 4);
  if (!out) throw Error(ErrorKind::kIo, "write failed for '" + path.string() + "'");
}

FeatureSet read_binary(const std::filesystem::path& path) {
  const std::vector<char> raw = slurp(path);
  const auto* bytes = reinterpret_cast<const unsigned char*>(raw.data());
  if (raw.size() < 4 || std::memcmp(bytes, "FSET", 4) != 0) {
    throw Error(ErrorKind::kBadMagic, "'" + path.string() + "' is not an FSET feature file");
  }
  ByteReader reader(bytes, raw.size());
  reader.bytes(4);
  const std::uint32_t version = reader.u32();
  if (version != kBinaryVersion) {
    throw Error(ErrorKind::kVersionMismatch, "unsupported FSET version " + std::to_string(version) +
                                                 " (expected " + std::to_string(kBinaryVersion) + ")");
  }
  const std::uint32_t flags = reader.u32();
  if ((flags & ~(kFlagScores | kFlagIds)) != 0) {
    throw Error(ErrorKind::kParse, "unknown FSET flags " + std::to_string(flags));
  }
  const std::uint64_t n = reader.u64();
  const std::uint64_t d = reader.u64();
  if (d == 0) throw Error(ErrorKind::kParse, "FSET header declares dimension 0");
  const bool scores = (flags & kFlagScores) != 0;

  // The fixed-size part of the payload plus the CRC trailer must fit.
  const std::size_t body = reader.remaining() >= 4 ? reader.remaining() - 4 : 0;
  const std::uint64_t slots = body / 8;
  const std::uint64_t per_row = d + (scores ? 1 : 0);
  if (reader.remaining() < 4 || (n > 0 && (per_row > slots || n > slots / per_row))) {
    throw Error(ErrorKind::kTruncated, "FSET header claims " + std::to_string(n) +
                                           " rows of dimension " + std::to_string(d) +
                                           " but the file holds only " +
                                           std::to_string(raw.size()) + " bytes");
  }

  const std::size_t payload_begin = reader.position();
  ByteReader payload(bytes + payload_begin, raw.size() - payload_begin - 4);
  RowMatrix rows(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    for (Eigen::Index c = 0; c < rows.cols(); ++c) rows(r, c) = payload.f64();
  }
  std::optional<std::vector<double>> score_values;
  if (scores) {
    score_values.emplace(n);
    for (auto& s : *score_values) s = payload.f64();
  }
  std::vector<std::string> ids;
  ids.reserve(n);
  if ((flags & kFlagIds) != 0) {
    for (std::uint64_t i = 0; i < n; ++i) ids.push_back(payload.bytes(payload.u32()));
  } else {
    for (std::uint64_t i = 0; i < n; ++i) ids.push_back(std::to_string(i));
  }
  if (payload.remaining() != 0) {
    throw Error(ErrorKind::kParse, std::to_string(payload.remaining()) +
                                       " unexpected trailing bytes before the checksum");
  }
  const std::size_t payload_size = raw.size() - payload_begin - 4;
  ByteReader trailer(bytes + payload_begin + payload_size, 4);
  const std::uint32_t stored = trailer.u32();
  const auto actual = static_cast<std::uint32_t>(
      crc32(0L, bytes + payload_begin, static_cast<uInt>(payload_size)));
  if (stored != actual) {
    std::ostringstream msg;
    msg << "FSET checksum mismatch: stored 0x" << std::hex << stored << ", computed 0x" << actual;
    throw Error(ErrorKind::kChecksum, msg.str());
  }
  return FeatureSet(std::move(ids), std::move(rows), std::move(score_values));
}

FeatureSet read_features(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "'");
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() == 4 && std::memcmp(magic, "FSET", 4) == 0) return read_binary(path);
  return read_csv(path);
}

}  // namespace dgap
