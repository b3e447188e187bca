#include "dgap/error.hpp"

namespace dgap {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid_argument";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kDuplicateId: return "duplicate_id";
    case ErrorKind::kUnknownId: return "unknown_id";
    case ErrorKind::kOutOfRange: return "out_of_range";
    case ErrorKind::kBadMagic: return "bad_magic";
    case ErrorKind::kVersionMismatch: return "version_mismatch";
    case ErrorKind::kTruncated: return "truncated";
    case ErrorKind::kChecksum: return "checksum";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kDimensionMismatch: return "dimension_mismatch";
    case ErrorKind::kInsufficientData: return "insufficient_data";
    case ErrorKind::kGridMismatch: return "grid_mismatch";
    case ErrorKind::kFactorization: return "factorization";
    case ErrorKind::kEigendecomposition: return "eigendecomposition";
  }
  return "unknown";
}

bool is_numeric(ErrorKind kind) noexcept {
  return kind == ErrorKind::kFactorization || kind == ErrorKind::kEigendecomposition;
}

}  // namespace dgap
