#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dgap {

/// Failure classes reported by the library. Each maps onto one of the two
/// non-zero exit codes of the command-line tool.
enum class ErrorKind {
  kInvalidArgument,
  kParse,
  kDuplicateId,
  kUnknownId,
  kOutOfRange,
  kBadMagic,
  kVersionMismatch,
  kTruncated,
  kChecksum,
  kIo,
  kDimensionMismatch,
  kInsufficientData,
  kGridMismatch,
  kFactorization,
  kEigendecomposition,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// True for numeric failures (exit code 3); everything else is an input or
/// validation failure (exit code 2).
bool is_numeric(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return is_numeric(kind_) ? 3 : 2; }

 private:
  ErrorKind kind_;
};

}  // namespace dgap
