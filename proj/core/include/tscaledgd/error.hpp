#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace tsgd {

/// Failure categories reported by every module of the library.
enum class Errc {
  kDimensionMismatch,
  kNotOrthogonalUpToScale,
  kImaginaryResidueTooLarge,
  kSvdFailure,
  kRankOutOfRange,
  kSingularSlice,
  kNotPsdSlice,
  kUnknownKind,
  kEmptySpectrum,
  kRankDeficientFactor,
  kNoConvergence,
  kZeroReference,
  kNegativeThreshold,
  kPreconditionerSingular,
  kZeroSignal,
  kInvalidArgument,
  kIoError,
};

const char* to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message,
        std::optional<std::ptrdiff_t> slice = std::nullopt,
        std::optional<double> value = std::nullopt);

  Errc code() const noexcept { return code_; }
  /// Transform-domain frontal slice the failure refers to, when there is one.
  std::optional<std::ptrdiff_t> slice() const noexcept { return slice_; }
  /// Measured quantity attached to the failure (a residual, a condition number).
  std::optional<double> value() const noexcept { return value_; }

 private:
  Errc code_;
  std::optional<std::ptrdiff_t> slice_;
  std::optional<double> value_;
};

}  // namespace tsgd
