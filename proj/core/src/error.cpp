#include "tscaledgd/error.hpp"

namespace tsgd {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::kDimensionMismatch: return "DimensionMismatch";
    case Errc::kNotOrthogonalUpToScale: return "NotOrthogonalUpToScale";
    case Errc::kImaginaryResidueTooLarge: return "ImaginaryResidueTooLarge";
    case Errc::kSvdFailure: return "SvdFailure";
    case Errc::kRankOutOfRange: return "RankOutOfRange";
    case Errc::kSingularSlice: return "SingularSlice";
    case Errc::kNotPsdSlice: return "NotPSDSlice";
    case Errc::kUnknownKind: return "UnknownKind";
    case Errc::kEmptySpectrum: return "EmptySpectrum";
    case Errc::kRankDeficientFactor: return "RankDeficientFactor";
    case Errc::kNoConvergence: return "NoConvergence";
    case Errc::kZeroReference: return "ZeroReference";
    case Errc::kNegativeThreshold: return "NegativeThreshold";
    case Errc::kPreconditionerSingular: return "PreconditionerSingular";
    case Errc::kZeroSignal: return "ZeroSignal";
    case Errc::kInvalidArgument: return "InvalidArgument";
    case Errc::kIoError: return "IoError";
  }
  return "Unknown";
}

namespace {

std::string format_message(Errc code, const std::string& message,
                           std::optional<std::ptrdiff_t> slice) {
  std::string out = to_string(code);
  if (slice) out += "(" + std::to_string(*slice) + ")";
  if (!message.empty()) out += ": " + message;
  return out;
}

}  // namespace

Error::Error(Errc code, const std::string& message,
             std::optional<std::ptrdiff_t> slice, std::optional<double> value)
    : std::runtime_error(format_message(code, message, slice)),
      code_(code),
      slice_(slice),
      value_(value) {}

}  // namespace tsgd
