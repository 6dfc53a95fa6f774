#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "tscaledgd/tensor3.hpp"

namespace tsgd {

enum class TransformKind { kDft, kDct, kCustom };

const char* to_string(TransformKind kind) noexcept;
/// Parses "dft" / "dct" (case-insensitive); throws Errc::kUnknownKind otherwise.
TransformKind parse_transform_kind(std::string_view name);

/// Whether inverse() verifies that the discarded imaginary part is negligible.
enum class ResidueCheck { kEnforce, kSkip };

/// Invertible mode-3 linear transform L(A) = A x_3 Phi with
/// Phi Phi^H = Phi^H Phi = ell I.
///
/// Instances are immutable and share their state, so copies are cheap and
/// safe to use from several threads at once.
class Transform {
 public:
  /// Builds the unnormalized DFT (ell = n3) or the orthonormal DCT-II (ell = 1).
  static Transform make(TransformKind kind, Index n3);
  /// Validates an arbitrary Phi; ell is the mean of diag(Phi Phi^H).
  static Transform custom(const Eigen::MatrixXcd& phi);

  TransformKind kind() const noexcept;
  Index n3() const noexcept;
  double ell() const noexcept;
  const Eigen::MatrixXcd& phi() const noexcept;
  /// Phi^{-1} = Phi^H / ell.
  const Eigen::MatrixXcd& phi_inverse() const noexcept;

  /// Index of the slice whose transform-domain values are the complex
  /// conjugates of slice k for every real input, or -1 when no such slice
  /// exists. Slices that are their own partner hold real values.
  Index conjugate_partner(Index k) const;
  /// True when every slice has a conjugate partner, so facewise results of
  /// real inputs map back to real tensors without a residue check.
  bool real_preserving() const noexcept;

  /// Every mode-3 tube of the result is Phi times the corresponding tube of a.
  SpectralTensor forward(const Tensor3& a) const;
  /// Applies Phi^{-1} along mode 3 and returns the real part. With
  /// ResidueCheck::kEnforce the imaginary part must stay below
  /// 1e-9 * (1 + ||result||_F).
  Tensor3 inverse(const SpectralTensor& abar, ResidueCheck check = ResidueCheck::kEnforce) const;

 private:
  struct State;
  explicit Transform(std::shared_ptr<const State> state) : state_(std::move(state)) {}
  std::shared_ptr<const State> state_;
};

Transform make_transform(TransformKind kind, Index n3);
Transform make_custom_transform(const Eigen::MatrixXcd& phi);

}  // namespace tsgd
