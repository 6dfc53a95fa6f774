#pragma once

#include "tscaledgd/tensor3.hpp"
#include "tscaledgd/transform.hpp"

namespace tsgd {

/// Operand modifier for transform-domain facewise products.
enum class Op { kNone, kAdjoint };

/// C_k = op(A_k) * op(B_k) for every frontal slice.
inline SpectralTensor facewise(const SpectralTensor& a, Op op_a, const SpectralTensor& b, Op op_b) {
  if (a.n3() != b.n3()) throw Error(Errc::kDimensionMismatch, "facewise operands differ in n3");
  const Index rows = op_a == Op::kNone ? a.n1() : a.n2();
  const Index inner_a = op_a == Op::kNone ? a.n2() : a.n1();
  const Index inner_b = op_b == Op::kNone ? b.n1() : b.n2();
  const Index cols = op_b == Op::kNone ? b.n2() : b.n1();
  if (inner_a != inner_b) throw Error(Errc::kDimensionMismatch, "facewise inner dimensions differ");
  SpectralTensor c(rows, cols, a.n3());
  for (Index k = 0; k < a.n3(); ++k) {
    auto out = c.slice(k);
    const auto ak = a.slice(k);
    const auto bk = b.slice(k);
    if (op_a == Op::kNone && op_b == Op::kNone) {
      out.noalias() = ak * bk;
    } else if (op_a == Op::kNone) {
      out.noalias() = ak * bk.adjoint();
    } else if (op_b == Op::kNone) {
      out.noalias() = ak.adjoint() * bk;
    } else {
      out.noalias() = ak.adjoint() * bk.adjoint();
    }
  }
  return c;
}

inline SpectralTensor facewise(const SpectralTensor& a, const SpectralTensor& b) {
  return facewise(a, Op::kNone, b, Op::kNone);
}

/// Inverse transform of a facewise result; skips the realness check when the
/// transform guarantees it.
inline Tensor3 to_spatial(const SpectralTensor& abar, const Transform& tf) {
  return tf.inverse(abar, tf.real_preserving() ? ResidueCheck::kSkip : ResidueCheck::kEnforce);
}

}  // namespace tsgd
