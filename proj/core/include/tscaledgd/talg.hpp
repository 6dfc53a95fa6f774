#pragma once

#include <string_view>
#include <vector>

#include "tscaledgd/tensor3.hpp"
#include "tscaledgd/transform.hpp"

namespace tsgd {

/// Thin t-SVD A = U * G * V^H. Columns of U and V are the singular tubes;
/// every transform-domain slice of G is diagonal, nonnegative and
/// nonincreasing.
struct TSvdFactors {
  Tensor3 u;  // n1 x r x n3
  Tensor3 g;  // r x r x n3
  Tensor3 v;  // n2 x r x n3
  Transform transform;

  Index rank() const noexcept { return g.n1(); }
};

/// Per-slice ranks of the transformed tensor.
struct MultiRank {
  std::vector<Index> ranks;
  Index sum = 0;    // s_r
  Index tubal = 0;  // max_k r_k
};

enum class NormKind {
  kFrobenius,
  kSpectral,
  kNuclear,
  kInf,
  kL1,
  kTwoInf,     // max_i ||A(i,:,:)||_F
  kInfTwo,     // max over horizontal and lateral slice Frobenius norms
  kTwoTwoInf,  // max_{i,k} ||A(i,:,k)||_2
};

/// Accepts fro, spectral, nuclear, inf, l1, two_inf, inf_two, two_two_inf.
NormKind parse_norm_kind(std::string_view name);

/// A * B: slice k of the transformed result is Abar_k * Bbar_k.
Tensor3 t_product(const Tensor3& a, const Tensor3& b, const Transform& tf);
/// A * B^H without materialising B^H.
Tensor3 t_product_adjoint(const Tensor3& a, const Tensor3& b, const Transform& tf);
/// A^H: slice k of the transformed result is (Abar_k)^H.
Tensor3 conj_transpose(const Tensor3& a, const Transform& tf);
/// Tensor whose every transformed frontal slice is I_n.
Tensor3 identity_tensor(Index n, const Transform& tf);

/// Thin t-SVD with r = min(n1, n2). Each left singular vector of every
/// transformed slice is rotated so its largest-magnitude entry is real and
/// positive; conjugate-partner slices reuse the conjugated factors so the
/// spatial factors are exactly real.
TSvdFactors t_svd(const Tensor3& a, const Transform& tf);
/// Keeps the first r singular tubes (best tubal-rank-r approximation).
TSvdFactors truncate(const TSvdFactors& f, Index r);
/// U * G * V^H.
Tensor3 reconstruct(const TSvdFactors& f);

/// Facewise inverse; throws Errc::kSingularSlice naming the first slice whose
/// smallest singular value is <= 1e-12 times its largest.
Tensor3 t_inverse(const Tensor3& a, const Transform& tf);
/// Facewise principal square root of Hermitian positive semidefinite slices;
/// throws Errc::kNotPsdSlice otherwise.
Tensor3 t_sqrt(const Tensor3& a, const Transform& tf);

double norm(const Tensor3& a, NormKind kind, const Transform& tf);
/// Norms that do not involve the transform (everything except spectral and nuclear).
double norm(const Tensor3& a, NormKind kind);

/// r_k counts singular values of slice k above max(tol, 1e-12) times the
/// largest singular value over all slices.
MultiRank multi_rank(const Tensor3& a, const Transform& tf, double tol = 1e-12);

/// Singular values of every transformed slice, nonincreasing per slice.
std::vector<Eigen::VectorXd> slice_singular_values(const Tensor3& a, const Transform& tf);

}  // namespace tsgd
