#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "tscaledgd/error.hpp"

namespace tsgd {

using Index = Eigen::Index;
using Complex = std::complex<double>;

/// Dense three-way array stored frontal-slice-major with column-major slices:
/// entry (i, j, k) lives at i + n1 * (j + n2 * k). Every frontal slice is a
/// contiguous column-major n1 x n2 block, and the whole tensor is an
/// (n1 * n2) x n3 column-major matrix whose columns are the frontal slices.
template <typename Scalar>
class BasicTensor3 {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using SliceMap = Eigen::Map<Matrix>;
  using ConstSliceMap = Eigen::Map<const Matrix>;

  BasicTensor3() = default;
  BasicTensor3(Index n1, Index n2, Index n3)
      : n1_(n1), n2_(n2), n3_(n3), data_(checked_size(n1, n2, n3), Scalar(0)) {}

  static BasicTensor3 zeros(Index n1, Index n2, Index n3) { return {n1, n2, n3}; }

  Index n1() const noexcept { return n1_; }
  Index n2() const noexcept { return n2_; }
  Index n3() const noexcept { return n3_; }
  Index size() const noexcept { return static_cast<Index>(data_.size()); }
  bool empty() const noexcept { return data_.empty(); }

  bool same_shape(const BasicTensor3& other) const noexcept {
    return n1_ == other.n1_ && n2_ == other.n2_ && n3_ == other.n3_;
  }

  Scalar& operator()(Index i, Index j, Index k) { return data_[offset(i, j, k)]; }
  const Scalar& operator()(Index i, Index j, Index k) const {
    return data_[offset(i, j, k)];
  }

  std::span<Scalar> data() noexcept { return data_; }
  std::span<const Scalar> data() const noexcept { return data_; }

  SliceMap slice(Index k) { return SliceMap(data_.data() + k * n1_ * n2_, n1_, n2_); }
  ConstSliceMap slice(Index k) const {
    return ConstSliceMap(data_.data() + k * n1_ * n2_, n1_, n2_);
  }

  /// The (n1 * n2) x n3 view whose columns are the frontal slices.
  SliceMap unfolded() { return SliceMap(data_.data(), n1_ * n2_, n3_); }
  ConstSliceMap unfolded() const { return ConstSliceMap(data_.data(), n1_ * n2_, n3_); }

  Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> flat() {
    return {data_.data(), size()};
  }
  Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> flat() const {
    return {data_.data(), size()};
  }

  BasicTensor3& operator+=(const BasicTensor3& rhs) {
    require_same_shape(rhs);
    flat() += rhs.flat();
    return *this;
  }
  BasicTensor3& operator-=(const BasicTensor3& rhs) {
    require_same_shape(rhs);
    flat() -= rhs.flat();
    return *this;
  }
  BasicTensor3& operator*=(Scalar s) {
    flat() *= s;
    return *this;
  }

  friend BasicTensor3 operator+(BasicTensor3 lhs, const BasicTensor3& rhs) {
    lhs += rhs;
    return lhs;
  }
  friend BasicTensor3 operator-(BasicTensor3 lhs, const BasicTensor3& rhs) {
    lhs -= rhs;
    return lhs;
  }
  friend BasicTensor3 operator*(Scalar s, BasicTensor3 t) {
    t *= s;
    return t;
  }
  friend BasicTensor3 operator*(BasicTensor3 t, Scalar s) {
    t *= s;
    return t;
  }
  friend BasicTensor3 operator-(BasicTensor3 t) {
    t *= Scalar(-1);
    return t;
  }

  bool operator==(const BasicTensor3& rhs) const = default;

 private:
  static std::size_t checked_size(Index n1, Index n2, Index n3) {
    if (n1 < 0 || n2 < 0 || n3 < 0) {
      throw Error(Errc::kInvalidArgument, "negative tensor dimension");
    }
    return static_cast<std::size_t>(n1 * n2 * n3);
  }
  std::size_t offset(Index i, Index j, Index k) const noexcept {
    return static_cast<std::size_t>(i + n1_ * (j + n2_ * k));
  }
  void require_same_shape(const BasicTensor3& rhs) const {
    if (!same_shape(rhs)) throw Error(Errc::kDimensionMismatch, "elementwise operands differ in shape");
  }

  Index n1_ = 0;
  Index n2_ = 0;
  Index n3_ = 0;
  std::vector<Scalar> data_;
};

/// Real spatial-domain tensor.
using Tensor3 = BasicTensor3<double>;
/// Transform-domain tensor (the image of a Tensor3 under a Transform).
using SpectralTensor = BasicTensor3<Complex>;

/// Horizontal-slice extraction A(i0:i0+rows, :, :).
template <typename Scalar>
BasicTensor3<Scalar> rows_of(const BasicTensor3<Scalar>& a, Index first, Index count) {
  BasicTensor3<Scalar> out(count, a.n2(), a.n3());
  for (Index k = 0; k < a.n3(); ++k) out.slice(k) = a.slice(k).middleRows(first, count);
  return out;
}

/// Lateral-slice extraction A(:, j0:j0+cols, :).
template <typename Scalar>
BasicTensor3<Scalar> cols_of(const BasicTensor3<Scalar>& a, Index first, Index count) {
  BasicTensor3<Scalar> out(a.n1(), count, a.n3());
  for (Index k = 0; k < a.n3(); ++k) out.slice(k) = a.slice(k).middleCols(first, count);
  return out;
}

}  // namespace tsgd
