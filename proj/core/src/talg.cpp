#include "tscaledgd/talg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "tscaledgd/facewise.hpp"

namespace tsgd {

namespace {

struct SliceSvd {
  Eigen::MatrixXcd u;
  Eigen::MatrixXcd v;
  Eigen::VectorXd s;
};

constexpr int kThin = Eigen::ComputeThinU | Eigen::ComputeThinV;

// Rotates each left singular vector so its largest-magnitude entry is real
// and positive; the right vector gets the same phase.
void fix_phase(Eigen::MatrixXcd& u, Eigen::MatrixXcd& v) {
  for (Index j = 0; j < u.cols(); ++j) {
    Index imax = 0;
    u.col(j).cwiseAbs().maxCoeff(&imax);
    const Complex pivot = u(imax, j);
    const double mag = std::abs(pivot);
    if (mag == 0.0) continue;
    const Complex phase = std::conj(pivot) / mag;
    u.col(j) *= phase;
    v.col(j) *= phase;
    u(imax, j) = Complex(std::abs(u(imax, j)), 0.0);
  }
}

SliceSvd slice_svd(const Eigen::Ref<const Eigen::MatrixXcd>& m, bool real_slice, Index k) {
  if (!m.allFinite()) throw Error(Errc::kSvdFailure, "non-finite entries", k);
  SliceSvd out;
  if (real_slice) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m.real(), kThin);
    if (svd.info() != Eigen::Success) throw Error(Errc::kSvdFailure, "slice SVD did not converge", k);
    out.u = svd.matrixU().cast<Complex>();
    out.v = svd.matrixV().cast<Complex>();
    out.s = svd.singularValues();
  } else {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(m, kThin);
    if (svd.info() != Eigen::Success) throw Error(Errc::kSvdFailure, "slice SVD did not converge", k);
    out.u = svd.matrixU();
    out.v = svd.matrixV();
    out.s = svd.singularValues();
  }
  fix_phase(out.u, out.v);
  return out;
}

Eigen::VectorXd slice_values(const Eigen::Ref<const Eigen::MatrixXcd>& m, bool real_slice, Index k) {
  if (!m.allFinite()) throw Error(Errc::kSvdFailure, "non-finite entries", k);
  if (real_slice) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m.real());
    if (svd.info() != Eigen::Success) throw Error(Errc::kSvdFailure, "slice SVD did not converge", k);
    return svd.singularValues();
  }
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
  if (svd.info() != Eigen::Success) throw Error(Errc::kSvdFailure, "slice SVD did not converge", k);
  return svd.singularValues();
}

void require_n3(const Tensor3& a, const Transform& tf) {
  if (a.n3() != tf.n3()) {
    throw Error(Errc::kDimensionMismatch, "tensor has n3 = " + std::to_string(a.n3()) +
                                              ", transform expects " + std::to_string(tf.n3()));
  }
}

void require_square(const Tensor3& a) {
  if (a.n1() != a.n2()) throw Error(Errc::kDimensionMismatch, "frontal slices must be square");
}

double max_abs(const Eigen::MatrixXcd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

NormKind parse_norm_kind(std::string_view name) {
  if (name == "fro") return NormKind::kFrobenius;
  if (name == "spectral") return NormKind::kSpectral;
  if (name == "nuclear") return NormKind::kNuclear;
  if (name == "inf") return NormKind::kInf;
  if (name == "l1") return NormKind::kL1;
  if (name == "two_inf") return NormKind::kTwoInf;
  if (name == "inf_two") return NormKind::kInfTwo;
  if (name == "two_two_inf") return NormKind::kTwoTwoInf;
  throw Error(Errc::kUnknownKind, "norm '" + std::string(name) + "'");
}

Tensor3 t_product(const Tensor3& a, const Tensor3& b, const Transform& tf) {
  require_n3(a, tf);
  require_n3(b, tf);
  if (a.n2() != b.n1()) throw Error(Errc::kDimensionMismatch, "t-product inner dimensions differ");
  return to_spatial(facewise(tf.forward(a), tf.forward(b)), tf);
}

Tensor3 t_product_adjoint(const Tensor3& a, const Tensor3& b, const Transform& tf) {
  require_n3(a, tf);
  require_n3(b, tf);
  if (a.n2() != b.n2()) throw Error(Errc::kDimensionMismatch, "t-product inner dimensions differ");
  return to_spatial(facewise(tf.forward(a), Op::kNone, tf.forward(b), Op::kAdjoint), tf);
}

Tensor3 conj_transpose(const Tensor3& a, const Transform& tf) {
  require_n3(a, tf);
  const SpectralTensor abar = tf.forward(a);
  SpectralTensor out(a.n2(), a.n1(), a.n3());
  for (Index k = 0; k < a.n3(); ++k) out.slice(k) = abar.slice(k).adjoint();
  return to_spatial(out, tf);
}

Tensor3 identity_tensor(Index n, const Transform& tf) {
  if (n < 1) throw Error(Errc::kInvalidArgument, "identity size must be >= 1");
  SpectralTensor ibar(n, n, tf.n3());
  for (Index k = 0; k < tf.n3(); ++k) ibar.slice(k).setIdentity();
  return to_spatial(ibar, tf);
}

TSvdFactors t_svd(const Tensor3& a, const Transform& tf) {
  require_n3(a, tf);
  const SpectralTensor abar = tf.forward(a);
  const Index n3 = a.n3();
  const Index r = std::min(a.n1(), a.n2());
  SpectralTensor ubar(a.n1(), r, n3);
  SpectralTensor gbar(r, r, n3);
  SpectralTensor vbar(a.n2(), r, n3);
  for (Index k = 0; k < n3; ++k) {
    const Index p = tf.conjugate_partner(k);
    if (p >= 0 && p < k) {
      ubar.slice(k) = ubar.slice(p).conjugate();
      gbar.slice(k) = gbar.slice(p);
      vbar.slice(k) = vbar.slice(p).conjugate();
      continue;
    }
    const SliceSvd s = slice_svd(abar.slice(k), p == k, k);
    ubar.slice(k) = s.u;
    gbar.slice(k).diagonal() = s.s.cast<Complex>();
    vbar.slice(k) = s.v;
  }
  return {to_spatial(ubar, tf), to_spatial(gbar, tf), to_spatial(vbar, tf), tf};
}

TSvdFactors truncate(const TSvdFactors& f, Index r) {
  if (r < 1 || r > f.rank()) {
    throw Error(Errc::kRankOutOfRange,
                "rank " + std::to_string(r) + " outside [1, " + std::to_string(f.rank()) + "]");
  }
  Tensor3 g(r, r, f.g.n3());
  for (Index k = 0; k < g.n3(); ++k) g.slice(k) = f.g.slice(k).topLeftCorner(r, r);
  return {cols_of(f.u, 0, r), std::move(g), cols_of(f.v, 0, r), f.transform};
}

Tensor3 reconstruct(const TSvdFactors& f) {
  const Transform& tf = f.transform;
  const SpectralTensor ug = facewise(tf.forward(f.u), tf.forward(f.g));
  return to_spatial(facewise(ug, Op::kNone, tf.forward(f.v), Op::kAdjoint), tf);
}

Tensor3 t_inverse(const Tensor3& a, const Transform& tf) {
  require_n3(a, tf);
  require_square(a);
  const SpectralTensor abar = tf.forward(a);
  SpectralTensor out(a.n1(), a.n2(), a.n3());
  for (Index k = 0; k < a.n3(); ++k) {
    const auto m = abar.slice(k);
    const Eigen::VectorXd s = slice_values(m, false, k);
    const double smax = s.size() ? s(0) : 0.0;
    const double smin = s.size() ? s(s.size() - 1) : 0.0;
    if (!(smax > 0.0) || !(smin > 1e-12 * smax)) {
      throw Error(Errc::kSingularSlice, "transformed slice is not invertible", k,
                  smax > 0.0 ? smin / smax : 0.0);
    }
    out.slice(k) = Eigen::MatrixXcd(m).partialPivLu().inverse();
  }
  return to_spatial(out, tf);
}

Tensor3 t_sqrt(const Tensor3& a, const Transform& tf) {
  require_n3(a, tf);
  require_square(a);
  const SpectralTensor abar = tf.forward(a);
  SpectralTensor out(a.n1(), a.n2(), a.n3());
  for (Index k = 0; k < a.n3(); ++k) {
    const Eigen::MatrixXcd m = abar.slice(k);
    const double scale = std::max(max_abs(m), 1e-300);
    const double tol = 1e-10 * scale;
    if (max_abs(m - m.adjoint()) > tol) throw Error(Errc::kNotPsdSlice, "slice is not Hermitian", k);
    Eigen::MatrixXcd off = m;
    off.diagonal().setZero();
    if (max_abs(off) <= tol) {
      auto dst = out.slice(k);
      for (Index i = 0; i < m.rows(); ++i) {
        const double d = m(i, i).real();
        if (d < -tol) throw Error(Errc::kNotPsdSlice, "negative diagonal entry", k, d);
        dst(i, i) = std::sqrt(std::max(d, 0.0));
      }
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (m + m.adjoint()));
    if (eig.info() != Eigen::Success) throw Error(Errc::kNotPsdSlice, "eigensolver failed", k);
    const Eigen::VectorXd lambda = eig.eigenvalues();
    if (lambda.minCoeff() < -tol) {
      throw Error(Errc::kNotPsdSlice, "negative eigenvalue", k, lambda.minCoeff());
    }
    const Eigen::VectorXcd root = lambda.cwiseMax(0.0).cwiseSqrt().cast<Complex>();
    out.slice(k) = eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().adjoint();
  }
  return to_spatial(out, tf);
}

double norm(const Tensor3& a, NormKind kind) {
  if (a.empty()) return 0.0;
  switch (kind) {
    case NormKind::kFrobenius: return a.flat().norm();
    case NormKind::kInf: return a.flat().cwiseAbs().maxCoeff();
    case NormKind::kL1: return a.flat().cwiseAbs().sum();
    case NormKind::kTwoInf:
    case NormKind::kInfTwo: {
      Eigen::VectorXd rows = Eigen::VectorXd::Zero(a.n1());
      Eigen::VectorXd cols = Eigen::VectorXd::Zero(a.n2());
      for (Index k = 0; k < a.n3(); ++k) {
        const auto s = a.slice(k);
        rows += s.rowwise().squaredNorm();
        cols += s.colwise().squaredNorm().transpose();
      }
      const double row_max = std::sqrt(rows.maxCoeff());
      return kind == NormKind::kTwoInf ? row_max : std::max(row_max, std::sqrt(cols.maxCoeff()));
    }
    case NormKind::kTwoTwoInf: {
      double best = 0.0;
      for (Index k = 0; k < a.n3(); ++k) best = std::max(best, a.slice(k).rowwise().norm().maxCoeff());
      return best;
    }
    case NormKind::kSpectral:
    case NormKind::kNuclear:
      throw Error(Errc::kInvalidArgument, "spectral and nuclear norms need a transform");
  }
  throw Error(Errc::kUnknownKind, "norm kind");
}

double norm(const Tensor3& a, NormKind kind, const Transform& tf) {
  if (kind != NormKind::kSpectral && kind != NormKind::kNuclear) return norm(a, kind);
  if (a.empty()) return 0.0;
  const auto values = slice_singular_values(a, tf);
  double out = 0.0;
  for (const auto& s : values) {
    if (s.size() == 0) continue;
    out = kind == NormKind::kSpectral ? std::max(out, s(0)) : out + s.sum();
  }
  return kind == NormKind::kSpectral ? out : out / tf.ell();
}

std::vector<Eigen::VectorXd> slice_singular_values(const Tensor3& a, const Transform& tf) {
  require_n3(a, tf);
  const SpectralTensor abar = tf.forward(a);
  std::vector<Eigen::VectorXd> out(static_cast<std::size_t>(a.n3()));
  for (Index k = 0; k < a.n3(); ++k) {
    const Index p = tf.conjugate_partner(k);
    auto& dst = out[static_cast<std::size_t>(k)];
    dst = p >= 0 && p < k ? out[static_cast<std::size_t>(p)] : slice_values(abar.slice(k), p == k, k);
  }
  return out;
}

MultiRank multi_rank(const Tensor3& a, const Transform& tf, double tol) {
  const auto values = slice_singular_values(a, tf);
  double top = 0.0;
  for (const auto& s : values) {
    if (s.size()) top = std::max(top, s(0));
  }
  const double floor = std::max(tol, 1e-12) * top;
  MultiRank mr;
  mr.ranks.reserve(values.size());
  for (const auto& s : values) {
    const Index rk = top > 0.0 ? (s.array() > floor).count() : 0;
    mr.ranks.push_back(rk);
    mr.sum += rk;
    mr.tubal = std::max(mr.tubal, rk);
  }
  return mr;
}

}  // namespace tsgd
