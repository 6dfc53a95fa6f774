#include "tscaledgd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tscaledgd/facewise.hpp"

namespace tsgd {

GroundTruth make_ground_truth(Tensor3 ustar, Tensor3 gstar, Tensor3 vstar, const Transform& tf) {
  if (ustar.n2() != gstar.n1() || vstar.n2() != gstar.n2() || gstar.n1() != gstar.n2()) {
    throw Error(Errc::kDimensionMismatch, "ground-truth factors do not conform");
  }
  const Tensor3 root = t_sqrt(gstar, tf);
  Tensor3 lstar = t_product(ustar, root, tf);
  Tensor3 rstar = t_product(vstar, root, tf);
  Tensor3 xstar = t_product_adjoint(lstar, rstar, tf);
  MultiRank mrank = multi_rank(gstar, tf);
  return {std::move(lstar), std::move(rstar), std::move(gstar), std::move(ustar),
          std::move(vstar), std::move(xstar), std::move(mrank), tf};
}

Tensor3 product(const FactorPair& f, const Transform& tf) {
  return t_product_adjoint(f.left, f.right, tf);
}

SingularExtremes singular_extremes(const Tensor3& g, const MultiRank& mrank, const Transform& tf) {
  if (mrank.sum == 0) throw Error(Errc::kEmptySpectrum, "multi-rank is zero");
  if (static_cast<Index>(mrank.ranks.size()) != g.n3()) {
    throw Error(Errc::kDimensionMismatch, "multi-rank length differs from n3");
  }
  const SpectralTensor gbar = tf.forward(g);
  double hi = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < g.n3(); ++k) {
    const Index rk = std::min(mrank.ranks[static_cast<std::size_t>(k)], std::min(g.n1(), g.n2()));
    for (Index i = 0; i < rk; ++i) {
      const double s = std::abs(gbar(i, i, k));
      if (s <= 0.0) continue;
      hi = std::max(hi, s);
      lo = std::min(lo, s);
    }
  }
  if (!(hi > 0.0)) throw Error(Errc::kEmptySpectrum, "no positive transformed singular value");
  return {hi, lo, hi / lo};
}

SingularExtremes singular_extremes(const GroundTruth& gt) {
  return singular_extremes(gt.gstar, gt.mrank, gt.transform);
}

double incoherence(const GroundTruth& gt) {
  if (gt.mrank.sum == 0) throw Error(Errc::kEmptySpectrum, "multi-rank is zero");
  const double n3 = static_cast<double>(gt.ustar.n3());
  const double ell = gt.transform.ell();
  const double u_rows = norm(gt.ustar, NormKind::kTwoInf);
  const double v_rows = norm(gt.vstar, NormKind::kTwoInf);
  const double left = static_cast<double>(gt.ustar.n1()) * n3 * ell * u_rows * u_rows;
  const double right = static_cast<double>(gt.vstar.n1()) * n3 * ell * v_rows * v_rows;
  return std::max(left, right) / static_cast<double>(gt.mrank.sum);
}

double relative_error(const Tensor3& x, const Tensor3& xstar) {
  if (!x.same_shape(xstar)) throw Error(Errc::kDimensionMismatch, "relative_error operands differ in shape");
  const double ref = xstar.flat().norm();
  if (!(ref > 0.0)) throw Error(Errc::kZeroReference, "reference tensor has zero norm");
  return (x.flat() - xstar.flat()).norm() / ref;
}

}  // namespace tsgd
