#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "tscaledgd/facewise.hpp"
#include "tscaledgd/metrics.hpp"

namespace tsgd {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr Index kMaxIterations = 1000;

// One transformed slice, restricted to the columns where G* is nonzero.
struct SliceProblem {
  MatrixXcd l, r, ls, rs;
  VectorXd g;
  bool real = false;
};

struct SliceSolution {
  MatrixXcd q;
  double objective = 0.0;
  double criterion = 0.0;
  Index iterations = 0;
};

bool inverse_adjoint(const MatrixXcd& q, MatrixXcd& out) {
  if (!q.allFinite()) return false;
  Eigen::PartialPivLU<MatrixXcd> lu(q);
  if (!(lu.rcond() > 1e-14)) return false;
  out = lu.inverse().adjoint();
  return true;
}

double objective(const SliceProblem& s, const MatrixXcd& q, const MatrixXcd& qih) {
  const VectorXd d = s.g.cwiseSqrt();
  return ((s.l * q - s.ls) * d.asDiagonal()).squaredNorm() +
         ((s.r * qih - s.rs) * d.asDiagonal()).squaredNorm();
}

double criterion(const SliceProblem& s, const MatrixXcd& q, const MatrixXcd& qih) {
  const MatrixXcd lq = s.l * q;
  const MatrixXcd p = s.r * qih;
  const MatrixXcd c = lq.adjoint() * (lq - s.ls) * s.g.asDiagonal() -
                      s.g.asDiagonal() * (p - s.rs).adjoint() * p;
  return c.norm();
}

void pack(const MatrixXcd& m, Eigen::Ref<VectorXd> dst) {
  const Index n = m.size();
  for (Index i = 0; i < n; ++i) {
    dst(i) = m.data()[i].real();
    dst(n + i) = m.data()[i].imag();
  }
}

VectorXd residual(const SliceProblem& s, const MatrixXcd& q, const MatrixXcd& qih) {
  const VectorXd d = s.g.cwiseSqrt();
  const Index m1 = 2 * s.l.size();
  VectorXd out(m1 + 2 * s.r.size());
  pack((s.l * q - s.ls) * d.asDiagonal(), out.head(m1));
  pack((s.r * qih - s.rs) * d.asDiagonal(), out.tail(2 * s.r.size()));
  return out;
}

// Columns are derivatives with respect to Re Q(a, b), then Im Q(a, b).
MatrixXd jacobian(const SliceProblem& s, const MatrixXcd& qih) {
  const Index r = s.l.cols();
  const Index n1 = s.l.rows();
  const Index n2 = s.r.rows();
  const Index m1 = 2 * n1 * r;
  const Index params = s.real ? r * r : 2 * r * r;
  const VectorXd d = s.g.cwiseSqrt();
  const MatrixXcd p = s.r * qih;
  const MatrixXcd w = qih * d.asDiagonal();
  MatrixXd jac(m1 + 2 * n2 * r, params);
  MatrixXcd b1(n1, r);
  MatrixXcd b2(n2, r);
  for (Index part = 0; part < (s.real ? 1 : 2); ++part) {
    const Complex unit = part == 0 ? Complex(1.0, 0.0) : Complex(0.0, 1.0);
    for (Index b = 0; b < r; ++b) {
      for (Index a = 0; a < r; ++a) {
        b1.setZero();
        b1.col(b) = unit * d(b) * s.l.col(a);
        b2.noalias() = (-unit * p.col(b)) * w.row(a);
        if (part == 1) b2 = -b2;
        const Index col = part * r * r + a + r * b;
        pack(b1, jac.col(col).head(m1));
        pack(b2, jac.col(col).tail(2 * n2 * r));
      }
    }
  }
  return jac;
}

MatrixXcd unpack_step(const VectorXd& delta, Index r, bool real) {
  MatrixXcd step(r, r);
  for (Index b = 0; b < r; ++b) {
    for (Index a = 0; a < r; ++a) {
      const Index i = a + r * b;
      step(a, b) = Complex(delta(i), real ? 0.0 : delta(r * r + i));
    }
  }
  return step;
}

// Levenberg-Marquardt on the real parameters of Q, started at the
// least-squares fit of the left factor.
SliceSolution solve_slice(const SliceProblem& s, double sigma1_sq) {
  const Index r = s.l.cols();
  SliceSolution out;
  out.q = MatrixXcd::Identity(r, r);
  if (r == 0) return out;

  MatrixXcd q = (s.l.adjoint() * s.l).ldlt().solve(s.l.adjoint() * s.ls);
  if (s.real) q = q.real().cast<Complex>();
  MatrixXcd qih;
  if (!inverse_adjoint(q, qih)) {
    q = MatrixXcd::Identity(r, r);
    inverse_adjoint(q, qih);
  }
  double f = objective(s, q, qih);
  double lambda = 1e-3;
  const double tight = 1e-10 * sigma1_sq;
  bool stalled = false;
  Index it = 0;
  for (; it < kMaxIterations; ++it) {
    const double crit = criterion(s, q, qih);
    if (crit <= tight && (stalled || f == 0.0)) break;
    const MatrixXd jac = jacobian(s, qih);
    const VectorXd grad = jac.transpose() * residual(s, q, qih);
    MatrixXd hess = jac.transpose() * jac;
    const double scale = std::max(hess.diagonal().maxCoeff(), 1e-300);
    const MatrixXd base = hess;

    bool accepted = false;
    MatrixXcd q_next;
    MatrixXcd qih_next;
    double f_next = f;
    VectorXd delta;
    while (lambda <= 1e16) {
      hess = base;
      hess.diagonal().array() += lambda * scale;
      delta = hess.ldlt().solve(-grad);
      q_next = q + unpack_step(delta, r, s.real);
      if (inverse_adjoint(q_next, qih_next)) {
        f_next = objective(s, q_next, qih_next);
        if (f_next < f) {
          accepted = true;
          break;
        }
      }
      lambda *= 4.0;
    }
    if (!accepted) break;
    const double decrease = (f - f_next) / std::max(f, 1e-300);
    stalled = decrease < 1e-12 || delta.norm() <= 1e-14 * (1.0 + q.norm());
    q = std::move(q_next);
    qih = std::move(qih_next);
    f = f_next;
    lambda = std::max(lambda / 3.0, 1e-15);
  }
  out.q = q;
  out.objective = f;
  out.criterion = criterion(s, q, qih);
  out.iterations = it;
  return out;
}

void require_conforming(const FactorPair& f, const GroundTruth& gt) {
  if (!f.left.same_shape(gt.lstar) || !f.right.same_shape(gt.rstar)) {
    throw Error(Errc::kDimensionMismatch, "factor pair does not match the ground-truth factors");
  }
}

bool full_column_rank(const MatrixXcd& m) {
  if (m.cols() == 0) return true;
  if (m.rows() < m.cols()) return false;
  const VectorXd s = Eigen::JacobiSVD<MatrixXcd>(m).singularValues();
  return s(0) > 0.0 && s(s.size() - 1) > 1e-12 * s(0);
}

}  // namespace

AlignmentResult try_align(const FactorPair& f, const GroundTruth& gt) {
  require_conforming(f, gt);
  const Transform& tf = gt.transform;
  const Index r = f.rank();
  const Index n3 = f.left.n3();
  const SpectralTensor lbar = tf.forward(f.left);
  const SpectralTensor rbar = tf.forward(f.right);
  const SpectralTensor lsbar = tf.forward(gt.lstar);
  const SpectralTensor rsbar = tf.forward(gt.rstar);
  const SpectralTensor gbar = tf.forward(gt.gstar);

  double sigma1 = 0.0;
  for (Index k = 0; k < n3; ++k) sigma1 = std::max(sigma1, gbar.slice(k).diagonal().cwiseAbs().maxCoeff());
  if (!(sigma1 > 0.0)) throw Error(Errc::kEmptySpectrum, "ground truth has no positive singular value");
  const double floor = 1e-12 * sigma1;

  SpectralTensor qbar(r, r, n3);
  std::vector<double> objectives(static_cast<std::size_t>(n3), 0.0);
  AlignmentResult result;
  for (Index k = 0; k < n3; ++k) {
    const Index partner = tf.conjugate_partner(k);
    if (partner >= 0 && partner < k) {
      qbar.slice(k) = qbar.slice(partner).conjugate();
      objectives[static_cast<std::size_t>(k)] = objectives[static_cast<std::size_t>(partner)];
      continue;
    }
    std::vector<Index> active;
    for (Index i = 0; i < r; ++i) {
      if (std::abs(gbar(i, i, k)) > floor) active.push_back(i);
    }
    const auto na = static_cast<Index>(active.size());
    SliceProblem s;
    s.real = partner == k;
    s.l.resize(f.left.n1(), na);
    s.r.resize(f.right.n1(), na);
    s.ls.resize(f.left.n1(), na);
    s.rs.resize(f.right.n1(), na);
    s.g.resize(na);
    for (Index c = 0; c < na; ++c) {
      const Index i = active[static_cast<std::size_t>(c)];
      s.l.col(c) = lbar.slice(k).col(i);
      s.r.col(c) = rbar.slice(k).col(i);
      s.ls.col(c) = lsbar.slice(k).col(i);
      s.rs.col(c) = rsbar.slice(k).col(i);
      s.g(c) = std::abs(gbar(i, i, k));
    }
    if (s.real) {
      s.l = s.l.real().cast<Complex>();
      s.r = s.r.real().cast<Complex>();
      s.ls = s.ls.real().cast<Complex>();
      s.rs = s.rs.real().cast<Complex>();
    }
    if (!full_column_rank(s.l) || !full_column_rank(s.r)) {
      throw Error(Errc::kRankDeficientFactor, "transformed factor slice lacks full column rank", k);
    }
    const SliceSolution sol = solve_slice(s, sigma1 * sigma1);
    auto qk = qbar.slice(k);
    qk.setIdentity();
    for (Index c = 0; c < na; ++c) {
      for (Index e = 0; e < na; ++e) {
        qk(active[static_cast<std::size_t>(e)], active[static_cast<std::size_t>(c)]) = sol.q(e, c);
      }
    }
    objectives[static_cast<std::size_t>(k)] = sol.objective;
    result.criterion_residual = std::max(result.criterion_residual, sol.criterion);
    result.iterations = std::max(result.iterations, sol.iterations);
  }
  double total = 0.0;
  for (double v : objectives) total += v;
  result.q = to_spatial(qbar, tf);
  result.dist = std::sqrt(total / tf.ell());
  result.converged = result.criterion_residual <= 1e-8 * sigma1 * sigma1;
  return result;
}

AlignmentResult align(const FactorPair& f, const GroundTruth& gt) {
  AlignmentResult result = try_align(f, gt);
  if (!result.converged) {
    throw Error(Errc::kNoConvergence, "alignment criterion residual too large", std::nullopt,
                result.criterion_residual);
  }
  return result;
}

double dist(const FactorPair& f, const GroundTruth& gt) { return align(f, gt).dist; }

double alignment_objective(const FactorPair& f, const GroundTruth& gt, const Tensor3& q) {
  require_conforming(f, gt);
  const Transform& tf = gt.transform;
  const SpectralTensor lbar = tf.forward(f.left);
  const SpectralTensor rbar = tf.forward(f.right);
  const SpectralTensor lsbar = tf.forward(gt.lstar);
  const SpectralTensor rsbar = tf.forward(gt.rstar);
  const SpectralTensor gbar = tf.forward(gt.gstar);
  const SpectralTensor qbar = tf.forward(q);
  double total = 0.0;
  for (Index k = 0; k < q.n3(); ++k) {
    MatrixXcd qih;
    if (!inverse_adjoint(qbar.slice(k), qih)) {
      throw Error(Errc::kSingularSlice, "alignment tensor slice is singular", k);
    }
    const VectorXd d = gbar.slice(k).diagonal().cwiseAbs().cwiseSqrt();
    total += ((lbar.slice(k) * qbar.slice(k) - lsbar.slice(k)) * d.asDiagonal()).squaredNorm() +
             ((rbar.slice(k) * qih - rsbar.slice(k)) * d.asDiagonal()).squaredNorm();
  }
  return total / tf.ell();
}

}  // namespace tsgd
