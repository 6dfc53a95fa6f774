#include "tscaledgd/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "tscaledgd/facewise.hpp"
#include "tscaledgd/talg.hpp"

namespace tsgd {

double ThresholdSchedule::at(Index t) const {
  if (t <= 0) return zeta0;
  return zeta1 * std::pow(rho, static_cast<double>(t - 1));
}

void ThresholdSchedule::validate() const {
  if (!(zeta0 >= 0.0) || !std::isfinite(zeta0)) throw Error(Errc::kInvalidArgument, "schedule.zeta0 must be >= 0");
  if (!(zeta1 >= 0.0) || !std::isfinite(zeta1)) throw Error(Errc::kInvalidArgument, "schedule.zeta1 must be >= 0");
  if (!(rho > 0.0 && rho < 1.0)) throw Error(Errc::kInvalidArgument, "schedule.rho must lie in (0, 1)");
}

const char* to_string(Method m) noexcept {
  switch (m) {
    case Method::kScaledGd: return "scaledgd";
    case Method::kVanillaGd: return "vanillagd";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "scaledgd") return Method::kScaledGd;
  if (name == "vanillagd" || name == "gd") return Method::kVanillaGd;
  throw Error(Errc::kUnknownKind, "method '" + std::string(name) + "' (expected scaledgd or vanillagd)");
}

double SolverParams::effective_eta() const {
  return method == Method::kVanillaGd ? eta / sigma1_hint.value_or(1.0) : eta;
}

void SolverParams::validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw Error(Errc::kInvalidArgument, "eta must be positive");
  if (max_iters < 0) throw Error(Errc::kInvalidArgument, "max_iters must be >= 0");
  if (rank < 1) throw Error(Errc::kInvalidArgument, "rank must be >= 1");
  if (!(rel_tol >= 0.0)) throw Error(Errc::kInvalidArgument, "rel_tol must be >= 0");
  if (method == Method::kVanillaGd && !(sigma1_hint.value_or(0.0) > 0.0)) {
    throw Error(Errc::kInvalidArgument, "vanilla GD needs sigma1_hint > 0");
  }
  if (projection_radius && !(*projection_radius > 0.0)) {
    throw Error(Errc::kInvalidArgument, "projection_radius must be positive");
  }
}

Index ObservationSet::observed() const {
  Index n = 0;
  for (auto v : mask.data()) n += v != 0;
  return n;
}

const char* to_string(RunStatus s) noexcept {
  switch (s) {
    case RunStatus::kConverged: return "converged";
    case RunStatus::kMaxIters: return "max_iters";
    case RunStatus::kDiverged: return "diverged";
    case RunStatus::kFailed: return "failed";
  }
  return "unknown";
}

double RunHistory::final_rel_err() const {
  return records.empty() ? std::nan("") : records.back().rel_err;
}

std::optional<Index> RunHistory::iterations_to(double threshold) const {
  for (const auto& rec : records) {
    if (rec.rel_err <= threshold) return rec.iter;
  }
  return std::nullopt;
}

Tensor3 soft_threshold(const Tensor3& m, double zeta) {
  if (!(zeta >= 0.0)) throw Error(Errc::kNegativeThreshold, "threshold must be >= 0", std::nullopt, zeta);
  Tensor3 out(m.n1(), m.n2(), m.n3());
  out.flat() = m.flat().unaryExpr([zeta](double v) {
    const double mag = std::abs(v) - zeta;
    return mag > 0.0 ? std::copysign(mag, v) : 0.0;
  });
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

void precondition(Eigen::Ref<Eigen::MatrixXcd> x, const Eigen::Ref<const Eigen::MatrixXcd>& factor, Index k) {
  const Eigen::MatrixXcd gram = factor.adjoint() * factor;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram);
  const Eigen::VectorXd lambda = eig.eigenvalues();
  const double top = lambda.size() ? lambda.maxCoeff() : 0.0;
  if (eig.info() != Eigen::Success || !(top > 0.0) || !(lambda.minCoeff() > 1e-12 * top)) {
    throw Error(Errc::kPreconditionerSingular, "factor Gram slice is singular", k,
                top > 0.0 ? lambda.minCoeff() / top : 0.0);
  }
  const Eigen::MatrixXcd& v = eig.eigenvectors();
  x = ((x * v) * lambda.cwiseInverse().cast<Complex>().asDiagonal()) * v.adjoint();
}

// (L, R) -> (L - eta D R P_R, R - eta D^H L P_L), with P the inverse Gram
// slices for ScaledGD and the identity for vanilla GD.
FactorPair apply_update(const FactorPair& f, const SpectralTensor& lbar, const SpectralTensor& rbar,
                        const SpectralTensor& dbar, double eta, const Transform& tf, Method method) {
  SpectralTensor dl = facewise(dbar, rbar);
  SpectralTensor dr = facewise(dbar, Op::kAdjoint, lbar, Op::kNone);
  if (method == Method::kScaledGd) {
    for (Index k = 0; k < dbar.n3(); ++k) {
      precondition(dl.slice(k), rbar.slice(k), k);
      precondition(dr.slice(k), lbar.slice(k), k);
    }
  }
  FactorPair out = f;
  out.left.flat() -= eta * to_spatial(dl, tf).flat();
  out.right.flat() -= eta * to_spatial(dr, tf).flat();
  return out;
}

struct Spectral {
  SpectralTensor l;
  SpectralTensor r;
  Tensor3 x;  // L R^H
};

Spectral expand(const FactorPair& f, const Transform& tf) {
  if (f.left.n2() != f.right.n2() || f.left.n3() != f.right.n3()) {
    throw Error(Errc::kDimensionMismatch, "factor pair rank or n3 differ");
  }
  Spectral s{tf.forward(f.left), tf.forward(f.right), {}};
  s.x = to_spatial(facewise(s.l, Op::kNone, s.r, Op::kAdjoint), tf);
  return s;
}

FactorPair rpca_update(const FactorPair& f, const Spectral& s, const Tensor3& y, double zeta, double eta,
                       const Transform& tf, Method method, Tensor3& sparse) {
  if (!s.x.same_shape(y)) throw Error(Errc::kDimensionMismatch, "observation shape differs from L R^H");
  sparse = soft_threshold(y - s.x, zeta);
  Tensor3 d = s.x;
  d += sparse;
  d -= y;
  return apply_update(f, s.l, s.r, tf.forward(d), eta, tf, method);
}

FactorPair completion_update(const FactorPair& f, const Spectral& s, const Tensor3& yobs,
                             const ObservationSet& obs, double eta, std::optional<double> varsigma,
                             const Transform& tf, Method method) {
  Tensor3 d = project_observed(s.x - yobs, obs);
  d *= 1.0 / obs.p;
  FactorPair out = apply_update(f, s.l, s.r, tf.forward(d), eta, tf, method);
  return varsigma ? scaled_projection(out, *varsigma, tf) : out;
}

FactorPair factorization_update(const FactorPair& f, const Spectral& s, const Tensor3& xstar, double eta,
                                const Transform& tf, Method method) {
  return apply_update(f, s.l, s.r, tf.forward(s.x - xstar), eta, tf, method);
}

double misfit(const Tensor3& x, const Tensor3& ref) {
  const double denom = ref.flat().norm();
  const double num = (x.flat() - ref.flat()).norm();
  return denom > 0.0 ? num / denom : num;
}

bool dist_affordable(const FactorPair& f) {
  return f.rank() <= 6 && std::max({f.left.n1(), f.right.n1(), f.left.n3()}) <= 32;
}

// Shared iteration driver. `measure` maps X_t to the recorded error and
// `step` produces F_{t+1} from F_t and its expansion.
template <typename Measure, typename Step>
void drive(FactorPair& f, RunHistory& hist, const SolverParams& params, const Transform& tf,
           const GroundTruth* gt, Clock::time_point start, Measure measure, Step step) {
  const bool with_dist = gt != nullptr && dist_affordable(f);
  for (Index t = 0;; ++t) {
    Spectral s = expand(f, tf);
    IterationRecord rec;
    rec.iter = t;
    rec.rel_err = measure(s.x);
    if (with_dist) {
      try {
        rec.dist = try_align(f, *gt).dist;
      } catch (const Error&) {
        rec.dist.reset();
      }
    }
    rec.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
    hist.records.push_back(rec);
    if (!std::isfinite(rec.rel_err) || rec.rel_err > 1e2) {
      hist.status = RunStatus::kDiverged;
      return;
    }
    if (params.rel_tol > 0.0 && rec.rel_err <= params.rel_tol) {
      hist.status = RunStatus::kConverged;
      return;
    }
    if (t >= params.max_iters) {
      hist.status = RunStatus::kMaxIters;
      return;
    }
    try {
      f = step(f, s, t);
    } catch (const Error& e) {
      hist.status = RunStatus::kFailed;
      hist.message = std::string("iteration ") + std::to_string(t) + ": " + e.what();
      return;
    }
  }
}

FactorPair zero_factors(Index n1, Index n2, Index r, Index n3) {
  return {Tensor3(n1, r, n3), Tensor3(n2, r, n3)};
}

}  // namespace

FactorPair balanced_factors(const Tensor3& y, Index r, const Transform& tf) {
  const TSvdFactors f = truncate(t_svd(y, tf), r);
  const Tensor3 root = t_sqrt(f.g, tf);
  return {t_product(f.u, root, tf), t_product(f.v, root, tf)};
}

RpcaInit spectral_init_rpca(const Tensor3& y, Index r, double zeta0, const Transform& tf) {
  Tensor3 s0 = soft_threshold(y, zeta0);
  FactorPair f = balanced_factors(y - s0, r, tf);
  return {std::move(f), std::move(s0)};
}

RpcaInit rpca_step(const FactorPair& f, const Tensor3& y, double zeta_next, double eta,
                   const Transform& tf, Method method) {
  Tensor3 sparse;
  FactorPair next = rpca_update(f, expand(f, tf), y, zeta_next, eta, tf, method, sparse);
  return {std::move(next), std::move(sparse)};
}

RunResult run_rpca(const Tensor3& y, const SolverParams& params, const ThresholdSchedule& sched,
                   const Transform& tf, const GroundTruth* gt, const RpcaInit* init) {
  params.validate();
  sched.validate();
  const auto start = Clock::now();
  RunResult out;
  try {
    RpcaInit i0 = init ? *init : spectral_init_rpca(y, params.rank, sched.zeta0, tf);
    out.factors = std::move(i0.factors);
    out.sparse = std::move(i0.sparse);
  } catch (const Error& e) {
    out.factors = zero_factors(y.n1(), y.n2(), params.rank, y.n3());
    out.sparse = Tensor3(y.n1(), y.n2(), y.n3());
    out.history.status = RunStatus::kFailed;
    out.history.message = std::string("initialization: ") + e.what();
    return out;
  }
  const double eta = params.effective_eta();
  auto measure = [&](const Tensor3& x) {
    return gt ? relative_error(x, gt->xstar) : misfit(x + out.sparse, y);
  };
  auto step = [&](const FactorPair& f, const Spectral& s, Index t) {
    return rpca_update(f, s, y, sched.at(t + 1), eta, tf, params.method, out.sparse);
  };
  drive(out.factors, out.history, params, tf, gt, start, measure, step);
  return out;
}

Tensor3 project_observed(const Tensor3& x, const ObservationSet& obs) {
  if (!(x.n1() == obs.mask.n1() && x.n2() == obs.mask.n2() && x.n3() == obs.mask.n3())) {
    throw Error(Errc::kDimensionMismatch, "mask shape differs from tensor");
  }
  Tensor3 out(x.n1(), x.n2(), x.n3());
  const auto src = x.data();
  const auto m = obs.mask.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = m[i] ? src[i] : 0.0;
  return out;
}

FactorPair scaled_projection(const FactorPair& f, double varsigma, const Transform& tf) {
  if (!(varsigma > 0.0)) throw Error(Errc::kInvalidArgument, "projection radius must be positive");
  const SpectralTensor lbar = tf.forward(f.left);
  const SpectralTensor rbar = tf.forward(f.right);
  Eigen::VectorXd lrows = Eigen::VectorXd::Zero(f.left.n1());
  Eigen::VectorXd rrows = Eigen::VectorXd::Zero(f.right.n1());
  for (Index k = 0; k < lbar.n3(); ++k) {
    const auto lk = lbar.slice(k);
    const auto rk = rbar.slice(k);
    const Eigen::MatrixXcd lg = lk * (rk.adjoint() * rk);
    const Eigen::MatrixXcd rg = rk * (lk.adjoint() * lk);
    lrows += lg.cwiseProduct(lk.conjugate()).rowwise().sum().real();
    rrows += rg.cwiseProduct(rk.conjugate()).rowwise().sum().real();
  }
  const double ell = tf.ell();
  auto scales = [&](const Eigen::VectorXd& sq, Index n) {
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    Eigen::VectorXd s(sq.size());
    for (Index i = 0; i < sq.size(); ++i) {
      const double row = std::sqrt(std::max(sq(i), 0.0) / ell);
      s(i) = row > 0.0 ? std::min(1.0, varsigma / (sqrt_n * row)) : 1.0;
    }
    return s;
  };
  const Eigen::VectorXd ls = scales(lrows, f.left.n1());
  const Eigen::VectorXd rs = scales(rrows, f.right.n1());
  FactorPair out = f;
  for (Index k = 0; k < out.left.n3(); ++k) {
    out.left.slice(k) = ls.asDiagonal() * out.left.slice(k);
    out.right.slice(k) = rs.asDiagonal() * out.right.slice(k);
  }
  return out;
}

FactorPair spectral_init_completion(const Tensor3& yobs, const ObservationSet& obs, Index r,
                                    std::optional<double> varsigma, const Transform& tf) {
  if (!(obs.p > 0.0 && obs.p <= 1.0)) throw Error(Errc::kInvalidArgument, "sampling rate must lie in (0, 1]");
  FactorPair f = balanced_factors((1.0 / obs.p) * project_observed(yobs, obs), r, tf);
  return varsigma ? scaled_projection(f, *varsigma, tf) : f;
}

FactorPair completion_step(const FactorPair& f, const Tensor3& yobs, const ObservationSet& obs,
                           double eta, std::optional<double> varsigma, const Transform& tf,
                           Method method) {
  return completion_update(f, expand(f, tf), yobs, obs, eta, varsigma, tf, method);
}

RunResult run_completion(const Tensor3& yobs, const ObservationSet& obs, const SolverParams& params,
                         const Transform& tf, const GroundTruth* gt, const FactorPair* init) {
  params.validate();
  const auto start = Clock::now();
  RunResult out;
  try {
    out.factors = init ? *init
                       : spectral_init_completion(yobs, obs, params.rank, params.projection_radius, tf);
  } catch (const Error& e) {
    out.factors = zero_factors(yobs.n1(), yobs.n2(), params.rank, yobs.n3());
    out.history.status = RunStatus::kFailed;
    out.history.message = std::string("initialization: ") + e.what();
    return out;
  }
  const Tensor3 observed = project_observed(yobs, obs);
  const double eta = params.effective_eta();
  auto measure = [&](const Tensor3& x) {
    return gt ? relative_error(x, gt->xstar) : misfit(project_observed(x, obs), observed);
  };
  auto step = [&](const FactorPair& f, const Spectral& s, Index) {
    return completion_update(f, s, observed, obs, eta, params.projection_radius, tf, params.method);
  };
  drive(out.factors, out.history, params, tf, gt, start, measure, step);
  return out;
}

FactorPair factorization_step(const FactorPair& f, const Tensor3& xstar, double eta,
                              const Transform& tf, Method method) {
  const Spectral s = expand(f, tf);
  if (!s.x.same_shape(xstar)) throw Error(Errc::kDimensionMismatch, "target shape differs from L R^H");
  return factorization_update(f, s, xstar, eta, tf, method);
}

RunResult run_factorization(const Tensor3& xstar, const SolverParams& params, const FactorPair& f0,
                            const Transform& tf, const GroundTruth* gt) {
  params.validate();
  const auto start = Clock::now();
  RunResult out;
  out.factors = f0;
  const double eta = params.effective_eta();
  auto measure = [&](const Tensor3& x) { return relative_error(x, xstar); };
  auto step = [&](const FactorPair& f, const Spectral& s, Index) {
    return factorization_update(f, s, xstar, eta, tf, params.method);
  };
  drive(out.factors, out.history, params, tf, gt, start, measure, step);
  return out;
}

}  // namespace tsgd
