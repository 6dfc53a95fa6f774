#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tscaledgd/metrics.hpp"
#include "tscaledgd/tensor3.hpp"
#include "tscaledgd/transform.hpp"

namespace tsgd {

/// zeta_0 for the initialization, zeta_t = zeta1 * rho^(t-1) for t >= 1.
struct ThresholdSchedule {
  double zeta0 = 0.5;
  double zeta1 = 0.5;
  double rho = 0.95;

  double at(Index t) const;
  ThresholdSchedule scaled(double c) const { return {c * zeta0, c * zeta1, rho}; }
  /// Throws Errc::kInvalidArgument naming the offending field.
  void validate() const;
};

enum class Method { kScaledGd, kVanillaGd };

const char* to_string(Method m) noexcept;
/// Accepts "scaledgd" and "vanillagd" (also "gd").
Method parse_method(std::string_view name);

struct SolverParams {
  double eta = 0.5;
  Index max_iters = 100;
  Index rank = 1;
  double rel_tol = 0.0;  // 0 disables early stopping
  Method method = Method::kScaledGd;
  std::optional<double> sigma1_hint;        // required by vanilla GD
  std::optional<double> projection_radius;  // completion only

  /// Step size actually used: eta, or eta / sigma1_hint for vanilla GD.
  double effective_eta() const;
  void validate() const;
};

using Mask = BasicTensor3<std::uint8_t>;

/// Observed entries and the nominal Bernoulli rate.
struct ObservationSet {
  Mask mask;
  double p = 1.0;

  Index observed() const;
};

enum class RunStatus { kConverged, kMaxIters, kDiverged, kFailed };

const char* to_string(RunStatus s) noexcept;

struct IterationRecord {
  Index iter = 0;
  double rel_err = 0.0;
  std::optional<double> dist;
  double wall_time_s = 0.0;
};

/// rel_err is measured against X* when ground truth is supplied, otherwise it
/// is the relative misfit to the data the solver sees.
struct RunHistory {
  std::vector<IterationRecord> records;
  RunStatus status = RunStatus::kMaxIters;
  std::string message;

  double final_rel_err() const;
  /// First recorded iteration with rel_err <= threshold.
  std::optional<Index> iterations_to(double threshold) const;
};

struct RunResult {
  FactorPair factors;
  Tensor3 sparse;  // RPCA only
  RunHistory history;
};

/// Entrywise sgn(m) max(0, |m| - zeta).
Tensor3 soft_threshold(const Tensor3& m, double zeta);

struct RpcaInit {
  FactorPair factors;
  Tensor3 sparse;
};

/// Spectral initialization, common to the RPCA and completion paths:
/// truncated t-SVD split into balanced factors.
FactorPair balanced_factors(const Tensor3& y, Index r, const Transform& tf);

RpcaInit spectral_init_rpca(const Tensor3& y, Index r, double zeta0, const Transform& tf);

/// One simultaneous update. With Method::kVanillaGd the preconditioners are
/// dropped and eta is used as given.
RpcaInit rpca_step(const FactorPair& f, const Tensor3& y, double zeta_next, double eta,
                   const Transform& tf, Method method = Method::kScaledGd);

RunResult run_rpca(const Tensor3& y, const SolverParams& params, const ThresholdSchedule& sched,
                   const Transform& tf, const GroundTruth* gt = nullptr,
                   const RpcaInit* init = nullptr);

Tensor3 project_observed(const Tensor3& x, const ObservationSet& obs);

/// Row-wise rescaling that enforces sqrt(n1)||L R^H||_{2,inf} <= varsigma and
/// sqrt(n2)||R L^H||_{2,inf} <= varsigma.
FactorPair scaled_projection(const FactorPair& f, double varsigma, const Transform& tf);

FactorPair spectral_init_completion(const Tensor3& yobs, const ObservationSet& obs, Index r,
                                    std::optional<double> varsigma, const Transform& tf);

FactorPair completion_step(const FactorPair& f, const Tensor3& yobs, const ObservationSet& obs,
                           double eta, std::optional<double> varsigma, const Transform& tf,
                           Method method = Method::kScaledGd);

RunResult run_completion(const Tensor3& yobs, const ObservationSet& obs, const SolverParams& params,
                         const Transform& tf, const GroundTruth* gt = nullptr,
                         const FactorPair* init = nullptr);

FactorPair factorization_step(const FactorPair& f, const Tensor3& xstar, double eta,
                              const Transform& tf, Method method = Method::kScaledGd);

RunResult run_factorization(const Tensor3& xstar, const SolverParams& params, const FactorPair& f0,
                            const Transform& tf, const GroundTruth* gt = nullptr);

}  // namespace tsgd
