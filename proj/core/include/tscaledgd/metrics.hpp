#pragma once

#include "tscaledgd/talg.hpp"
#include "tscaledgd/tensor3.hpp"
#include "tscaledgd/transform.hpp"

namespace tsgd {

/// Factored variable F = [L; R] with X = L * R^H.
struct FactorPair {
  Tensor3 left;   // n1 x r x n3
  Tensor3 right;  // n2 x r x n3

  Index rank() const noexcept { return left.n2(); }
};

/// X* = U* G* V*^H with balanced factors L* = U* G*^(1/2), R* = V* G*^(1/2).
struct GroundTruth {
  Tensor3 lstar;
  Tensor3 rstar;
  Tensor3 gstar;
  Tensor3 ustar;
  Tensor3 vstar;
  Tensor3 xstar;
  MultiRank mrank;
  Transform transform;
};

/// Assembles the balanced factors, X* and the multi-rank from (U*, G*, V*).
GroundTruth make_ground_truth(Tensor3 ustar, Tensor3 gstar, Tensor3 vstar, const Transform& tf);

/// L * R^H.
Tensor3 product(const FactorPair& f, const Transform& tf);

struct SingularExtremes {
  double sigma_max = 0.0;
  double sigma_min = 0.0;
  double kappa = 0.0;
};

/// Largest and smallest positive transformed diagonal entries of G among the
/// first r_k of each slice. Throws Errc::kEmptySpectrum when s_r = 0.
SingularExtremes singular_extremes(const Tensor3& g, const MultiRank& mrank, const Transform& tf);
SingularExtremes singular_extremes(const GroundTruth& gt);

/// mu = max(n1 n3 ell ||U*||_{2,inf}^2, n2 n3 ell ||V*||_{2,inf}^2) / s_r.
double incoherence(const GroundTruth& gt);

struct AlignmentResult {
  Tensor3 q;                        // r x r x n3
  double dist = 0.0;
  double criterion_residual = 0.0;  // max over transformed slices
  Index iterations = 0;             // max over transformed slices
  bool converged = false;
};

/// Minimises ||(L*Q - L*) G*^(1/2)||_F^2 + ||(R*Q^-H - R*) G*^(1/2)||_F^2 over
/// invertible Q, one transformed slice at a time. Never throws NoConvergence;
/// check `converged`.
AlignmentResult try_align(const FactorPair& f, const GroundTruth& gt);
/// As try_align, but throws Errc::kNoConvergence when the first-order
/// residual stays above 1e-8 sigma_1^2.
AlignmentResult align(const FactorPair& f, const GroundTruth& gt);
double dist(const FactorPair& f, const GroundTruth& gt);

/// Objective of the alignment problem at a given Q, squared.
double alignment_objective(const FactorPair& f, const GroundTruth& gt, const Tensor3& q);

/// ||X - X*||_F / ||X*||_F; throws Errc::kZeroReference when X* = 0.
double relative_error(const Tensor3& x, const Tensor3& xstar);

}  // namespace tsgd
