#pragma once

#include <cstdint>
#include <limits>

#include "tscaledgd/metrics.hpp"
#include "tscaledgd/solvers.hpp"

namespace tsgd {

/// U* and V* are the leading r left singular tensors of i.i.d. random-sign
/// tensors; every transformed slice of G* has diagonal linspace(1, 1/kappa, r).
GroundTruth gen_ground_truth(Index n1, Index n2, Index n3, Index r, double kappa,
                             const Transform& tf, std::uint64_t seed);

/// floor(alpha N) entries chosen without replacement, values uniform on
/// [-m, m] with m the mean absolute entry of X*.
Tensor3 gen_sparse_corruption(const Tensor3& xstar, double alpha, std::uint64_t seed);

ObservationSet gen_bernoulli_mask(Index n1, Index n2, Index n3, double p, std::uint64_t seed);

inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

/// X + W with W i.i.d. N(0, ||X||_F^2 / (N 10^(snr/10))). snr_db = kNoNoise
/// returns X unchanged. Throws Errc::kZeroSignal when X = 0.
Tensor3 add_gaussian_noise(const Tensor3& x, double snr_db, std::uint64_t seed);

/// Largest nonzero counts along mode-1, mode-2 and mode-3 tubes, each divided
/// by the tube length.
struct SparsityProfile {
  double column_fraction = 0.0;  // A(:, j, k)
  double row_fraction = 0.0;     // A(i, :, k)
  double tube_fraction = 0.0;    // A(i, j, :)

  double max() const;
};

SparsityProfile sparsity_profile(const Tensor3& s);

/// Corruption whose every tube has at most floor(alpha n) nonzeros: a cyclic
/// diagonal band of width floor(alpha n1) in each frontal slice, shifted per
/// slice. Needs n1 = n2 = n3. Values uniform on [-magnitude, magnitude].
Tensor3 gen_banded_sparse(Index n, double alpha, double magnitude, std::uint64_t seed);

/// (L* + E_L, R* + E_R) with Gaussian E scaled so ||E_L||_F = ||E_R||_F =
/// radius * ||L*||_F.
FactorPair perturb_factors(const GroundTruth& gt, double radius, std::uint64_t seed);

}  // namespace tsgd
