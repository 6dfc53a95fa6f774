#include "tscaledgd/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "tscaledgd/facewise.hpp"

namespace tsgd {

namespace {

Tensor3 random_signs(Index n1, Index n2, Index n3, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5);
  Tensor3 a(n1, n2, n3);
  for (double& v : a.data()) v = coin(rng) ? 1.0 : -1.0;
  return a;
}

Tensor3 gaussian(Index n1, Index n2, Index n3, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Tensor3 a(n1, n2, n3);
  for (double& v : a.data()) v = normal(rng);
  return a;
}

std::vector<Index> permutation(Index n, std::mt19937_64& rng) {
  std::vector<Index> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), Index{0});
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

}  // namespace

GroundTruth gen_ground_truth(Index n1, Index n2, Index n3, Index r, double kappa,
                             const Transform& tf, std::uint64_t seed) {
  if (r < 1 || r > std::min(n1, n2)) {
    throw Error(Errc::kRankOutOfRange, "rank must lie in [1, min(n1, n2)]");
  }
  if (!(kappa >= 1.0)) throw Error(Errc::kInvalidArgument, "kappa must be >= 1");
  std::mt19937_64 rng(seed);
  Tensor3 ustar = t_svd(random_signs(n1, r, n3, rng), tf).u;
  Tensor3 vstar = t_svd(random_signs(n2, r, n3, rng), tf).u;
  SpectralTensor gbar(r, r, n3);
  for (Index i = 0; i < r; ++i) {
    const double frac = r == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(r - 1);
    const double value = 1.0 + frac * (1.0 / kappa - 1.0);
    for (Index k = 0; k < n3; ++k) gbar(i, i, k) = value;
  }
  return make_ground_truth(std::move(ustar), to_spatial(gbar, tf), std::move(vstar), tf);
}

Tensor3 gen_sparse_corruption(const Tensor3& xstar, double alpha, std::uint64_t seed) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw Error(Errc::kInvalidArgument, "alpha must lie in [0, 1)");
  Tensor3 s(xstar.n1(), xstar.n2(), xstar.n3());
  const Index total = xstar.size();
  const auto count = static_cast<Index>(std::floor(alpha * static_cast<double>(total)));
  if (count == 0) return s;
  const double m = xstar.flat().cwiseAbs().mean();
  std::mt19937_64 rng(seed);
  std::vector<Index> idx(static_cast<std::size_t>(total));
  std::iota(idx.begin(), idx.end(), Index{0});
  for (Index i = 0; i < count; ++i) {
    std::uniform_int_distribution<Index> pick(i, total - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
  }
  std::uniform_real_distribution<double> value(-m, m);
  auto data = s.data();
  for (Index i = 0; i < count; ++i) data[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = value(rng);
  return s;
}

ObservationSet gen_bernoulli_mask(Index n1, Index n2, Index n3, double p, std::uint64_t seed) {
  if (!(p > 0.0 && p <= 1.0)) throw Error(Errc::kInvalidArgument, "p must lie in (0, 1]");
  ObservationSet obs{Mask(n1, n2, n3), p};
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  for (auto& v : obs.mask.data()) v = coin(rng) ? 1 : 0;
  return obs;
}

Tensor3 add_gaussian_noise(const Tensor3& x, double snr_db, std::uint64_t seed) {
  if (std::isinf(snr_db) && snr_db > 0.0) return x;
  const double energy = x.flat().squaredNorm();
  if (!(energy > 0.0)) throw Error(Errc::kZeroSignal, "cannot calibrate noise against a zero signal");
  const double variance = energy / (static_cast<double>(x.size()) * std::pow(10.0, snr_db / 10.0));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(variance));
  Tensor3 out = x;
  for (double& v : out.data()) v += normal(rng);
  return out;
}

double SparsityProfile::max() const { return std::max({column_fraction, row_fraction, tube_fraction}); }

SparsityProfile sparsity_profile(const Tensor3& s) {
  Index col = 0;
  Index row = 0;
  Index tube = 0;
  Eigen::MatrixXi tubes = Eigen::MatrixXi::Zero(s.n1(), s.n2());
  for (Index k = 0; k < s.n3(); ++k) {
    const auto nz = (s.slice(k).array() != 0.0).cast<int>().matrix().eval();
    if (nz.size() == 0) continue;
    col = std::max<Index>(col, nz.colwise().sum().maxCoeff());
    row = std::max<Index>(row, nz.rowwise().sum().maxCoeff());
    tubes += nz;
  }
  if (tubes.size() > 0) tube = tubes.maxCoeff();
  auto frac = [](Index c, Index n) { return n > 0 ? static_cast<double>(c) / static_cast<double>(n) : 0.0; };
  return {frac(col, s.n1()), frac(row, s.n2()), frac(tube, s.n3())};
}

Tensor3 gen_banded_sparse(Index n, double alpha, double magnitude, std::uint64_t seed) {
  if (n < 1) throw Error(Errc::kInvalidArgument, "n must be >= 1");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw Error(Errc::kInvalidArgument, "alpha must lie in [0, 1)");
  const auto width = static_cast<Index>(std::floor(alpha * static_cast<double>(n)));
  std::mt19937_64 rng(seed);
  const auto pi = permutation(n, rng);
  const auto pj = permutation(n, rng);
  const auto pk = permutation(n, rng);
  std::uniform_real_distribution<double> value(-magnitude, magnitude);
  Tensor3 s(n, n, n);
  for (Index k = 0; k < n; ++k) {
    for (Index j = 0; j < n; ++j) {
      for (Index i = 0; i < n; ++i) {
        if (((i - j - k) % n + 2 * n) % n < width) {
          s(pi[static_cast<std::size_t>(i)], pj[static_cast<std::size_t>(j)], pk[static_cast<std::size_t>(k)]) =
              value(rng);
        }
      }
    }
  }
  return s;
}

FactorPair perturb_factors(const GroundTruth& gt, double radius, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double target = radius * gt.lstar.flat().norm();
  Tensor3 el = gaussian(gt.lstar.n1(), gt.lstar.n2(), gt.lstar.n3(), rng);
  Tensor3 er = gaussian(gt.rstar.n1(), gt.rstar.n2(), gt.rstar.n3(), rng);
  el *= target / el.flat().norm();
  er *= target / er.flat().norm();
  return {gt.lstar + el, gt.rstar + er};
}

}  // namespace tsgd
