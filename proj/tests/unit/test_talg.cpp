#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "oracle.hpp"
#include "tscaledgd/synth.hpp"
#include "tscaledgd/talg.hpp"
#include "tscaledgd/tsr3.hpp"

using namespace tsgd;

namespace {

struct Case {
  TransformKind kind;
  oracle::Phi phi;
  Transform tf;
};

Case make_case(TransformKind kind, Index n3) {
  return {kind, kind == TransformKind::kDft ? oracle::dft(n3) : oracle::dct(n3), make_transform(kind, n3)};
}

// Tensor whose transformed slices are diag-dominant, hence well conditioned.
Tensor3 well_conditioned(Index r, Index n3, std::uint64_t seed, const Transform& tf) {
  Tensor3 a = oracle::random_tensor(r, r, n3, seed);
  a *= 0.2;
  return a + identity_tensor(r, tf) * 2.0;
}

}  // namespace

TEST(TProduct, IdentityIsNeutral) {
  for (auto kind : {TransformKind::kDft, TransformKind::kDct}) {
    const Transform tf = make_transform(kind, 4);
    const Tensor3 a = oracle::random_tensor(3, 2, 4, 1);
    EXPECT_LE(oracle::rel_diff(t_product(a, identity_tensor(2, tf), tf), a), 1e-13);
    EXPECT_LE(oracle::rel_diff(t_product(identity_tensor(3, tf), a, tf), a), 1e-13);
  }
}

TEST(TProduct, SingleSliceIsMatrixProduct) {
  const Transform tf = make_transform(TransformKind::kDft, 1);
  const Tensor3 a = oracle::random_tensor(3, 4, 1, 2);
  const Tensor3 b = oracle::random_tensor(4, 2, 1, 3);
  const Eigen::MatrixXd ref = a.slice(0) * b.slice(0);
  EXPECT_LT((t_product(a, b, tf).slice(0) - ref).norm(), 1e-14);
}

TEST(TProduct, MatchesBlockDiagonalOracle) {
  for (auto kind : {TransformKind::kDft, TransformKind::kDct}) {
    const Case c = make_case(kind, 2);
    const Tensor3 a = oracle::random_tensor(2, 3, 2, 4);
    const Tensor3 b = oracle::random_tensor(3, 2, 2, 5);
    EXPECT_LE(oracle::rel_diff(t_product(a, b, c.tf), oracle::product(a, b, c.phi)), 1e-12);
  }
}

TEST(TProduct, AssociativeAndBilinear) {
  for (auto kind : {TransformKind::kDft, TransformKind::kDct}) {
    const Transform tf = make_transform(kind, 5);
    const Tensor3 a = oracle::random_tensor(3, 4, 5, 6);
    const Tensor3 b = oracle::random_tensor(4, 2, 5, 7);
    const Tensor3 b2 = oracle::random_tensor(4, 2, 5, 8);
    const Tensor3 c = oracle::random_tensor(2, 3, 5, 9);
    EXPECT_LE(oracle::rel_diff(t_product(t_product(a, b, tf), c, tf), t_product(a, t_product(b, c, tf), tf)), 1e-10);
    EXPECT_LE(oracle::rel_diff(t_product(a, b * 2.0 + b2, tf), t_product(a, b, tf) * 2.0 + t_product(a, b2, tf)),
              1e-10);
  }
}

TEST(TProduct, DimensionMismatch) {
  const Transform tf = make_transform(TransformKind::kDft, 3);
  EXPECT_THROW(t_product(Tensor3(2, 3, 3), Tensor3(2, 2, 3), tf), Error);
  EXPECT_THROW(t_product(Tensor3(2, 3, 3), Tensor3(3, 2, 4), tf), Error);
}

TEST(TProduct, AdjointVariantMatches) {
  const Transform tf = make_transform(TransformKind::kDft, 4);
  const Tensor3 a = oracle::random_tensor(3, 2, 4, 10);
  const Tensor3 b = oracle::random_tensor(5, 2, 4, 11);
  EXPECT_LE(oracle::rel_diff(t_product_adjoint(a, b, tf), t_product(a, conj_transpose(b, tf), tf)), 1e-13);
}

TEST(ConjTranspose, SingleSliceIsTranspose) {
  const Transform tf = make_transform(TransformKind::kDft, 1);
  const Tensor3 a = oracle::random_tensor(3, 4, 1, 12);
  const Eigen::MatrixXd at = a.slice(0).transpose();
  EXPECT_EQ((conj_transpose(a, tf).slice(0) - at).norm(), 0.0);
}

TEST(ConjTranspose, InvolutionAndReversal) {
  for (auto kind : {TransformKind::kDft, TransformKind::kDct}) {
    const Case c = make_case(kind, 5);
    const Tensor3 a = oracle::random_tensor(4, 3, 5, 13);
    EXPECT_LE(oracle::rel_diff(conj_transpose(conj_transpose(a, c.tf), c.tf), a), 1e-12);
    EXPECT_LE(oracle::rel_diff(conj_transpose(a, c.tf), oracle::adjoint(a, c.phi)), 1e-12);
    const Case c2 = make_case(kind, 2);
    const Tensor3 x = oracle::random_tensor(2, 3, 2, 14);
    const Tensor3 y = oracle::random_tensor(3, 2, 2, 15);
    EXPECT_LE(oracle::rel_diff(conj_transpose(t_product(x, y, c2.tf), c2.tf),
                               t_product(conj_transpose(y, c2.tf), conj_transpose(x, c2.tf), c2.tf)),
              1e-10);
  }
}

TEST(Identity, DftSpatialFormIsFirstSlice) {
  const Transform tf = make_transform(TransformKind::kDft, 4);
  const Tensor3 id = identity_tensor(2, tf);
  EXPECT_LT((id.slice(0) - Eigen::MatrixXd::Identity(2, 2)).norm(), 1e-15);
  for (Index k = 1; k < 4; ++k) EXPECT_LT(id.slice(k).norm(), 1e-15);
  EXPECT_LE(oracle::rel_diff(t_product(id, id, tf), id), 1e-15);
}

TEST(Identity, SingleSlice) {
  const Transform tf = make_transform(TransformKind::kDct, 1);
  EXPECT_EQ(identity_tensor(3, tf).slice(0), Eigen::MatrixXd::Identity(3, 3));
}

TEST(TSvd, IdentityInput) {
  const Transform tf = make_transform(TransformKind::kDft, 3);
  const TSvdFactors f = t_svd(identity_tensor(3, tf), tf);
  EXPECT_LE(oracle::rel_diff(f.g, identity_tensor(3, tf)), 1e-12);
  EXPECT_LE(oracle::rel_diff(t_product_adjoint(f.u, f.v, tf), identity_tensor(3, tf)), 1e-12);
}

TEST(TSvd, SingleSliceIsMatrixSvd) {
  const Transform tf = make_transform(TransformKind::kDft, 1);
  const Tensor3 a = oracle::random_tensor(5, 3, 1, 16);
  const TSvdFactors f = t_svd(a, tf);
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(a.slice(0)).singularValues();
  for (Index i = 0; i < 3; ++i) EXPECT_NEAR(f.g(i, i, 0), sv(i), 1e-13);
}

TEST(TSvd, ReconstructionOrthogonalityAndOrdering) {
  for (auto kind : {TransformKind::kDft, TransformKind::kDct}) {
    for (Index n3 : {1, 3, 4}) {
      const Transform tf = make_transform(kind, n3);
      for (auto [n1, n2] : {std::pair<Index, Index>{6, 4}, {4, 6}, {5, 5}}) {
        const Tensor3 a = oracle::random_tensor(n1, n2, n3, static_cast<std::uint64_t>(n1 * 100 + n2 * 10 + n3));
        const TSvdFactors f = t_svd(a, tf);
        EXPECT_LE(oracle::rel_diff(reconstruct(f), a), 1e-9);
        const Tensor3 id = identity_tensor(f.rank(), tf);
        EXPECT_LE((t_product(conj_transpose(f.u, tf), f.u, tf) - id).flat().norm(), 1e-9);
        EXPECT_LE((t_product(conj_transpose(f.v, tf), f.v, tf) - id).flat().norm(), 1e-9);
        const SpectralTensor gbar = tf.forward(f.g);
        for (Index k = 0; k < n3; ++k) {
          Eigen::MatrixXcd off = gbar.slice(k);
          off.diagonal().setZero();
          EXPECT_LT(off.cwiseAbs().maxCoeff(), 1e-12);
          for (Index i = 0; i < f.rank(); ++i) {
            EXPECT_GE(gbar(i, i, k).real(), -1e-14);
            EXPECT_LT(std::abs(gbar(i, i, k).imag()), 1e-12);
            if (i > 0) EXPECT_LE(gbar(i, i, k).real(), gbar(i - 1, i - 1, k).real() + 1e-12);
          }
        }
      }
    }
  }
}

TEST(TSvd, SingularValuesMatchOracle) {
  for (auto kind : {TransformKind::kDft, TransformKind::kDct}) {
    const Case c = make_case(kind, 4);
    const Tensor3 a = oracle::random_tensor(5, 3, 4, 17);
    const TSvdFactors f = t_svd(a, c.tf);
    const SpectralTensor gbar = c.tf.forward(f.g);
    std::vector<double> mine;
    for (Index k = 0; k < 4; ++k) {
      for (Index i = 0; i < 3; ++i) mine.push_back(gbar(i, i, k).real());
    }
    std::sort(mine.begin(), mine.end(), std::greater<>());
    const Eigen::VectorXd ref = oracle::singular_values(a, c.phi);
    for (std::size_t i = 0; i < mine.size(); ++i) EXPECT_NEAR(mine[i], ref(static_cast<Index>(i)), 1e-10 * ref(0));
  }
}

TEST(TSvd, PhaseConvention) {
  const Transform tf = make_transform(TransformKind::kDft, 4);
  const TSvdFactors f = t_svd(oracle::random_tensor(5, 3, 4, 18), tf);
  const SpectralTensor ubar = tf.forward(f.u);
  for (Index k = 0; k < 4; ++k) {
    for (Index j = 0; j < 3; ++j) {
      Index arg = 0;
      ubar.slice(k).col(j).cwiseAbs().maxCoeff(&arg);
      EXPECT_GT(ubar(arg, j, k).real(), 0.0);
      EXPECT_LT(std::abs(ubar(arg, j, k).imag()), 1e-12);
    }
  }
}

TEST(TSvd, RejectsNonFinite) {
  const Transform tf = make_transform(TransformKind::kDct, 2);
  Tensor3 a = oracle::random_tensor(3, 3, 2, 19);
  a(1, 1, 1) = std::nan("");
  try {
    t_svd(a, tf);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kSvdFailure);
  }
}

TEST(Truncate, FullRankUnchangedAndRange) {
  const Transform tf = make_transform(TransformKind::kDft, 3);
  const Tensor3 a = oracle::random_tensor(4, 3, 3, 20);
  const TSvdFactors f = t_svd(a, tf);
  EXPECT_LE(oracle::rel_diff(reconstruct(truncate(f, 3)), a), 1e-9);
  for (Index r : {0, 4}) {
    try {
      truncate(f, r);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::kRankOutOfRange);
    }
  }
}

TEST(Truncate, ExactLowRankRecovered) {
  const Transform tf = make_transform(TransformKind::kDft, 4);
  const Tensor3 a = t_product(oracle::random_tensor(6, 2, 4, 21), oracle::random_tensor(2, 5, 4, 22), tf);
  EXPECT_LE(oracle::rel_diff(reconstruct(truncate(t_svd(a, tf), 2)), a), 1e-9);
}

TEST(Truncate, TailMatchesOracle) {
  for (auto kind : {TransformKind::kDft, TransformKind::kDct}) {
    const Case c = make_case(kind, 2);
    const Tensor3 a = oracle::random_tensor(5, 5, 2, 23);
    const Tensor3 approx = reconstruct(truncate(t_svd(a, c.tf), 3));
    EXPECT_NEAR((approx - a).flat().norm(), oracle::truncation_error(a, 3, c.phi), 1e-10);
  }
}

TEST(TInverse, Cases) {
  const Transform tf = make_transform(TransformKind::kDft, 4);
  EXPECT_LE(oracle::rel_diff(t_inverse(identity_tensor(3, tf), tf), identity_tensor(3, tf)), 1e-14);

  const Transform one = make_transform(TransformKind::kDct, 1);
  const Tensor3 m = well_conditioned(3, 1, 24, one);
  const Eigen::MatrixXd ref = m.slice(0).inverse();
  EXPECT_LT((t_inverse(m, one).slice(0) - ref).norm(), 1e-12);

  for (auto kind : {TransformKind::kDft, TransformKind::kDct}) {
    const Case c = make_case(kind, 4);
    const Tensor3 a = well_conditioned(3, 4, 25, c.tf);
    const Tensor3 inv = t_inverse(a, c.tf);
    const Tensor3 id = identity_tensor(3, c.tf);
    EXPECT_LE((t_product(a, inv, c.tf) - id).flat().norm(), 1e-8);
    EXPECT_LE((t_product(inv, a, c.tf) - id).flat().norm(), 1e-8);
    EXPECT_LE(oracle::rel_diff(inv, oracle::inverse(a, c.phi)), 1e-9);
  }
}

TEST(TInverse, NamesSingularSlice) {
  const Transform tf = make_transform(TransformKind::kDct, 3);
  SpectralTensor abar(2, 2, 3);
  for (Index k = 0; k < 3; ++k) abar.slice(k) = Eigen::MatrixXcd::Identity(2, 2);
  abar(1, 1, 1) = 0.0;
  const Tensor3 a = tf.inverse(abar);
  try {
    t_inverse(a, tf);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kSingularSlice);
    ASSERT_TRUE(e.slice().has_value());
    EXPECT_EQ(*e.slice(), 1);
  }
}

TEST(TSqrt, Cases) {
  const Transform tf = make_transform(TransformKind::kDft, 2);
  EXPECT_LE(oracle::rel_diff(t_sqrt(identity_tensor(2, tf), tf), identity_tensor(2, tf)), 1e-14);

  SpectralTensor gbar(2, 2, 2);
  for (Index k = 0; k < 2; ++k) {
    gbar(0, 0, k) = 4.0;
    gbar(1, 1, k) = 9.0;
  }
  const SpectralTensor root = tf.forward(t_sqrt(tf.inverse(gbar), tf));
  for (Index k = 0; k < 2; ++k) {
    EXPECT_NEAR(std::abs(root(0, 0, k) - 2.0), 0.0, 1e-13);
    EXPECT_NEAR(std::abs(root(1, 1, k) - 3.0), 0.0, 1e-13);
  }

  for (auto kind : {TransformKind::kDft, TransformKind::kDct}) {
    const Transform t4 = make_transform(kind, 4);
    const Tensor3 g = t_svd(oracle::random_tensor(5, 4, 4, 26), t4).g;
    const Tensor3 s = t_sqrt(g, t4);
    EXPECT_LE((t_product(s, s, t4) - g).flat().norm(), 1e-8);
    const Tensor3 a = oracle::random_tensor(3, 3, 4, 27);
    const Tensor3 psd = t_product_adjoint(a, a, t4);
    const Tensor3 sp = t_sqrt(psd, t4);
    EXPECT_LE((t_product(sp, sp, t4) - psd).flat().norm(), 1e-8 * psd.flat().norm());
  }
}

TEST(TSqrt, RejectsIndefinite) {
  const Transform tf = make_transform(TransformKind::kDct, 2);
  SpectralTensor gbar(2, 2, 2);
  gbar.slice(0) = Eigen::MatrixXcd::Identity(2, 2);
  gbar.slice(1) = Eigen::MatrixXcd::Identity(2, 2);
  gbar(1, 1, 1) = -1.0;
  try {
    t_sqrt(tf.inverse(gbar), tf);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kNotPsdSlice);
    EXPECT_EQ(e.slice().value_or(-1), 1);
  }
}

TEST(Norm, ZeroTensor) {
  const Transform tf = make_transform(TransformKind::kDft, 3);
  const Tensor3 z(3, 2, 3);
  for (auto name : {"fro", "spectral", "nuclear", "inf", "l1", "two_inf", "inf_two", "two_two_inf"}) {
    EXPECT_EQ(norm(z, parse_norm_kind(name), tf), 0.0) << name;
  }
}

TEST(Norm, IdentitySpectralIsOne) {
  for (auto kind : {TransformKind::kDft, TransformKind::kDct}) {
    const Transform tf = make_transform(kind, 5);
    EXPECT_NEAR(norm(identity_tensor(3, tf), NormKind::kSpectral, tf), 1.0, 1e-14);
  }
}

TEST(Norm, SpectralAndNuclearMatchOracle) {
  for (auto kind : {TransformKind::kDft, TransformKind::kDct}) {
    const Case c = make_case(kind, 2);
    const Tensor3 a = oracle::random_tensor(4, 3, 2, 28);
    EXPECT_NEAR(norm(a, NormKind::kSpectral, c.tf), oracle::spectral_norm(a, c.phi), 1e-12);
    EXPECT_NEAR(norm(a, NormKind::kNuclear, c.tf), oracle::nuclear_norm(a, c.phi), 1e-12);
  }
}

TEST(Norm, EntrywiseDefinitions) {
  Tensor3 a(2, 2, 2);
  a(0, 0, 0) = 3.0;
  a(0, 1, 1) = -4.0;
  a(1, 1, 0) = 1.0;
  EXPECT_DOUBLE_EQ(norm(a, NormKind::kFrobenius), std::sqrt(26.0));
  EXPECT_DOUBLE_EQ(norm(a, NormKind::kInf), 4.0);
  EXPECT_DOUBLE_EQ(norm(a, NormKind::kL1), 8.0);
  EXPECT_DOUBLE_EQ(norm(a, NormKind::kTwoInf), 5.0);      // row 0: 3, -4
  EXPECT_DOUBLE_EQ(norm(a, NormKind::kInfTwo), 5.0);      // horizontal slice 0
  EXPECT_DOUBLE_EQ(norm(a, NormKind::kTwoTwoInf), 4.0);   // row 0 of slice 1
  EXPECT_THROW(norm(a, NormKind::kSpectral), Error);
  try {
    parse_norm_kind("frobenius-ish");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kUnknownKind);
  }
}

TEST(MultiRank, Cases) {
  const Transform tf = make_transform(TransformKind::kDft, 2);
  const MultiRank zero = multi_rank(Tensor3(3, 3, 2), tf);
  EXPECT_EQ(zero.sum, 0);
  EXPECT_EQ(zero.ranks, (std::vector<Index>{0, 0}));
  const MultiRank id = multi_rank(identity_tensor(3, tf), tf);
  EXPECT_EQ(id.ranks, (std::vector<Index>{3, 3}));
  EXPECT_EQ(id.sum, 6);
  EXPECT_EQ(id.tubal, 3);

  const Transform t4 = make_transform(TransformKind::kDct, 4);
  const GroundTruth gt = gen_ground_truth(8, 8, 4, 4, 5.0, t4, 3);
  EXPECT_EQ(multi_rank(t_product_adjoint(gt.lstar, gt.rstar, t4), t4).tubal, 4);
}

TEST(MultiRank, UnevenSlices) {
  const Transform tf = make_transform(TransformKind::kDct, 3);
  SpectralTensor abar(3, 3, 3);
  abar(0, 0, 0) = 1.0;
  abar(0, 0, 1) = 1.0;
  abar(1, 1, 1) = 0.5;
  abar(0, 0, 2) = 1e-14;
  const MultiRank m = multi_rank(tf.inverse(abar), tf);
  EXPECT_EQ(m.ranks, (std::vector<Index>{1, 2, 0}));
  EXPECT_EQ(m.sum, 3);
  EXPECT_EQ(m.tubal, 2);
}

TEST(Tsr3, RoundTripAndLayout) {
  const Tensor3 a = oracle::random_tensor(2, 3, 2, 29);
  std::stringstream buf;
  write_tsr3(buf, a);
  const std::string bytes = buf.str();
  ASSERT_EQ(bytes.size(), 4u + 12u + 8u * 12u);
  EXPECT_EQ(bytes.substr(0, 4), "TSR3");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 2);
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 3);
  EXPECT_EQ(static_cast<unsigned char>(bytes[12]), 2);
  // Second stored value is A(0, 1, 0): k outermost, then i, then j.
  double second = 0.0;
  std::memcpy(&second, bytes.data() + 16 + 8, 8);
  EXPECT_EQ(second, a(0, 1, 0));
  const Tensor3 back = read_tsr3(buf);
  EXPECT_EQ(back, a);
}

TEST(Tsr3, RejectsBadInput) {
  std::stringstream bad("NOPE");
  EXPECT_THROW(read_tsr3(bad), Error);
  const Tensor3 a = oracle::random_tensor(2, 2, 2, 30);
  std::stringstream buf;
  write_tsr3(buf, a);
  std::stringstream truncated(buf.str().substr(0, 30));
  try {
    read_tsr3(truncated);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kIoError);
  }
}
