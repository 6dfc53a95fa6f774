#include "tscaledgd/harness/validate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "tscaledgd/tscaledgd.hpp"

namespace tsgd::harness {

namespace {

Tensor3 random_tensor(Index n1, Index n2, Index n3, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Tensor3 a(n1, n2, n3);
  for (double& v : a.data()) v = normal(rng);
  return a;
}

// Tracks the worst measured value against a fixed bound.
struct Worst {
  Worst(std::string n, double b) : name(std::move(n)), bound(b) {}

  std::string name;
  double bound;
  double measured = 0.0;
  bool failed = false;
  std::string detail;

  void add(double value) {
    if (!std::isfinite(value)) failed = true;
    measured = std::max(measured, value);
  }
  CheckResult result() const { return {name, !failed && measured <= bound, measured, bound, detail}; }
};

const std::array<TransformKind, 2> kKinds{TransformKind::kDft, TransformKind::kDct};

void transform_checks(ValidationReport& report, const ValidateOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  for (TransformKind kind : kKinds) {
    const std::string tag = to_string(kind);
    Worst round{"transform.round_trip." + tag, 1e-12};
    Worst parseval{"transform.parseval." + tag, 1e-10};
    for (int t = 0; t < opt.trials; ++t) {
      const Transform tf = make_transform(kind, 6);
      const Tensor3 a = random_tensor(5, 4, 6, rng);
      const Tensor3 b = random_tensor(5, 4, 6, rng);
      const SpectralTensor abar = tf.forward(a);
      const SpectralTensor bbar = tf.forward(b);
      round.add((tf.inverse(abar).flat() - a.flat()).norm() / a.flat().norm());
      const double fro = std::abs(abar.flat().norm() / std::sqrt(tf.ell()) - a.flat().norm()) / a.flat().norm();
      const double inner = a.flat().dot(b.flat());
      const double inner_bar = abar.flat().dot(bbar.flat()).real() / tf.ell();
      parseval.add(std::max(fro, std::abs(inner - inner_bar) / (a.flat().norm() * b.flat().norm())));
    }
    report.checks.push_back(round.result());
    report.checks.push_back(parseval.result());
  }
}

void custom_phi_check(ValidationReport& report, const Eigen::MatrixXcd& phi) {
  CheckResult r{"transform.custom_phi", false, 0.0, 1e-8, ""};
  try {
    const Transform tf = make_custom_transform(phi);
    r.bound = 1e-8 * tf.ell();
    std::mt19937_64 rng(1);
    const Tensor3 a = random_tensor(3, 2, tf.n3(), rng);
    r.measured = (tf.inverse(tf.forward(a), ResidueCheck::kSkip).flat() - a.flat()).norm() / a.flat().norm();
    r.passed = r.measured <= r.bound;
    r.detail = "ell=" + std::to_string(tf.ell());
  } catch (const Error& e) {
    r.measured = e.value().value_or(std::numeric_limits<double>::infinity());
    r.detail = e.what();
  }
  report.checks.push_back(r);
}

void tsvd_checks(ValidationReport& report, const ValidateOptions& opt) {
  std::mt19937_64 rng(opt.seed + 1);
  for (TransformKind kind : kKinds) {
    const std::string tag = to_string(kind);
    Worst recon{"talg.tsvd_reconstruction." + tag, 1e-9};
    Worst orth{"talg.tsvd_orthogonality." + tag, 1e-9};
    for (int t = 0; t < opt.trials; ++t) {
      const Transform tf = make_transform(kind, 3 + t % 4);
      const Tensor3 a = random_tensor(6, 4, tf.n3(), rng);
      const TSvdFactors f = t_svd(a, tf);
      recon.add((reconstruct(f).flat() - a.flat()).norm() / a.flat().norm());
      const Tensor3 id = identity_tensor(f.rank(), tf);
      orth.add(std::max((t_product(conj_transpose(f.u, tf), f.u, tf) - id).flat().norm(),
                        (t_product(conj_transpose(f.v, tf), f.v, tf) - id).flat().norm()));
    }
    report.checks.push_back(recon.result());
    report.checks.push_back(orth.result());
  }
}

// Ratios lhs / rhs of the norm inequalities; each must stay <= 1.
void inequality_checks(ValidationReport& report, const ValidateOptions& opt) {
  std::mt19937_64 rng(opt.seed + 2);
  Worst sparse_spec{"inequality.sparse_spectral_bound", 1.0};
  Worst sparse_rows{"inequality.sparse_two_inf_bound", 1.0};
  Worst inf_prod{"inequality.inf_norm_product_bound", 1.0};
  Worst fro_upper{"inequality.frobenius_product_upper", 1.0};
  Worst fro_lower{"inequality.frobenius_product_lower", 1.0};
  Worst rows_prod{"inequality.two_inf_product_bound", 1.0};
  for (int t = 0; t < opt.trials; ++t) {
    const Transform tf = make_transform(kKinds[static_cast<std::size_t>(t % 2)], 8);
    const double ell = tf.ell();
    const double alpha = 0.125 * (1 + t % 3);
    const Tensor3 s = gen_banded_sparse(8, alpha, 1.0, rng());
    const double sinf = norm(s, NormKind::kInf);
    if (sinf > 0.0) {
      sparse_spec.add(norm(s, NormKind::kSpectral, tf) / (alpha * std::sqrt(ell) / 2.0 * (8 + 8 * 8) * sinf));
      sparse_rows.add(norm(s, NormKind::kTwoInf) / (std::sqrt(alpha * 8 * 8) * sinf));
    }
    const Tensor3 a = random_tensor(5, 4, 8, rng);
    const Tensor3 b = random_tensor(3, 4, 8, rng);
    inf_prod.add(norm(t_product_adjoint(a, b, tf), NormKind::kInf) /
                 (std::sqrt(ell) * norm(a, NormKind::kTwoInf) * norm(b, NormKind::kTwoInf)));
    const Tensor3 c = random_tensor(4, 4, 8, rng);
    const Tensor3 ac = t_product(a, c, tf);
    fro_upper.add(norm(ac, NormKind::kFrobenius) / (norm(a, NormKind::kFrobenius) * norm(c, NormKind::kSpectral, tf)));
    double smin = std::numeric_limits<double>::infinity();
    for (const auto& sv : slice_singular_values(c, tf)) smin = std::min(smin, sv.minCoeff());
    fro_lower.add(norm(a, NormKind::kFrobenius) * smin / norm(ac, NormKind::kFrobenius));
    rows_prod.add(norm(ac, NormKind::kTwoInf) /
                  (std::sqrt(4.0 * ell) * norm(a, NormKind::kTwoInf) * norm(c, NormKind::kTwoInf)));
  }
  for (const auto* w : {&sparse_spec, &sparse_rows, &inf_prod, &fro_upper, &fro_lower, &rows_prod}) {
    report.checks.push_back(w->result());
  }
}

void factor_checks(ValidationReport& report, const ValidateOptions& opt) {
  Worst procrustes{"inequality.dist_upper_bound", 1.0};
  Worst incoherent{"projection.incoherence", 1.0};
  Worst nonexpansive{"projection.non_expansive", 1.0};
  Worst support{"threshold.support_containment", 0.0};
  Worst sparse_err{"threshold.sparse_error_bound", 1.0};
  int active = 0;
  for (int t = 0; t < opt.trials; ++t) {
    const std::uint64_t seed = opt.seed * 1000 + static_cast<std::uint64_t>(t);
    const Transform tf = make_transform(kKinds[static_cast<std::size_t>(t % 2)], 4);
    const GroundTruth gt = gen_ground_truth(10, 8, 4, 2, 1.0 + t % 5, tf, seed);

    const FactorPair near = perturb_factors(gt, 0.05, seed + 1);
    const double resid = (product(near, tf) - gt.xstar).flat().norm();
    procrustes.add(try_align(near, gt).dist / (std::sqrt(std::sqrt(2.0) + 1.0) * resid));

    std::mt19937_64 rng(seed + 2);
    std::uniform_real_distribution<double> radius(0.05, 2.0);
    const FactorPair wild = perturb_factors(gt, 1.0, seed + 3);
    const double varsigma = radius(rng) * std::sqrt(10.0) * norm(product(wild, tf), NormKind::kTwoInf);
    const FactorPair proj = scaled_projection(wild, varsigma, tf);
    incoherent.add(std::max(std::sqrt(10.0) * norm(t_product_adjoint(proj.left, proj.right, tf), NormKind::kTwoInf),
                            std::sqrt(8.0) * norm(t_product_adjoint(proj.right, proj.left, tf), NormKind::kTwoInf)) /
                   varsigma);

    // Inflate the row that attains the incoherence (alternating trials) or add
    // a random spike to it, then shrink until the pair sits inside the basin.
    const GroundTruth gp = gen_ground_truth(40, 40, 4, 2, 1.0 + t % 3, tf, seed + 5);
    const double eps = 0.02;
    const double budget = eps / std::sqrt(tf.ell()) * singular_extremes(gp).sigma_min;
    const bool on_left = norm(gp.ustar, NormKind::kTwoInf) >= norm(gp.vstar, NormKind::kTwoInf);
    const Tensor3& base = on_left ? gp.lstar : gp.rstar;
    const Tensor3& basis = on_left ? gp.ustar : gp.vstar;
    Index row = 0;
    for (Index i = 1; i < 40; ++i) {
      if (rows_of(basis, i, 1).flat().norm() > rows_of(basis, row, 1).flat().norm()) row = i;
    }
    Tensor3 spike(40, 2, 4);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Index j = 0; j < 2; ++j) {
      for (Index k = 0; k < 4; ++k) spike(row, j, k) = t % 2 ? normal(rng) : 0.5 * base(row, j, k);
    }
    auto perturbed = [&] {
      return on_left ? FactorPair{gp.lstar + spike, gp.rstar} : FactorPair{gp.lstar, gp.rstar + spike};
    };
    FactorPair tilde = perturbed();
    double d = try_align(tilde, gp).dist;
    for (int shrink = 0; shrink < 200 && d > 0.95 * budget; ++shrink) {
      spike *= 0.9;
      tilde = perturbed();
      d = try_align(tilde, gp).dist;
    }
    const double sigma_bound = (1.0 + eps) * std::sqrt(incoherence(gp) * static_cast<double>(gp.mrank.sum) /
                                                       (4.0 * tf.ell())) * singular_extremes(gp).sigma_max;
    const FactorPair projected = scaled_projection(tilde, sigma_bound, tf);
    active += (projected.left.flat() - tilde.left.flat()).norm() + (projected.right.flat() - tilde.right.flat()).norm() > 0.0;
    nonexpansive.add(d > 0.0 ? try_align(projected, gp).dist / d : 0.0);

    // Soft-thresholding at zeta >= ||X* - X_t||_inf keeps only true outliers.
    const Tensor3 s_star = gen_sparse_corruption(gt.xstar, 0.1, seed + 4);
    const Tensor3 y = gt.xstar + s_star;
    const double gap = norm(product(near, tf) - gt.xstar, NormKind::kInf);
    const double zeta = gap * (1.0 + radius(rng));
    const RpcaInit next = rpca_step(near, y, zeta, 0.5, tf);
    double outside = 0.0;
    for (Index i = 0; i < y.size(); ++i) {
      if (s_star.data()[static_cast<std::size_t>(i)] == 0.0) {
        outside = std::max(outside, std::abs(next.sparse.data()[static_cast<std::size_t>(i)]));
      }
    }
    support.add(outside);
    sparse_err.add(norm(next.sparse - s_star, NormKind::kInf) / (2.0 * zeta));
  }
  nonexpansive.detail = "projection active in " + std::to_string(active) + "/" + std::to_string(opt.trials) + " trials";
  nonexpansive.bound = 1.0 + 1e-9;
  incoherent.bound = 1.0 + 1e-12;
  for (const auto* w : {&procrustes, &incoherent, &nonexpansive, &support, &sparse_err}) {
    report.checks.push_back(w->result());
  }
}

}  // namespace

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

ValidationReport validate_suite(const ValidateOptions& options) {
  ValidationReport report;
  if (options.custom_phi) custom_phi_check(report, *options.custom_phi);
  transform_checks(report, options);
  tsvd_checks(report, options);
  inequality_checks(report, options);
  factor_checks(report, options);
  return report;
}

void print_report(std::ostream& out, const ValidationReport& report) {
  std::size_t failed = 0;
  for (const auto& c : report.checks) {
    char line[256];
    std::snprintf(line, sizeof line, "%s %-36s measured=%.3e bound=%.3e", c.passed ? "PASS" : "FAIL",
                  c.name.c_str(), c.measured, c.bound);
    out << line;
    if (!c.detail.empty()) out << "  " << c.detail;
    out << '\n';
    failed += !c.passed;
  }
  out << (report.checks.size() - failed) << "/" << report.checks.size() << " checks passed\n";
}

Eigen::MatrixXcd read_phi(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIoError, "cannot open " + path.string());
  std::vector<std::vector<Complex>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<Complex> row;
    Complex v;
    while (ls >> v) row.push_back(v);
    if (!ls.eof()) throw Error(Errc::kIoError, "unparsable entry in " + path.string());
    if (!row.empty()) rows.push_back(std::move(row));
  }
  const auto n = static_cast<Index>(rows.size());
  Eigen::MatrixXcd phi(n, n);
  for (Index i = 0; i < n; ++i) {
    if (static_cast<Index>(rows[static_cast<std::size_t>(i)].size()) != n) {
      throw Error(Errc::kDimensionMismatch, "Phi file must hold a square matrix");
    }
    for (Index j = 0; j < n; ++j) phi(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return phi;
}

}  // namespace tsgd::harness
