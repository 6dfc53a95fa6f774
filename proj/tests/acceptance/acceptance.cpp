#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oracle.hpp"
#include "tscaledgd/harness/config.hpp"
#include "tscaledgd/harness/experiment.hpp"
#include "tscaledgd/harness/validate.hpp"
#include "tscaledgd/tscaledgd.hpp"

using namespace tsgd;
using namespace tsgd::harness;

namespace {

namespace fs = std::filesystem;

struct Scale {
  Index n = 50;
  Index r = 5;
};

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fs::path work_dir(int criterion) {
  const fs::path dir = fs::temp_directory_path() / ("tsgd_acceptance_" + std::to_string(criterion));
  fs::remove_all(dir);
  return dir;
}

double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return (*hi - *lo) / *lo;
}

std::vector<double> read_rel_err(const fs::path& trace) {
  std::ifstream in(trace);
  std::string line;
  std::getline(in, line);
  std::vector<double> out;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    for (int c = 0; c < 8 && std::getline(ss, cell, ','); ++c) {
    }
    out.push_back(std::stod(cell));
  }
  return out;
}

oracle::Phi oracle_phi(TransformKind kind, Index n3) { return kind == TransformKind::kDft ? oracle::dft(n3) : oracle::dct(n3); }

double rel_vec(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

Outcome algebra_oracle(const Scale&) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<Index> dim(1, 6), depth(1, 4);
  std::map<std::string, double> worst;
  for (auto kind : {TransformKind::kDft, TransformKind::kDct}) {
    for (int trial = 0; trial < 50; ++trial) {
      const Index n1 = dim(rng), n2 = dim(rng), n4 = dim(rng), n3 = depth(rng);
      const Transform tf = make_transform(kind, n3);
      const oracle::Phi phi = oracle_phi(kind, n3);
      const std::uint64_t seed = rng();
      const Tensor3 a = oracle::random_tensor(n1, n2, n3, seed);
      const Tensor3 b = oracle::random_tensor(n2, n4, n3, seed + 1);
      auto note = [&](const std::string& name, double v) { worst[name] = std::max(worst[name], v); };

      note("t_product", oracle::rel_diff(t_product(a, b, tf), oracle::product(a, b, phi)));
      note("conj_transpose", oracle::rel_diff(conj_transpose(a, tf), oracle::adjoint(a, phi)));

      const TSvdFactors svd = t_svd(a, tf);
      note("t_svd", oracle::rel_diff(reconstruct(svd), a));
      std::vector<double> sv;
      for (const auto& s : slice_singular_values(a, tf)) sv.insert(sv.end(), s.data(), s.data() + s.size());
      std::sort(sv.begin(), sv.end(), std::greater<>());
      const Eigen::VectorXd ref = oracle::singular_values(a, phi);
      note("t_svd", rel_vec(Eigen::Map<Eigen::VectorXd>(sv.data(), static_cast<Index>(sv.size())), ref));

      Tensor3 sq = oracle::random_tensor(n1, n1, n3, seed + 2) + identity_tensor(n1, tf) * (2.0 * static_cast<double>(n1));
      note("t_inverse", oracle::rel_diff(t_inverse(sq, tf), oracle::inverse(sq, phi)));

      const double spec = oracle::spectral_norm(a, phi);
      const double nuc = oracle::nuclear_norm(a, phi);
      note("spectral", std::abs(norm(a, NormKind::kSpectral, tf) - spec) / spec);
      note("nuclear", std::abs(norm(a, NormKind::kNuclear, tf) - nuc) / nuc);
    }
  }
  const double elapsed = seconds_since(t0);
  Outcome out{elapsed < 10.0, ""};
  for (const auto& [name, v] : worst) {
    out.passed = out.passed && v <= 1e-9;
    out.detail += name + "=" + sci(v) + " ";
  }
  out.detail += "time=" + sci(elapsed) + "s";
  return out;
}

Outcome transform_identities(const Scale&) {
  double worst = 0.0;
  bool ell_exact = true;
  for (auto kind : {TransformKind::kDft, TransformKind::kDct}) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const Index n3 = 1 + static_cast<Index>(seed % 8);
      const Transform tf = make_transform(kind, n3);
      ell_exact = ell_exact && tf.ell() == (kind == TransformKind::kDft ? static_cast<double>(n3) : 1.0);
      const Tensor3 a = oracle::random_tensor(5, 4, n3, seed);
      const Tensor3 b = oracle::random_tensor(5, 4, n3, seed + 500);
      const SpectralTensor abar = tf.forward(a);
      const SpectralTensor bbar = tf.forward(b);
      const double fro = a.flat().norm();
      const double bd = oracle::bdiag(oracle::slices(a, oracle_phi(kind, n3))).norm();
      const double inner = a.flat().dot(b.flat());
      const double scale = fro * b.flat().norm();
      worst = std::max({worst, std::abs(abar.flat().norm() / std::sqrt(tf.ell()) - fro) / fro,
                        std::abs(bd / std::sqrt(tf.ell()) - fro) / fro,
                        std::abs(abar.flat().dot(bbar.flat()).real() / tf.ell() - inner) / scale});
    }
  }
  return {worst <= 1e-10 && ell_exact, "max_rel=" + sci(worst) + (ell_exact ? " ell exact" : " ell mismatch")};
}

Outcome suite_subset(const std::vector<std::string>& prefixes) {
  ValidateOptions opt;
  opt.trials = 100;
  const ValidationReport report = validate_suite(opt);
  Outcome out{true, ""};
  int count = 0;
  for (const auto& c : report.checks) {
    const bool selected = std::any_of(prefixes.begin(), prefixes.end(), [&](const std::string& p) { return c.name.rfind(p, 0) == 0; });
    if (!selected) continue;
    ++count;
    out.passed = out.passed && c.passed;
    if (!c.passed) out.detail += "failed " + c.name + " ";
  }
  out.passed = out.passed && count > 0;
  out.detail += std::to_string(count) + " checks, 100 trials each";
  return out;
}

Outcome norm_inequalities(const Scale&) { return suite_subset({"inequality."}); }

Outcome factorization_contraction(const Scale&) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out{true, ""};
  for (auto kind : {TransformKind::kDft, TransformKind::kDct}) {
    const Transform tf = make_transform(kind, 20);
    const GroundTruth gt = gen_ground_truth(20, 20, 20, 3, 50.0, tf, 4);
    const double budget = 0.1 * singular_extremes(gt).sigma_min / std::sqrt(tf.ell());
    double radius = budget / gt.lstar.flat().norm();
    FactorPair f = perturb_factors(gt, radius, 5);
    while (dist(f, gt) > budget) {
      radius *= 0.9;
      f = perturb_factors(gt, radius, 5);
    }
    double prev = dist(f, gt);
    double worst = 0.0;
    for (int t = 0; t < 30; ++t) {
      f = factorization_step(f, gt.xstar, 0.5, tf);
      const double d = dist(f, gt);
      worst = std::max(worst, d / prev);
      prev = d;
    }
    out.passed = out.passed && worst <= 0.65 + 0.02;
    out.detail += std::string(to_string(kind)) + " max_ratio=" + sci(worst) + " final_dist=" + sci(prev) + " ";
  }
  const double elapsed = seconds_since(t0);
  out.passed = out.passed && elapsed < 30.0;
  out.detail += "time=" + sci(elapsed) + "s";
  return out;
}

ExperimentConfig base_config(const Scale& s, Problem problem, int criterion) {
  ExperimentConfig cfg;
  cfg.problem = problem;
  cfg.n1 = cfg.n2 = cfg.n3 = s.n;
  cfg.rank = s.r;
  cfg.kappas = {1.0, 5.0, 10.0, 20.0};
  cfg.alpha = 0.1;
  cfg.p = 0.4;
  cfg.etas = {0.5};
  cfg.schedule = {0.5, 0.5, 0.95};
  cfg.output_dir = work_dir(criterion);
  cfg.timing = false;
  return cfg;
}

const CellResult& find_cell(const ExperimentReport& r, Method m, double kappa, double eta = 0.5, double snr = kNoNoise) {
  for (const auto& c : r.cells) {
    if (c.method == m && c.kappa == kappa && c.eta == eta && c.snr_db == snr) return c;
  }
  throw std::runtime_error("cell not found");
}

Outcome rpca_kappa_independence(const Scale& s) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig cfg = base_config(s, Problem::kRpca, 5);
  cfg.transforms = {TransformKind::kDft, TransformKind::kDct};
  cfg.max_iters = 150;
  Outcome out{true, ""};
  for (auto kind : cfg.transforms) {
    ExperimentConfig one = cfg;
    one.transforms = {kind};
    one.output_dir = cfg.output_dir / to_string(kind);
    const ExperimentReport r = run_experiment(one);
    std::vector<double> counts;
    out.detail += std::string(to_string(kind)) + ":";
    for (double kappa : cfg.kappas) {
      const CellResult& c = find_cell(r, Method::kScaledGd, kappa);
      out.detail += " k" + num(kappa) + "=" + sci(c.final_rel_err);
      if (c.iters_to_1e8) counts.push_back(static_cast<double>(*c.iters_to_1e8));
    }
    const bool all_reached = counts.size() == cfg.kappas.size();
    const double sp = all_reached ? spread(counts) : INFINITY;
    const double gd = find_cell(r, Method::kVanillaGd, 20.0).final_rel_err;
    out.passed = out.passed && all_reached && sp <= 0.25 && gd > 1e-4;
    out.detail += " reached_1e-8=" + std::to_string(counts.size()) + "/4 spread=" + sci(sp) + " gd_k20=" + sci(gd) + "; ";
  }
  const double elapsed = seconds_since(t0);
  out.passed = out.passed && elapsed <= 600.0;
  out.detail += "n=" + std::to_string(s.n) + " r=" + std::to_string(s.r) + " time=" + sci(elapsed) + "s";
  return out;
}

Outcome completion_kappa_independence(const Scale& s) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig cfg = base_config(s, Problem::kCompletion, 6);
  cfg.methods = {Method::kScaledGd};
  cfg.max_iters = 300;
  const ExperimentReport r = run_experiment(cfg);
  std::vector<double> counts;
  for (double kappa : cfg.kappas) {
    const CellResult& c = find_cell(r, Method::kScaledGd, kappa);
    if (c.iters_to_1e8) counts.push_back(static_cast<double>(*c.iters_to_1e8));
  }
  const bool all_reached = counts.size() == cfg.kappas.size();
  const double sp = all_reached ? spread(counts) : INFINITY;

  ExperimentConfig gd = cfg;
  gd.methods = {Method::kVanillaGd};
  gd.kappas = {1.0};
  gd.max_iters = 1000;
  gd.output_dir = cfg.output_dir / "gd";
  const CellResult c1 = run_experiment(gd).cells.front();
  bool gd_ok = false;
  std::string gd_detail = "gd_k1 did not reach 1e-8";
  if (c1.iters_to_1e8) {
    gd.kappas = {20.0};
    gd.max_iters = 3 * *c1.iters_to_1e8;
    const CellResult c20 = run_experiment(gd).cells.front();
    gd_ok = !c20.iters_to_1e8 || *c20.iters_to_1e8 >= 3 * *c1.iters_to_1e8;
    gd_detail = "gd_k1=" + std::to_string(*c1.iters_to_1e8) + " gd_k20=" +
                (c20.iters_to_1e8 ? std::to_string(*c20.iters_to_1e8) : ">" + std::to_string(gd.max_iters));
  }
  const double elapsed = seconds_since(t0);
  Outcome out{all_reached && sp <= 0.25 && gd_ok && elapsed <= 900.0, "scaledgd_iters="};
  for (double c : counts) out.detail += std::to_string(static_cast<Index>(c)) + ",";
  out.detail += " spread=" + sci(sp) + " " + gd_detail + " n=" + std::to_string(s.n) + " r=" + std::to_string(s.r) +
                " time=" + sci(elapsed) + "s";
  return out;
}

Outcome step_size_sweep(const Scale& s) {
  ExperimentConfig cfg = base_config(s, Problem::kCompletion, 7);
  cfg.kappas = {10.0};
  cfg.etas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2};
  cfg.max_iters = 300;
  const ExperimentReport r = run_experiment(cfg);
  double gd_best = INFINITY;
  double gd_eta = 0.0;
  for (double eta : cfg.etas) {
    const CellResult& c = find_cell(r, Method::kVanillaGd, 10.0, eta);
    if (c.status != RunStatus::kDiverged && c.status != RunStatus::kFailed && c.final_rel_err < gd_best) {
      gd_best = c.final_rel_err;
      gd_eta = eta;
    }
  }
  int convergent = 0;
  int better = 0;
  std::string diverged;
  for (double eta : cfg.etas) {
    const CellResult& c = find_cell(r, Method::kScaledGd, 10.0, eta);
    if (c.status == RunStatus::kDiverged || c.status == RunStatus::kFailed) {
      diverged += num(eta) + ",";
      continue;
    }
    ++convergent;
    if (c.final_rel_err <= gd_best) ++better;
  }
  return {better >= 10, "scaledgd_better=" + std::to_string(better) + " of " + std::to_string(convergent) +
                            " convergent points; gd_best=" + sci(gd_best) + " at eta=" + num(gd_eta) +
                            "; scaledgd diverged at eta=" + (diverged.empty() ? "none" : diverged)};
}

Outcome noisy_floors(const Scale& s) {
  ExperimentConfig cfg = base_config(s, Problem::kCompletion, 8);
  cfg.methods = {Method::kScaledGd};
  cfg.kappas = {10.0};
  cfg.snr_db = {40.0, 60.0, 80.0};
  cfg.max_iters = 300;
  const ExperimentReport r = run_experiment(cfg);
  std::vector<double> floors, plateau;
  for (double snr : cfg.snr_db) {
    std::vector<double> e = read_rel_err(find_cell(r, Method::kScaledGd, 10.0, 0.5, snr).trace);
    std::vector<double> tail(e.end() - 50, e.end());
    std::nth_element(tail.begin(), tail.begin() + 25, tail.end());
    const double floor = tail[25];
    floors.push_back(floor);
    const auto hit = std::find_if(e.begin(), e.end(), [&](double v) { return v <= 1.1 * floor; });
    plateau.push_back(static_cast<double>(hit - e.begin()));
  }
  const bool ordered = floors[0] > floors[1] && floors[1] > floors[2];
  const double sp = spread(plateau);
  std::string detail = "floors=";
  for (double f : floors) detail += sci(f) + ",";
  detail += " iters_to_plateau=";
  for (double p : plateau) detail += std::to_string(static_cast<Index>(p)) + ",";
  detail += " spread=" + sci(sp);
  return {ordered && sp <= 0.2, detail};
}

Outcome property_suites(const Scale&) { return suite_subset({"threshold.support_containment", "projection.non_expansive"}); }

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome(const Scale&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> selected;
  bool full = false;
  app.add_option("--criterion", selected, "Criterion numbers to run (default: all)")->check(CLI::Range(1, 10));
  app.add_flag("--full", full, "Use n = 100, r = 10 for the figure reproductions (default n = 50, r = 5)");
  CLI11_PARSE(app, argc, argv);

  const Scale scale = full ? Scale{100, 10} : Scale{50, 5};
  const std::vector<Criterion> criteria{
      {1, "algebra oracle equivalence", algebra_oracle},
      {2, "transform identities", transform_identities},
      {3, "norm inequality suite", norm_inequalities},
      {4, "factorization contraction", factorization_contraction},
      {5, "rpca kappa independence", rpca_kappa_independence},
      {6, "completion kappa independence", completion_kappa_independence},
      {7, "step size sweep", step_size_sweep},
      {8, "noisy floors", noisy_floors},
      {9, "support containment and non-expansiveness", property_suites},
  };
  bool all = true;
  for (const auto& c : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    Outcome o;
    try {
      o = c.run(scale);
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    all = all && o.passed;
    std::printf("criterion %d %s: %s | %s\n", c.id, o.passed ? "PASS" : "FAIL", c.title, o.detail.c_str());
    std::fflush(stdout);
  }
  if (selected.empty() || std::find(selected.begin(), selected.end(), 10) != selected.end()) {
    std::printf("criterion 10 SKIP: sample-complexity theory | not reproducible as stated; covered by 4-9\n");
  }
  return all ? 0 : 1;
}
