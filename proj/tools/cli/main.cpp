#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tscaledgd/harness/config.hpp"
#include "tscaledgd/harness/experiment.hpp"
#include "tscaledgd/harness/plot.hpp"
#include "tscaledgd/harness/validate.hpp"
#include "tscaledgd/tscaledgd.hpp"

namespace fs = std::filesystem;
using namespace tsgd;
using namespace tsgd::harness;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kAllDiverged = 2;
constexpr int kValidationFailed = 3;

struct CommonFlags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> transform;
  std::optional<double> eta;
  std::optional<Index> iters;
  bool no_timing = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "Experiment config (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--seed", f.seed, "Overrides the seed list with a single seed");
  cmd->add_option("--transform", f.transform, "dft or dct");
  cmd->add_option("--eta", f.eta, "Overrides the step size list with a single step size");
  cmd->add_option("--iters", f.iters, "Iteration budget")->check(CLI::NonNegativeNumber);
  cmd->add_flag("--no-timing", f.no_timing, "Write zero wall times for reproducible CSVs");
}

ExperimentConfig resolve(const CommonFlags& f, std::optional<Problem> problem) {
  ExperimentConfig cfg = f.config.empty() ? ExperimentConfig{} : load_config(f.config);
  if (problem) cfg.problem = *problem;
  if (!f.out.empty()) cfg.output_dir = f.out;
  if (f.seed) cfg.seeds = {*f.seed};
  if (f.transform) {
    try {
      cfg.transforms = {parse_transform_kind(*f.transform)};
    } catch (const Error& e) {
      throw ConfigError("transform", e.what());
    }
  }
  if (f.eta) cfg.etas = {*f.eta};
  if (f.iters) cfg.max_iters = *f.iters;
  if (f.no_timing) cfg.timing = false;
  cfg.validate();
  return cfg;
}

int run_grid(const ExperimentConfig& cfg) {
  const ExperimentReport report = run_experiment(cfg, &std::cout);
  std::cout << "wrote " << report.cells.size() << " traces and " << report.summary.string() << '\n';
  return report.all_diverged() ? kAllDiverged : kOk;
}

struct UserData {
  std::string input;
  std::string mask;
  Index rank = 0;
  std::string method = "scaledgd";
};

// Solves on a user-supplied tensor and writes the recovered factors.
int run_user(Problem problem, const CommonFlags& f, const UserData& u) {
  if (u.rank < 1) throw ConfigError("rank", "--rank is required with --input");
  const Tensor3 y = read_tsr3(fs::path(u.input));
  const Transform tf = make_transform(f.transform ? parse_transform_kind(*f.transform) : TransformKind::kDft, y.n3());
  ExperimentConfig cfg = f.config.empty() ? ExperimentConfig{} : load_config(f.config);
  SolverParams params;
  params.eta = f.eta.value_or(cfg.etas.front());
  params.max_iters = f.iters.value_or(cfg.max_iters);
  params.rank = u.rank;
  params.rel_tol = cfg.rel_tol;
  params.projection_radius = cfg.varsigma;
  try {
    params.method = parse_method(u.method);
  } catch (const Error& e) {
    throw ConfigError("method", e.what());
  }
  double top = 0.0;
  for (const auto& sv : slice_singular_values(y, tf)) top = std::max(top, sv.size() ? sv(0) : 0.0);
  params.sigma1_hint = top;

  RunResult result;
  switch (problem) {
    case Problem::kRpca:
      result = run_rpca(y, params, cfg.schedule, tf);
      break;
    case Problem::kCompletion: {
      if (u.mask.empty()) throw ConfigError("mask", "--mask is required for completion");
      const Tensor3 m = read_tsr3(fs::path(u.mask));
      if (!m.same_shape(y)) throw ConfigError("mask", "mask shape differs from the input");
      ObservationSet obs{Mask(m.n1(), m.n2(), m.n3()), 1.0};
      for (Index i = 0; i < m.size(); ++i) {
        obs.mask.data()[static_cast<std::size_t>(i)] = m.data()[static_cast<std::size_t>(i)] != 0.0;
      }
      obs.p = static_cast<double>(obs.observed()) / static_cast<double>(m.size());
      result = run_completion(project_observed(y, obs), obs, params, tf);
      break;
    }
    case Problem::kFactorization: {
      const FactorPair f0 = balanced_factors(y, u.rank, tf);
      result = run_factorization(y, params, f0, tf);
      break;
    }
  }

  const fs::path out = f.out.empty() ? fs::path("out") : fs::path(f.out);
  fs::create_directories(out);
  write_tsr3(out / "L.tsr3", result.factors.left);
  write_tsr3(out / "R.tsr3", result.factors.right);
  if (problem == Problem::kRpca) write_tsr3(out / "S.tsr3", result.sparse);
  std::ofstream trace(out / "trace.csv");
  write_trace_csv(trace, {"user", params.method, tf.kind(), 0.0, params.eta, 0}, result.history, !f.no_timing);
  std::cout << to_string(result.history.status) << " misfit=" << result.history.final_rel_err()
            << " iters=" << (result.history.records.empty() ? 0 : result.history.records.back().iter);
  if (!result.history.message.empty()) std::cout << " (" << result.history.message << ")";
  std::cout << "\nwrote factors to " << out.string() << '\n';
  return result.history.status == RunStatus::kDiverged || result.history.status == RunStatus::kFailed
             ? kAllDiverged
             : kOk;
}

// Writes the synthetic instance of every (transform, kappa, snr, seed) group.
int run_gen(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.output_dir);
  std::size_t groups = 0;
  for (TransformKind kind : cfg.transforms) {
    for (double kappa : cfg.kappas) {
      for (double snr : cfg.snr_db) {
        for (std::uint64_t seed : cfg.seeds) {
          const ProblemData data = make_problem_data(cfg, kind, kappa, snr, seed);
          char tag[128];
          std::snprintf(tag, sizeof tag, "%s_k%g_snr%s_s%llu", to_string(kind), kappa,
                        std::isinf(snr) ? "inf" : std::to_string(snr).c_str(),
                        static_cast<unsigned long long>(seed));
          const fs::path dir = cfg.output_dir / tag;
          fs::create_directories(dir);
          write_tsr3(dir / "xstar.tsr3", data.gt.xstar);
          write_tsr3(dir / "lstar.tsr3", data.gt.lstar);
          write_tsr3(dir / "rstar.tsr3", data.gt.rstar);
          write_tsr3(dir / "y.tsr3", data.observed);
          if (cfg.problem == Problem::kRpca) write_tsr3(dir / "sstar.tsr3", data.sparse);
          if (data.obs) {
            Tensor3 m(cfg.n1, cfg.n2, cfg.n3);
            for (Index i = 0; i < m.size(); ++i) {
              m.data()[static_cast<std::size_t>(i)] = data.obs->mask.data()[static_cast<std::size_t>(i)];
            }
            write_tsr3(dir / "mask.tsr3", m);
          }
          ++groups;
        }
      }
    }
  }
  std::cout << "wrote " << groups << " instance(s) under " << cfg.output_dir.string() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tensor ScaledGD: low-tubal-rank recovery experiments"};
  app.require_subcommand(1);

  CommonFlags gen_flags, rpca_flags, comp_flags, fact_flags, sweep_flags;
  UserData rpca_user, comp_user, fact_user;

  auto* gen = app.add_subcommand("gen", "Write synthetic TSR3 tensors for every configured instance");
  add_common(gen, gen_flags);
  std::string gen_problem;
  gen->add_option("--problem", gen_problem, "rpca, completion or factorization");

  auto add_user = [](CLI::App* cmd, UserData& u, bool mask) {
    cmd->add_option("--input", u.input, "Observed tensor (TSR3); solves it instead of the synthetic grid")
        ->check(CLI::ExistingFile);
    cmd->add_option("--rank", u.rank, "Tubal rank for --input");
    cmd->add_option("--method", u.method, "scaledgd or vanillagd for --input");
    if (mask) cmd->add_option("--mask", u.mask, "Observation mask (TSR3, nonzero = observed)")->check(CLI::ExistingFile);
  };

  auto* rpca = app.add_subcommand("rpca", "Robust tensor PCA experiments");
  add_common(rpca, rpca_flags);
  add_user(rpca, rpca_user, false);
  auto* comp = app.add_subcommand("complete", "Tensor completion experiments");
  add_common(comp, comp_flags);
  add_user(comp, comp_user, true);
  auto* fact = app.add_subcommand("factorize", "Tensor factorization experiments");
  add_common(fact, fact_flags);
  add_user(fact, fact_user, false);

  auto* sweep = app.add_subcommand("sweep", "Step-size sweep over the configured eta list");
  add_common(sweep, sweep_flags);
  std::vector<double> sweep_etas;
  sweep->add_option("--etas", sweep_etas, "Step sizes to sweep");

  auto* plot = app.add_subcommand("plot", "Render trace or summary CSVs to SVG");
  std::vector<std::string> plot_inputs;
  std::string plot_kind = "err_vs_iter";
  std::string plot_out = "plot.svg";
  plot->add_option("inputs", plot_inputs, "Trace CSVs (or summary CSVs for err_vs_eta)")
      ->required()
      ->check(CLI::ExistingFile);
  plot->add_option("--kind", plot_kind, "err_vs_iter, err_vs_time or err_vs_eta");
  plot->add_option("--out", plot_out, "Output SVG file");

  auto* val = app.add_subcommand("validate", "Run the cross-module invariant suite");
  ValidateOptions vopt;
  std::string phi_path;
  val->add_option("--seed", vopt.seed, "Seed for the random instances");
  val->add_option("--trials", vopt.trials, "Random instances per check")->check(CLI::PositiveNumber);
  val->add_option("--phi", phi_path, "Also validate a custom transform matrix")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (gen->parsed()) {
      std::optional<Problem> p;
      if (!gen_problem.empty()) p = parse_problem(gen_problem);
      return run_gen(resolve(gen_flags, p));
    }
    if (rpca->parsed()) {
      if (!rpca_user.input.empty()) return run_user(Problem::kRpca, rpca_flags, rpca_user);
      return run_grid(resolve(rpca_flags, Problem::kRpca));
    }
    if (comp->parsed()) {
      if (!comp_user.input.empty()) return run_user(Problem::kCompletion, comp_flags, comp_user);
      return run_grid(resolve(comp_flags, Problem::kCompletion));
    }
    if (fact->parsed()) {
      if (!fact_user.input.empty()) return run_user(Problem::kFactorization, fact_flags, fact_user);
      return run_grid(resolve(fact_flags, Problem::kFactorization));
    }
    if (sweep->parsed()) {
      ExperimentConfig cfg = resolve(sweep_flags, std::nullopt);
      if (!sweep_etas.empty()) cfg.etas = sweep_etas;
      cfg.validate();
      return run_grid(cfg);
    }
    if (plot->parsed()) {
      std::vector<fs::path> files(plot_inputs.begin(), plot_inputs.end());
      const std::size_t curves = emit_plot(files, parse_plot_kind(plot_kind), plot_out);
      std::cout << "wrote " << plot_out << " (" << curves << " curves)\n";
      return kOk;
    }
    if (val->parsed()) {
      if (!phi_path.empty()) vopt.custom_phi = read_phi(phi_path);
      const ValidationReport report = validate_suite(vopt);
      print_report(std::cout, report);
      return report.passed() ? kOk : kValidationFailed;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kOk;
}
