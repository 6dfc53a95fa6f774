#include "tscaledgd/harness/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "tscaledgd/synth.hpp"

namespace tsgd::harness {

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string snr_label(double snr) { return std::isinf(snr) ? "inf" : fmt("%g", snr); }

std::string make_run_id(Problem problem, TransformKind kind, double kappa, double snr, std::uint64_t seed,
                        double eta, Method method) {
  return std::string(to_string(problem)) + "_" + to_string(kind) + "_k" + fmt("%g", kappa) + "_snr" +
         snr_label(snr) + "_s" + std::to_string(seed) + "_eta" + fmt("%g", eta) + "_" + to_string(method);
}

struct SharedInit {
  std::optional<RpcaInit> rpca;
  std::optional<FactorPair> factors;
};

SharedInit make_init(const ExperimentConfig& cfg, const ProblemData& data, std::uint64_t seed) {
  const Transform& tf = data.gt.transform;
  SharedInit init;
  switch (cfg.problem) {
    case Problem::kRpca:
      init.rpca = spectral_init_rpca(data.observed, cfg.rank, cfg.schedule.zeta0, tf);
      break;
    case Problem::kCompletion:
      init.factors = spectral_init_completion(data.observed, *data.obs, cfg.rank, cfg.varsigma, tf);
      break;
    case Problem::kFactorization:
      init.factors = perturb_factors(data.gt, cfg.init_radius, derive_seed(seed, 5));
      break;
  }
  return init;
}

RunResult run_cell(const ExperimentConfig& cfg, const ProblemData& data, const SharedInit& init,
                   const SolverParams& params) {
  const Transform& tf = data.gt.transform;
  switch (cfg.problem) {
    case Problem::kRpca:
      return run_rpca(data.observed, params, cfg.schedule, tf, &data.gt, &*init.rpca);
    case Problem::kCompletion:
      return run_completion(data.observed, *data.obs, params, tf, &data.gt, &*init.factors);
    case Problem::kFactorization:
      return run_factorization(data.observed, params, *init.factors, tf, &data.gt);
  }
  throw Error(Errc::kInvalidArgument, "unknown problem");
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  // splitmix64 finalizer over (seed, stream)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

ProblemData make_problem_data(const ExperimentConfig& cfg, TransformKind kind, double kappa,
                              double snr_db, std::uint64_t seed) {
  const Transform tf = make_transform(kind, cfg.n3);
  GroundTruth gt = gen_ground_truth(cfg.n1, cfg.n2, cfg.n3, cfg.rank, kappa, tf, derive_seed(seed, 1));
  Tensor3 noisy = add_gaussian_noise(gt.xstar, snr_db, derive_seed(seed, 4));
  ProblemData data{std::move(gt), {}, {}, std::nullopt};
  switch (cfg.problem) {
    case Problem::kRpca:
      data.sparse = gen_sparse_corruption(data.gt.xstar, cfg.alpha, derive_seed(seed, 2));
      data.observed = noisy + data.sparse;
      break;
    case Problem::kCompletion:
      data.obs = gen_bernoulli_mask(cfg.n1, cfg.n2, cfg.n3, cfg.p, derive_seed(seed, 3));
      data.observed = project_observed(noisy, *data.obs);
      break;
    case Problem::kFactorization:
      data.observed = std::move(noisy);
      break;
  }
  return data;
}

bool ExperimentReport::all_diverged() const {
  return !cells.empty() && std::all_of(cells.begin(), cells.end(), [](const CellResult& c) {
    return c.status == RunStatus::kDiverged || c.status == RunStatus::kFailed;
  });
}

void write_trace_csv(std::ostream& out, const TraceMeta& meta, const RunHistory& history, bool timing) {
  out << kTraceHeader << '\n';
  const std::string prefix = meta.run_id + "," + to_string(meta.method) + "," + to_string(meta.transform) + "," +
                             fmt("%g", meta.kappa) + "," + fmt("%g", meta.eta) + "," + std::to_string(meta.seed) + ",";
  for (const auto& rec : history.records) {
    out << prefix << rec.iter << ',' << fmt("%.12e", rec.rel_err) << ',';
    if (rec.dist) out << fmt("%.12e", *rec.dist);
    out << ',' << fmt("%.6f", timing ? rec.wall_time_s : 0.0) << '\n';
  }
}

void write_summary_csv(std::ostream& out, Problem problem, const std::vector<CellResult>& cells) {
  out << "run_id,problem,method,transform,kappa,eta,snr_db,seed,status,iterations,final_rel_err,"
         "iters_to_1e-8,iters_to_1e-10,wall_time_s\n";
  for (const auto& c : cells) {
    out << c.run_id << ',' << to_string(problem) << ',' << to_string(c.method) << ',' << to_string(c.transform) << ','
        << fmt("%g", c.kappa) << ',' << fmt("%g", c.eta) << ',' << snr_label(c.snr_db) << ',' << c.seed << ','
        << to_string(c.status) << ',' << c.iterations << ',' << fmt("%.12e", c.final_rel_err) << ',';
    if (c.iters_to_1e8) out << *c.iters_to_1e8;
    out << ',';
    if (c.iters_to_1e10) out << *c.iters_to_1e10;
    out << ',' << fmt("%.6f", c.wall_time_s) << '\n';
  }
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, std::ostream* log) {
  cfg.validate();
  const auto trace_dir = cfg.output_dir / "traces";
  std::filesystem::create_directories(trace_dir);

  ExperimentReport report;
  for (TransformKind kind : cfg.transforms) {
    for (double kappa : cfg.kappas) {
      for (double snr : cfg.snr_db) {
        for (std::uint64_t seed : cfg.seeds) {
          std::optional<ProblemData> data;
          SharedInit init;
          std::string group_error;
          try {
            data = make_problem_data(cfg, kind, kappa, snr, seed);
            init = make_init(cfg, *data, seed);
          } catch (const Error& e) {
            group_error = std::string("setup: ") + e.what();
          }
          for (double eta : cfg.etas) {
            for (Method method : cfg.methods) {
              CellResult cell;
              cell.run_id = make_run_id(cfg.problem, kind, kappa, snr, seed, eta, method);
              cell.method = method;
              cell.transform = kind;
              cell.kappa = kappa;
              cell.eta = eta;
              cell.snr_db = snr;
              cell.seed = seed;
              RunHistory history;
              if (group_error.empty()) {
                SolverParams params;
                params.eta = eta;
                params.max_iters = cfg.max_iters;
                params.rank = cfg.rank;
                params.rel_tol = cfg.rel_tol;
                params.method = method;
                params.sigma1_hint = singular_extremes(data->gt).sigma_max;
                params.projection_radius = cfg.varsigma;
                history = run_cell(cfg, *data, init, params).history;
              } else {
                history.status = RunStatus::kFailed;
                history.message = group_error;
              }
              cell.status = history.status;
              cell.message = history.message;
              cell.iterations = history.records.empty() ? 0 : history.records.back().iter;
              cell.final_rel_err = history.final_rel_err();
              cell.iters_to_1e8 = history.iterations_to(1e-8);
              cell.iters_to_1e10 = history.iterations_to(1e-10);
              cell.wall_time_s = cfg.timing && !history.records.empty() ? history.records.back().wall_time_s : 0.0;
              cell.trace = trace_dir / (cell.run_id + ".csv");
              std::ofstream out(cell.trace);
              if (!out) throw Error(Errc::kIoError, "cannot write " + cell.trace.string());
              write_trace_csv(out, {cell.run_id, method, kind, kappa, eta, seed}, history, cfg.timing);
              if (log) {
                *log << cell.run_id << ": " << to_string(cell.status) << " rel_err=" << fmt("%.3e", cell.final_rel_err)
                     << " iters=" << cell.iterations;
                if (!cell.message.empty()) *log << " (" << cell.message << ")";
                *log << '\n';
              }
              report.cells.push_back(std::move(cell));
            }
          }
        }
      }
    }
  }
  std::sort(report.cells.begin(), report.cells.end(),
            [](const CellResult& a, const CellResult& b) { return a.run_id < b.run_id; });
  report.summary = cfg.output_dir / "summary.csv";
  std::ofstream out(report.summary);
  if (!out) throw Error(Errc::kIoError, "cannot write " + report.summary.string());
  write_summary_csv(out, cfg.problem, report.cells);
  return report;
}

}  // namespace tsgd::harness
