#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tscaledgd/harness/config.hpp"
#include "tscaledgd/metrics.hpp"
#include "tscaledgd/solvers.hpp"

namespace tsgd::harness {

/// Synthetic instance for one (transform, kappa, snr, seed) group.
struct ProblemData {
  GroundTruth gt;
  Tensor3 observed;                   // Y for RPCA, P_Omega(X* + W) for completion, X* + W for factorization
  Tensor3 sparse;                     // S* (RPCA only)
  std::optional<ObservationSet> obs;  // completion only
};

/// Independent stream seed for one generator inside a group.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

ProblemData make_problem_data(const ExperimentConfig& cfg, TransformKind kind, double kappa,
                              double snr_db, std::uint64_t seed);

struct CellResult {
  std::string run_id;
  Method method = Method::kScaledGd;
  TransformKind transform = TransformKind::kDft;
  double kappa = 1.0;
  double eta = 0.5;
  double snr_db = kNoNoise;
  std::uint64_t seed = 0;
  RunStatus status = RunStatus::kMaxIters;
  std::string message;
  Index iterations = 0;
  double final_rel_err = 0.0;
  std::optional<Index> iters_to_1e8;
  std::optional<Index> iters_to_1e10;
  double wall_time_s = 0.0;
  std::filesystem::path trace;
};

struct ExperimentReport {
  std::vector<CellResult> cells;  // sorted by run_id
  std::filesystem::path summary;

  /// True when every cell ended Diverged or Failed.
  bool all_diverged() const;
};

/// Runs every cell, writing <output_dir>/traces/<run_id>.csv and
/// <output_dir>/summary.csv. Methods within a group share data and the
/// spectral initialization. Progress lines go to `log` when non-null.
ExperimentReport run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr);

struct TraceMeta {
  std::string run_id;
  Method method = Method::kScaledGd;
  TransformKind transform = TransformKind::kDft;
  double kappa = 1.0;
  double eta = 0.5;
  std::uint64_t seed = 0;
};

inline constexpr const char* kTraceHeader = "run_id,method,transform,kappa,eta,seed,iter,rel_err,dist,wall_time_s";

void write_trace_csv(std::ostream& out, const TraceMeta& meta, const RunHistory& history, bool timing);
void write_summary_csv(std::ostream& out, Problem problem, const std::vector<CellResult>& cells);

}  // namespace tsgd::harness
