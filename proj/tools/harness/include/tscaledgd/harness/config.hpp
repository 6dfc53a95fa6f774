#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tscaledgd/solvers.hpp"
#include "tscaledgd/synth.hpp"
#include "tscaledgd/transform.hpp"

namespace tsgd::harness {

enum class Problem { kRpca, kCompletion, kFactorization };

const char* to_string(Problem p) noexcept;
Problem parse_problem(std::string_view name);

/// Invalid configuration; `path()` names the offending field, e.g. "schedule.rho".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// One experiment grid. Cells are the product of transforms, kappas, SNRs,
/// seeds, step sizes and methods.
struct ExperimentConfig {
  Problem problem = Problem::kRpca;
  std::vector<Method> methods{Method::kScaledGd, Method::kVanillaGd};
  Index n1 = 100;
  Index n2 = 100;
  Index n3 = 100;
  Index rank = 10;
  std::vector<TransformKind> transforms{TransformKind::kDft};
  std::vector<double> kappas{1.0, 5.0, 10.0, 20.0};
  double alpha = 0.1;
  double p = 0.4;
  std::vector<double> snr_db{kNoNoise};
  std::vector<double> etas{0.5};
  Index max_iters = 150;
  double rel_tol = 0.0;
  ThresholdSchedule schedule;
  std::optional<double> varsigma;
  double init_radius = 0.05;  // factorization: ||F0 - F*||_F / ||L*||_F per factor
  std::vector<std::uint64_t> seeds{1};
  std::filesystem::path output_dir = "out";
  bool timing = true;

  /// Throws ConfigError for the first invalid field.
  void validate() const;
};

/// Parses a JSON document. Unknown keys are rejected.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace tsgd::harness
