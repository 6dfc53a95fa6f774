#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace tsgd::harness {

/// A check passes when measured <= bound.
struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double bound = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool passed() const;
};

struct ValidateOptions {
  std::uint64_t seed = 7;
  int trials = 20;
  std::optional<Eigen::MatrixXcd> custom_phi;
};

/// Cross-module invariants on seeded random instances: transform round trips
/// and Parseval, t-SVD reconstruction and orthogonality, the norm
/// inequalities for t-products and sparse tensors, the distance bound,
/// scaled-projection incoherence and non-expansiveness, and soft-threshold
/// support containment.
ValidationReport validate_suite(const ValidateOptions& options = {});

void print_report(std::ostream& out, const ValidationReport& report);

/// Whitespace-separated rows of a square matrix; entries are real numbers or
/// "(re,im)".
Eigen::MatrixXcd read_phi(const std::filesystem::path& path);

}  // namespace tsgd::harness
