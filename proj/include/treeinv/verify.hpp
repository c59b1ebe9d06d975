#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace treeinv {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;  // measured values next to their thresholds
  double seconds = 0;
};

/// Suite names accepted by run_suite: the eight criteria by name or number, and "all".
std::vector<std::string> suite_names();

/// Runs a suite with fixed seeds derived from `seed`. Throws std::invalid_argument for an
/// unknown suite name.
std::vector<CriterionResult> run_suite(const std::string& name, std::uint64_t seed = 20240917,
                                       unsigned threads = 0);

/// 3 E[(1 + D)^2] for the binary search tree split, by numerical quadrature; the variance
/// of the W coordinate of its fixed point.
double bst_w_variance_quadrature();

/// Output of a fixed set of stochastic runs, serialized exactly as the CLI writes it.
/// Must not depend on `threads`.
std::string reproducibility_bundle(std::uint64_t seed, unsigned threads);

/// One line per criterion: "[PASS] 3 complete-limit: ...".
std::string format_result(const CriterionResult& r);

}  // namespace treeinv
