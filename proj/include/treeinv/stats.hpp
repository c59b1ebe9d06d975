#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace treeinv {

/// Draws of one statistic together with the configuration that produced them.
struct SampleSet {
  std::string statistic;
  std::uint64_t seed = 0;
  std::string params_hash;
  nlohmann::json config = nlohmann::json::object();
  std::vector<double> values;

  std::size_t reps() const { return values.size(); }
  /// Throws std::invalid_argument if any value is not finite.
  void validate() const;
};

struct Estimate {
  double value = 0;
  double se = 0;
};

/// Unbiased k-statistics k_1..k_order (order <= 4) with jackknife standard errors over
/// `blocks` contiguous blocks. Requires at least 10 values.
std::vector<Estimate> k_statistics(std::span<const double> x, int order = 4, int blocks = 100);

/// k_1..k_4 without error bars.
std::array<double, 4> k_statistics_point(std::span<const double> x);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_distance(std::span<const double> a, std::span<const double> b);

/// L2 distance of the quantile coupling of the two empirical laws. For equal sizes this
/// is the root-mean-square difference of the order statistics.
double d2_estimate(std::span<const double> a, std::span<const double> b);

struct ChiSquare {
  double statistic = 0;
  int dof = 0;
  double p_value = 1;
};

/// Two-sample test that two count vectors over the same categories share a law.
ChiSquare chi_square_two_sample(const std::map<std::int64_t, std::int64_t>& a,
                                const std::map<std::int64_t, std::int64_t>& b);

/// Goodness of fit of observed counts against category probabilities.
ChiSquare chi_square_fit(const std::map<std::int64_t, std::int64_t>& observed,
                         const std::map<std::int64_t, double>& probs);

template <class Range>
std::map<std::int64_t, std::int64_t> tally(const Range& values) {
  std::map<std::int64_t, std::int64_t> counts;
  for (const auto v : values) ++counts[static_cast<std::int64_t>(v)];
  return counts;
}

double mean(std::span<const double> x);
double variance(std::span<const double> x);  // unbiased

struct ReportRow {
  std::string metric;
  double empirical = 0;
  std::optional<double> target;
  std::string provenance;  // where the target comes from ("exact", "sample b", ...)
  std::optional<double> z;
};

/// Empirical-versus-target comparison.
struct MomentReport {
  std::vector<ReportRow> rows;
  std::optional<double> ks;
  std::optional<double> d2;

  nlohmann::json to_json() const;
  /// metric,empirical,target,provenance,z
  std::string to_csv() const;
};

/// Compares two samples: k-statistics of `a` against those of `b` (z uses both SEs),
/// plus KS and d2.
MomentReport compare_samples(const SampleSet& a, const SampleSet& b);

/// k-statistics of a sample against known target cumulants (missing entries are skipped).
MomentReport report_against(const SampleSet& a, const std::vector<std::optional<double>>& targets,
                            const std::string& provenance);

}  // namespace treeinv
