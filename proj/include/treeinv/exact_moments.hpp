#pragma once

#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include "treeinv/tree.hpp"

namespace treeinv {

using BigRational = boost::multiprecision::cpp_rational;

/// Bernoulli number B_k with B_1 = -1/2. Memoized and thread-safe.
BigRational bernoulli(int k);

/// Cumulants of the inversion count of a fixed tree under a uniform labeling.
struct CumulantTable {
  std::string tree_id;
  int max_order = 0;
  std::size_t n = 0;
  std::vector<BigRational> kappa;  // kappa[k-1] = k-th cumulant
  std::vector<BigInt> upsilon;     // upsilon[k-1] = sum_v z_v^k
};

CumulantTable cumulants(const TreeProfile& p, int max_order, std::string tree_id = {});
CumulantTable cumulants(const Tree& t, int max_order, std::string tree_id = {});

/// Central moments mu_0..mu_K from the cumulants (first cumulant dropped).
std::vector<BigRational> central_moments(const CumulantTable& ct, int K);

/// log E exp(theta I) from the product formula, evaluated node by node in log space.
double log_mgf(std::span<const std::int64_t> subtree_sizes, double theta);
double log_mgf(const Tree& t, double theta);

/// log E exp(theta (I - E I)); exactly even in theta.
double centered_log_mgf(std::span<const std::int64_t> subtree_sizes, double theta);
double centered_log_mgf(const Tree& t, double theta);

struct MgfBound {
  double lhs = 0;        // centered log-MGF
  double rhs = 0;        // theta^2 * Upsilon_2 / 8
  double rhs_tight = 0;  // theta^2 * sum (z_v - 1)^2 / 8, the Hoeffding form per node
  bool holds() const { return lhs <= rhs; }
};
MgfBound mgf_bound_check(const Tree& t, double theta);

/// "num/den" (or "num" for integers).
std::string rational_string(const BigRational& q);

/// {"upsilon":["..."],"kappa":[["num","den"],...], ...}
nlohmann::json cumulants_to_json(const CumulantTable& ct);

}  // namespace treeinv
