#include "treeinv/exact_moments.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace treeinv {

namespace {

BigInt binomial(int n, int k) {
  BigInt r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Grouped multiplicities of the sizes z > 1; nodes with z = 1 contribute nothing.
std::vector<std::pair<std::int64_t, std::int64_t>> size_groups(std::span<const std::int64_t> sizes) {
  std::vector<std::int64_t> s;
  s.reserve(sizes.size());
  for (const auto z : sizes)
    if (z > 1) s.push_back(z);
  std::sort(s.begin(), s.end());
  std::vector<std::pair<std::int64_t, std::int64_t>> groups;
  for (const auto z : s) {
    if (!groups.empty() && groups.back().first == z)
      ++groups.back().second;
    else
      groups.emplace_back(z, 1);
  }
  return groups;
}

// log((e^{z t} - 1) / (z (e^t - 1))) - (z - 1) t / 2 for t = |theta| > 0.
// The expression is even in theta, so only |theta| is used.
double centered_node_term(std::int64_t z, double t) {
  const auto zd = static_cast<double>(z);
  return (zd - 1) * t / 2 + std::log(-std::expm1(-zd * t)) - std::log(-std::expm1(-t)) - std::log(zd);
}

}  // namespace

BigRational bernoulli(int k) {
  if (k < 0) throw std::invalid_argument("bernoulli: k must be >= 0");
  static std::mutex mutex;
  static std::vector<BigRational> table{BigRational(1)};
  std::lock_guard lock(mutex);
  while (static_cast<int>(table.size()) <= k) {
    const int m = static_cast<int>(table.size());
    // sum_{j=0}^{m} C(m+1, j) B_j = 0
    BigRational acc = 0;
    for (int j = 0; j < m; ++j) acc += BigRational(binomial(m + 1, j)) * table[static_cast<std::size_t>(j)];
    table.push_back(-acc / (m + 1));
  }
  return table[static_cast<std::size_t>(k)];
}

CumulantTable cumulants(const TreeProfile& p, int max_order, std::string tree_id) {
  if (max_order < 1) throw std::invalid_argument("cumulants: max order must be >= 1");
  CumulantTable ct;
  ct.tree_id = std::move(tree_id);
  ct.max_order = max_order;
  ct.n = p.subtree_size.size();
  const BigInt n(static_cast<std::int64_t>(ct.n));
  for (int k = 1; k <= max_order; ++k) {
    BigInt u = upsilon(p, k);
    if (k == 1) {
      ct.kappa.push_back(BigRational(u - n, 2));
    } else {
      BigRational c = bernoulli(k) / k * BigRational(u - n);
      if (k % 2 == 1) c = -c;  // zero anyway: odd Bernoulli numbers vanish past B_1
      ct.kappa.push_back(c);
    }
    ct.upsilon.push_back(std::move(u));
  }
  return ct;
}

CumulantTable cumulants(const Tree& t, int max_order, std::string tree_id) {
  return cumulants(profile(t), max_order, std::move(tree_id));
}

std::vector<BigRational> central_moments(const CumulantTable& ct, int K) {
  if (K < 0 || K > ct.max_order) throw std::invalid_argument("central_moments: order exceeds the cumulant table");
  std::vector<BigRational> mu(static_cast<std::size_t>(K) + 1);
  mu[0] = 1;
  for (int m = 1; m <= K; ++m) {
    BigRational acc = 0;
    for (int j = 2; j <= m; ++j)
      acc += BigRational(binomial(m - 1, j - 1)) * ct.kappa[static_cast<std::size_t>(j - 1)] *
             mu[static_cast<std::size_t>(m - j)];
    mu[static_cast<std::size_t>(m)] = acc;
  }
  return mu;
}

double centered_log_mgf(std::span<const std::int64_t> subtree_sizes, double theta) {
  if (!std::isfinite(theta)) throw std::invalid_argument("log_mgf: theta must be finite");
  if (theta == 0) return 0;
  const double t = std::abs(theta);
  double sum = 0;
  for (const auto& [z, count] : size_groups(subtree_sizes)) sum += static_cast<double>(count) * centered_node_term(z, t);
  return sum;
}

double log_mgf(std::span<const std::int64_t> subtree_sizes, double theta) {
  if (theta == 0) return 0;
  double half_mean = 0;
  for (const auto z : subtree_sizes) half_mean += static_cast<double>(z - 1);
  return centered_log_mgf(subtree_sizes, theta) + theta * half_mean / 2;
}

double log_mgf(const Tree& t, double theta) { return log_mgf(profile(t).subtree_size, theta); }

double centered_log_mgf(const Tree& t, double theta) {
  return centered_log_mgf(profile(t).subtree_size, theta);
}

MgfBound mgf_bound_check(const Tree& t, double theta) {
  const TreeProfile p = profile(t);
  MgfBound b;
  b.lhs = centered_log_mgf(p.subtree_size, theta);
  double u2 = 0, tight = 0;
  for (const auto z : p.subtree_size) {
    const auto zd = static_cast<double>(z);
    u2 += zd * zd;
    tight += (zd - 1) * (zd - 1);
  }
  b.rhs = theta * theta * u2 / 8;
  b.rhs_tight = theta * theta * tight / 8;
  return b;
}

std::string rational_string(const BigRational& q) {
  const BigInt num = boost::multiprecision::numerator(q);
  const BigInt den = boost::multiprecision::denominator(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

nlohmann::json cumulants_to_json(const CumulantTable& ct) {
  nlohmann::json j;
  if (!ct.tree_id.empty()) j["tree_id"] = ct.tree_id;
  j["n"] = ct.n;
  j["max_order"] = ct.max_order;
  auto& up = j["upsilon"] = nlohmann::json::array();
  for (const auto& u : ct.upsilon) up.push_back(u.str());
  auto& kap = j["kappa"] = nlohmann::json::array();
  for (const auto& k : ct.kappa)
    kap.push_back({boost::multiprecision::numerator(k).str(), boost::multiprecision::denominator(k).str()});
  return j;
}

}  // namespace treeinv
