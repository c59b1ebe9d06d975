#include "treeinv/gw_snake.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/random/normal_distribution.hpp>

#include "treeinv/parallel.hpp"

namespace treeinv {

GwObservation observe_gw_tree(const Tree& t, Rng& rng) {
  const TreeProfile p = profile(t);
  GwObservation o;
  o.n = static_cast<std::int64_t>(t.size());
  long double J = 0;
  for (std::size_t v = 0; v < t.size(); ++v) {
    const double u = rng.uniform();
    const std::int64_t z = p.subtree_size[v];
    o.tpl += z - 1;
    o.inv += static_cast<std::int64_t>(u * static_cast<double>(z));
    if (static_cast<NodeId>(v) != t.root()) J += static_cast<long double>(u - 0.5) * z;
  }
  o.J = static_cast<double>(J);
  return o;
}

GwObservation observe_gw(const OffspringLaw& law, std::int64_t n, Rng& rng) {
  const Tree t = gen_cgw_tree(law, n, rng);
  return observe_gw_tree(t, rng);
}

SnakePath build_snake(const Tree& t, Rng& rng) {
  const std::size_t n = t.size();
  const TreeProfile p = profile(t);
  SnakePath s;
  s.q.resize(n);
  long double J = 0;
  for (std::size_t v = 0; v < n; ++v) {
    const double u = rng.uniform();
    s.q[v] = static_cast<NodeId>(v) == t.root() ? 0.0 : u - 0.5;
    J += static_cast<long double>(s.q[v]) * p.subtree_size[v];
  }
  s.J = static_cast<double>(J);

  std::vector<double> phi(n, 0.0);
  for (const NodeId v : t.dfs_order()) {
    const NodeId par = t.parent(v);
    if (par != kNoParent) phi[static_cast<std::size_t>(v)] = phi[static_cast<std::size_t>(par)] + s.q[static_cast<std::size_t>(v)];
  }

  s.tour.reserve(2 * n - 1);
  s.visit.reserve(2 * n - 1);
  auto record = [&](NodeId v) {
    s.visit.push_back(v);
    s.tour.push_back(p.depth[static_cast<std::size_t>(v)]);
    s.snake.push_back(phi[static_cast<std::size_t>(v)]);
  };
  std::vector<std::pair<NodeId, std::size_t>> stack{{t.root(), 0}};
  record(t.root());
  while (!stack.empty()) {
    auto& [v, next] = stack.back();
    const auto kids = t.children(v);
    if (next < kids.size()) {
      const NodeId c = kids[next++];
      record(c);
      stack.emplace_back(c, 0);
    } else {
      stack.pop_back();
      if (!stack.empty()) record(stack.back().first);
    }
  }
  return s;
}

double snake_integral(const SnakePath& s) {
  long double total = 0;
  for (std::size_t i = 0; i + 1 < s.tour.size(); ++i)
    total += s.tour[i] > s.tour[i + 1] ? s.snake[i] : s.snake[i + 1];
  return static_cast<double>(total);
}

std::vector<double> sample_excursion(std::size_t m, Rng& rng) {
  if (m < 2) throw std::invalid_argument("excursion grid needs m >= 2");
  boost::random::normal_distribution<double> normal;
  const double step = 1 / std::sqrt(static_cast<double>(m));
  std::vector<double> walk(m + 1);
  walk[0] = 0;
  for (std::size_t j = 1; j <= m; ++j) walk[j] = walk[j - 1] + step * normal(rng.engine());
  const double end = walk[m];
  std::size_t argmin = 0;
  for (std::size_t j = 0; j < m; ++j) {
    walk[j] -= end * static_cast<double>(j) / static_cast<double>(m);
    if (walk[j] < walk[argmin]) argmin = j;
  }
  std::vector<double> e(m + 1);
  for (std::size_t j = 0; j < m; ++j) e[j] = walk[(argmin + j) % m] - walk[argmin];
  e[m] = 0;
  return e;
}

namespace {

std::size_t grid_size(std::span<const double> e) {
  if (e.size() < 2) throw std::invalid_argument("eta: grid needs at least two points");
  return e.size() - 1;
}

}  // namespace

double eta_of_excursion(std::span<const double> e) {
  const std::size_t m = grid_size(e);
  // e_i is the minimum of the ranges [l, r] with prev-strictly-smaller < l <= i and
  // i <= r < next-smaller-or-equal; ties go to the rightmost minimum.
  std::vector<std::size_t> left(m), stack;
  stack.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    while (!stack.empty() && e[stack.back()] >= e[i]) stack.pop_back();
    left[i] = stack.empty() ? i + 1 : i - stack.back();
    stack.push_back(i);
  }
  stack.clear();
  long double S = 0, diag = 0;
  for (std::size_t i = m; i-- > 0;) {
    while (!stack.empty() && e[stack.back()] > e[i]) stack.pop_back();
    const std::size_t right = stack.empty() ? m - i : stack.back() - i;
    stack.push_back(i);
    S += static_cast<long double>(e[i]) * left[i] * right;
    diag += e[i];
  }
  const auto md = static_cast<long double>(m);
  return static_cast<double>(2 * (2 * S - diag) / (md * md));
}

double eta_double_loop(std::span<const double> e) {
  const std::size_t m = grid_size(e);
  long double S = 0, diag = 0;
  for (std::size_t i = 0; i < m; ++i) {
    double low = e[i];
    diag += e[i];
    for (std::size_t j = i; j < m; ++j) {
      low = std::min(low, e[j]);
      S += low;
    }
  }
  const auto md = static_cast<long double>(m);
  return static_cast<double>(2 * (2 * S - diag) / (md * md));
}

ExcursionDraws sample_excursion_functionals(double sigma, std::size_t m, std::size_t reps, std::uint64_t seed,
                                            unsigned threads) {
  if (!(sigma > 0)) throw std::invalid_argument("sigma must be positive");
  if (reps < 1) throw std::invalid_argument("reps must be >= 1");
  ExcursionDraws out;
  out.eta.resize(reps);
  out.y.resize(reps);
  const double scale = 1 / std::sqrt(12 * sigma);
  parallel_for(reps, threads, [&](std::size_t i) {
    Rng rng = Rng::stream(seed, i);
    const auto e = sample_excursion(m, rng);
    const double eta = eta_of_excursion(e);
    boost::random::normal_distribution<double> normal;
    out.eta[i] = eta;
    out.y[i] = std::sqrt(eta) * normal(rng.engine()) * scale;
  });
  return out;
}

SampleSet sample_Y_limit(double sigma, std::size_t m, std::size_t reps, std::uint64_t seed, unsigned threads) {
  SampleSet s;
  s.statistic = "y_limit";
  s.seed = seed;
  s.config = {{"emit", "ylimit"}, {"sigma", sigma}, {"m", m}, {"reps", reps}, {"seed", seed}};
  s.values = sample_excursion_functionals(sigma, m, reps, seed, threads).y;
  return s;
}

SampleSet sample_eta(std::size_t m, std::size_t reps, std::uint64_t seed, unsigned threads) {
  SampleSet s;
  s.statistic = "eta";
  s.seed = seed;
  s.config = {{"emit", "eta"}, {"m", m}, {"reps", reps}, {"seed", seed}};
  s.values = sample_excursion_functionals(1.0, m, reps, seed, threads).eta;
  return s;
}

std::vector<BigInt> y_moment_coefficients(int k_max) {
  if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
  std::vector<BigInt> a(static_cast<std::size_t>(k_max) + 1, 0);
  a[1] = 1;
  for (int k = 2; k <= k_max; ++k) {
    BigInt v = BigInt(2) * (5 * k - 4) * (5 * k - 6) * a[static_cast<std::size_t>(k - 1)];
    for (int i = 1; i < k; ++i) v += a[static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(k - i)];
    a[static_cast<std::size_t>(k)] = v;
  }
  return a;
}

std::vector<double> exact_Y_moments(double sigma, int k_max) {
  if (!(sigma > 0)) throw std::invalid_argument("sigma must be positive");
  if (k_max > 40) throw std::invalid_argument("k_max must be <= 40");
  const auto a = y_moment_coefficients(k_max);
  const long double sqrt_pi = std::sqrt(std::numbers::pi_v<long double>);
  std::vector<double> out;
  for (int k = 1; k <= k_max; ++k) {
    // Gamma((5k-1)/2) at an integer or half-integer argument, as an exact product
    long double gamma = 1;
    if ((5 * k - 1) % 2 == 0) {
      for (int i = 2; i < (5 * k - 1) / 2; ++i) gamma *= i;
    } else {
      gamma = sqrt_pi;
      for (int i = 1; i <= (5 * k - 2) / 2; ++i) gamma *= i - 0.5L;
    }
    long double fact = 1;
    for (int i = 2; i <= 2 * k; ++i) fact *= i;
    const long double ak = static_cast<long double>(a[static_cast<std::size_t>(k)]);
    const long double v = fact * sqrt_pi * ak / (std::pow(2.0L, (9.0L * k - 4) / 2) * gamma) /
                          std::pow(12.0L * sigma, static_cast<long double>(k));
    out.push_back(static_cast<double>(v));
  }
  return out;
}

SampleSet y_n_statistic(const OffspringLaw& law, std::int64_t n, std::size_t reps, std::uint64_t seed,
                        unsigned threads) {
  if (reps < 1) throw std::invalid_argument("reps must be >= 1");
  if (!law.size_reachable(n))
    throw std::invalid_argument("size " + std::to_string(n) + " is unreachable under offspring law " + law.name());
  SampleSet s;
  s.statistic = "y_n";
  s.seed = seed;
  s.config = {{"emit", "yn"}, {"law", law.name()}, {"n", n}, {"reps", reps}, {"seed", seed}};
  s.values.resize(reps);
  const double scale = std::pow(static_cast<double>(n), -1.25);
  parallel_for(reps, threads, [&](std::size_t i) {
    Rng rng = Rng::stream(seed, i);
    const Tree t = gen_cgw_tree(law, n, rng);
    const TreeProfile p = profile(t);
    std::int64_t inv = 0, tpl = 0;
    for (const auto z : p.subtree_size) {
      tpl += z - 1;
      if (z > 1) inv += static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(z)));
    }
    s.values[i] = (static_cast<double>(inv) - static_cast<double>(tpl) / 2) * scale;
  });
  return s;
}

}  // namespace treeinv
