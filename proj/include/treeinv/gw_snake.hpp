#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "treeinv/exact_moments.hpp"
#include "treeinv/rng.hpp"
#include "treeinv/stats.hpp"
#include "treeinv/tree.hpp"
#include "treeinv/tree_gen.hpp"

namespace treeinv {

/// J(T) = sum_u Q_u z_u with Q_u uniform on (-1/2, 1/2) and Q_root = 0, together with
/// the coupled inversion draw Z_v = floor((Q_v + 1/2) z_v) built from the same uniforms
/// (the root uses its own uniform, since Q_root is pinned to 0).
struct GwObservation {
  std::int64_t n = 0;
  double J = 0;
  std::int64_t tpl = 0;  // total path length, sum_v (z_v - 1)
  std::int64_t inv = 0;  // coupled draw of the inversion count
  /// J - (inv - tpl/2); the coupling keeps |gap| <= n.
  double gap() const { return J - (static_cast<double>(inv) - static_cast<double>(tpl) / 2); }
};

GwObservation observe_gw_tree(const Tree& t, Rng& rng);
GwObservation observe_gw(const OffspringLaw& law, std::int64_t n, Rng& rng);

/// Depth-first tour and discrete snake of a tree.
struct SnakePath {
  std::vector<std::int32_t> tour;  // depth along the tour, 2(n-1)+1 entries
  std::vector<NodeId> visit;       // node at each tour step
  std::vector<double> snake;       // Phi of the visited node, Phi_v = sum of Q over the root path of v
  std::vector<double> q;           // Q per node, Q_root = 0
  double J = 0;                    // sum_u Q_u z_u
};

/// Builds the tour (children in index order) and the snake for one draw of Q.
SnakePath build_snake(const Tree& t, Rng& rng);

/// Integral over [0, 2(n-1)] of the snake, each unit interval weighted by the Phi of
/// the deeper endpoint. Every non-root node owns exactly two intervals, so this is 2J.
double snake_integral(const SnakePath& s);

/// Excursion on the grid j/m, j = 0..m: a Brownian bridge built from m Gaussian
/// increments, rotated at its minimum (Vervaat).
std::vector<double> sample_excursion(std::size_t m, Rng& rng);

/// eta = int int 2 min_{[s,t]} e over [0,1]^2, on the grid: (2/m^2)(2S - sum e_i) with
/// S = sum_{i<=j} min(e_i..e_j) over i, j in 0..m-1, computed with a monotonic stack.
double eta_of_excursion(std::span<const double> e);
/// The same by the O(m^2) double loop.
double eta_double_loop(std::span<const double> e);

struct ExcursionDraws {
  std::vector<double> eta;
  std::vector<double> y;  // sqrt(eta) N / sqrt(12 sigma)
};

/// Replicate i uses Rng::stream(seed, i) for its excursion and then one more normal.
ExcursionDraws sample_excursion_functionals(double sigma, std::size_t m, std::size_t reps, std::uint64_t seed,
                                            unsigned threads = 0);
SampleSet sample_Y_limit(double sigma, std::size_t m, std::size_t reps, std::uint64_t seed, unsigned threads = 0);
SampleSet sample_eta(std::size_t m, std::size_t reps, std::uint64_t seed, unsigned threads = 0);

/// a_1 = 1, a_k = 2(5k-4)(5k-6) a_{k-1} + sum_{i=1}^{k-1} a_i a_{k-i}.
std::vector<BigInt> y_moment_coefficients(int k_max);

/// E[Y^{2k}] for k = 1..k_max (odd moments vanish):
/// (12 sigma)^{-k} (2k)! sqrt(pi) a_k / (2^{(9k-4)/2} Gamma((5k-1)/2)).
std::vector<double> exact_Y_moments(double sigma, int k_max);

/// (I - Ups/2) / n^{5/4} on fresh conditional GW trees, one exact inversion draw each.
SampleSet y_n_statistic(const OffspringLaw& law, std::int64_t n, std::size_t reps, std::uint64_t seed,
                        unsigned threads = 0);

}  // namespace treeinv
