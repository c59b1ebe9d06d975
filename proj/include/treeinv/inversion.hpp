#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "treeinv/exact_moments.hpp"
#include "treeinv/rng.hpp"
#include "treeinv/stats.hpp"
#include "treeinv/tree.hpp"

namespace treeinv {

/// labels[v] in 1..n, a permutation indexed by node.
using Labeling = std::vector<std::int32_t>;

/// Uniform random labeling (Fisher-Yates).
Labeling random_labeling(std::size_t n, Rng& rng);

/// Throws std::invalid_argument unless `lab` is a permutation of 1..t.size().
void check_labeling(const Tree& t, const Labeling& lab);

/// Ancestor-descendant pairs (u above v) with lab[u] > lab[v], by walking up from every
/// node. Quadratic in the worst case; refuses n > 10^4.
std::int64_t count_inversions_naive(const Tree& t, const Labeling& lab);

/// Same count in O(n log n).
///
/// These are inversions between a node and its ancestors, not inversions of a sequence,
/// so a merge sort over the DFS order gives the wrong answer. Instead a Fenwick tree holds
/// the labels currently on the root path: entering v counts the path labels above lab[v]
/// and inserts lab[v], leaving v removes it.
std::int64_t count_inversions_fast(const Tree& t, const Labeling& lab);

/// Exact law of the inversion count over all n! labelings. n <= 8.
std::map<std::int64_t, BigRational> enumerate_distribution(const Tree& t);

/// Node sizes z_v > 1 grouped as (z, multiplicity); the only data the sampler needs.
class InversionSampler {
 public:
  explicit InversionSampler(std::span<const std::int64_t> subtree_sizes);
  explicit InversionSampler(const Tree& t);

  /// One draw of sum_v Z_v with independent Z_v uniform on {0, ..., z_v - 1}.
  std::int64_t draw(Rng& rng) const;
  /// Largest possible value, sum_v (z_v - 1).
  std::int64_t max_value() const { return max_; }

 private:
  std::vector<std::pair<std::uint64_t, std::int64_t>> groups_;
  std::int64_t max_ = 0;
};

/// `reps` independent draws; replicate i uses Rng::stream(seed, i).
SampleSet sample_inversions(const Tree& t, std::size_t reps, std::uint64_t seed, unsigned threads = 0);

}  // namespace treeinv
