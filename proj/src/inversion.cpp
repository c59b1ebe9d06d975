#include "treeinv/inversion.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "treeinv/parallel.hpp"

namespace treeinv {

Labeling random_labeling(std::size_t n, Rng& rng) {
  Labeling lab(n);
  std::iota(lab.begin(), lab.end(), 1);
  for (std::size_t i = n; i > 1; --i) std::swap(lab[i - 1], lab[rng.below(i)]);
  return lab;
}

void check_labeling(const Tree& t, const Labeling& lab) {
  const std::size_t n = t.size();
  if (lab.size() != n) throw std::invalid_argument("labeling size does not match the tree");
  std::vector<char> seen(n + 1, 0);
  for (const auto l : lab) {
    if (l < 1 || static_cast<std::size_t>(l) > n || seen[static_cast<std::size_t>(l)])
      throw std::invalid_argument("labeling is not a permutation of 1..n");
    seen[static_cast<std::size_t>(l)] = 1;
  }
}

std::int64_t count_inversions_naive(const Tree& t, const Labeling& lab) {
  if (t.size() > 10000) throw std::length_error("count_inversions_naive: n exceeds 10^4");
  check_labeling(t, lab);
  std::int64_t count = 0;
  for (NodeId v = 0; static_cast<std::size_t>(v) < t.size(); ++v)
    for (NodeId u = t.parent(v); u != kNoParent; u = t.parent(u))
      count += lab[static_cast<std::size_t>(u)] > lab[static_cast<std::size_t>(v)];
  return count;
}

std::int64_t count_inversions_fast(const Tree& t, const Labeling& lab) {
  check_labeling(t, lab);
  const std::size_t n = t.size();
  std::vector<std::int32_t> fenwick(n + 1, 0);
  auto add = [&](std::size_t i, std::int32_t d) {
    for (; i <= n; i += i & (~i + 1)) fenwick[i] += d;
  };
  auto prefix = [&](std::size_t i) {
    std::int64_t s = 0;
    for (; i > 0; i -= i & (~i + 1)) s += fenwick[i];
    return s;
  };

  std::int64_t count = 0, on_path = 0;
  // Stack entries are (node, entered?); the second visit removes the node's label.
  std::vector<std::pair<NodeId, bool>> stack{{t.root(), false}};
  while (!stack.empty()) {
    auto [v, entered] = stack.back();
    stack.pop_back();
    const auto l = static_cast<std::size_t>(lab[static_cast<std::size_t>(v)]);
    if (entered) {
      add(l, -1);
      --on_path;
      continue;
    }
    count += on_path - prefix(l);
    add(l, 1);
    ++on_path;
    stack.emplace_back(v, true);
    for (const NodeId c : t.children(v)) stack.emplace_back(c, false);
  }
  return count;
}

std::map<std::int64_t, BigRational> enumerate_distribution(const Tree& t) {
  const std::size_t n = t.size();
  if (n > 8) throw std::length_error("enumerate_distribution: n exceeds 8");
  Labeling lab(n);
  std::iota(lab.begin(), lab.end(), 1);
  std::map<std::int64_t, std::int64_t> counts;
  std::int64_t total = 0;
  do {
    ++counts[count_inversions_naive(t, lab)];
    ++total;
  } while (std::next_permutation(lab.begin(), lab.end()));
  std::map<std::int64_t, BigRational> pmf;
  for (const auto& [k, c] : counts) pmf[k] = BigRational(c, total);
  return pmf;
}

InversionSampler::InversionSampler(std::span<const std::int64_t> subtree_sizes) {
  std::vector<std::int64_t> s;
  for (const auto z : subtree_sizes) {
    if (z < 1) throw std::invalid_argument("subtree sizes must be positive");
    if (z > 1) s.push_back(z);
    max_ += z - 1;
  }
  std::sort(s.begin(), s.end());
  for (const auto z : s) {
    if (!groups_.empty() && groups_.back().first == static_cast<std::uint64_t>(z))
      ++groups_.back().second;
    else
      groups_.emplace_back(static_cast<std::uint64_t>(z), 1);
  }
}

InversionSampler::InversionSampler(const Tree& t) : InversionSampler(profile(t).subtree_size) {}

std::int64_t InversionSampler::draw(Rng& rng) const {
  std::uint64_t sum = 0;
  for (const auto& [z, count] : groups_)
    for (std::int64_t i = 0; i < count; ++i) sum += rng.below(z);
  return static_cast<std::int64_t>(sum);
}

SampleSet sample_inversions(const Tree& t, std::size_t reps, std::uint64_t seed, unsigned threads) {
  if (reps < 1) throw std::invalid_argument("sample_inversions: reps must be >= 1");
  const InversionSampler sampler(t);
  SampleSet s;
  s.statistic = "inversions";
  s.seed = seed;
  s.values.resize(reps);
  parallel_for(reps, threads, [&](std::size_t i) {
    Rng rng = Rng::stream(seed, i);
    s.values[i] = static_cast<double>(sampler.draw(rng));
  });
  return s;
}

}  // namespace treeinv
