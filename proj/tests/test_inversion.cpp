#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "treeinv/exact_moments.hpp"
#include "treeinv/inversion.hpp"
#include "treeinv/stats.hpp"
#include "treeinv/tree_gen.hpp"

using namespace treeinv;

TEST_SUITE("inversion") {

TEST_CASE("counting by hand") {
  const Tree p3 = gen_path(3);
  CHECK(count_inversions_naive(p3, {3, 1, 2}) == 2);
  CHECK(count_inversions_fast(p3, {3, 1, 2}) == 2);
  CHECK(count_inversions_naive(gen_path(6), {1, 2, 3, 4, 5, 6}) == 0);
  CHECK(count_inversions_naive(gen_star(4), {4, 1, 2, 3}) == 3);
  CHECK(count_inversions_fast(gen_star(4), {4, 2, 3, 1}) == 3);
  CHECK(count_inversions_fast(Tree::from_parents({-1}), {1}) == 0);
}

TEST_CASE("labelings must be permutations of 1..n") {
  const Tree p3 = gen_path(3);
  CHECK_THROWS_AS(count_inversions_fast(p3, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(count_inversions_fast(p3, {1, 1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(count_inversions_naive(p3, {0, 1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(count_inversions_naive(p3, {1, 2, 4}), std::invalid_argument);
  Rng rng(41);
  const auto lab = random_labeling(100, rng);
  CHECK_NOTHROW(check_labeling(gen_path(100), lab));
}

TEST_CASE("fast counter matches the naive one and the definition") {
  Rng rng(42);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + rng.below(200);
    const Tree t = rep % 2 ? oracle::random_recursive_tree(n, rng) : gen_cgw_tree(OffspringLaw::geometric_half(), static_cast<std::int64_t>(n), rng);
    const auto lab = random_labeling(n, rng);
    const auto fast = count_inversions_fast(t, lab);
    CHECK(fast == count_inversions_naive(t, lab));
    CHECK(fast == oracle::inversions(t, std::vector<int>(lab.begin(), lab.end())));
  }
}

TEST_CASE("count stays within zero and the total path length") {
  Rng rng(43);
  const Tree t = gen_complete_bary(2, 10);
  const auto tpl = total_path_length(profile(t));
  for (int rep = 0; rep < 20; ++rep) {
    const auto c = count_inversions_fast(t, random_labeling(t.size(), rng));
    CHECK(c >= 0);
    CHECK(c <= tpl);
  }
  // reversing the labels turns every ancestor pair into an inversion
  std::vector<std::int32_t> rev(t.size());
  const auto order = t.dfs_order();
  for (std::size_t i = 0; i < order.size(); ++i) rev[static_cast<std::size_t>(order[i])] = static_cast<std::int32_t>(t.size() - i);
  CHECK(count_inversions_fast(t, rev) == tpl);
}

TEST_CASE("exact distribution for tiny trees") {
  auto uniform = [](const std::map<std::int64_t, BigRational>& d, std::int64_t top) {
    if (static_cast<std::int64_t>(d.size()) != top + 1) return false;
    for (const auto& [k, p] : d)
      if (k < 0 || k > top || p != BigRational(1, top + 1)) return false;
    return true;
  };
  CHECK(uniform(enumerate_distribution(gen_star(4)), 3));
  CHECK(uniform(enumerate_distribution(gen_path(2)), 1));
  CHECK(uniform(enumerate_distribution(gen_star(3)), 2));
  for (std::size_t n = 1; n <= 6; ++n)
    for (const Tree& t : all_rooted_trees(n)) {
      const auto d = enumerate_distribution(t);
      const auto ref = oracle::permutation_pmf(t);
      CHECK(d.size() == ref.size());
      for (const auto& [k, p] : ref) CHECK(d.at(k) == p);
    }
  CHECK_THROWS(enumerate_distribution(gen_path(9)));
}

TEST_CASE("mean and variance of the enumerated law equal the cumulants") {
  for (std::size_t n = 1; n <= 7; ++n)
    for (const Tree& t : all_rooted_trees(n)) {
      const auto d = enumerate_distribution(t);
      BigRational m = 0, m2 = 0;
      for (const auto& [k, p] : d) {
        m += p * k;
        m2 += p * k * k;
      }
      const auto c = cumulants(t, 2);
      CHECK(m == c.kappa[0]);
      CHECK(m2 - m * m == c.kappa[1]);
    }
}

TEST_CASE("product sampler") {
  Rng rng(44);
  const InversionSampler single(Tree::from_parents({-1}));
  for (int i = 0; i < 100; ++i) CHECK(single.draw(rng) == 0);

  {
    const InversionSampler star(gen_star(4));
    std::map<std::int64_t, std::int64_t> c;
    for (int i = 0; i < 100000; ++i) ++c[star.draw(rng)];
    CHECK(chi_square_fit(c, {{0, 0.25}, {1, 0.25}, {2, 0.25}, {3, 0.25}}).p_value > 1e-4);
  }
  {
    const Tree p3 = gen_path(3);
    const auto s = sample_inversions(p3, 100000, 45);
    const double m = mean(s.values), se = std::sqrt(variance(s.values) / 1e5);
    CHECK(std::abs(m - 1.5) < 4 * se);
  }
  // pmf of a random 6-node tree against its exact law
  {
    const Tree t = oracle::random_recursive_tree(6, rng);
    const InversionSampler smp(t);
    std::map<std::int64_t, std::int64_t> c;
    for (int i = 0; i < 100000; ++i) ++c[smp.draw(rng)];
    std::map<std::int64_t, double> probs;
    for (const auto& [k, p] : oracle::permutation_pmf(t)) probs[k] = p.convert_to<double>();
    CHECK(chi_square_fit(c, probs).p_value > 1e-4);
  }
  const Tree big = oracle::random_recursive_tree(500, rng);
  CHECK(InversionSampler(big).max_value() == total_path_length(profile(big)));
}

TEST_CASE("sampler law matches uniform relabeling") {
  // Two-sample check between drawing labels and drawing the product form.
  Rng rng(46);
  const Tree t = gen_cgw_tree(OffspringLaw::poisson1(), 12, rng);
  const InversionSampler smp(t);
  std::map<std::int64_t, std::int64_t> a, b;
  for (int i = 0; i < 50000; ++i) {
    ++a[smp.draw(rng)];
    ++b[count_inversions_fast(t, random_labeling(t.size(), rng))];
  }
  CHECK(chi_square_two_sample(a, b).p_value > 1e-4);

  // the cherry: a root with two leaves
  const Tree cherry = Tree::from_parents({-1, 0, 0});
  const InversionSampler cs(cherry);
  std::map<std::int64_t, std::int64_t> ca, cb;
  for (int i = 0; i < 100000; ++i) {
    ++ca[cs.draw(rng)];
    ++cb[count_inversions_fast(cherry, random_labeling(3, rng))];
  }
  CHECK(chi_square_two_sample(ca, cb).p_value > 1e-3);
}

TEST_CASE("sample sets carry their seed and do not depend on thread count") {
  Rng rng(47);
  const Tree t = oracle::random_recursive_tree(300, rng);
  const auto a = sample_inversions(t, 5000, 123, 1), b = sample_inversions(t, 5000, 123, 4),
             c = sample_inversions(t, 5000, 124, 1);
  CHECK(a.values == b.values);
  CHECK(a.values != c.values);
  CHECK(a.seed == 123);
  CHECK(a.reps() == 5000);
  CHECK(a.statistic == "inversions");
  CHECK_NOTHROW(a.validate());
}

}  // TEST_SUITE
