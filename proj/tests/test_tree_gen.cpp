#include <doctest.h>

#include <cmath>
#include <numeric>
#include <tuple>
#include <string>

#include "oracles.hpp"
#include "treeinv/stats.hpp"
#include "treeinv/tree_gen.hpp"

using namespace treeinv;

namespace {

std::vector<std::int64_t> sizes(const Tree& t) { return profile(t).subtree_size; }

void check_split_tree(const SplitSpec& spec, const SplitTree& st, std::int64_t n) {
  const Tree& t = st.tree;
  REQUIRE(st.balls.size() == t.size());
  CHECK(st.ball_count == n);
  CHECK(std::accumulate(st.balls.begin(), st.balls.end(), std::int64_t{0}) == n);
  for (std::size_t v = 0; v < t.size(); ++v) {
    const auto id = static_cast<NodeId>(v);
    CHECK(st.subtree_balls[v] >= 1);
    std::int64_t below = st.balls[v];
    for (const NodeId c : t.children(id)) below += st.subtree_balls[static_cast<std::size_t>(c)];
    CHECK(below == st.subtree_balls[v]);
    CHECK(static_cast<int>(t.child_count(id)) <= spec.b);
    if (t.child_count(id) > 0) {
      CHECK(st.balls[v] == spec.s0);
      CHECK(st.subtree_balls[v] > spec.s);
    } else {
      CHECK(st.balls[v] >= 1);
      CHECK(st.balls[v] <= spec.s);
    }
  }
}

// Index of each shape in `shapes`, appended when new.
std::int64_t shape_index(std::vector<std::string>& shapes, const Tree& t) {
  const std::string s = canonical_shape(t);
  const auto it = std::find(shapes.begin(), shapes.end(), s);
  if (it != shapes.end()) return it - shapes.begin();
  shapes.push_back(s);
  return static_cast<std::int64_t>(shapes.size()) - 1;
}

}  // namespace

TEST_SUITE("tree_gen") {

TEST_CASE("deterministic families") {
  const Tree cherry = gen_complete_bary(2, 1);
  CHECK(cherry.size() == 3);
  CHECK(cherry.child_count(0) == 2);
  CHECK(sizes(gen_complete_bary(2, 2)) == std::vector<std::int64_t>{7, 3, 3, 1, 1, 1, 1});
  CHECK(gen_complete_bary(3, 3).size() == 40);

  const Tree bal = gen_balanced_bary(2, 4);
  CHECK(bal.child_count(0) == 2);
  CHECK(bal.children(0)[0] == 1);
  CHECK(bal.child_count(1) == 1);
  CHECK(bal.child_count(2) == 0);

  for (int b = 2; b <= 4; ++b)
    for (std::size_t n = 1; n <= 200; ++n) {
      const Tree t = gen_balanced_bary(b, n);
      REQUIRE(t.size() == n);
      const TreeProfile p = profile(t);
      // every level but the last is full
      std::vector<std::int64_t> level(static_cast<std::size_t>(p.height) + 1, 0);
      for (const auto d : p.depth) ++level[static_cast<std::size_t>(d)];
      std::int64_t full = 1;
      for (int d = 0; d < p.height; ++d, full *= b) CHECK(level[static_cast<std::size_t>(d)] == full);
    }
  CHECK(gen_path(5).size() == 5);
  CHECK(profile(gen_path(5)).height == 4);
  CHECK(profile(gen_star(6)).height == 1);
}

TEST_CASE("unordered rooted trees are counted correctly") {
  // number of unordered rooted trees on n nodes
  const std::size_t expected[] = {1, 1, 2, 4, 9, 20, 48, 115, 286, 719};
  for (std::size_t n = 1; n <= 10; ++n) {
    const auto all = all_rooted_trees(n);
    CHECK(all.size() == expected[n - 1]);
    std::set<std::string> shapes;
    for (const Tree& t : all) {
      CHECK(t.size() == n);
      shapes.insert(canonical_shape(t));
    }
    CHECK(shapes.size() == all.size());
  }
  CHECK_THROWS(all_rooted_trees(11));
}

TEST_CASE("split spec parameters are validated") {
  SplitSpec ok = SplitSpec::preset("bst");
  CHECK_NOTHROW(ok.validate());
  auto bad = [&](auto edit) {
    SplitSpec s = ok;
    edit(s);
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  };
  bad([](SplitSpec& s) { s.b = 1; });
  bad([](SplitSpec& s) { s.s = 0; });
  bad([](SplitSpec& s) { s.s0 = 2; });
  bad([](SplitSpec& s) { s.s0 = -1; });
  bad([](SplitSpec& s) { s.s1 = 1; });
  bad([](SplitSpec& s) { s.b = 3; });  // beta_pair law needs b = 2
  CHECK_THROWS_AS(SplitSpec::preset("avl"), std::invalid_argument);
  CHECK_THROWS_AS(SplitSpec::preset("dst:1"), std::invalid_argument);

  const SplitSpec m1 = SplitSpec::preset("median:1");
  CHECK(m1.b == 2);
  CHECK(m1.s0 == 1);
  CHECK(m1.s1 == 1);
  const SplitSpec d3 = SplitSpec::preset("dst:3");
  CHECK(d3.b == 3);
  CHECK(d3.law.kind == SplitLaw::Kind::constant);
}

TEST_CASE("split spec json round trip and hash") {
  for (const char* name : {"bst", "dst:2", "dst:4", "median:1", "median:3"}) {
    const SplitSpec s = SplitSpec::preset(name);
    const SplitSpec back = SplitSpec::from_json(s.to_json());
    CHECK(back.to_json() == s.to_json());
    CHECK(back.hash() == s.hash());
    CHECK(s.hash().size() == 16);
  }
  CHECK(SplitSpec::preset("bst").hash() != SplitSpec::preset("dst:2").hash());
  const auto j = nlohmann::json::parse(
      R"({"b":3,"s":2,"s0":1,"s1":0,"split_law":{"kind":"dirichlet","alpha":[1,2,3]}})");
  const SplitSpec d = SplitSpec::from_json(j);
  CHECK(d.b == 3);
  CHECK(d.law.kind == SplitLaw::Kind::dirichlet);
  CHECK_THROWS(SplitSpec::from_json(nlohmann::json::parse(R"({"b":2,"s":1,"s0":1,"s1":0,"split_law":{"kind":"zipf"}})")));
}

TEST_CASE("split vectors are probability vectors") {
  Rng rng(21);
  std::vector<SplitLaw> laws{{SplitLaw::Kind::constant, {0.2, 0.3, 0.5}},
                             {SplitLaw::Kind::dirichlet, {0.5, 1, 4}},
                             {SplitLaw::Kind::beta_pair, {2, 5}}};
  for (const auto& law : laws) {
    const std::size_t b = law.kind == SplitLaw::Kind::beta_pair ? 2 : 3;
    std::vector<double> v(b);
    for (int i = 0; i < 2000; ++i) {
      law.sample(rng, v);
      double sum = 0;
      for (const double x : v) {
        CHECK(x >= 0);
        sum += x;
      }
      CHECK(sum == doctest::Approx(1).epsilon(1e-12));
    }
  }
}

TEST_CASE("split trees hold the right number of balls per node") {
  Rng rng(22);
  std::vector<SplitSpec> specs{SplitSpec::preset("bst"), SplitSpec::preset("dst:2"), SplitSpec::preset("dst:3"),
                               SplitSpec::preset("median:1"), SplitSpec::preset("median:2")};
  specs.push_back(SplitSpec::from_json(nlohmann::json::parse(
      R"({"b":3,"s":4,"s0":2,"s1":1,"split_law":{"kind":"dirichlet","alpha":[1,1,2]}})")));
  specs.push_back(SplitSpec::from_json(nlohmann::json::parse(
      R"({"b":2,"s":3,"s0":0,"s1":2,"split_law":{"kind":"beta_pair","alpha":2,"beta":3}})")));
  for (const auto& spec : specs)
    for (const std::int64_t n : {1, 2, 3, 5, 17, 100, 1000}) {
      const SplitTree st = gen_split_tree(spec, n, rng);
      check_split_tree(spec, st, n);
      if (n <= spec.s) CHECK(st.tree.size() == 1);
    }
  const SplitTree one = gen_split_tree(SplitSpec::preset("bst"), 1, rng);
  CHECK(one.tree.size() == 1);
  CHECK(one.balls[0] == 1);

  // median of three at n = 1000: every internal node keeps one ball
  const SplitSpec med = SplitSpec::preset("median:1");
  const SplitTree m = gen_split_tree(med, 1000, rng);
  for (std::size_t v = 0; v < m.tree.size(); ++v)
    if (m.tree.child_count(static_cast<NodeId>(v)) > 0) CHECK(m.balls[v] == 1);
}

TEST_CASE("trickle-down insertion keeps the same invariants") {
  Rng rng(23);
  for (const char* name : {"bst", "dst:2", "median:1"}) {
    const SplitSpec spec = SplitSpec::preset(name);
    for (const std::int64_t n : {1, 4, 50, 400}) check_split_tree(spec, gen_split_tree_trickle(spec, n, rng), n);
  }
}

TEST_CASE("binary search tree on three keys is a cherry with probability 1/3") {
  const SplitSpec bst = SplitSpec::preset("bst");
  const std::string cherry = canonical_shape(gen_star(3));
  Rng rng(24);
  const int reps = 100000;
  std::map<std::int64_t, std::int64_t> counts;
  for (int i = 0; i < reps; ++i) {
    const SplitTree st = gen_split_tree(bst, 3, rng);
    CHECK(st.tree.size() == 3);
    ++counts[canonical_shape(st.tree) == cherry ? 1 : 0];
  }
  const auto fit = chi_square_fit(counts, {{0, 2.0 / 3}, {1, 1.0 / 3}});
  CHECK(fit.p_value > 1e-4);
}

TEST_CASE("trickle-down and subtree-size recursion give the same shape law") {
  Rng rng(25);
  for (const auto [name, n, reps] : {std::tuple{"bst", 3, 100000}, {"bst", 4, 100000}, {"bst", 5, 100000},
                                     {"bst", 6, 100000}, {"median:1", 6, 40000}}) {
    const SplitSpec spec = SplitSpec::preset(name);
    std::vector<std::string> shapes;
    std::map<std::int64_t, std::int64_t> a, b;
    for (int i = 0; i < reps; ++i) {
      ++a[shape_index(shapes, gen_split_tree(spec, n, rng).tree)];
      ++b[shape_index(shapes, gen_split_tree_trickle(spec, n, rng).tree)];
    }
    const auto chi = chi_square_two_sample(a, b);
    CAPTURE(name);
    CAPTURE(n);
    CHECK(chi.p_value > 1e-4);
  }
}

TEST_CASE("digital search tree height stays near log2 n") {
  Rng rng(26);
  const SplitSpec dst = SplitSpec::preset("dst:2");
  const std::int64_t n = 1 << 14;
  const double lg = std::log2(static_cast<double>(n));
  for (int rep = 0; rep < 10; ++rep) {
    const int h = profile(gen_split_tree(dst, n, rng).tree).height;
    CHECK(h >= lg - 1);
    CHECK(h <= lg + 4 * std::sqrt(lg));
  }
}

TEST_CASE("binomial and multinomial draws") {
  Rng rng(27);
  for (const auto [m, p] : {std::pair<std::int64_t, double>{10, 0.3}, {1000, 0.5}, {100000, 0.01}}) {
    const int reps = 40000;
    double s = 0, s2 = 0;
    for (int i = 0; i < reps; ++i) {
      const auto x = sample_binomial(m, p, rng);
      REQUIRE(x >= 0);
      REQUIRE(x <= m);
      s += static_cast<double>(x);
      s2 += static_cast<double>(x) * static_cast<double>(x);
    }
    const double mean = s / reps, var = s2 / reps - mean * mean, ev = static_cast<double>(m) * p * (1 - p);
    CHECK(std::abs(mean - static_cast<double>(m) * p) < 5 * std::sqrt(ev / reps));
    CHECK(var == doctest::Approx(ev).epsilon(0.05));
  }
  CHECK(sample_binomial(0, 0.5, rng) == 0);
  CHECK(sample_binomial(7, 1.0, rng) == 7);
  const std::vector<double> probs{0.1, 0.6, 0.3};
  std::vector<std::int64_t> out(3);
  for (int i = 0; i < 100; ++i) {
    sample_multinomial(1234, probs, rng, out);
    CHECK(out[0] + out[1] + out[2] == 1234);
  }
}

TEST_CASE("offspring laws have mean one") {
  Rng rng(28);
  for (const auto& law : {OffspringLaw::poisson1(), OffspringLaw::geometric_half(), OffspringLaw::binary_half(),
                          OffspringLaw::uniform_012(), OffspringLaw::custom({"1/4", "1/2", "1/4"})}) {
    const int reps = 200000;
    double s = 0;
    for (int i = 0; i < reps; ++i) s += law.sample(rng);
    CAPTURE(law.name());
    CHECK(std::abs(s / reps - 1) < 5 * std::sqrt(law.variance() / reps));
  }
  CHECK(OffspringLaw::poisson1().variance() == doctest::Approx(1));
  CHECK(OffspringLaw::geometric_half().variance() == doctest::Approx(2));
  CHECK(OffspringLaw::binary_half().variance() == doctest::Approx(1));
  CHECK(OffspringLaw::uniform_012().variance() == doctest::Approx(2.0 / 3));
  CHECK(OffspringLaw::custom({"1/4", "1/2", "1/4"}).variance() == doctest::Approx(0.5));
  CHECK_THROWS_AS(OffspringLaw::custom({"1/2", "1/4", "1/4"}), std::invalid_argument);
  CHECK_THROWS_AS(OffspringLaw::custom({"1/2", "1/2", "1/2"}), std::invalid_argument);
  CHECK_THROWS_AS(OffspringLaw::custom({"0", "1"}), std::invalid_argument);
  CHECK(OffspringLaw::parse("poisson1").kind() == OffspringLaw::Kind::poisson1);
  CHECK(OffspringLaw::parse(R"(["1/3","1/3","1/3"])").variance() == doctest::Approx(2.0 / 3));
  CHECK_THROWS(OffspringLaw::parse("zipf"));
}

TEST_CASE("cycle lemma and preorder decoding") {
  Rng rng(29);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + rng.below(60);
    // random composition of n-1 into n parts
    std::vector<std::uint32_t> d(n, 0);
    for (std::size_t i = 0; i + 1 < n; ++i) ++d[rng.below(n)];
    const auto rot = cycle_lemma_rotate(d);
    REQUIRE(rot.size() == n);
    CHECK(is_lukasiewicz(rot));
    const Tree t = decode_lukasiewicz(rot);
    REQUIRE(t.size() == n);
    const auto order = t.dfs_order();
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(order[i] == static_cast<NodeId>(i));
      CHECK(t.child_count(order[i]) == rot[i]);
    }
  }
  CHECK_FALSE(is_lukasiewicz(std::vector<std::uint32_t>{0, 1}));
  CHECK(is_lukasiewicz(std::vector<std::uint32_t>{0}));
}

TEST_CASE("conditioned Galton-Watson shapes follow the plane-tree weights") {
  Rng rng(30);
  const std::string path3 = canonical_shape(gen_path(3));
  // Poisson(1): the path has two plane embeddings' worth of weight, e^-3 vs e^-3/2
  {
    std::map<std::int64_t, std::int64_t> c;
    for (int i = 0; i < 60000; ++i) ++c[canonical_shape(gen_cgw_tree(OffspringLaw::poisson1(), 3, rng)) == path3];
    CHECK(chi_square_fit(c, {{1, 2.0 / 3}, {0, 1.0 / 3}}).p_value > 1e-4);
  }
  // Geometric(1/2) is uniform over the 5 plane trees on 4 nodes; uniform{0,1,2} is uniform
  // over the 4 Motzkin trees.
  const Tree p4 = gen_path(4), s4 = gen_star(4);
  const Tree fork = Tree::from_parents({-1, 0, 1, 1});   // root - child with two leaves
  const Tree side = Tree::from_parents({-1, 0, 0, 1});   // root with two children, one has a child
  const std::vector<std::string> shapes{canonical_shape(p4), canonical_shape(s4), canonical_shape(fork),
                                        canonical_shape(side)};
  auto run = [&](const OffspringLaw& law, const std::map<std::int64_t, double>& probs) {
    std::map<std::int64_t, std::int64_t> c;
    for (int i = 0; i < 60000; ++i) {
      const std::string s = canonical_shape(gen_cgw_tree(law, 4, rng));
      ++c[std::find(shapes.begin(), shapes.end(), s) - shapes.begin()];
    }
    CAPTURE(law.name());
    CHECK(chi_square_fit(c, probs).p_value > 1e-4);
  };
  run(OffspringLaw::geometric_half(), {{0, 0.2}, {1, 0.2}, {2, 0.2}, {3, 0.4}});
  run(OffspringLaw::uniform_012(), {{0, 0.25}, {1, 0}, {2, 0.25}, {3, 0.5}});

  CHECK(gen_cgw_tree(OffspringLaw::poisson1(), 1, rng).size() == 1);
  CHECK_THROWS_AS(gen_cgw_tree(OffspringLaw::binary_half(), 2, rng), std::invalid_argument);
  CHECK_FALSE(OffspringLaw::binary_half().size_reachable(2));
  CHECK(OffspringLaw::binary_half().size_reachable(7));
  for (const auto& law : {OffspringLaw::poisson1(), OffspringLaw::geometric_half(), OffspringLaw::binary_half(),
                          OffspringLaw::uniform_012()}) {
    const std::int64_t n = law.kind() == OffspringLaw::Kind::binary_half ? 1001 : 1000;
    CHECK(gen_cgw_tree(law, n, rng).size() == static_cast<std::size_t>(n));
  }
}

TEST_CASE("seeded generation is reproducible") {
  const SplitSpec bst = SplitSpec::preset("bst");
  const auto a = gen_split_tree(bst, 500, 99), b = gen_split_tree(bst, 500, 99);
  CHECK(std::vector<NodeId>(a.tree.parents().begin(), a.tree.parents().end()) ==
        std::vector<NodeId>(b.tree.parents().begin(), b.tree.parents().end()));
  const Tree c = gen_cgw_tree(OffspringLaw::geometric_half(), 300, 7), d = gen_cgw_tree(OffspringLaw::geometric_half(), 300, 7);
  CHECK(canonical_shape(c) == canonical_shape(d));
}

}  // TEST_SUITE
