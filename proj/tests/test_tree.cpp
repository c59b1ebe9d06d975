#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "treeinv/tree.hpp"
#include "treeinv/tree_gen.hpp"

using namespace treeinv;

TEST_SUITE("tree") {

TEST_CASE("parent arrays from the small examples") {
  const Tree one = Tree::from_parents({-1});
  CHECK(one.size() == 1);
  CHECK(one.root() == 0);
  CHECK(one.child_count(0) == 0);

  const Tree p3 = Tree::from_parents({-1, 0, 1});
  const auto order = p3.dfs_order();
  CHECK(std::vector<NodeId>(order.begin(), order.end()) == std::vector<NodeId>{0, 1, 2});

  const Tree t = Tree::from_parents({-1, 0, 0, 1, 1});
  auto kids = [&](NodeId v) {
    const auto c = t.children(v);
    return std::vector<NodeId>(c.begin(), c.end());
  };
  CHECK(kids(0) == std::vector<NodeId>{1, 2});
  CHECK(kids(1) == std::vector<NodeId>{3, 4});
  CHECK(kids(2).empty());
}

TEST_CASE("malformed parent arrays are rejected") {
  CHECK_THROWS_AS(Tree::from_parents({}), std::invalid_argument);
  CHECK_THROWS_AS(Tree::from_parents({-1, -1}), std::invalid_argument);
  CHECK_THROWS_AS(Tree::from_parents({-1, 5}), std::invalid_argument);
  CHECK_THROWS_AS(Tree::from_parents({-1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(Tree::from_parents({-1, 2, 1}), std::invalid_argument);
  CHECK_THROWS_AS(Tree::from_parents({1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(Tree::from_parents({-1, -2}), std::invalid_argument);
}

TEST_CASE("children invert parents and dfs puts parents first") {
  Rng rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    const Tree t = oracle::relabel(oracle::random_recursive_tree(1 + rng.below(80), rng), rng);
    const std::size_t n = t.size();
    std::size_t roots = 0, edges = 0;
    for (std::size_t v = 0; v < n; ++v) {
      const auto id = static_cast<NodeId>(v);
      if (t.parent(id) == kNoParent) ++roots;
      for (const NodeId c : t.children(id)) {
        CHECK(t.parent(c) == id);
        ++edges;
      }
    }
    CHECK(roots == 1);
    CHECK(edges == n - 1);

    std::vector<int> pos(n, -1);
    const auto order = t.dfs_order();
    REQUIRE(order.size() == n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(pos[static_cast<std::size_t>(order[i])] == -1);
      pos[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
    }
    for (std::size_t v = 0; v < n; ++v)
      if (t.parent(static_cast<NodeId>(v)) != kNoParent)
        CHECK(pos[static_cast<std::size_t>(t.parent(static_cast<NodeId>(v)))] < pos[v]);
  }
}

TEST_CASE("profile of small trees") {
  const TreeProfile p3 = profile(Tree::from_parents({-1, 0, 1}));
  CHECK(p3.subtree_size == std::vector<std::int64_t>{3, 2, 1});
  CHECK(p3.depth == std::vector<std::int32_t>{0, 1, 2});
  CHECK(p3.height == 2);

  const TreeProfile s3 = profile(gen_star(4));
  CHECK(s3.subtree_size == std::vector<std::int64_t>{4, 1, 1, 1});
  CHECK(s3.height == 1);

  const TreeProfile one = profile(Tree::from_parents({-1}));
  CHECK(one.subtree_size == std::vector<std::int64_t>{1});
  CHECK(one.depth == std::vector<std::int32_t>{0});
}

TEST_CASE("profile agrees with root-path walking") {
  Rng rng(12);
  for (int rep = 0; rep < 40; ++rep) {
    const Tree t = oracle::relabel(oracle::random_recursive_tree(1 + rng.below(120), rng), rng);
    const TreeProfile p = profile(t);
    const auto z = oracle::brute_subtree_sizes(t);
    const auto d = oracle::brute_depths(t);
    CHECK(p.subtree_size == z);
    CHECK(p.subtree_size[static_cast<std::size_t>(t.root())] == static_cast<std::int64_t>(t.size()));
    int h = 0;
    for (std::size_t v = 0; v < t.size(); ++v) {
      CHECK(p.depth[v] == d[v]);
      h = std::max(h, d[v]);
      std::int64_t below = 1;
      for (const NodeId c : t.children(static_cast<NodeId>(v))) below += p.subtree_size[static_cast<std::size_t>(c)];
      CHECK(below == p.subtree_size[v]);
    }
    CHECK(p.height == h);
  }
}

TEST_CASE("upsilon values") {
  const Tree s3 = gen_star(4), p3 = gen_path(3);
  CHECK(upsilon(s3, 2) == 19);
  CHECK(upsilon(p3, 2) == 14);
  CHECK(upsilon(s3, 3) == 67);
  CHECK(upsilon(Tree::from_parents({-1}), 7) == 1);
  CHECK_THROWS_AS(upsilon(p3, 0), std::invalid_argument);

  Rng rng(13);
  for (int rep = 0; rep < 20; ++rep) {
    const Tree t = oracle::random_recursive_tree(1 + rng.below(300), rng);
    const TreeProfile p = profile(t);
    CHECK(upsilon(p, 1) == BigInt(total_path_length(p)) + static_cast<std::int64_t>(t.size()));
  }
}

TEST_CASE("upsilon equals the tuple count on every shape up to 8 nodes") {
  CHECK(upsilon_tuple_oracle(gen_path(3), 2) == 14);
  CHECK(upsilon_tuple_oracle(Tree::from_parents({-1}), 4) == 1);
  CHECK(upsilon_tuple_oracle(gen_star(4), 3) == 67);
  for (std::size_t n = 1; n <= 8; ++n)
    for (const Tree& t : all_rooted_trees(n))
      for (int k = 1; k <= 3; ++k) CHECK(upsilon_tuple_oracle(t, k) == upsilon(t, k));
  CHECK_THROWS_AS(upsilon_tuple_oracle(gen_path(200), 4), std::length_error);
}

TEST_CASE("common path length") {
  CHECK(common_path_length(Tree::from_parents({-1}), 2) == 0);
  CHECK(common_path_length(gen_path(3), 1) == 3);
  CHECK(common_path_length(gen_star(4), 2) == 3);
  Rng rng(14);
  for (int rep = 0; rep < 20; ++rep) {
    const Tree t = oracle::random_recursive_tree(1 + rng.below(100), rng);
    const auto n = static_cast<std::int64_t>(t.size());
    for (int k = 1; k <= 4; ++k)
      CHECK(common_path_length(t, k) == upsilon(t, k) - boost::multiprecision::pow(BigInt(n), static_cast<unsigned>(k)));
  }
}

TEST_CASE("json round trip and file errors") {
  Rng rng(15);
  const Tree t = oracle::random_recursive_tree(40, rng);
  const Tree back = tree_from_json(tree_to_json(t));
  CHECK(std::vector<NodeId>(back.parents().begin(), back.parents().end()) ==
        std::vector<NodeId>(t.parents().begin(), t.parents().end()));
  CHECK_THROWS_AS(tree_from_json(nlohmann::json::parse(R"({"parent":[-1]})")), std::invalid_argument);
  CHECK_THROWS_AS(tree_from_json(nlohmann::json::parse(R"({"parents":[-1, 0.5]})")), std::invalid_argument);
  CHECK_THROWS(read_tree_file("/nonexistent/tree.json"));
}

TEST_CASE("canonical shape ignores node ids and child order") {
  Rng rng(16);
  for (int rep = 0; rep < 30; ++rep) {
    const Tree t = oracle::random_recursive_tree(1 + rng.below(60), rng);
    CHECK(canonical_shape(t) == canonical_shape(oracle::relabel(t, rng)));
  }
  CHECK(canonical_shape(gen_path(4)) != canonical_shape(gen_star(4)));
}

}  // TEST_SUITE
