#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "treeinv/split_sim.hpp"
#include "treeinv/stats.hpp"

using namespace treeinv;

namespace {

SplitSpec from_text(const char* text) { return SplitSpec::from_json(nlohmann::json::parse(text)); }

double bst_expected_tpl(std::int64_t n) {
  double h = 0;
  for (std::int64_t k = 1; k <= n; ++k) h += 1.0 / static_cast<double>(k);
  return 2.0 * static_cast<double>(n + 1) * h - 4.0 * static_cast<double>(n);
}

struct Moments {
  double mean = 0, se = 0;
};

Moments moments(const std::vector<double>& x) {
  return {mean(x), std::sqrt(variance(x) / static_cast<double>(x.size()))};
}

}  // namespace

TEST_SUITE("split_sim") {

TEST_CASE("observables obey their definitions") {
  Rng rng(51);
  const std::vector<SplitSpec> specs{SplitSpec::preset("bst"), SplitSpec::preset("median:1"),
                                     from_text(R"({"b":3,"s":4,"s0":2,"s1":1,"split_law":{"kind":"dirichlet","alpha":[1,1,2]}})")};
  for (const auto& spec : specs)
    for (const std::int64_t n : {1, 2, 7, 300}) {
      const SplitTree st = gen_split_tree(spec, n, rng);
      const SplitObservables o = observe_split_tree(st, rng);
      const TreeProfile p = profile(st.tree);
      std::int64_t ball_tpl = 0, node_tpl = 0;
      for (std::size_t v = 0; v < st.tree.size(); ++v) {
        ball_tpl += st.balls[v] * p.depth[v];
        node_tpl += p.depth[v];
      }
      CHECK(o.n == n);
      CHECK(o.nodes == static_cast<std::int64_t>(st.tree.size()));
      CHECK(o.ball_tpl == ball_tpl);
      CHECK(o.node_tpl == node_tpl);
      CHECK(o.z_rho_ball >= 0);
      CHECK(o.z_rho_ball <= spec.s0 * n);
      CHECK(o.ball_inv >= o.z_rho_ball);
      CHECK(o.node_inv >= 0);
      CHECK(o.node_inv <= node_tpl);
      if (n <= spec.s) CHECK(o.ball_inv == 0);
    }
}

TEST_CASE("one ball per node makes ball and node observables coincide") {
  Rng rng(52);
  for (int rep = 0; rep < 50; ++rep) {
    const auto o = observe_split(SplitSpec::preset("bst"), 1 + static_cast<std::int64_t>(rng.below(500)), rng);
    CHECK(o.ball_tpl == o.node_tpl);
    CHECK(o.ball_inv == o.node_inv);
    CHECK(o.nodes == o.n);
  }
}

TEST_CASE("ball inversions are centered at s0 times half the path length") {
  const SplitSpec spec = from_text(R"({"b":2,"s":3,"s0":2,"s1":0,"split_law":{"kind":"beta_pair","alpha":1,"beta":1}})");
  Rng rng(53);
  const SplitTree st = gen_split_tree(spec, 1000, rng);
  std::vector<double> inv;
  double tpl = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto o = observe_split_tree(st, rng);
    inv.push_back(static_cast<double>(o.ball_inv));
    tpl = static_cast<double>(o.ball_tpl);
  }
  const auto m = moments(inv);
  CHECK(std::abs(m.mean - spec.s0 * tpl / 2) < 4 * m.se);
}

TEST_CASE("normalized triples") {
  const SplitSpec bst = SplitSpec::preset("bst");
  const std::int64_t n = 1000;
  const MeanTable table = estimate_mean_table(bst, n, 4000, 54);
  CHECK(table.mean_ball_inv == doctest::Approx(bst.s0 * table.mean_ball_tpl / 2));
  CHECK(table.mean_nodes == n);
  Rng rng(55);
  std::vector<double> ys;
  for (int i = 0; i < 2000; ++i) {
    const auto o = observe_split(bst, n, rng);
    const Triple t = normalized_triple_ball(o, table, bst.s0);
    CHECK(std::abs(t.x - t.y - bst.s0 * t.w / 2) <= 1e-12 * (1 + std::abs(t.x)));
    const Triple u = normalized_triple_node(o, table);
    CHECK(std::abs(u.x - u.y - u.w / 2) <= 1e-12 * (1 + std::abs(u.x)));
    ys.push_back(t.y);
  }
  const auto m = moments(ys);
  CHECK(std::abs(m.mean) < 4 * m.se);

  const auto o1 = observe_split(bst, 1, rng);
  const Triple t1 = normalized_triple_ball(o1, estimate_mean_table(bst, 1, 10, 1), 1);
  CHECK(std::isfinite(t1.x));
  CHECK(std::isfinite(t1.y));
  CHECK(std::isfinite(t1.w));
}

TEST_CASE("mean table json round trip") {
  const MeanTable m = estimate_mean_table(SplitSpec::preset("median:1"), 200, 300, 56);
  const MeanTable back = MeanTable::from_json(m.to_json());
  CHECK(back.spec_hash == m.spec_hash);
  CHECK(back.n == m.n);
  CHECK(back.mean_ball_tpl == m.mean_ball_tpl);
  CHECK(back.mean_node_tpl == m.mean_node_tpl);
  CHECK(back.mean_nodes == m.mean_nodes);
  CHECK(back.reps == m.reps);
  CHECK(m.spec_hash == SplitSpec::preset("median:1").hash());
  CHECK_THROWS(MeanTable::from_json(nlohmann::json::parse(R"({"n":3})")));
  const auto a = estimate_mean_table(SplitSpec::preset("bst"), 300, 200, 9, 1);
  const auto b = estimate_mean_table(SplitSpec::preset("bst"), 300, 200, 9, 3);
  CHECK(a.to_json() == b.to_json());
}

TEST_CASE("entropy constant and limiting toll") {
  CHECK(mu(SplitSpec::preset("bst")) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(mu(SplitSpec::preset("dst:2")) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(mu(SplitSpec::preset("dst:3")) == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  // Dirichlet(1,1) is the uniform split
  CHECK(split_entropy({SplitLaw::Kind::dirichlet, {1, 1}}) == doctest::Approx(0.5).epsilon(1e-12));

  Rng rng(57);
  for (const char* name : {"dst:2", "dst:5"})
    for (int i = 0; i < 10; ++i) CHECK(sample_D(SplitSpec::preset(name), rng) == doctest::Approx(-1).epsilon(1e-12));

  const std::vector<SplitSpec> specs{SplitSpec::preset("bst"), SplitSpec::preset("median:2"),
                                     from_text(R"({"b":3,"s":1,"s0":1,"s1":0,"split_law":{"kind":"dirichlet","alpha":[0.3,1,2]}})")};
  for (const auto& spec : specs) {
    std::vector<double> d;
    for (int i = 0; i < 20000; ++i) {
      d.push_back(sample_D(spec, rng));
      CHECK(d.back() <= 1e-15);
      CHECK(d.back() >= -std::log(static_cast<double>(spec.b)) / mu(spec) - 1e-12);
    }
    // E[D] = -1 by the definition of mu
    const auto m = moments(d);
    CHECK(std::abs(m.mean + 1) < 4 * m.se);
  }
  const double v[] = {0.25, 0.75};
  CHECK(D_of(v, 0.5) == doctest::Approx(2 * (0.25 * std::log(0.25) + 0.75 * std::log(0.75))));
}

TEST_CASE("root ball inversions") {
  Rng rng(58);
  std::vector<double> a, b;
  for (int i = 0; i < 40000; ++i) {
    a.push_back(z_rho_ball_normalized(1000, 1, rng));
    b.push_back(z_rho_ball_normalized(10000, 2, rng));
  }
  const auto ma = moments(a);
  CHECK(std::abs(ma.mean - 0.4995) < 4 * ma.se);
  const auto mb = moments(b);
  CHECK(std::abs(mb.mean - 1) < 4 * mb.se + 1e-3);
  CHECK(variance(b) == doctest::Approx(2.0 / 12).epsilon(0.03));
  for (int i = 0; i < 200; ++i) {
    const double x = z_rho_ball_normalized(2, 1, rng);
    CHECK((x == 0.0 || x == 0.5));
  }
  // s0 = 1 is a single uniform rank
  std::map<std::int64_t, std::int64_t> c;
  for (int i = 0; i < 50000; ++i) ++c[draw_root_ball_inversions(5, 1, rng)];
  CHECK(chi_square_fit(c, {{0, 0.2}, {1, 0.2}, {2, 0.2}, {3, 0.2}, {4, 0.2}}).p_value > 1e-4);
  CHECK_THROWS(draw_root_ball_inversions(3, 4, rng));
}

TEST_CASE("root split vector sums to the forwarded balls") {
  Rng rng(59);
  const SplitSpec spec = from_text(R"({"b":3,"s":4,"s0":2,"s1":1,"split_law":{"kind":"dirichlet","alpha":[1,1,2]}})");
  for (int i = 0; i < 100; ++i) {
    const auto r = sample_root_split(spec, 100, rng);
    REQUIRE(r.size() == 3);
    std::int64_t s = 0;
    for (const auto x : r) {
      CHECK(x >= spec.s1);
      s += x;
    }
    CHECK(s == 100 - spec.s0);
  }
}

TEST_CASE("root split fractions approach the split vector") {
  // bst: n_1 / n tends to a uniform variable
  Rng rng(60);
  const SplitSpec bst = SplitSpec::preset("bst");
  const std::int64_t n = 100000;
  std::vector<double> f;
  for (int i = 0; i < 100000; ++i) f.push_back(static_cast<double>(sample_root_split(bst, n, rng)[0]) / n);
  CHECK(mean(f) == doctest::Approx(0.5).epsilon(0.01));
  CHECK(variance(f) == doctest::Approx(1.0 / 12).epsilon(0.01));
}

TEST_CASE("expected path length table") {
  const ExpectedTplTable bst(SplitSpec::preset("bst"), 2000);
  for (const std::int64_t n : {1, 2, 3, 10, 500, 2000}) {
    CHECK(bst.ball_tpl(n) == doctest::Approx(bst_expected_tpl(n)).epsilon(1e-10));
    CHECK(bst.node_tpl(n) == doctest::Approx(bst_expected_tpl(n)).epsilon(1e-10));
    CHECK(bst.nodes(n) == doctest::Approx(static_cast<double>(n)));
  }
  CHECK_THROWS_AS(bst.ball_tpl(2001), std::out_of_range);

  // other specs against Monte Carlo
  const std::vector<SplitSpec> specs{SplitSpec::preset("median:1"), SplitSpec::preset("dst:3"),
                                     from_text(R"({"b":2,"s":3,"s0":0,"s1":1,"split_law":{"kind":"beta_pair","alpha":2,"beta":1}})"),
                                     from_text(R"({"b":3,"s":2,"s0":1,"s1":0,"split_law":{"kind":"dirichlet","alpha":[0.5,1,3]}})")};
  Rng rng(60);
  for (const auto& spec : specs) {
    const std::int64_t n = 300;
    const ExpectedTplTable table(spec, n);
    std::vector<double> bt, nt, nn;
    for (int i = 0; i < 20000; ++i) {
      const auto o = observe_split(spec, n, rng);
      bt.push_back(static_cast<double>(o.ball_tpl));
      nt.push_back(static_cast<double>(o.node_tpl));
      nn.push_back(static_cast<double>(o.nodes));
    }
    CAPTURE(spec.to_json().dump());
    const auto mb = moments(bt), mn = moments(nt), mc = moments(nn);
    CHECK(std::abs(mb.mean - table.ball_tpl(n)) < 4.5 * mb.se);
    CHECK(std::abs(mn.mean - table.node_tpl(n)) < 4.5 * mn.se);
    CHECK(std::abs(mc.mean - table.nodes(n)) < 4.5 * mc.se + 1e-9);
  }
}

TEST_CASE("toll given the root split") {
  const SplitSpec bst = SplitSpec::preset("bst");
  const ExpectedTplTable table(bst, 100);
  const std::vector<std::int64_t> split{30, 69};
  CHECK(toll_ball(100, split, table) ==
        doctest::Approx((bst_expected_tpl(30) + bst_expected_tpl(69) - bst_expected_tpl(100)) / 100).epsilon(1e-10));
  // averaging over the uniform root split: E tpl(n) = n - 1 + E sum tpl(n_i)
  double avg = 0;
  for (std::int64_t k = 0; k < 100; ++k) avg += toll_ball(100, {k, 99 - k}, table) / 100;
  CHECK(avg == doctest::Approx(-99.0 / 100).epsilon(1e-10));

  // for large n the toll is close in law to D
  const std::int64_t n = 100000;
  const ExpectedTplTable big(bst, n);
  Rng rng(62);
  std::vector<double> toll, d;
  for (int i = 0; i < 10000; ++i) {
    toll.push_back(toll_ball(n, sample_root_split(bst, n, rng), big));
    d.push_back(sample_D(bst, rng));
  }
  CHECK(ks_distance(toll, d) <= 0.05);
}

TEST_CASE("stack-based path length draw has the tree law") {
  Rng rng(61);
  const std::vector<SplitSpec> specs{SplitSpec::preset("bst"), SplitSpec::preset("median:1"),
                                     from_text(R"({"b":3,"s":2,"s0":1,"s1":0,"split_law":{"kind":"dirichlet","alpha":[0.5,1,3]}})")};
  for (const auto& spec : specs) {
    const std::int64_t n = 400;
    std::vector<double> fast, slow, fast_nodes, slow_nodes;
    for (int i = 0; i < 20000; ++i) {
      const TplDraw d = split_tpl_draw(spec, n, rng);
      fast.push_back(static_cast<double>(d.ball_tpl));
      fast_nodes.push_back(static_cast<double>(d.nodes));
      const auto o = observe_split(spec, n, rng);
      slow.push_back(static_cast<double>(o.ball_tpl));
      slow_nodes.push_back(static_cast<double>(o.nodes));
      if (spec.s0 == 1 && spec.s == 1) CHECK(d.node_tpl == d.ball_tpl);
    }
    CAPTURE(spec.to_json().dump());
    CHECK(ks_distance(fast, slow) < 0.02);
    CHECK(ks_distance(fast_nodes, slow_nodes) < 0.02 + (spec.s == 1 ? 1 : 0));
    const auto a = moments(fast), b = moments(slow);
    CHECK(std::abs(a.mean - b.mean) < 4.5 * std::hypot(a.se, b.se));
  }
}

}  // TEST_SUITE
