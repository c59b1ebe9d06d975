#include "treeinv/split_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/digamma.hpp>

#include "treeinv/parallel.hpp"

namespace treeinv {

namespace {

// Floyd's sampling of c distinct ranks from 1..n; returns sum of (rank_(i) - i).
std::int64_t ranks_excess(std::int64_t n, std::int64_t c, Rng& rng, std::vector<std::int64_t>& buf) {
  buf.clear();
  for (std::int64_t j = n - c + 1; j <= n; ++j) {
    const auto t = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(j))) + 1;
    if (std::find(buf.begin(), buf.end(), t) == buf.end())
      buf.push_back(t);
    else
      buf.push_back(j);
  }
  std::sort(buf.begin(), buf.end());
  std::int64_t s = 0;
  for (std::size_t i = 0; i < buf.size(); ++i) s += buf[i] - static_cast<std::int64_t>(i) - 1;
  return s;
}

bool uniform_binary_split(const SplitSpec& spec) {
  return spec.b == 2 && spec.law.kind == SplitLaw::Kind::beta_pair && spec.law.params[0] == 1.0 &&
         spec.law.params[1] == 1.0;
}

}  // namespace

SplitObservables observe_split_tree(const SplitTree& st, Rng& rng) {
  const Tree& t = st.tree;
  const TreeProfile p = profile(t);
  SplitObservables o;
  o.n = st.ball_count;
  o.nodes = static_cast<std::int64_t>(t.size());
  for (std::size_t v = 0; v < t.size(); ++v) {
    o.node_tpl += p.depth[v];
    o.ball_tpl += static_cast<std::int64_t>(st.balls[v]) * p.depth[v];
  }

  const std::uint64_t inv_seed = rng();
  Rng node_rng(inv_seed), ball_rng(inv_seed);
  std::vector<std::int64_t> buf;
  for (std::size_t v = 0; v < t.size(); ++v) {
    const auto z = p.subtree_size[v];
    if (z > 1) o.node_inv += static_cast<std::int64_t>(node_rng.below(static_cast<std::uint64_t>(z)));
    const std::int64_t c = st.balls[v], nu = st.subtree_balls[v];
    if (c > 0 && nu > c) {
      const std::int64_t share = ranks_excess(nu, c, ball_rng, buf);
      o.ball_inv += share;
      if (static_cast<NodeId>(v) == t.root()) o.z_rho_ball = share;
    }
  }

  o.root_split.assign(static_cast<std::size_t>(std::max<std::int32_t>(1, *std::max_element(st.slot.begin(), st.slot.end()) + 1)), 0);
  for (const NodeId c : t.children(t.root())) {
    const auto slot = static_cast<std::size_t>(st.slot[static_cast<std::size_t>(c)]);
    if (slot >= o.root_split.size()) o.root_split.resize(slot + 1, 0);
    o.root_split[slot] = st.subtree_balls[static_cast<std::size_t>(c)];
  }
  return o;
}

SplitObservables observe_split(const SplitSpec& spec, std::int64_t n, Rng& rng) {
  const SplitTree st = gen_split_tree(spec, n, rng);
  SplitObservables o = observe_split_tree(st, rng);
  o.root_split.resize(static_cast<std::size_t>(spec.b), 0);
  return o;
}

SplitObservables observe_split(const SplitSpec& spec, std::int64_t n, std::uint64_t seed) {
  Rng rng(seed);
  return observe_split(spec, n, rng);
}

std::int64_t draw_root_ball_inversions(std::int64_t n, std::int64_t s0, Rng& rng) {
  if (s0 < 1 || s0 > n) throw std::invalid_argument("root ball inversions: need 1 <= s0 <= n");
  std::vector<std::int64_t> buf;
  return ranks_excess(n, s0, rng, buf);
}

double z_rho_ball_normalized(std::int64_t n, std::int64_t s0, Rng& rng) {
  return static_cast<double>(draw_root_ball_inversions(n, s0, rng)) / static_cast<double>(n);
}

nlohmann::json MeanTable::to_json() const {
  return {{"spec_hash", spec_hash},         {"n", n},
          {"mean_ball_inv", mean_ball_inv}, {"mean_ball_tpl", mean_ball_tpl},
          {"mean_node_inv", mean_node_inv}, {"mean_node_tpl", mean_node_tpl},
          {"mean_nodes", mean_nodes},       {"reps", reps}};
}

MeanTable MeanTable::from_json(const nlohmann::json& j) {
  for (const char* key : {"spec_hash", "n", "mean_ball_inv", "mean_ball_tpl"})
    if (!j.contains(key)) throw std::invalid_argument(std::string("mean table: missing \"") + key + "\"");
  MeanTable m;
  m.spec_hash = j["spec_hash"].get<std::string>();
  m.n = j["n"].get<std::int64_t>();
  m.mean_ball_inv = j["mean_ball_inv"].get<double>();
  m.mean_ball_tpl = j["mean_ball_tpl"].get<double>();
  m.mean_node_tpl = j.value("mean_node_tpl", 0.0);
  m.mean_node_inv = j.value("mean_node_inv", m.mean_node_tpl / 2);
  m.mean_nodes = j.value("mean_nodes", 0.0);
  m.reps = j.value("reps", std::int64_t{0});
  return m;
}

MeanTable estimate_mean_table(const SplitSpec& spec, std::int64_t n, std::size_t reps, std::uint64_t seed,
                              unsigned threads) {
  spec.validate();
  if (reps < 1) throw std::invalid_argument("mean table: reps must be >= 1");
  std::vector<TplDraw> draws(reps);
  parallel_for(reps, threads, [&](std::size_t i) {
    Rng rng = Rng::stream(seed, i);
    draws[i] = split_tpl_draw(spec, n, rng);
  });
  long double ball = 0, node = 0, count = 0;
  for (const auto& d : draws) {
    ball += d.ball_tpl;
    node += d.node_tpl;
    count += d.nodes;
  }
  const auto r = static_cast<long double>(reps);
  MeanTable m;
  m.spec_hash = spec.hash();
  m.n = n;
  m.reps = static_cast<std::int64_t>(reps);
  m.mean_ball_tpl = static_cast<double>(ball / r);
  m.mean_ball_inv = spec.s0 * m.mean_ball_tpl / 2;
  m.mean_node_tpl = static_cast<double>(node / r);
  m.mean_node_inv = m.mean_node_tpl / 2;
  m.mean_nodes = static_cast<double>(count / r);
  return m;
}

Triple normalized_triple_ball(const SplitObservables& o, const MeanTable& m, int s0) {
  const auto n = static_cast<double>(o.n);
  const auto inv = static_cast<double>(o.ball_inv), tpl = static_cast<double>(o.ball_tpl);
  return {(inv - m.mean_ball_inv) / n, (inv - s0 * tpl / 2) / n, (tpl - m.mean_ball_tpl) / n};
}

Triple normalized_triple_node(const SplitObservables& o, const MeanTable& m) {
  const auto n = static_cast<double>(o.n);
  const auto inv = static_cast<double>(o.node_inv), tpl = static_cast<double>(o.node_tpl);
  return {(inv - m.mean_node_inv) / n, (inv - tpl / 2) / n, (tpl - m.mean_node_tpl) / n};
}

double split_entropy(const SplitLaw& law) {
  using boost::math::digamma;
  const auto& p = law.params;
  double e = 0;  // sum_i E[V_i ln V_i]
  switch (law.kind) {
    case SplitLaw::Kind::constant:
      for (const double v : p)
        if (v > 0) e += v * std::log(v);
      break;
    case SplitLaw::Kind::dirichlet: {
      double a = 0;
      for (const double v : p) a += v;
      // V_i ~ Beta(alpha_i, A - alpha_i): E[V ln V] = alpha_i/A (psi(alpha_i + 1) - psi(A + 1))
      for (const double v : p) e += v / a * (digamma(v + 1) - digamma(a + 1));
      break;
    }
    case SplitLaw::Kind::beta_pair: {
      const double a = p[0], b = p[1], s = a + b;
      e = a / s * (digamma(a + 1) - digamma(s + 1)) + b / s * (digamma(b + 1) - digamma(s + 1));
      break;
    }
  }
  return -e;
}

double D_of(std::span<const double> v, double mu_value) {
  double s = 0;
  for (const double x : v)
    if (x > 0) s += x * std::log(x);
  return s / mu_value;
}

double sample_D(const SplitSpec& spec, Rng& rng) {
  std::vector<double> v(static_cast<std::size_t>(spec.b));
  spec.law.sample(rng, v);
  return D_of(v, mu(spec));
}

std::vector<std::int64_t> sample_root_split(const SplitSpec& spec, std::int64_t n, Rng& rng) {
  spec.validate();
  std::vector<std::int64_t> out(static_cast<std::size_t>(spec.b), 0);
  if (n <= spec.s) return out;
  std::vector<double> v(out.size());
  spec.law.sample(rng, v);
  sample_multinomial(n - spec.s0 - spec.b * spec.s1, v, rng, out);
  for (auto& c : out) c += spec.s1;
  return out;
}

ExpectedTplTable::ExpectedTplTable(const SplitSpec& spec, std::int64_t n_max) {
  spec.validate();
  if (n_max < 0) throw std::invalid_argument("expected tpl table: n must be >= 0");
  const bool uniform = uniform_binary_split(spec);
  if (!uniform && n_max > 50000)
    throw std::invalid_argument("expected tpl table: quadratic cost for this split law; n must be <= 50000");
  const auto size = static_cast<std::size_t>(n_max) + 1;
  ball_tpl_.assign(size, 0);
  node_tpl_.assign(size, 0);
  nodes_.assign(size, 0);
  const std::int64_t s = spec.s, s0 = spec.s0, s1 = spec.s1, b = spec.b;

  // Prefix sums over the filled part of the table (uniform split only).
  std::vector<long double> pre_ball{0}, pre_node{0}, pre_count{0};
  auto push_prefix = [&](std::size_t m) {
    pre_ball.push_back(pre_ball.back() + ball_tpl_[m]);
    pre_node.push_back(pre_node.back() + node_tpl_[m] + nodes_[m]);
    pre_count.push_back(pre_count.back() + nodes_[m]);
  };

  // log pmf of a child's ball count above s1 (k = 0..M), per slot
  auto child_pmf = [&](std::int64_t M, std::size_t slot, std::vector<double>& out) {
    out.assign(static_cast<std::size_t>(M) + 1, 0);
    const double lfm = std::lgamma(M + 1.0);
    auto lchoose = [&](std::int64_t k) { return lfm - std::lgamma(k + 1.0) - std::lgamma(M - k + 1.0); };
    auto lbeta = [](double x, double y) { return std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y); };
    auto betabin = [&](double a, double bb, std::int64_t k) {
      return std::exp(lchoose(k) + lbeta(k + a, M - k + bb) - lbeta(a, bb));
    };
    const auto& p = spec.law.params;
    for (std::int64_t k = 0; k <= M; ++k) {
      double q = 0;
      switch (spec.law.kind) {
        case SplitLaw::Kind::constant: {
          const double pi = p[slot];
          if (pi <= 0)
            q = k == 0 ? 1 : 0;
          else
            q = std::exp(lchoose(k) + k * std::log(pi) + (M - k) * std::log1p(-pi));
          break;
        }
        case SplitLaw::Kind::dirichlet: {
          double a = 0;
          for (const double v : p) a += v;
          q = betabin(p[slot], a - p[slot], k);
          break;
        }
        case SplitLaw::Kind::beta_pair:
          q = 0.5 * betabin(p[0], p[1], k) + 0.5 * betabin(p[1], p[0], k);
          break;
      }
      out[static_cast<std::size_t>(k)] = q;
    }
  };

  std::vector<double> pmf;
  for (std::int64_t m = 0; m <= n_max; ++m) {
    const auto mi = static_cast<std::size_t>(m);
    if (m == 0) {
      if (uniform) push_prefix(0);
      continue;
    }
    if (m <= s) {
      nodes_[mi] = 1;
      if (uniform) push_prefix(mi);
      continue;
    }
    const std::int64_t M = m - s0 - b * s1;
    long double e_ball = 0, e_node = 0, e_count = 0, self = 0;
    if (uniform) {
      // child count is s1 + K with K uniform on 0..M; c <= M + s1 < m unless s0 = s1 = 0
      const std::int64_t hi = std::min<std::int64_t>(M + s1, m - 1);
      const auto lo_i = static_cast<std::size_t>(s1), hi_i = static_cast<std::size_t>(hi) + 1;
      const long double w = 2.0L / (M + 1);
      e_ball = w * (pre_ball[hi_i] - pre_ball[lo_i]);
      e_node = w * (pre_node[hi_i] - pre_node[lo_i]);
      e_count = w * (pre_count[hi_i] - pre_count[lo_i]);
      if (M + s1 == m) self = w;
    } else {
      for (std::size_t slot = 0; slot < static_cast<std::size_t>(b); ++slot) {
        child_pmf(M, slot, pmf);
        for (std::int64_t k = 0; k <= M; ++k) {
          const std::int64_t c = k + s1;
          const long double q = pmf[static_cast<std::size_t>(k)];
          if (c == m) {
            self += q;
            continue;
          }
          const auto ci = static_cast<std::size_t>(c);
          e_ball += q * ball_tpl_[ci];
          e_node += q * (node_tpl_[ci] + nodes_[ci]);
          e_count += q * nodes_[ci];
        }
      }
    }
    // A child holding all m balls (possible only when s0 = s1 = 0) refers back to row m.
    if (self >= 1) throw std::invalid_argument("expected tpl table: degenerate split law");
    const long double scale = 1 / (1 - self);
    nodes_[mi] = static_cast<double>((1 + e_count) * scale);
    ball_tpl_[mi] = static_cast<double>((m - s0 + e_ball) * scale);
    node_tpl_[mi] = static_cast<double>((e_node + self * nodes_[mi]) * scale);
    if (uniform) push_prefix(mi);
  }
}

double ExpectedTplTable::at(const std::vector<double>& v, std::int64_t n) const {
  if (n < 0 || n > n_max())
    throw std::out_of_range("expected tpl table does not cover n = " + std::to_string(n) + " (max " +
                            std::to_string(n_max()) + ")");
  return v[static_cast<std::size_t>(n)];
}

double toll_ball(std::int64_t n, const std::vector<std::int64_t>& root_split, const ExpectedTplTable& table) {
  double t = -table.ball_tpl(n);
  for (const auto c : root_split) t += table.ball_tpl(c);
  return t / static_cast<double>(n);
}

TplDraw split_tpl_draw(const SplitSpec& spec, std::int64_t n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("split tree: need n >= 1");
  const bool uniform = uniform_binary_split(spec);
  const auto b = static_cast<std::size_t>(spec.b);
  std::vector<double> v(b);
  std::vector<std::int64_t> counts(b);
  TplDraw d;
  std::vector<std::pair<std::int64_t, std::int64_t>> stack{{n, 0}};  // (balls, depth)
  while (!stack.empty()) {
    const auto [c, depth] = stack.back();
    stack.pop_back();
    ++d.nodes;
    d.node_tpl += depth;
    if (c <= spec.s) {
      d.ball_tpl += c * depth;
      continue;
    }
    d.ball_tpl += spec.s0 * depth;
    const std::int64_t M = c - spec.s0 - spec.b * spec.s1;
    if (uniform) {
      // Binomial(M, U) with U uniform is uniform on 0..M.
      counts[0] = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(M) + 1));
      counts[1] = M - counts[0];
    } else {
      spec.law.sample(rng, v);
      sample_multinomial(M, v, rng, counts);
    }
    for (std::size_t i = 0; i < b; ++i)
      if (counts[i] + spec.s1 > 0) stack.emplace_back(counts[i] + spec.s1, depth + 1);
  }
  return d;
}

}  // namespace treeinv
