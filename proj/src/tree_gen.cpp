#include "treeinv/tree_gen.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <deque>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

namespace treeinv {

// ---------------------------------------------------------------------------
// Deterministic families
// ---------------------------------------------------------------------------

namespace {

void require_size(std::size_t n) {
  if (n == 0) throw std::invalid_argument("tree size must be >= 1");
}

Tree heap_tree(int b, std::size_t n) {
  std::vector<NodeId> parents(n);
  parents[0] = kNoParent;
  for (std::size_t i = 1; i < n; ++i) parents[i] = static_cast<NodeId>((i - 1) / static_cast<std::size_t>(b));
  return Tree::from_parents(std::move(parents));
}

}  // namespace

Tree gen_path(std::size_t n) {
  require_size(n);
  std::vector<NodeId> parents(n);
  for (std::size_t i = 0; i < n; ++i) parents[i] = static_cast<NodeId>(i) - 1;
  return Tree::from_parents(std::move(parents));
}

Tree gen_star(std::size_t n) {
  require_size(n);
  std::vector<NodeId> parents(n, 0);
  parents[0] = kNoParent;
  return Tree::from_parents(std::move(parents));
}

Tree gen_complete_bary(int b, int m) {
  if (b < 2) throw std::invalid_argument("complete b-ary tree: b must be >= 2");
  if (m < 0) throw std::invalid_argument("complete b-ary tree: height must be >= 0");
  std::size_t n = 0, level = 1;
  for (int d = 0; d <= m; ++d) {
    n += level;
    if (n > (1u << 30)) throw std::invalid_argument("complete b-ary tree: too many nodes");
    level *= static_cast<std::size_t>(b);
  }
  return heap_tree(b, n);
}

Tree gen_balanced_bary(int b, std::size_t n) {
  if (b < 2) throw std::invalid_argument("balanced b-ary tree: b must be >= 2");
  require_size(n);
  return heap_tree(b, n);
}

std::vector<Tree> all_rooted_trees(std::size_t n) {
  require_size(n);
  if (n > 10) throw std::invalid_argument("all_rooted_trees: n must be <= 10");
  // Every shape arises from some parent array with parent[i] < i; keep one per shape.
  std::vector<Tree> out;
  std::set<std::string> seen;
  std::vector<NodeId> parents(n, 0);
  parents[0] = kNoParent;
  for (;;) {
    Tree t = Tree::from_parents(parents);
    if (seen.insert(canonical_shape(t)).second) out.push_back(std::move(t));
    std::size_t i = n;
    while (i > 1) {
      --i;
      if (static_cast<std::size_t>(++parents[i]) < i) break;
      parents[i] = 0;
      if (i == 1) i = 0;
    }
    if (i <= 1) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Split laws and specs
// ---------------------------------------------------------------------------

namespace {

double gamma_draw(double shape, Rng& rng) {
  std::gamma_distribution<double> g(shape, 1.0);
  return g(rng.engine());
}

}  // namespace

void SplitLaw::sample(Rng& rng, std::span<double> out) const {
  switch (kind) {
    case Kind::constant:
      std::copy(params.begin(), params.end(), out.begin());
      return;
    case Kind::dirichlet: {
      double total = 0;
      do {
        total = 0;
        for (std::size_t i = 0; i < out.size(); ++i) total += out[i] = gamma_draw(params[i], rng);
      } while (total <= 0);
      for (auto& v : out) v /= total;
      return;
    }
    case Kind::beta_pair: {
      double x = 0, y = 0;
      do {
        x = gamma_draw(params[0], rng);
        y = gamma_draw(params[1], rng);
      } while (x + y <= 0);
      const double v = x / (x + y);
      const bool swap = (rng() >> 63) != 0;
      out[0] = swap ? 1.0 - v : v;
      out[1] = swap ? v : 1.0 - v;
      return;
    }
  }
}

nlohmann::json SplitLaw::to_json() const {
  switch (kind) {
    case Kind::constant:
      return {{"kind", "constant"}, {"p", params}};
    case Kind::dirichlet:
      return {{"kind", "dirichlet"}, {"alpha", params}};
    case Kind::beta_pair:
      return {{"kind", "beta_pair"}, {"alpha", params[0]}, {"beta", params[1]}};
  }
  return {};
}

SplitLaw SplitLaw::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind")) throw std::invalid_argument("split_law: missing \"kind\"");
  const auto kind = j["kind"].get<std::string>();
  SplitLaw law;
  if (kind == "constant") {
    law.kind = Kind::constant;
    if (!j.contains("p")) throw std::invalid_argument("split_law: constant law needs \"p\"");
    law.params = j["p"].get<std::vector<double>>();
  } else if (kind == "dirichlet") {
    law.kind = Kind::dirichlet;
    if (!j.contains("alpha")) throw std::invalid_argument("split_law: dirichlet law needs \"alpha\"");
    law.params = j["alpha"].get<std::vector<double>>();
  } else if (kind == "beta_pair") {
    law.kind = Kind::beta_pair;
    law.params = {j.value("alpha", 1.0), j.value("beta", 1.0)};
  } else {
    throw std::invalid_argument("split_law: unknown kind \"" + kind + "\"");
  }
  return law;
}

void SplitSpec::validate() const {
  if (b < 2) throw std::invalid_argument("split spec: need b >= 2");
  if (s <= 0) throw std::invalid_argument("split spec: need s > 0");
  if (s0 < 0 || s0 > s) throw std::invalid_argument("split spec: need 0 <= s0 <= s");
  if (s1 < 0 || b * s1 > s + 1 - s0) throw std::invalid_argument("split spec: need 0 <= b*s1 <= s+1-s0");
  const auto& p = law.params;
  switch (law.kind) {
    case SplitLaw::Kind::constant: {
      if (p.size() != static_cast<std::size_t>(b))
        throw std::invalid_argument("split spec: constant law needs b probabilities");
      double sum = 0;
      for (const double v : p) {
        if (!(v >= 0)) throw std::invalid_argument("split spec: negative split probability");
        if (v >= 1) throw std::invalid_argument("split spec: a split probability equal to 1 never splits");
        sum += v;
      }
      if (std::abs(sum - 1) > 1e-12) throw std::invalid_argument("split spec: split probabilities must sum to 1");
      break;
    }
    case SplitLaw::Kind::dirichlet:
      if (p.size() != static_cast<std::size_t>(b))
        throw std::invalid_argument("split spec: dirichlet law needs b parameters");
      for (const double v : p)
        if (!(v > 0)) throw std::invalid_argument("split spec: dirichlet parameters must be positive");
      break;
    case SplitLaw::Kind::beta_pair:
      if (b != 2) throw std::invalid_argument("split spec: beta_pair law requires b = 2");
      if (p.size() != 2 || !(p[0] > 0) || !(p[1] > 0))
        throw std::invalid_argument("split spec: beta_pair parameters must be positive");
      break;
  }
}

nlohmann::json SplitSpec::to_json() const {
  return {{"b", b}, {"s", s}, {"s0", s0}, {"s1", s1}, {"split_law", law.to_json()}};
}

SplitSpec SplitSpec::from_json(const nlohmann::json& j) {
  SplitSpec spec;
  for (const char* key : {"b", "s", "s0", "s1", "split_law"})
    if (!j.contains(key)) throw std::invalid_argument(std::string("split spec: missing \"") + key + "\"");
  spec.b = j["b"].get<int>();
  spec.s = j["s"].get<int>();
  spec.s0 = j["s0"].get<int>();
  spec.s1 = j["s1"].get<int>();
  spec.law = SplitLaw::from_json(j["split_law"]);
  spec.validate();
  return spec;
}

SplitSpec SplitSpec::preset(std::string_view name) {
  SplitSpec spec;
  auto arg = [&](std::string_view prefix) -> int {
    const auto rest = std::string(name.substr(prefix.size()));
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(rest, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != rest.size() || rest.empty())
      throw std::invalid_argument("bad preset parameter in \"" + std::string(name) + "\"");
    return v;
  };
  if (name == "bst") {
    spec = {2, 1, 1, 0, {SplitLaw::Kind::beta_pair, {1.0, 1.0}}};
  } else if (name.starts_with("dst:")) {
    const int b = arg("dst:");
    if (b < 2) throw std::invalid_argument("preset dst:B needs B >= 2");
    spec = {b, 1, 1, 0, {SplitLaw::Kind::constant, std::vector<double>(static_cast<std::size_t>(b), 1.0 / b)}};
  } else if (name.starts_with("median:")) {
    // median-of-(2k+1) search tree: a full leaf holds 2k balls; on overflow the median
    // stays and k balls go to each side before the last ball follows the split.
    const int k = arg("median:");
    if (k < 1) throw std::invalid_argument("preset median:K needs K >= 1");
    spec = {2, 2 * k, 1, k, {SplitLaw::Kind::beta_pair, {k + 1.0, k + 1.0}}};
  } else {
    throw std::invalid_argument("unknown split preset \"" + std::string(name) +
                                "\" (expected bst, dst:B or median:K)");
  }
  spec.validate();
  return spec;
}

std::string SplitSpec::hash() const {
  // FNV-1a over the canonical JSON text.
  const std::string text = to_json().dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// Binomial / multinomial
// ---------------------------------------------------------------------------

std::int64_t sample_binomial(std::int64_t m, double p, Rng& rng) {
  if (m <= 0 || p <= 0) return 0;
  if (p >= 1) return m;
  if (m <= 16) {
    std::int64_t c = 0;
    for (std::int64_t i = 0; i < m; ++i) c += rng.uniform() < p;
    return c;
  }
  std::binomial_distribution<std::int64_t> dist(m, p);
  return dist(rng.engine());
}

void sample_multinomial(std::int64_t m, std::span<const double> probs, Rng& rng,
                        std::span<std::int64_t> out) {
  double mass = 1.0;
  for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
    const double q = mass > 0 ? std::clamp(probs[i] / mass, 0.0, 1.0) : 0.0;
    out[i] = sample_binomial(m, q, rng);
    m -= out[i];
    mass -= probs[i];
  }
  out[probs.size() - 1] = m;
}

// ---------------------------------------------------------------------------
// Split trees
// ---------------------------------------------------------------------------

namespace {

void fill_subtree_balls(SplitTree& st) {
  st.subtree_balls.assign(st.balls.begin(), st.balls.end());
  const auto order = st.tree.dfs_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const NodeId p = st.tree.parent(*it);
    if (p != kNoParent)
      st.subtree_balls[static_cast<std::size_t>(p)] += st.subtree_balls[static_cast<std::size_t>(*it)];
  }
}

}  // namespace

SplitTree gen_split_tree(const SplitSpec& spec, std::int64_t n, Rng& rng) {
  spec.validate();
  if (n < 1) throw std::invalid_argument("split tree: need n >= 1");
  const auto b = static_cast<std::size_t>(spec.b);

  std::vector<NodeId> parents{kNoParent};
  std::vector<std::int32_t> balls{0}, slots{-1};
  std::vector<std::int64_t> pending{n};  // n_u of nodes not yet expanded
  std::vector<double> v(b);
  std::vector<std::int64_t> counts(b);

  // Nodes are numbered in BFS order, so each node's children are contiguous and in slot order.
  for (std::size_t u = 0; u < parents.size(); ++u) {
    const std::int64_t nu = pending[u];
    if (nu <= spec.s) {
      balls[u] = static_cast<std::int32_t>(nu);
      continue;
    }
    balls[u] = spec.s0;
    spec.law.sample(rng, v);
    sample_multinomial(nu - spec.s0 - spec.b * spec.s1, v, rng, counts);
    for (std::size_t i = 0; i < b; ++i) {
      const std::int64_t c = counts[i] + spec.s1;
      if (c == 0) continue;
      parents.push_back(static_cast<NodeId>(u));
      balls.push_back(0);
      slots.push_back(static_cast<std::int32_t>(i));
      pending.push_back(c);
    }
  }

  SplitTree st{Tree::from_parents(std::move(parents)), std::move(balls), {}, std::move(slots), n};
  fill_subtree_balls(st);
  return st;
}

SplitTree gen_split_tree(const SplitSpec& spec, std::int64_t n, std::uint64_t seed) {
  Rng rng(seed);
  return gen_split_tree(spec, n, rng);
}

SplitTree gen_split_tree_trickle(const SplitSpec& spec, std::int64_t n, Rng& rng) {
  spec.validate();
  if (n < 1) throw std::invalid_argument("split tree: need n >= 1");
  const auto b = static_cast<std::size_t>(spec.b);

  // Nodes of the infinite b-ary tree that have been touched, each with its own split vector.
  struct Bucket {
    std::int64_t count = 0;
    bool internal = false;
    std::vector<std::int32_t> child;
    std::vector<double> split;
  };
  std::vector<Bucket> nodes;
  auto make = [&] {
    Bucket node;
    node.child.assign(b, -1);
    node.split.resize(b);
    spec.law.sample(rng, node.split);
    nodes.push_back(std::move(node));
    return static_cast<std::int32_t>(nodes.size() - 1);
  };
  auto choose = [&](std::int32_t u) {
    const double x = rng.uniform();
    double acc = 0;
    const auto& sv = nodes[static_cast<std::size_t>(u)].split;
    for (std::size_t i = 0; i + 1 < b; ++i) {
      acc += sv[i];
      if (x < acc) return i;
    }
    return b - 1;
  };
  auto child_of = [&](std::int32_t u, std::size_t i) {
    if (nodes[static_cast<std::size_t>(u)].child[i] < 0) {
      const std::int32_t c = make();
      nodes[static_cast<std::size_t>(u)].child[i] = c;
    }
    return nodes[static_cast<std::size_t>(u)].child[i];
  };

  make();
  std::vector<std::pair<std::int32_t, std::int64_t>> overflow;
  std::vector<std::int64_t> received(b);
  for (std::int64_t ball = 0; ball < n; ++ball) {
    std::int32_t u = 0;
    while (nodes[static_cast<std::size_t>(u)].internal) u = child_of(u, choose(u));
    if (nodes[static_cast<std::size_t>(u)].count < spec.s) {
      ++nodes[static_cast<std::size_t>(u)].count;
      continue;
    }
    // A full leaf receiving one more ball splits: s0 stay (which ones is irrelevant to the
    // shape), s1 go to every child, the rest follow the node's split vector.
    overflow.assign(1, {u, spec.s + 1});
    while (!overflow.empty()) {
      const auto [w, total] = overflow.back();
      overflow.pop_back();
      auto& node = nodes[static_cast<std::size_t>(w)];
      if (total <= spec.s) {
        node.count = total;
        continue;
      }
      node.internal = true;
      node.count = spec.s0;
      std::fill(received.begin(), received.end(), spec.s1);
      for (std::int64_t r = 0; r < total - spec.s0 - spec.b * spec.s1; ++r) ++received[choose(w)];
      for (std::size_t i = 0; i < b; ++i)
        if (received[i] > 0) overflow.emplace_back(child_of(w, i), received[i]);
    }
  }

  // Relabel in BFS order; every created bucket holds at least one ball in its subtree.
  std::vector<NodeId> parents{kNoParent};
  std::vector<std::int32_t> balls, slots{-1};
  std::deque<std::int32_t> queue{0};
  std::vector<std::int32_t> order;
  while (!queue.empty()) {
    const std::int32_t u = queue.front();
    queue.pop_front();
    const auto id = static_cast<NodeId>(order.size());
    order.push_back(u);
    balls.push_back(static_cast<std::int32_t>(nodes[static_cast<std::size_t>(u)].count));
    for (std::size_t i = 0; i < b; ++i) {
      const std::int32_t c = nodes[static_cast<std::size_t>(u)].child[i];
      if (c < 0) continue;
      parents.push_back(id);
      slots.push_back(static_cast<std::int32_t>(i));
      queue.push_back(c);
    }
  }
  SplitTree st{Tree::from_parents(std::move(parents)), std::move(balls), {}, std::move(slots), n};
  fill_subtree_balls(st);
  return st;
}

// ---------------------------------------------------------------------------
// Offspring laws
// ---------------------------------------------------------------------------

OffspringLaw OffspringLaw::poisson1() {
  OffspringLaw law;
  law.kind_ = Kind::poisson1;
  law.name_ = "poisson1";
  law.variance_ = 1.0;
  return law;
}

OffspringLaw OffspringLaw::geometric_half() {
  OffspringLaw law;
  law.kind_ = Kind::geometric_half;
  law.name_ = "geometric_half";
  law.variance_ = 2.0;
  return law;
}

OffspringLaw OffspringLaw::binary_half() {
  OffspringLaw law;
  law.kind_ = Kind::binary_half;
  law.name_ = "binary_half";
  law.variance_ = 1.0;
  return law;
}

OffspringLaw OffspringLaw::uniform_012() {
  OffspringLaw law;
  law.kind_ = Kind::uniform_012;
  law.name_ = "uniform_012";
  law.variance_ = 2.0 / 3.0;
  return law;
}

OffspringLaw OffspringLaw::custom(const std::vector<std::string>& pmf) {
  using boost::multiprecision::cpp_rational;
  if (pmf.empty()) throw std::invalid_argument("offspring pmf is empty");
  std::vector<cpp_rational> p;
  for (const auto& s : pmf) {
    cpp_rational r;
    try {
      r = cpp_rational(s);
    } catch (const std::exception&) {
      throw std::invalid_argument("offspring pmf: cannot parse \"" + s + "\" as a rational");
    }
    if (r < 0) throw std::invalid_argument("offspring pmf: negative probability");
    p.push_back(r);
  }
  cpp_rational total = 0, mean = 0, second = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    total += p[i];
    mean += p[i] * static_cast<int>(i);
    second += p[i] * static_cast<int>(i * i);
  }
  if (total != 1) throw std::invalid_argument("offspring pmf must sum to exactly 1");
  if (mean != 1) throw std::invalid_argument("offspring pmf must have mean exactly 1");
  const cpp_rational var = second - 1;
  if (var <= 0) throw std::invalid_argument("offspring pmf must have positive variance");

  OffspringLaw law;
  law.kind_ = Kind::custom;
  law.variance_ = static_cast<double>(var);
  law.name_ = "custom[";
  double acc = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += static_cast<double>(p[i]);
    law.cdf_.push_back(acc);
    if (p[i] > 0) law.support_.push_back(static_cast<std::uint32_t>(i));
    law.name_ += (i ? "," : "") + p[i].str();
  }
  law.cdf_.back() = 1.0;
  law.name_ += "]";
  return law;
}

OffspringLaw OffspringLaw::parse(const std::string& text) {
  if (text == "poisson1") return poisson1();
  if (text == "geometric_half") return geometric_half();
  if (text == "binary_half") return binary_half();
  if (text == "uniform_012") return uniform_012();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    throw std::invalid_argument("unknown offspring law \"" + text +
                                "\" (expected poisson1, geometric_half, binary_half, uniform_012 "
                                "or a JSON pmf array)");
  }
  if (!j.is_array()) throw std::invalid_argument("offspring pmf must be a JSON array");
  std::vector<std::string> pmf;
  for (const auto& e : j) pmf.push_back(e.is_string() ? e.get<std::string>() : e.dump());
  return custom(pmf);
}

double OffspringLaw::sigma() const { return std::sqrt(variance_); }

std::uint32_t OffspringLaw::sample(Rng& rng) const {
  switch (kind_) {
    case Kind::poisson1: {
      // Inversion; the mean is 1 so the loop runs about twice on average.
      const double u = rng.uniform();
      double p = std::exp(-1.0), cdf = p;
      std::uint32_t k = 0;
      while (u >= cdf && k < 64) {
        ++k;
        p /= k;
        cdf += p;
      }
      return k;
    }
    case Kind::geometric_half: {
      std::uint32_t k = 0;
      for (;;) {
        const std::uint64_t w = rng();
        if (w != 0) return k + static_cast<std::uint32_t>(std::countr_zero(w));
        k += 64;
      }
    }
    case Kind::binary_half:
      return static_cast<std::uint32_t>((rng() >> 63) * 2);
    case Kind::uniform_012:
      return static_cast<std::uint32_t>(rng.below(3));
    case Kind::custom: {
      const double u = rng.uniform();
      const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
      return static_cast<std::uint32_t>(std::min<std::ptrdiff_t>(it - cdf_.begin(),
                                                                 static_cast<std::ptrdiff_t>(cdf_.size()) - 1));
    }
  }
  return 0;
}

bool OffspringLaw::size_reachable(std::int64_t n) const {
  if (n < 1) return false;
  switch (kind_) {
    case Kind::poisson1:
    case Kind::geometric_half:
    case Kind::uniform_012:
      return true;
    case Kind::binary_half:
      return n % 2 == 1;
    case Kind::custom: {
      // Need n-1 as a sum of nonzero support values; at most n-1 terms are ever needed,
      // the remaining nodes take 0 children (0 is always in the support of a mean-1 law).
      const auto target = static_cast<std::size_t>(n - 1);
      std::vector<char> reach(target + 1, 0);
      reach[0] = 1;
      for (std::size_t x = 1; x <= target; ++x)
        for (const auto d : support_)
          if (d > 0 && d <= x && reach[x - d]) {
            reach[x] = 1;
            break;
          }
      return reach[target] != 0;
    }
  }
  return false;
}

std::vector<std::uint32_t> cycle_lemma_rotate(std::span<const std::uint32_t> degrees) {
  const std::size_t n = degrees.size();
  std::int64_t walk = 0, best = 1;
  std::size_t start = 0;
  for (std::size_t k = 0; k < n; ++k) {
    walk += static_cast<std::int64_t>(degrees[k]) - 1;
    if (walk < best) {  // first index attaining the minimum
      best = walk;
      start = k + 1;
    }
  }
  if (walk != -1) throw std::invalid_argument("cycle lemma: degrees must sum to length - 1");
  std::vector<std::uint32_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = degrees[(start + i) % n];
  return out;
}

bool is_lukasiewicz(std::span<const std::uint32_t> degrees) {
  std::int64_t w = 1;
  for (std::size_t k = 0; k < degrees.size(); ++k) {
    w += static_cast<std::int64_t>(degrees[k]) - 1;
    if (k + 1 < degrees.size() && w < 1) return false;
  }
  return w == 0;
}

Tree decode_lukasiewicz(std::span<const std::uint32_t> degrees) {
  if (!is_lukasiewicz(degrees)) throw std::invalid_argument("not a valid Lukasiewicz sequence");
  const std::size_t n = degrees.size();
  std::vector<NodeId> parents(n, kNoParent);
  std::vector<std::pair<NodeId, std::uint32_t>> open;  // (node, children still to attach)
  if (degrees[0] > 0) open.emplace_back(0, degrees[0]);
  for (std::size_t i = 1; i < n; ++i) {
    auto& top = open.back();
    parents[i] = top.first;
    if (--top.second == 0) open.pop_back();
    if (degrees[i] > 0) open.emplace_back(static_cast<NodeId>(i), degrees[i]);
  }
  return Tree::from_parents(std::move(parents));
}

std::vector<std::uint32_t> sample_cgw_degrees(const OffspringLaw& law, std::int64_t n, Rng& rng,
                                              std::size_t* attempts) {
  if (!law.size_reachable(n))
    throw std::invalid_argument("conditional GW tree: size " + std::to_string(n) +
                                " is unreachable under offspring law " + law.name());
  const auto len = static_cast<std::size_t>(n);
  const auto target = static_cast<std::uint64_t>(n - 1);
  std::vector<std::uint32_t> degrees(len, 0);
  if (law.kind() == OffspringLaw::Kind::poisson1) {
    // i.i.d. Poisson(1) given the total n-1 is Multinomial(n-1; 1/n, ..., 1/n).
    for (std::uint64_t ball = 0; ball < target; ++ball) ++degrees[rng.below(len)];
    if (attempts) *attempts = 1;
    return cycle_lemma_rotate(degrees);
  }
  if (law.kind() == OffspringLaw::Kind::geometric_half) {
    // i.i.d. Geometric(1/2) given the total n-1 is uniform over weak compositions:
    // place n-1 bars uniformly among 2n-2 slots and count the gaps.
    const std::size_t slots = 2 * len - 2;
    std::vector<char> bar(slots, 0);
    for (std::size_t j = slots - (len - 1); j < slots; ++j) {
      const auto t = static_cast<std::size_t>(rng.below(j + 1));
      bar[bar[t] ? j : t] = 1;
    }
    std::size_t part = 0;
    for (std::size_t i = 0; i < slots; ++i) {
      if (bar[i])
        ++part;
      else
        ++degrees[part];
    }
    if (attempts) *attempts = 1;
    return cycle_lemma_rotate(degrees);
  }
  std::size_t tries = 0;
  for (;;) {
    ++tries;
    std::uint64_t sum = 0;
    std::size_t i = 0;
    // The running sum only grows, so overshooting can be rejected early.
    for (; i < len && sum <= target; ++i) sum += degrees[i] = law.sample(rng);
    if (i == len && sum == target) break;
  }
  if (attempts) *attempts = tries;
  return cycle_lemma_rotate(degrees);
}

Tree gen_cgw_tree(const OffspringLaw& law, std::int64_t n, Rng& rng) {
  return decode_lukasiewicz(sample_cgw_degrees(law, n, rng));
}

Tree gen_cgw_tree(const OffspringLaw& law, std::int64_t n, std::uint64_t seed) {
  Rng rng(seed);
  return gen_cgw_tree(law, n, rng);
}

}  // namespace treeinv
