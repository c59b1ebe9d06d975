#include "treeinv/limit_laws.hpp"

#include <cmath>
#include <stdexcept>

#include "treeinv/parallel.hpp"
#include "treeinv/split_sim.hpp"

namespace treeinv {

namespace {

void require_branching(int b) {
  if (b < 2) throw std::invalid_argument("branch factor b must be >= 2");
}

constexpr int kDirectLevelMax = 32;  // levels with at most this many uniforms are summed directly
constexpr int kExtraDigits = 40;

}  // namespace

double bary_tail_variance(int b, int cut) {
  require_branching(b);
  return std::pow(static_cast<double>(b), -cut) / (12.0 * (b - 1));
}

int default_bary_cut(int b) {
  require_branching(b);
  int cut = 0;
  while (bary_tail_variance(b, cut) > 1e-10) ++cut;
  return cut;
}

double draw_bary_limit(int b, int cut, Rng& rng) {
  require_branching(b);
  if (cut < 0) throw std::invalid_argument("b-ary limit: cut must be >= 0");
  // Work budget: every count below is at most b^{cut+1}.
  {
    std::int64_t p = 1;
    for (int d = 0; d <= cut; ++d) {
      if (p > (std::int64_t{1} << 62) / b) throw std::invalid_argument("b-ary limit: b^(cut+1) exceeds the work budget");
      p *= b;
    }
  }
  long double total = 0;
  int d = 0;
  std::int64_t width = 1;  // b^d
  for (; d <= cut && width <= kDirectLevelMax; ++d, width *= b) {
    long double level = 0;
    for (std::int64_t j = 0; j < width; ++j) level += rng.uniform() - 0.5;
    total += level / static_cast<long double>(width);
  }
  if (d > cut) return static_cast<double>(total);

  // Levels d0..cut. U + 1/2 = sum_{e>=1} digit_e b^{-e}; the digits of level d land at
  // power E = d + e, so power E collects M_E = sum_{d0 <= d <= min(cut, E-1)} b^d digits.
  const int d0 = d;
  const int e_max = cut + kExtraDigits;
  std::int64_t digits = 0;
  std::int64_t next_level = width;  // b^{E-1} for the level joining at power E
  long double scale = 1;
  for (int e = 1; e <= d0; ++e) scale /= b;
  for (int E = d0 + 1; E <= e_max; ++E) {
    scale /= b;
    if (E - 1 <= cut) {
      digits += next_level;
      if (E - 1 < cut) next_level *= b;
    }
    std::int64_t remaining = digits, digit_sum = 0;
    for (int v = 0; v + 1 < b && remaining > 0; ++v) {
      const std::int64_t c = sample_binomial(remaining, 1.0 / (b - v), rng);
      digit_sum += v * c;
      remaining -= c;
    }
    digit_sum += static_cast<std::int64_t>(b - 1) * remaining;
    total += scale * static_cast<long double>(digit_sum);
  }
  total += static_cast<long double>(digits) * scale / 2;  // remaining digits at their mean
  total -= 0.5L * (cut - d0 + 1);
  return static_cast<double>(total);
}

SampleSet sample_bary_limit(int b, int cut, std::size_t reps, std::uint64_t seed, unsigned threads) {
  if (reps < 1) throw std::invalid_argument("reps must be >= 1");
  SampleSet s;
  s.statistic = "bary_limit";
  s.seed = seed;
  s.config = {{"law", "bary"}, {"b", b}, {"cut", cut}, {"reps", reps}, {"seed", seed}};
  s.values.resize(reps);
  parallel_for(reps, threads, [&](std::size_t i) {
    Rng rng = Rng::stream(seed, i);
    s.values[i] = draw_bary_limit(b, cut, rng);
  });
  return s;
}

double draw_balanced_limit(int b, int i, int cut, Rng& rng) {
  require_branching(b);
  if (i < 0 || i > b) throw std::invalid_argument("balanced limit: i must be in 0..b");
  const double c = b + static_cast<double>(i) * (b - 1);
  double x = rng.uniform() - 0.5;
  for (int j = 0; j < b; ++j) x += (j < i ? b / c : 1 / c) * draw_bary_limit(b, cut, rng);
  return x;
}

SampleSet sample_balanced_limit(int b, int i, std::size_t reps, std::uint64_t seed, unsigned threads) {
  if (reps < 1) throw std::invalid_argument("reps must be >= 1");
  const int cut = default_bary_cut(b);
  SampleSet s;
  s.statistic = "balanced_limit";
  s.seed = seed;
  s.config = {{"law", "balanced"}, {"b", b}, {"i", i}, {"cut", cut}, {"reps", reps}, {"seed", seed}};
  s.values.resize(reps);
  parallel_for(reps, threads, [&](std::size_t r) {
    Rng rng = Rng::stream(seed, r);
    s.values[r] = draw_balanced_limit(b, i, cut, rng);
  });
  return s;
}

std::vector<BigRational> exact_limit_cumulants_bary(int b, int K) {
  require_branching(b);
  if (K < 1) throw std::invalid_argument("order must be >= 1");
  std::vector<BigRational> out(static_cast<std::size_t>(K), BigRational(0));
  for (int k = 2; k <= K; k += 2) {
    const BigInt p = boost::multiprecision::pow(BigInt(b), static_cast<unsigned>(k - 1));
    out[static_cast<std::size_t>(k - 1)] = bernoulli(k) / k * BigRational(p, p - 1);
  }
  return out;
}

void FixedPointSpec::validate() const {
  if (generations < 1) throw std::invalid_argument("fixed point: generations must be >= 1");
  if (s0 < 0) throw std::invalid_argument("fixed point: s0 must be >= 0");
  if (variant == Variant::node && !(alpha > 0 && alpha <= 1))
    throw std::invalid_argument("fixed point: alpha must be in (0, 1]");
  SplitSpec check{b, std::max(1, s0), s0, 0, law};
  check.validate();
}

FixedPointSpec FixedPointSpec::from_split(const SplitSpec& spec, Variant variant, double alpha) {
  FixedPointSpec fp;
  fp.b = spec.b;
  fp.s0 = spec.s0;
  fp.law = spec.law;
  fp.variant = variant;
  fp.alpha = alpha;
  return fp;
}

nlohmann::json FixedPointSpec::to_json() const {
  nlohmann::json j{{"b", b}, {"s0", s0}, {"split_law", law.to_json()}, {"generations", generations},
                   {"variant", variant == Variant::ball ? "ball" : "node"}};
  if (variant == Variant::node) j["alpha"] = alpha;
  return j;
}

FixedPointSpec FixedPointSpec::from_json(const nlohmann::json& j) {
  FixedPointSpec fp;
  fp.b = j.value("b", 2);
  fp.s0 = j.value("s0", 1);
  if (j.contains("split_law")) fp.law = SplitLaw::from_json(j["split_law"]);
  fp.generations = j.value("generations", 25);
  const auto v = j.value("variant", std::string("ball"));
  if (v == "ball")
    fp.variant = Variant::ball;
  else if (v == "node")
    fp.variant = Variant::node;
  else
    throw std::invalid_argument("fixed point: variant must be \"ball\" or \"node\"");
  fp.alpha = j.value("alpha", 1.0);
  fp.validate();
  return fp;
}

FixedPointIterator::FixedPointIterator(const FixedPointSpec& spec, std::size_t population, std::uint64_t seed,
                                       unsigned threads)
    : spec_(spec), mu_(split_entropy(spec.law)), seed_(seed), threads_(threads) {
  spec_.validate();
  if (population < 1) throw std::invalid_argument("fixed point: population must be >= 1");
  x_.assign(population, 0);
  y_.assign(population, 0);
  w_.assign(population, 0);
}

void FixedPointIterator::step() {
  const std::size_t P = x_.size();
  const auto b = static_cast<std::size_t>(spec_.b);
  const int g = ++generation_;
  std::vector<double> nx(P), ny(P), nw(P);
  parallel_for(P, threads_, [&](std::size_t i) {
    Rng rng = Rng::stream(seed_, static_cast<std::uint64_t>(g), i);
    double v[64];
    std::vector<double> big;
    std::span<double> vs(v, b);
    if (b > 64) {
      big.resize(b);
      vs = big;
    }
    spec_.law.sample(rng, vs);
    double x = 0, y = 0, w = 0;
    for (std::size_t k = 0; k < b; ++k) {
      const auto p = static_cast<std::size_t>(rng.below(P));
      x += vs[k] * x_[p];
      y += vs[k] * y_[p];
      w += vs[k] * w_[p];
    }
    const double d = D_of(vs, mu_);
    if (spec_.variant == FixedPointSpec::Variant::ball) {
      double u_sum = 0;
      for (int j = 0; j < spec_.s0; ++j) u_sum += rng.uniform();
      x += u_sum + spec_.s0 * d / 2;
      y += u_sum - spec_.s0 / 2.0;
      w += 1 + d;
    } else {
      const double a = spec_.alpha, u0 = rng.uniform();
      x += a * u0 + a * d / 2;
      y += a * (u0 - 0.5);
      w += a + a * d;
    }
    nx[i] = x;
    ny[i] = y;
    nw[i] = w;
  });
  // The mean map has contraction factor 1, so the pool mean would random-walk with
  // step sd ~ sqrt(Var/P). The fixed point is centered; pin the pool there.
  for (auto* v : {&nx, &ny, &nw}) {
    long double m = 0;
    for (const double e : *v) m += e;
    const double shift = static_cast<double>(m / static_cast<long double>(P));
    for (double& e : *v) e -= shift;
  }
  x_.swap(nx);
  y_.swap(ny);
  w_.swap(nw);
}

TripleSample sample_fixed_point(const FixedPointSpec& spec, std::size_t population, std::uint64_t seed,
                                unsigned threads) {
  FixedPointIterator it(spec, population, seed, threads);
  for (int g = 0; g < spec.generations; ++g) it.step();
  return {it.x(), it.y(), it.w()};
}

double complete_bary_zeta(int b, int k) {
  require_branching(b);
  const double p = std::pow(static_cast<double>(b), 2 * k - 1);
  return p / (p - 1) * std::pow((b - 1.0) / b, k);
}

std::vector<LimitCheckRow> fixed_tree_limit_check(const std::string& family, int k_max, int steps) {
  if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  enum class Fam { path, star, complete, balanced } fam;
  int b = 2;
  auto parse_b = [&](const std::string& prefix) {
    const std::string rest = family.substr(prefix.size());
    try {
      b = rest.empty() ? 2 : std::stoi(rest);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad branch factor in family \"" + family + "\"");
    }
    require_branching(b);
  };
  if (family == "path") {
    fam = Fam::path;
  } else if (family == "star") {
    fam = Fam::star;
  } else if (family.rfind("complete", 0) == 0) {
    fam = Fam::complete;
    parse_b(family.size() > 8 ? "complete:" : "complete");
  } else if (family.rfind("balanced", 0) == 0) {
    fam = Fam::balanced;
    parse_b(family.size() > 8 ? "balanced:" : "balanced");
  } else {
    throw std::invalid_argument("unknown tree family \"" + family + "\" (path, star, complete:B, balanced:B)");
  }

  std::vector<LimitCheckRow> rows;
  for (int step = 0; step < steps; ++step) {
    Tree t = gen_path(1);
    switch (fam) {
      case Fam::path:
        t = gen_path(std::size_t{8} << (2 * step));
        break;
      case Fam::star:
        t = gen_star(std::size_t{8} << (2 * step));
        break;
      case Fam::complete:
        t = gen_complete_bary(b, step + 2);
        break;
      case Fam::balanced: {
        // complete tree of height step+1 plus half of the next level
        std::size_t n = 0, level = 1;
        for (int d = 0; d <= step + 1; ++d, level *= static_cast<std::size_t>(b)) n += level;
        t = gen_balanced_bary(b, n + level / 2);
        break;
      }
    }
    const TreeProfile p = profile(t);
    const BigInt u2 = upsilon(p, 2);
    for (int k = 1; k <= k_max; ++k) {
      LimitCheckRow row;
      row.family = family;
      row.n = static_cast<std::int64_t>(t.size());
      row.k = k;
      const BigInt denom = boost::multiprecision::pow(u2, static_cast<unsigned>(k));
      row.ratio = static_cast<double>(BigRational(upsilon(p, 2 * k), denom));
      switch (fam) {
        case Fam::path:
          row.zeta = k == 1 ? 1.0 : 0.0;
          break;
        case Fam::star:
          row.zeta = 1.0;
          break;
        case Fam::complete:
          row.zeta = complete_bary_zeta(b, k);
          break;
        case Fam::balanced:
          break;  // the limit depends on how full the last level is
      }
      if (row.zeta) row.limit_cumulant = static_cast<double>(bernoulli(2 * k) / (2 * k)) * *row.zeta;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace treeinv
