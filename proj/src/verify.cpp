#include "treeinv/verify.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "treeinv/exact_moments.hpp"
#include "treeinv/gw_snake.hpp"
#include "treeinv/inversion.hpp"
#include "treeinv/io.hpp"
#include "treeinv/limit_laws.hpp"
#include "treeinv/parallel.hpp"
#include "treeinv/split_sim.hpp"
#include "treeinv/stats.hpp"
#include "treeinv/tree_gen.hpp"

namespace treeinv {

namespace {

std::string num(double x) {
  std::ostringstream o;
  o.precision(6);
  o << x;
  return o.str();
}

// Cumulants 1..K of an exact pmf, through raw moments.
std::vector<BigRational> pmf_cumulants(const std::map<std::int64_t, BigRational>& pmf, int K) {
  std::vector<BigRational> raw(static_cast<std::size_t>(K) + 1, 0);
  for (const auto& [k, p] : pmf) {
    BigRational pw = 1;
    for (int j = 0; j <= K; ++j) {
      raw[static_cast<std::size_t>(j)] += p * pw;
      pw *= k;
    }
  }
  auto choose = [](int n, int r) {
    BigInt c = 1;
    for (int i = 1; i <= r; ++i) c = c * (n - r + i) / i;
    return c;
  };
  std::vector<BigRational> kappa(static_cast<std::size_t>(K) + 1, 0);
  for (int n = 1; n <= K; ++n) {
    BigRational v = raw[static_cast<std::size_t>(n)];
    for (int i = 1; i < n; ++i)
      v -= BigRational(choose(n - 1, i - 1)) * kappa[static_cast<std::size_t>(i)] * raw[static_cast<std::size_t>(n - i)];
    kappa[static_cast<std::size_t>(n)] = v;
  }
  return {kappa.begin() + 1, kappa.end()};
}

struct Context {
  std::uint64_t seed;
  unsigned threads;
  // The excursion sample is shared by the Y-limit and eta criteria.
  std::optional<ExcursionDraws> excursions;

  const ExcursionDraws& excursion_draws() {
    if (!excursions) excursions = sample_excursion_functionals(1.0, std::size_t{1} << 14, 100000, derive_seed(seed, 5), threads);
    return *excursions;
  }
};

CriterionResult exact_enumeration(Context&) {
  CriterionResult r{1, "exact-moments", true, "", 0};
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::pair<std::string, Tree>> corpus;
  for (std::size_t n = 1; n <= 7; ++n) {
    int idx = 0;
    for (auto& t : all_rooted_trees(n)) corpus.emplace_back("shape" + std::to_string(n) + "_" + std::to_string(idx++), std::move(t));
  }
  for (std::size_t n = 1; n <= 8; ++n) {
    corpus.emplace_back("path" + std::to_string(n), gen_path(n));
    corpus.emplace_back("star" + std::to_string(n), gen_star(n));
  }
  corpus.emplace_back("complete2_2", gen_complete_bary(2, 2));

  int kappa_fail = 0, mgf_fail = 0;
  double worst_rel = 0;
  for (const auto& [name, t] : corpus) {
    const auto pmf = enumerate_distribution(t);
    const auto from_pmf = pmf_cumulants(pmf, 6);
    const auto table = cumulants(t, 6, name);
    for (int k = 0; k < 6; ++k)
      if (from_pmf[static_cast<std::size_t>(k)] != table.kappa[static_cast<std::size_t>(k)]) ++kappa_fail;
    for (const double theta : {1.0, -1.0, 0.1, -0.1}) {
      long double avg = 0;
      for (const auto& [k, p] : pmf) avg += static_cast<long double>(static_cast<double>(p)) * std::exp(static_cast<long double>(theta) * k);
      const double rel = std::abs(std::expm1(log_mgf(t, theta) - static_cast<double>(std::log(avg))));
      worst_rel = std::max(worst_rel, rel);
      if (!(rel <= 1e-10)) ++mgf_fail;
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.passed = kappa_fail == 0 && mgf_fail == 0 && secs < 120;
  r.detail = std::to_string(corpus.size()) + " trees; cumulant mismatches " + std::to_string(kappa_fail) +
             " (need 0); worst MGF rel err " + num(worst_rel) + " (<= 1e-10); " + num(secs) + " s (< 120)";
  return r;
}

CriterionResult sampler_fidelity(Context& ctx) {
  CriterionResult r{2, "sampler", true, "", 0};
  const Tree t = gen_complete_bary(2, 9);
  const auto ct = cumulants(t, 2);
  const double exact = static_cast<double>(ct.kappa[1]);
  const auto s = sample_inversions(t, 1000000, derive_seed(ctx.seed, 2), ctx.threads);
  const auto k = k_statistics(s.values, 2);
  const double z = (k[1].value - exact) / k[1].se;

  Rng rng(derive_seed(ctx.seed, 21));
  int mismatches = 0;
  for (int i = 0; i < 200; ++i) {
    const auto n = static_cast<std::size_t>(1 + rng.below(200));
    std::vector<NodeId> parents(n, kNoParent);
    // random recursive trees, plus conditional GW trees for deeper shapes
    Tree tree = gen_path(1);
    if (i % 2 == 0) {
      for (std::size_t v = 1; v < n; ++v) parents[v] = static_cast<NodeId>(rng.below(v));
      tree = Tree::from_parents(parents);
    } else {
      tree = gen_cgw_tree(OffspringLaw::geometric_half(), static_cast<std::int64_t>(n), rng);
    }
    const auto lab = random_labeling(tree.size(), rng);
    if (count_inversions_fast(tree, lab) != count_inversions_naive(tree, lab)) ++mismatches;
  }
  r.passed = std::abs(z) <= 5 && mismatches == 0;
  r.detail = "var " + num(k[1].value) + " vs exact " + num(exact) + ", z = " + num(z) +
             " (|z| <= 5); fast/naive mismatches " + std::to_string(mismatches) + "/200";
  return r;
}

CriterionResult complete_limit(Context& ctx) {
  CriterionResult r{3, "complete-limit", true, "", 0};
  const auto lim = sample_bary_limit(2, 30, 1000000, derive_seed(ctx.seed, 3), ctx.threads);
  const auto k = k_statistics(lim.values, 4);
  const double k2 = 1.0 / 6, k4 = -1.0 / 105;
  const double e2 = std::abs(k[1].value - k2) / k2, e4 = std::abs(k[3].value - k4) / std::abs(k4);

  const Tree t = gen_complete_bary(2, 15);
  const auto ct = cumulants(t, 1);
  const double mean = static_cast<double>(ct.kappa[0]);
  const auto n = static_cast<double>(t.size());
  auto xn = sample_inversions(t, 100000, derive_seed(ctx.seed, 31), ctx.threads);
  for (auto& v : xn.values) v = (v - mean) / n;
  const auto lim2 = sample_bary_limit(2, 30, 100000, derive_seed(ctx.seed, 32), ctx.threads);
  const double ks = ks_distance(xn.values, lim2.values);

  r.passed = e2 <= 0.005 && e4 <= 0.25 && ks <= 0.02;
  r.detail = "k2 " + num(k[1].value) + " rel err " + num(e2) + " (<= 0.005); k4 " + num(k[3].value) + " rel err " +
             num(e4) + " (<= 0.25); KS(X_n, X) " + num(ks) + " (<= 0.02)";
  return r;
}

CriterionResult split_fixed_point(Context& ctx) {
  CriterionResult r{4, "split-fixed-point", true, "", 0};
  constexpr std::size_t P = 100000;
  auto identity_err = [](const TripleSample& s, int s0) {
    double worst = 0;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double scale = 1 + std::abs(s.x[i]) + std::abs(s.y[i]) + std::abs(s.w[i]);
      worst = std::max(worst, std::abs(s.x[i] - s.y[i] - s0 * s.w[i] / 2) / scale);
    }
    return worst;
  };

  const auto dst = FixedPointSpec::from_split(SplitSpec::preset("dst:2"));
  const auto dst_s = sample_fixed_point(dst, P, derive_seed(ctx.seed, 4), ctx.threads);
  const double dst_var_w = variance(dst_s.w);
  const auto bary = sample_bary_limit(2, 30, P, derive_seed(ctx.seed, 41), ctx.threads);
  const double dst_d2 = d2_estimate(dst_s.x, bary.values);

  const auto bst = FixedPointSpec::from_split(SplitSpec::preset("bst"));
  const auto bst_s = sample_fixed_point(bst, P, derive_seed(ctx.seed, 42), ctx.threads);
  const double bst_var_w = variance(bst_s.w);
  const double oracle = bst_w_variance_quadrature();
  const double bst_rel = std::abs(bst_var_w - oracle) / oracle;

  const double id_err = std::max(identity_err(dst_s, 1), identity_err(bst_s, 1));

  // direct simulation: ball total path length of binary search trees on 10^5 balls
  const SplitSpec spec = SplitSpec::preset("bst");
  constexpr std::int64_t n = 100000;
  std::vector<double> w(10000);
  const auto base = derive_seed(ctx.seed, 43);
  parallel_for(w.size(), ctx.threads, [&](std::size_t i) {
    Rng rng = Rng::stream(base, i);
    w[i] = static_cast<double>(split_tpl_draw(spec, n, rng).ball_tpl);
  });
  const double m = mean(w);
  for (auto& v : w) v = (v - m) / static_cast<double>(n);
  const double direct_d2 = d2_estimate(w, bst_s.w);

  r.passed = dst_var_w <= 1e-3 && dst_d2 <= 0.02 && bst_rel <= 0.02 && id_err <= 1e-12 && direct_d2 <= 0.1;
  r.detail = "dst:2 Var W " + num(dst_var_w) + " (<= 1e-3), d2(X, limit) " + num(dst_d2) + " (<= 0.02); bst Var W " +
             num(bst_var_w) + " vs quadrature " + num(oracle) + " rel err " + num(bst_rel) +
             " (<= 0.02); identity err " + num(id_err) + " (<= 1e-12); d2(W_n, W) " + num(direct_d2) + " (<= 0.1)";
  return r;
}

CriterionResult gw_limit(Context& ctx) {
  CriterionResult r{5, "gw-limit", true, "", 0};
  const double target = exact_Y_moments(1.0, 1)[0];
  const auto& ex = ctx.excursion_draws();
  double m2 = 0;
  for (const double y : ex.y) m2 += y * y;
  m2 /= static_cast<double>(ex.y.size());
  const double e_lim = std::abs(m2 - target) / target;

  const auto yn = y_n_statistic(OffspringLaw::poisson1(), 2000, 10000, derive_seed(ctx.seed, 51), ctx.threads);
  double yn2 = 0;
  for (const double y : yn.values) yn2 += y * y;
  yn2 /= static_cast<double>(yn.values.size());
  const double e_tree = std::abs(yn2 - target) / target;
  const double ks = ks_distance(yn.values, ex.y);

  const auto a = y_moment_coefficients(3);
  const bool a_ok = a[2] == 49 && a[3] == 9800;
  r.passed = e_lim <= 0.03 && e_tree <= 0.10 && ks <= 0.05 && a_ok;
  r.detail = "E[Y^2] target " + num(target) + "; excursion " + num(m2) + " rel err " + num(e_lim) +
             " (<= 0.03); tree n=2000 " + num(yn2) + " rel err " + num(e_tree) + " (<= 0.10); KS " + num(ks) +
             " (<= 0.05); a_2 = " + a[2].str() + ", a_3 = " + a[3].str();
  return r;
}

CriterionResult eta_machinery(Context& ctx) {
  CriterionResult r{6, "eta", true, "", 0};
  double worst = 0;
  Rng rng(derive_seed(ctx.seed, 6));
  for (int i = 0; i < 20; ++i) {
    const auto e = sample_excursion(512, rng);
    worst = std::max(worst, std::abs(eta_of_excursion(e) - eta_double_loop(e)));
  }
  std::vector<double> tent(513);
  for (std::size_t j = 0; j <= 512; ++j) tent[j] = std::min(j, 512 - j) / 512.0;
  worst = std::max(worst, std::abs(eta_of_excursion(tent) - eta_double_loop(tent)));

  const double target = 12 * exact_Y_moments(1.0, 1)[0];
  const double m = mean(ctx.excursion_draws().eta);
  const double rel = std::abs(m - target) / target;
  r.passed = worst <= 1e-10 && rel <= 0.03;
  r.detail = "sweep vs double loop max diff " + num(worst) + " (<= 1e-10); E[eta] " + num(m) + " vs " + num(target) +
             " rel err " + num(rel) + " (<= 0.03)";
  return r;
}

CriterionResult coupling(Context& ctx) {
  CriterionResult r{7, "coupling", true, "", 0};
  const std::vector<OffspringLaw> laws{OffspringLaw::poisson1(), OffspringLaw::geometric_half(),
                                       OffspringLaw::binary_half(), OffspringLaw::uniform_012()};
  constexpr std::size_t trees = 1000;
  std::vector<double> ratio(trees);
  std::vector<std::int64_t> sizes(trees);
  const auto base = derive_seed(ctx.seed, 7);
  parallel_for(trees, ctx.threads, [&](std::size_t i) {
    Rng rng = Rng::stream(base, i);
    const auto& law = laws[i % laws.size()];
    // rejection-sampled laws get smaller trees to keep the run short
    const std::int64_t cap = law.kind() == OffspringLaw::Kind::poisson1 || law.kind() == OffspringLaw::Kind::geometric_half ? 10000 : 2000;
    std::int64_t n = 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(cap)));
    if (law.kind() == OffspringLaw::Kind::binary_half && n % 2 == 0) --n;
    if (n < 1) n = 1;
    const auto o = observe_gw(law, n, rng);
    sizes[i] = n;
    ratio[i] = std::abs(o.gap()) / static_cast<double>(n);
  });
  int violations = 0;
  double worst = 0;
  std::int64_t largest = 0;
  for (std::size_t i = 0; i < trees; ++i) {
    if (!(ratio[i] <= 2)) ++violations;
    worst = std::max(worst, ratio[i]);
    largest = std::max(largest, sizes[i]);
  }
  r.passed = violations == 0;
  r.detail = std::to_string(trees) + " trees up to n = " + std::to_string(largest) + "; max |J - (I - Ups/2)|/n " +
             num(worst) + " (<= 2); violations " + std::to_string(violations);
  return r;
}

CriterionResult reproducibility(Context& ctx) {
  CriterionResult r{8, "repro", true, "", 0};
  const std::string one = reproducibility_bundle(ctx.seed, 1);
  const std::string four = reproducibility_bundle(ctx.seed, 4);
  const std::string sixteen = reproducibility_bundle(ctx.seed, 16);
  r.passed = one == four && one == sixteen;
  r.detail = std::to_string(one.size()) + " bytes; 1 vs 4 threads " + (one == four ? "identical" : "DIFFER") +
             "; 1 vs 16 threads " + (one == sixteen ? "identical" : "DIFFER");
  return r;
}

using CriterionFn = CriterionResult (*)(Context&);

const std::vector<std::pair<std::string, CriterionFn>>& criteria() {
  static const std::vector<std::pair<std::string, CriterionFn>> list{
      {"exact-moments", exact_enumeration}, {"sampler", sampler_fidelity}, {"complete-limit", complete_limit},
      {"split-fixed-point", split_fixed_point}, {"gw-limit", gw_limit}, {"eta", eta_machinery},
      {"coupling", coupling}, {"repro", reproducibility}};
  return list;
}

}  // namespace

double bst_w_variance_quadrature() {
  boost::math::quadrature::tanh_sinh<double> integrator;
  auto f = [](double u) {
    const double d = 2 * (u * std::log(u) + (1 - u) * std::log1p(-u));
    return (1 + d) * (1 + d);
  };
  return 3 * integrator.integrate(f, 0.0, 1.0);
}

std::string reproducibility_bundle(std::uint64_t seed, unsigned threads) {
  std::ostringstream out;
  write_samples_csv(out, sample_inversions(gen_complete_bary(2, 6), 3000, derive_seed(seed, 81), threads));
  write_samples_csv(out, y_n_statistic(OffspringLaw::poisson1(), 300, 500, derive_seed(seed, 82), threads));
  write_samples_csv(out, y_n_statistic(OffspringLaw::uniform_012(), 101, 200, derive_seed(seed, 83), threads));
  write_samples_csv(out, sample_bary_limit(2, 30, 2000, derive_seed(seed, 84), threads));
  write_samples_csv(out, sample_Y_limit(1.0, 256, 300, derive_seed(seed, 85), threads));
  auto fp = FixedPointSpec::from_split(SplitSpec::preset("bst"));
  fp.generations = 5;
  const auto tri = sample_fixed_point(fp, 3000, derive_seed(seed, 86), threads);
  write_columns_csv(out, fp.to_json(), {"x", "y", "w"}, {&tri.x, &tri.y, &tri.w});
  out << estimate_mean_table(SplitSpec::preset("median:1"), 2000, 300, derive_seed(seed, 87), threads).to_json().dump()
      << '\n';
  return out.str();
}

std::vector<std::string> suite_names() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : criteria()) names.push_back(name);
  names.push_back("all");
  return names;
}

std::vector<CriterionResult> run_suite(const std::string& name, std::uint64_t seed, unsigned threads) {
  const auto& list = criteria();
  std::vector<std::size_t> chosen;
  if (name == "all") {
    for (std::size_t i = 0; i < list.size(); ++i) chosen.push_back(i);
  } else {
    for (std::size_t i = 0; i < list.size(); ++i)
      if (list[i].first == name || std::to_string(i + 1) == name) chosen.push_back(i);
  }
  if (chosen.empty()) {
    std::string known;
    for (const auto& n : suite_names()) known += (known.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown suite \"" + name + "\" (known: " + known + ", or 1-8)");
  }
  Context ctx{seed, threads, std::nullopt};
  std::vector<CriterionResult> results;
  for (const auto i : chosen) {
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = list[i].second(ctx);
    } catch (const std::exception& e) {
      r = {static_cast<int>(i + 1), list[i].first, false, std::string("error: ") + e.what(), 0};
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    results.push_back(std::move(r));
  }
  return results;
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream o;
  o << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << ' ' << r.name << ": " << r.detail << " [" << num(r.seconds)
    << " s]";
  return o.str();
}

}  // namespace treeinv
