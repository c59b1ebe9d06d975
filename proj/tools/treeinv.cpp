#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "treeinv/exact_moments.hpp"
#include "treeinv/gw_snake.hpp"
#include "treeinv/inversion.hpp"
#include "treeinv/io.hpp"
#include "treeinv/limit_laws.hpp"
#include "treeinv/parallel.hpp"
#include "treeinv/split_sim.hpp"
#include "treeinv/stats.hpp"
#include "treeinv/tree_gen.hpp"
#include "treeinv/verify.hpp"

using namespace treeinv;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kAcceptanceFailure = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

unsigned g_threads = 0;

std::uint64_t need_seed(const std::optional<std::uint64_t>& seed) {
  if (!seed) throw UsageError("--seed is required for stochastic commands (no implicit entropy)");
  return *seed;
}

json parse_json_arg(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError(what + ": invalid JSON (" + e.what() + ")");
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError(path + ": invalid JSON (" + e.what() + ")");
  }
}

// --preset NAME or --spec JSON/@file
SplitSpec resolve_spec(const std::string& preset, const std::string& spec_text) {
  if (!preset.empty() && !spec_text.empty()) throw UsageError("give either --preset or --spec, not both");
  if (!preset.empty()) return SplitSpec::preset(preset);
  if (spec_text.empty()) throw UsageError("a split spec is required: --preset bst|dst:B|median:K or --spec JSON");
  const json j = spec_text[0] == '@' ? read_json_file(spec_text.substr(1)) : parse_json_arg(spec_text, "--spec");
  return SplitSpec::from_json(j);
}

std::string sample_csv(SampleSet s, const json& config) {
  s.config = config;
  std::ostringstream out;
  write_samples_csv(out, s);
  return out.str();
}

json column_meta(const std::string& statistic, std::uint64_t seed, const json& config) {
  return {{"statistic", statistic}, {"seed", seed}, {"params_hash", json_digest(config)}, {"config", config}};
}

template <class T>
T param(const json& p, const char* key, T fallback) {
  if (!p.contains(key)) return fallback;
  try {
    return p.at(key).get<T>();
  } catch (const json::exception&) {
    throw UsageError(std::string("--params: bad value for \"") + key + "\"");
  }
}

void reject_unknown_keys(const json& p, std::initializer_list<const char*> known) {
  for (auto it = p.begin(); it != p.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) throw UsageError("--params: unknown key \"" + it.key() + "\"");
  }
}

// ---------------------------------------------------------------------------

struct ExactCmd {
  std::string tree_file, format = "json";
  int max_order = 6;
  std::vector<double> thetas;

  int run() const {
    const Tree t = read_tree_file(tree_file);
    const auto ct = cumulants(t, max_order, tree_file);
    const auto mu = central_moments(ct, max_order);
    json j = cumulants_to_json(ct);
    j["config"] = {{"command", "exact"}, {"tree_file", tree_file}, {"max_order", max_order}};
    auto& cm = j["central_moments"] = json::array();
    for (const auto& m : mu) cm.push_back(rational_string(m));
    if (!thetas.empty()) {
      auto& mg = j["mgf"] = json::array();
      for (const double th : thetas) {
        const auto b = mgf_bound_check(t, th);
        mg.push_back({{"theta", th},
                      {"log_mgf", log_mgf(t, th)},
                      {"centered_log_mgf", b.lhs},
                      {"bound", b.rhs},
                      {"bound_holds", b.holds()}});
      }
    }
    if (format == "json") {
      write_output("-", j.dump(2) + "\n");
      return kOk;
    }
    std::ostringstream out;
    out << "# " << json{{"config", j["config"]}, {"n", ct.n}}.dump() << "\n";
    out << "k,upsilon,kappa,central_moment\n";
    for (int k = 1; k <= max_order; ++k) {
      const auto i = static_cast<std::size_t>(k - 1);
      out << k << ',' << ct.upsilon[i].str() << ',' << rational_string(ct.kappa[i]) << ','
          << rational_string(mu[static_cast<std::size_t>(k)]) << '\n';
    }
    if (j.contains("mgf"))
      for (const auto& m : j["mgf"])
        out << "theta " << format_number(m["theta"].get<double>()) << ": log_mgf "
            << format_number(m["log_mgf"].get<double>()) << ", centered "
            << format_number(m["centered_log_mgf"].get<double>()) << " <= " << format_number(m["bound"].get<double>())
            << '\n';
    write_output("-", out.str());
    return kOk;
  }
};

struct SampleCmd {
  std::string tree_file, out;
  std::size_t reps = 0;
  std::optional<std::uint64_t> seed;

  int run() const {
    const auto s = need_seed(seed);
    const Tree t = read_tree_file(tree_file);
    const json config{{"command", "sample"}, {"tree_file", tree_file}, {"n", t.size()}, {"reps", reps}, {"seed", s}};
    write_output(out, sample_csv(sample_inversions(t, reps, s, g_threads), config));
    return kOk;
  }
};

struct GenerateCmd {
  std::string family, out, preset, spec, law = "poisson1";
  std::int64_t n = 0;
  int b = 2, height = -1;
  std::optional<std::uint64_t> seed;

  int run() const {
    json j;
    json config{{"command", "generate"}, {"family", family}};
    auto need_n = [&] {
      if (n < 1) throw UsageError("--n is required for family " + family);
      config["n"] = n;
      return n;
    };
    if (family == "path") {
      j = tree_to_json(gen_path(static_cast<std::size_t>(need_n())));
    } else if (family == "star") {
      j = tree_to_json(gen_star(static_cast<std::size_t>(need_n())));
    } else if (family == "complete") {
      if (height < 0) throw UsageError("--height is required for family complete");
      config["b"] = b;
      config["height"] = height;
      j = tree_to_json(gen_complete_bary(b, height));
    } else if (family == "balanced") {
      config["b"] = b;
      j = tree_to_json(gen_balanced_bary(b, static_cast<std::size_t>(need_n())));
    } else if (family == "split") {
      const SplitSpec sp = resolve_spec(preset, spec);
      const auto s = need_seed(seed);
      config["spec"] = sp.to_json();
      config["seed"] = s;
      const SplitTree st = gen_split_tree(sp, need_n(), s);
      j = tree_to_json(st.tree);
      j["balls"] = st.balls;
    } else if (family == "cgw") {
      const OffspringLaw l = OffspringLaw::parse(law);
      const auto s = need_seed(seed);
      config["law"] = l.name();
      config["seed"] = s;
      j = tree_to_json(gen_cgw_tree(l, need_n(), s));
    } else {
      throw UsageError("unknown --family \"" + family + "\" (path, star, complete, balanced, split, cgw)");
    }
    j["config"] = config;
    write_output(out, j.dump() + "\n");
    return kOk;
  }
};

struct SplitMeansCmd {
  std::string preset, spec, out;
  std::int64_t n = 0;
  std::size_t reps = 10000;
  std::optional<std::uint64_t> seed;

  int run() const {
    const SplitSpec sp = resolve_spec(preset, spec);
    const auto s = need_seed(seed);
    if (n < 1) throw UsageError("--n must be >= 1");
    const MeanTable m = estimate_mean_table(sp, n, reps, s, g_threads);
    json j = m.to_json();
    j["config"] = {{"command", "split-means"}, {"spec", sp.to_json()}, {"n", n}, {"reps", reps}, {"seed", s}};
    write_output(out, j.dump(2) + "\n");
    return kOk;
  }
};

struct SplitObserveCmd {
  std::string preset, spec, mean_table, out;
  std::int64_t n = 0;
  std::size_t reps = 0;
  std::optional<std::uint64_t> seed;

  int run() const {
    const SplitSpec sp = resolve_spec(preset, spec);
    const auto s = need_seed(seed);
    if (n < 1) throw UsageError("--n must be >= 1");
    const std::string spec_arg = preset.empty() ? "--spec '" + sp.to_json().dump() + "'" : "--preset " + preset;
    if (mean_table.empty())
      throw UsageError("split-observe needs centering constants. Run the pre-pass first:\n  treeinv split-means " +
                       spec_arg + " --n " + std::to_string(n) + " --reps 10000 --seed " + std::to_string(s) +
                       " --out means.json\nthen pass --mean-table means.json");
    const MeanTable m = MeanTable::from_json(read_json_file(mean_table));
    if (m.spec_hash != sp.hash())
      throw UsageError("mean table " + mean_table + " was built for a different split spec (hash " + m.spec_hash +
                       ", expected " + sp.hash() + "); rerun treeinv split-means " + spec_arg);
    if (m.n != n)
      throw UsageError("mean table " + mean_table + " is for n = " + std::to_string(m.n) + ", not " +
                       std::to_string(n) + "; rerun treeinv split-means with --n " + std::to_string(n));

    std::vector<SplitObservables> obs(reps);
    parallel_for(reps, g_threads, [&](std::size_t i) {
      Rng rng = Rng::stream(s, i);
      obs[i] = observe_split(sp, n, rng);
    });
    std::vector<std::vector<double>> cols(12, std::vector<double>(reps));
    for (std::size_t i = 0; i < reps; ++i) {
      const auto& o = obs[i];
      const Triple tb = normalized_triple_ball(o, m, sp.s0), tn = normalized_triple_node(o, m);
      const double row[] = {static_cast<double>(o.nodes),
                            static_cast<double>(o.ball_tpl),
                            static_cast<double>(o.ball_inv),
                            static_cast<double>(o.node_tpl),
                            static_cast<double>(o.node_inv),
                            static_cast<double>(o.z_rho_ball),
                            tb.x, tb.y, tb.w, tn.x, tn.y, tn.w};
      for (std::size_t c = 0; c < cols.size(); ++c) cols[c][i] = row[c];
    }
    const std::vector<std::string> names{"nodes", "ball_tpl", "ball_inv", "node_tpl", "node_inv", "z_rho_ball",
                                         "x_ball", "y_ball", "w_ball", "x_node", "y_node", "w_node"};
    std::vector<const std::vector<double>*> ptrs;
    for (const auto& c : cols) ptrs.push_back(&c);
    const json config{{"command", "split-observe"}, {"spec", sp.to_json()}, {"n", n},
                      {"reps", reps},               {"seed", s},           {"mean_table", m.to_json()}};
    std::ostringstream o;
    write_columns_csv(o, column_meta("split_observables", s, config), names, ptrs);
    write_output(out, o.str());
    return kOk;
  }
};

struct GwCmd {
  std::string law = "poisson1", emit = "yn", out;
  std::int64_t n = 2000;
  std::size_t reps = 0, m = std::size_t{1} << 14;
  std::optional<double> sigma;
  std::optional<std::uint64_t> seed;

  int run() const {
    const auto s = need_seed(seed);
    const OffspringLaw l = OffspringLaw::parse(law);
    const double sg = sigma ? *sigma : l.sigma();
    json config{{"command", "gw"}, {"emit", emit}, {"reps", reps}, {"seed", s}};
    SampleSet set;
    if (emit == "yn") {
      config["law"] = l.name();
      config["n"] = n;
      set = y_n_statistic(l, n, reps, s, g_threads);
    } else if (emit == "ylimit") {
      config["sigma"] = sg;
      config["m"] = m;
      set = sample_Y_limit(sg, m, reps, s, g_threads);
    } else if (emit == "eta") {
      config["m"] = m;
      set = sample_eta(m, reps, s, g_threads);
    } else {
      throw UsageError("--emit must be yn, ylimit or eta");
    }
    write_output(out, sample_csv(std::move(set), config));
    return kOk;
  }
};

struct LimitCmd {
  std::string law, params = "{}", out;
  std::size_t reps = 0;
  std::optional<std::uint64_t> seed;

  int run() const {
    const auto s = need_seed(seed);
    const json p = parse_json_arg(params, "--params");
    if (!p.is_object()) throw UsageError("--params must be a JSON object");
    json config{{"command", "limit"}, {"law", law}, {"reps", reps}, {"seed", s}};
    if (law == "bary") {
      reject_unknown_keys(p, {"b", "cut"});
      const int b = param(p, "b", 2);
      const int cut = param(p, "cut", default_bary_cut(std::max(b, 2)));
      config["params"] = {{"b", b}, {"cut", cut}};
      write_output(out, sample_csv(sample_bary_limit(b, cut, reps, s, g_threads), config));
    } else if (law == "balanced") {
      reject_unknown_keys(p, {"b", "i"});
      const int b = param(p, "b", 2), i = param(p, "i", 0);
      config["params"] = {{"b", b}, {"i", i}};
      write_output(out, sample_csv(sample_balanced_limit(b, i, reps, s, g_threads), config));
    } else if (law == "split-ball" || law == "split-node") {
      reject_unknown_keys(p, {"preset", "spec", "generations", "alpha"});
      SplitSpec sp;
      if (p.contains("spec"))
        sp = SplitSpec::from_json(p["spec"]);
      else
        sp = SplitSpec::preset(param<std::string>(p, "preset", "bst"));
      const bool node = law == "split-node";
      if (node && !p.contains("alpha"))
        throw UsageError("split-node needs \"alpha\" in --params (the limit of E[N]/n; see split-means mean_nodes/n)");
      auto fp = FixedPointSpec::from_split(sp, node ? FixedPointSpec::Variant::node : FixedPointSpec::Variant::ball,
                                           param(p, "alpha", 1.0));
      fp.generations = param(p, "generations", 25);
      fp.validate();
      config["params"] = fp.to_json();
      config["population"] = reps;
      const auto tri = sample_fixed_point(fp, reps, s, g_threads);
      std::ostringstream o;
      write_columns_csv(o, column_meta("fixed_point_triple", s, config), {"x", "y", "w"}, {&tri.x, &tri.y, &tri.w});
      write_output(out, o.str());
    } else if (law == "gw") {
      reject_unknown_keys(p, {"sigma", "m"});
      const double sigma = param(p, "sigma", 1.0);
      const auto m = param<std::size_t>(p, "m", std::size_t{1} << 14);
      config["params"] = {{"sigma", sigma}, {"m", m}};
      write_output(out, sample_csv(sample_Y_limit(sigma, m, reps, s, g_threads), config));
    } else {
      throw UsageError("--law must be bary, balanced, split-ball, split-node or gw");
    }
    return kOk;
  }
};

struct CompareCmd {
  std::string a, b, column_a, column_b, out, format = "csv";

  int run() const {
    const SampleSet sa = read_samples_csv(a, column_a), sb = read_samples_csv(b, column_b);
    const MomentReport r = compare_samples(sa, sb);
    if (format == "json") {
      json j = r.to_json();
      j["config"] = {{"command", "compare"}, {"a", a}, {"b", b}, {"a_config", sa.config}, {"b_config", sb.config}};
      write_output(out, j.dump(2) + "\n");
    } else {
      const json config{{"command", "compare"}, {"a", a}, {"b", b}};
      write_output(out, "# " + config.dump() + "\n" + r.to_csv());
    }
    return kOk;
  }
};

struct VerifyCmd {
  std::string suite = "all";
  std::uint64_t seed = 20240917;

  int run() const {
    bool ok = true;
    for (const auto& r : run_suite(suite, seed, g_threads)) {
      std::cout << format_result(r) << std::endl;
      ok = ok && r.passed;
    }
    return ok ? kOk : kAcceptanceFailure;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inversions in random trees: exact moments, samplers and limit laws"};
  app.require_subcommand(1);
  app.add_option("--threads", g_threads, "Worker threads (default: $TREEINV_THREADS or all cores)");
  std::function<int()> action;

  ExactCmd exact;
  auto* c_exact = app.add_subcommand("exact", "Exact cumulants and moments of the inversion count of a tree");
  c_exact->add_option("--tree-file", exact.tree_file, "Tree JSON {\"parents\":[...]}")->required();
  c_exact->add_option("--max-order", exact.max_order, "Highest cumulant order")->check(CLI::Range(1, 1000));
  auto* fmt = c_exact->add_option("--format", exact.format, "json (default) or csv")->check(CLI::IsMember({"json", "csv"}));
  c_exact->add_flag_callback("--json", [&] { exact.format = "json"; }, "Same as --format json")->excludes(fmt);
  c_exact->add_option("--theta", exact.thetas, "Also evaluate the log-MGF and its bound at these points");
  c_exact->callback([&] { action = [&] { return exact.run(); }; });

  SampleCmd sample;
  auto* c_sample = app.add_subcommand("sample", "Draw inversion counts of a fixed tree");
  c_sample->add_option("--tree-file", sample.tree_file)->required();
  c_sample->add_option("--reps", sample.reps)->required()->check(CLI::PositiveNumber);
  c_sample->add_option("--seed", sample.seed);
  c_sample->add_option("--out", sample.out, "Output CSV (default stdout)");
  c_sample->callback([&] { action = [&] { return sample.run(); }; });

  GenerateCmd gen;
  auto* c_gen = app.add_subcommand("generate", "Generate a tree as JSON");
  c_gen->add_option("--family", gen.family, "path|star|complete|balanced|split|cgw")->required();
  c_gen->add_option("--n", gen.n, "Nodes (balls for split trees)");
  c_gen->add_option("--b", gen.b, "Branch factor");
  c_gen->add_option("--height", gen.height, "Height of a complete tree");
  c_gen->add_option("--preset", gen.preset, "Split preset: bst, dst:B, median:K");
  c_gen->add_option("--spec", gen.spec, "Split spec JSON (or @file)");
  c_gen->add_option("--law", gen.law, "Offspring law: poisson1, geometric_half, binary_half, uniform_012, or a pmf");
  c_gen->add_option("--seed", gen.seed);
  c_gen->add_option("--out", gen.out);
  c_gen->callback([&] { action = [&] { return gen.run(); }; });

  SplitMeansCmd means;
  auto* c_means = app.add_subcommand("split-means", "Monte Carlo centering constants for split trees");
  c_means->add_option("--preset", means.preset);
  c_means->add_option("--spec", means.spec);
  c_means->add_option("--n", means.n)->required();
  c_means->add_option("--reps", means.reps)->check(CLI::PositiveNumber);
  c_means->add_option("--seed", means.seed);
  c_means->add_option("--out", means.out);
  c_means->callback([&] { action = [&] { return means.run(); }; });

  SplitObserveCmd observe;
  auto* c_obs = app.add_subcommand("split-observe", "Inversion and path-length observables of split trees");
  c_obs->add_option("--preset", observe.preset);
  c_obs->add_option("--spec", observe.spec);
  c_obs->add_option("--n", observe.n)->required();
  c_obs->add_option("--reps", observe.reps)->required()->check(CLI::PositiveNumber);
  c_obs->add_option("--seed", observe.seed);
  c_obs->add_option("--mean-table", observe.mean_table, "Output of split-means for the same spec and n");
  c_obs->add_option("--out", observe.out);
  c_obs->callback([&] { action = [&] { return observe.run(); }; });

  GwCmd gw;
  auto* c_gw = app.add_subcommand("gw", "Conditional Galton-Watson statistics and their excursion limit");
  c_gw->add_option("--law", gw.law);
  c_gw->add_option("--n", gw.n);
  c_gw->add_option("--reps", gw.reps)->required()->check(CLI::PositiveNumber);
  c_gw->add_option("--seed", gw.seed);
  c_gw->add_option("--emit", gw.emit, "yn|ylimit|eta");
  c_gw->add_option("--m", gw.m, "Excursion grid size")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 26));
  c_gw->add_option("--sigma", gw.sigma, "Override the offspring standard deviation for ylimit");
  c_gw->add_option("--out", gw.out);
  c_gw->callback([&] { action = [&] { return gw.run(); }; });

  LimitCmd limit;
  auto* c_lim = app.add_subcommand("limit", "Sample a limit law");
  c_lim->add_option("--law", limit.law, "bary|balanced|split-ball|split-node|gw")->required();
  c_lim->add_option("--params", limit.params, "JSON object of law parameters");
  c_lim->add_option("--reps", limit.reps)->required()->check(CLI::PositiveNumber);
  c_lim->add_option("--seed", limit.seed);
  c_lim->add_option("--out", limit.out);
  c_lim->callback([&] { action = [&] { return limit.run(); }; });

  CompareCmd cmp;
  auto* c_cmp = app.add_subcommand("compare", "Compare two sample files (k-statistics, KS, d2)");
  c_cmp->add_option("--a", cmp.a)->required();
  c_cmp->add_option("--b", cmp.b)->required();
  c_cmp->add_option("--column-a", cmp.column_a, "Column of --a (default: value)");
  c_cmp->add_option("--column-b", cmp.column_b, "Column of --b (default: value)");
  c_cmp->add_option("--format", cmp.format, "csv (default) or json")->check(CLI::IsMember({"json", "csv"}));
  c_cmp->add_option("--out", cmp.out);
  c_cmp->callback([&] { action = [&] { return cmp.run(); }; });

  VerifyCmd ver;
  auto* c_ver = app.add_subcommand("verify", "Run an acceptance suite");
  std::string suites;
  for (const auto& s : suite_names()) suites += (suites.empty() ? "" : ", ") + s;
  c_ver->add_option("suite", ver.suite, "One of: " + suites + " (or a criterion number 1-8)");
  c_ver->add_option("--seed", ver.seed);
  c_ver->callback([&] { action = [&] { return ver.run(); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  try {
    return action();
  } catch (const UsageError& e) {
    std::cerr << "treeinv: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "treeinv: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "treeinv: " << e.what() << '\n';
    return kUsage;
  }
}
