#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "treeinv/rng.hpp"
#include "treeinv/tree_gen.hpp"

namespace treeinv {

/// One split tree and one draw of each inversion statistic on it.
struct SplitObservables {
  std::int64_t n = 0;         // balls
  std::int64_t nodes = 0;     // N
  std::int64_t ball_tpl = 0;  // sum over balls of the depth of their node
  std::int64_t node_tpl = 0;  // sum over nodes of their depth
  std::int64_t ball_inv = 0;  // inversions between balls in ancestor/descendant nodes
  std::int64_t node_inv = 0;  // inversions of a uniform node labeling
  std::int64_t z_rho_ball = 0;  // the root's share of ball_inv
  std::vector<std::int64_t> root_split;  // balls sent to each child slot of the root
};

/// Draws the two inversion counts on a given split tree. Ball inversions: each node u
/// holding c_u balls out of n_u in its subtree takes c_u distinct ranks from 1..n_u, and
/// contributes sum_i (lambda_(i) - i) over its sorted ranks. Nodes are independent.
/// Both draws use the same random numbers node by node, so when every node holds one
/// ball they coincide.
SplitObservables observe_split_tree(const SplitTree& st, Rng& rng);
SplitObservables observe_split(const SplitSpec& spec, std::int64_t n, Rng& rng);
SplitObservables observe_split(const SplitSpec& spec, std::int64_t n, std::uint64_t seed);

/// Sum of (lambda_(i) - i) over s0 sorted ranks drawn without replacement from 1..n.
std::int64_t draw_root_ball_inversions(std::int64_t n, std::int64_t s0, Rng& rng);
/// The same divided by n. Requires 1 <= s0 <= n.
double z_rho_ball_normalized(std::int64_t n, std::int64_t s0, Rng& rng);

/// Centering constants for one (spec, n).
struct MeanTable {
  std::string spec_hash;
  std::int64_t n = 0;
  double mean_ball_tpl = 0;
  double mean_ball_inv = 0;  // always s0 * mean_ball_tpl / 2
  double mean_node_tpl = 0;
  double mean_node_inv = 0;  // always mean_node_tpl / 2
  double mean_nodes = 0;
  std::int64_t reps = 0;

  nlohmann::json to_json() const;
  static MeanTable from_json(const nlohmann::json& j);
};

/// Monte Carlo estimate from `reps` trees; tree i uses Rng::stream(seed, i).
MeanTable estimate_mean_table(const SplitSpec& spec, std::int64_t n, std::size_t reps, std::uint64_t seed,
                              unsigned threads = 0);

struct Triple {
  double x = 0, y = 0, w = 0;
};

/// ((I - E I)/n, (I - s0 Ups/2)/n, (Ups - E Ups)/n) over balls, with E I = s0 E Ups / 2.
Triple normalized_triple_ball(const SplitObservables& o, const MeanTable& m, int s0);
/// Node version: ((I - E I)/n, (I - Ups/2)/n, (Ups - E Ups)/n).
Triple normalized_triple_node(const SplitObservables& o, const MeanTable& m);

/// mu = -sum_i E[V_i ln V_i]; closed forms through the digamma function.
double split_entropy(const SplitLaw& law);
inline double mu(const SplitSpec& spec) { return split_entropy(spec.law); }

/// D(V) = (1/mu) sum_i V_i ln V_i with 0 ln 0 = 0.
double sample_D(const SplitSpec& spec, Rng& rng);
double D_of(std::span<const double> v, double mu_value);

/// Root split (n_1..n_b) of a split tree on n balls (all zeros when n <= s).
std::vector<std::int64_t> sample_root_split(const SplitSpec& spec, std::int64_t n, Rng& rng);

/// Exact E[ball tpl], E[node tpl] and E[node count] of split trees on 0..n balls,
/// computed from the marginal law of a child's ball count.
class ExpectedTplTable {
 public:
  ExpectedTplTable(const SplitSpec& spec, std::int64_t n_max);

  std::int64_t n_max() const { return static_cast<std::int64_t>(ball_tpl_.size()) - 1; }
  double ball_tpl(std::int64_t n) const { return at(ball_tpl_, n); }
  double node_tpl(std::int64_t n) const { return at(node_tpl_, n); }
  double nodes(std::int64_t n) const { return at(nodes_, n); }

 private:
  double at(const std::vector<double>& v, std::int64_t n) const;
  std::vector<double> ball_tpl_, node_tpl_, nodes_;
};

/// -E Ups(n)/n + sum_i E Ups(n_i)/n, the per-level toll of the ball tpl recursion.
/// Throws std::out_of_range if the table does not reach n.
double toll_ball(std::int64_t n, const std::vector<std::int64_t>& root_split, const ExpectedTplTable& table);

/// Path lengths and node count of a split tree, drawn without building the tree.
struct TplDraw {
  std::int64_t ball_tpl = 0;
  std::int64_t node_tpl = 0;
  std::int64_t nodes = 0;
};
TplDraw split_tpl_draw(const SplitSpec& spec, std::int64_t n, Rng& rng);

}  // namespace treeinv
