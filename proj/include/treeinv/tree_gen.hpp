#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "treeinv/rng.hpp"
#include "treeinv/tree.hpp"

namespace treeinv {

// ---------------------------------------------------------------------------
// Deterministic families
// ---------------------------------------------------------------------------

/// Path on n nodes, node i the parent of node i+1.
Tree gen_path(std::size_t n);
/// Star on n nodes: a root with n-1 leaves.
Tree gen_star(std::size_t n);
/// Complete b-ary tree of height m, (b^{m+1}-1)/(b-1) nodes, heap (BFS) numbering.
Tree gen_complete_bary(int b, int m);
/// Balanced b-ary tree on n nodes: every level full except the last, which is filled
/// from the left.
Tree gen_balanced_bary(int b, std::size_t n);

/// All unordered rooted trees on n nodes, one representative per shape. n <= 10.
std::vector<Tree> all_rooted_trees(std::size_t n);

// ---------------------------------------------------------------------------
// Split trees
// ---------------------------------------------------------------------------

/// Law of the split vector (V_1, ..., V_b).
struct SplitLaw {
  enum class Kind {
    constant,   ///< fixed probabilities p_1..p_b
    dirichlet,  ///< Dirichlet(alpha_1..alpha_b)
    beta_pair,  ///< b = 2, V = (B, 1-B) in uniformly random order, B ~ Beta(a, a')
  };
  Kind kind = Kind::beta_pair;
  std::vector<double> params{1.0, 1.0};

  void sample(Rng& rng, std::span<double> out) const;
  nlohmann::json to_json() const;
  static SplitLaw from_json(const nlohmann::json& j);
};

/// Split-tree parameters (b, s, s0, s1) and split-vector law.
struct SplitSpec {
  int b = 2;   ///< branch factor
  int s = 1;   ///< leaf capacity
  int s0 = 1;  ///< balls kept at an internal node
  int s1 = 0;  ///< balls forwarded to every child at a split
  SplitLaw law;

  /// Throws std::invalid_argument unless 2 <= b, 0 < s, 0 <= s0 <= s,
  /// 0 <= b*s1 <= s+1-s0 and the law matches b.
  void validate() const;

  nlohmann::json to_json() const;
  static SplitSpec from_json(const nlohmann::json& j);
  /// "bst", "dst:B", "median:K".
  static SplitSpec preset(std::string_view name);
  /// Stable hexadecimal digest of the canonical JSON form.
  std::string hash() const;
};

/// A realized split tree.
struct SplitTree {
  Tree tree;
  std::vector<std::int32_t> balls;          ///< balls stored at each node
  std::vector<std::int64_t> subtree_balls;  ///< n_u, balls in the subtree of u
  std::vector<std::int32_t> slot;           ///< child position 0..b-1 under the parent (-1 at root)
  std::int64_t ball_count = 0;
};

/// Draws a split tree with n balls by the subtree-size recursion: a node with n_u <= s
/// balls is a leaf, otherwise it keeps s0 and its children receive
/// Mult(n_u - s0 - b*s1, V_u) + (s1, ..., s1). Empty children are pruned.
SplitTree gen_split_tree(const SplitSpec& spec, std::int64_t n, Rng& rng);
SplitTree gen_split_tree(const SplitSpec& spec, std::int64_t n, std::uint64_t seed);

/// Same law, built by inserting the balls one at a time (trickle-down). Slower; used as
/// an independent check of gen_split_tree.
SplitTree gen_split_tree_trickle(const SplitSpec& spec, std::int64_t n, Rng& rng);

/// Binomial(m, p) draw; exact.
std::int64_t sample_binomial(std::int64_t m, double p, Rng& rng);

/// Multinomial(m, probs) by sequential binomial conditioning.
void sample_multinomial(std::int64_t m, std::span<const double> probs, Rng& rng,
                        std::span<std::int64_t> out);

// ---------------------------------------------------------------------------
// Conditional Galton-Watson trees
// ---------------------------------------------------------------------------

/// Offspring law with mean 1.
class OffspringLaw {
 public:
  enum class Kind { poisson1, geometric_half, binary_half, uniform_012, custom };

  static OffspringLaw poisson1();
  static OffspringLaw geometric_half();
  static OffspringLaw binary_half();
  static OffspringLaw uniform_012();
  /// Finite pmf given as exact rationals ("1/3"); mean must be exactly 1.
  static OffspringLaw custom(const std::vector<std::string>& pmf);
  /// Preset name, or a JSON pmf array such as ["1/4","1/2","1/4"].
  static OffspringLaw parse(const std::string& text);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double variance() const { return variance_; }
  /// Standard deviation.
  double sigma() const;
  std::uint32_t sample(Rng& rng) const;
  /// Whether some tree of exactly n nodes has positive probability.
  bool size_reachable(std::int64_t n) const;

 private:
  Kind kind_ = Kind::poisson1;
  std::string name_;
  double variance_ = 1.0;
  std::vector<double> cdf_;               // custom only
  std::vector<std::uint32_t> support_;    // custom only, values with positive mass
};

/// Degree sequence of n i.i.d. offspring draws conditioned on summing to n-1, rotated by
/// the cycle lemma into a valid preorder (Lukasiewicz) sequence. `attempts`, when given,
/// receives the number of draws of the whole sequence. Poisson and geometric laws are
/// conditioned exactly in one pass (multinomial / uniform composition); the others use
/// rejection, with about sigma*sqrt(2 pi n) expected attempts.
std::vector<std::uint32_t> sample_cgw_degrees(const OffspringLaw& law, std::int64_t n, Rng& rng,
                                              std::size_t* attempts = nullptr);

/// Cycle-lemma rotation of a degree sequence summing to length-1.
std::vector<std::uint32_t> cycle_lemma_rotate(std::span<const std::uint32_t> degrees);

/// True when 1 + sum_{i<=k}(d_i - 1) >= 1 for k < n and hits 0 at k = n.
bool is_lukasiewicz(std::span<const std::uint32_t> degrees);

/// Plane tree whose preorder child counts are `degrees`; node ids are preorder ranks.
Tree decode_lukasiewicz(std::span<const std::uint32_t> degrees);

/// Conditional Galton-Watson tree of exactly n nodes. Throws std::invalid_argument if
/// the law cannot produce a tree of that size.
Tree gen_cgw_tree(const OffspringLaw& law, std::int64_t n, Rng& rng);
Tree gen_cgw_tree(const OffspringLaw& law, std::int64_t n, std::uint64_t seed);

}  // namespace treeinv
