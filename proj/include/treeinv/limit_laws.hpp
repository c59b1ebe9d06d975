#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "treeinv/exact_moments.hpp"
#include "treeinv/rng.hpp"
#include "treeinv/stats.hpp"
#include "treeinv/tree_gen.hpp"

namespace treeinv {

// ---------------------------------------------------------------------------
// Limit of the complete b-ary tree: X = sum_{d>=0} b^{-d} sum_{j<=b^d} U_{d,j},
// U uniform on [-1/2, 1/2].
// ---------------------------------------------------------------------------

/// Variance of the levels beyond `cut`: b^{-cut} / (12 (b - 1)).
double bary_tail_variance(int b, int cut);

/// Smallest cut with tail variance <= 1e-10 (30 for b = 2).
int default_bary_cut(int b);

/// One draw of the series truncated after level `cut`. Shallow levels are summed
/// directly. Deeper levels are summed exactly through the base-b digits of their
/// uniforms: the digits landing at a given power of b are counted with a multinomial
/// draw, so no level is approximated by a Gaussian. Digit positions past cut + 40 are
/// replaced by their mean (error below b^{-39}/(b-1) per draw).
/// Throws std::invalid_argument when b^{cut+1} does not fit in 62 bits.
double draw_bary_limit(int b, int cut, Rng& rng);

SampleSet sample_bary_limit(int b, int cut, std::size_t reps, std::uint64_t seed, unsigned threads = 0);

/// Limit of balanced b-ary trees whose last level is a fraction i/b full.
/// X(b,i) = U + sum_{j<=i} c1 X_j + sum_{j>i} c2 X_j, c1 = b/(b+i(b-1)), c2 = 1/(b+i(b-1)).
double draw_balanced_limit(int b, int i, int cut, Rng& rng);
SampleSet sample_balanced_limit(int b, int i, std::size_t reps, std::uint64_t seed, unsigned threads = 0);

/// Exact cumulants kappa_1..kappa_K of X: kappa_{2k} = (B_{2k}/2k) b^{2k-1}/(b^{2k-1}-1), odd ones 0.
std::vector<BigRational> exact_limit_cumulants_bary(int b, int K);

// ---------------------------------------------------------------------------
// Split-tree fixed points, solved by population dynamics
// ---------------------------------------------------------------------------

struct FixedPointSpec {
  enum class Variant { ball, node };
  int b = 2;
  int s0 = 1;
  SplitLaw law;
  int generations = 25;
  Variant variant = Variant::ball;
  double alpha = 1.0;  // node variant only, in (0, 1]

  void validate() const;
  static FixedPointSpec from_split(const SplitSpec& spec, Variant variant = Variant::ball, double alpha = 1.0);
  nlohmann::json to_json() const;
  static FixedPointSpec from_json(const nlohmann::json& j);
};

/// Ball variant:
///   X = sum V_i X_i + sum_{j<=s0} U_j + (s0/2) D,  Y = sum V_i Y_i + sum (U_j - 1/2),
///   W = sum V_i W_i + 1 + D,
/// node variant:
///   X = sum V_i X_i + a U_0 + (a/2) D,  Y = sum V_i Y_i + a (U_0 - 1/2),  W = sum V_i W_i + a + a D,
/// with U uniform on [0,1] and D = (1/mu) sum V_i ln V_i.
///
/// Generation 0 is all zeros. Every member of the next generation picks b parents
/// uniformly from the current population; member i of generation g uses
/// Rng::stream(seed, g, i), so the result does not depend on the thread count.
class FixedPointIterator {
 public:
  FixedPointIterator(const FixedPointSpec& spec, std::size_t population, std::uint64_t seed, unsigned threads = 0);

  void step();
  int generation() const { return generation_; }
  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& y() const { return y_; }
  const std::vector<double>& w() const { return w_; }

 private:
  FixedPointSpec spec_;
  double mu_;
  std::uint64_t seed_;
  unsigned threads_;
  int generation_ = 0;
  std::vector<double> x_, y_, w_;
};

struct TripleSample {
  std::vector<double> x, y, w;
};

/// Runs spec.generations steps and returns the final population.
TripleSample sample_fixed_point(const FixedPointSpec& spec, std::size_t population, std::uint64_t seed,
                                unsigned threads = 0);

// ---------------------------------------------------------------------------
// Fixed-tree limit criterion: Ups_{2k}/Ups_2^k -> zeta_{2k}
// ---------------------------------------------------------------------------

struct LimitCheckRow {
  std::string family;
  std::int64_t n = 0;
  int k = 0;
  double ratio = 0;                     // Ups_{2k} / Ups_2^k
  std::optional<double> zeta;           // limit of the ratio, when known
  std::optional<double> limit_cumulant; // (B_{2k}/2k) zeta_{2k}
};

/// family: "path", "star", "complete:B" or "balanced:B". Sizes grow geometrically.
std::vector<LimitCheckRow> fixed_tree_limit_check(const std::string& family, int k_max, int steps = 8);

/// zeta_{2k} of complete b-ary trees.
double complete_bary_zeta(int b, int k);

}  // namespace treeinv
