#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace treeinv {

// SplitMix64 finalizer. Used only to derive stream seeds, never to draw samples.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of stream `id` under `seed`. Distinct (seed, id) pairs give unrelated engines.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t id) noexcept {
  return mix64(mix64(seed) ^ mix64(id ^ 0xD1B54A32D192ED03ULL));
}

/// Seeded 64-bit generator (mt19937_64) with helpers for the draws this project needs.
///
/// Replicate i of a run with seed S always uses Rng::stream(S, i), so results do not
/// depend on how replicates are scheduled across threads.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng stream(std::uint64_t seed, std::uint64_t id) { return Rng(derive_seed(seed, id)); }
  static Rng stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return Rng(derive_seed(derive_seed(seed, a), b));
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1); safe for logarithms.
  double uniform_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Unbiased integer in {0, ..., n-1}, Lemire's multiply-and-reject. Requires n >= 1.
  std::uint64_t below(std::uint64_t n) {
    unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(engine_()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  double normal() { return normal_(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace treeinv
