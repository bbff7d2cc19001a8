#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace otranks {

/// splitmix64 finalizer; used to derive independent substream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of substream `tag` of `master`. Pure function of its arguments.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag) noexcept {
  return mix64(mix64(master) ^ mix64(tag + 0x632be59bd9b4e019ULL));
}

/// Seed keyed by the bit patterns of a point's coordinates (-0.0 folds onto 0.0).
std::uint64_t hash_point(std::uint64_t seed, std::span<const double> point) noexcept;

/// Seeded random stream. Uniform draws are built from raw engine bits so they do
/// not depend on the standard library's distribution implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  /// Standard normal via the polar method.
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }
  /// Gamma with the given shape and rate (Marsaglia-Tsang).
  double gamma(double shape, double rate);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace otranks
