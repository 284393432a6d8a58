#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace iceseg {

/// Stable 64-bit FNV-1a hash, used to key RNG streams by name.
std::uint64_t stable_hash(std::string_view text) noexcept;

/// Seedable random source whose output is identical on every platform.
///
/// Wraps std::mt19937_64, whose raw sequence is fixed by the standard, and
/// implements its own distributions because the standard ones are not
/// portable. Independent streams are derived from a seed plus a key path,
/// e.g. Rng::stream(seed, {image_hash, band, axis}).
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : key_(mix(seed)), engine_(key_) {}

  static Rng stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

  /// Child stream keyed by `key`; does not advance this generator.
  Rng split(std::uint64_t key) const;

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n);

  /// Uniform integer in [lo, hi] (inclusive).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller (no cached second value).
  double normal();

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = uniform_index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

  /// splitmix64 finalizer.
  static std::uint64_t mix(std::uint64_t x) noexcept;

 private:
  std::uint64_t key_ = 0;
  std::mt19937_64 engine_;
};

}  // namespace iceseg
