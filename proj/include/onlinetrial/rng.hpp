#pragma once

#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string_view>
#include <vector>

#include "onlinetrial/errors.hpp"

namespace onlinetrial {

// 64-bit finalizer (splitmix64 output function).  Used to turn structured
// seed material into well-mixed engine seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

// Deterministic substream seed for one replication of one scenario.  Every
// replication is reproducible in isolation from (base_seed, scenario_id, rep).
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::string_view scenario_id,
                                 std::uint64_t replication) {
  std::uint64_t h = mix64(base_seed);
  h = mix64(h ^ fnv1a64(scenario_id));
  h = mix64(h ^ (replication * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL));
  return h;
}

// Self-contained random stream: uniform, bounded-integer and standard-normal
// draws with a fully specified algorithm (Box-Muller over explicit 53-bit
// uniforms), so sequences are identical across platforms and standard-library
// implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1).
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1]; safe as a logarithm argument.
  double uniform01_positive() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  // Unbiased uniform integer on [0, n).
  std::uint64_t bounded(std::uint64_t n) {
    if (n == 0) throw DomainError("bounded draw requires n >= 1");
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % n;  // largest multiple of n <= max
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // Standard normal draw (Box-Muller, pairs cached).
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = uniform01_positive();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
  }

  // In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(bounded(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // m distinct indices drawn uniformly from {0, ..., k-1}.
  std::vector<int> sample_without_replacement(int k, int m) {
    if (m < 0 || m > k) throw DomainError("cannot sample more indices than available");
    std::vector<int> pool(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) pool[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < m; ++i) {
      const std::size_t j =
          static_cast<std::size_t>(i) +
          static_cast<std::size_t>(bounded(static_cast<std::uint64_t>(k - i)));
      std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
    }
    pool.resize(static_cast<std::size_t>(m));
    return pool;
  }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace onlinetrial
