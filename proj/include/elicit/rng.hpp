#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace elicit {

/// Mixes a parent seed with a stream label so that independent consumers
/// (plan shuffling, agent answers, payment draws) never share a stream.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label, std::uint64_t index = 0);

/// mt19937_64 with platform-independent mappings to integers and reals;
/// std distributions are implementation-defined and would break log replay
/// across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform integer in [lo, hi] by rejection sampling.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(n) - 1)); }
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  bool bernoulli(double p) { return uniform() < p; }
  double normal();

  template <class It>
  void shuffle(It first, It last) {
    auto n = static_cast<std::int64_t>(last - first);
    for (std::int64_t i = n - 1; i > 0; --i) {
      auto j = uniform_int(0, i);
      std::swap(first[i], first[j]);
    }
  }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace elicit
