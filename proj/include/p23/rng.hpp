#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "p23/stats.hpp"

namespace p23 {

// Deterministic random stream. Replication r of a run seeded with s draws
// from substream(s, r), so results are identical for any number of workers
// and do not depend on the standard library's distribution implementations:
// all variate transforms are explicit.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  static Rng substream(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32)};
    return Rng(seq);
  }

  /// Uniform draw strictly inside (0, 1).
  double uniform() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal draw via the inverse CDF.
  double normal() { return std_normal_quantile(uniform()); }

  /// Exponential draw with the given rate (> 0); strictly positive.
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  explicit Rng(std::seed_seq& seq) : gen_(seq) {}

  std::mt19937_64 gen_;
};

}  // namespace p23
