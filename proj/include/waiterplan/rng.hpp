#pragma once

#include <cstdint>

#include "waiterplan/interval.hpp"

namespace waiterplan {

/// Deterministic PRNG (xoshiro256**, splitmix64-seeded). Used instead of
/// <random> distributions so seeded results are identical across platforms.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t next_u64();
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  /// Uniform in [-1, 1].
  double symmetric();
  /// Uniform integer in [0, n).
  int uniform_int(int n);
  VecX uniform_vec(const VecX& lo, const VecX& hi);
  VecX symmetric_vec(int n);

  /// Independent child stream; deterministic function of (seed, index).
  Rng child(uint64_t index) const;

 private:
  uint64_t s_[4];
  uint64_t seed_;
};

}  // namespace waiterplan
