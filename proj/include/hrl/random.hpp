#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "hrl/dyadic.hpp"
#include "hrl/haar.hpp"

namespace hrl {

/// Counter-based generator: draw i of stream s under seed k is a pure
/// function of (k, s, i), so parallel evaluation order never changes values.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ULL))) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t at(std::uint64_t i) const { return mix(key_ ^ mix(i)); }
  std::uint64_t next() { return at(counter_++); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Cell values uniform in [-1, 1].
GridFunction random_field(int n, int J, std::uint64_t seed, std::uint64_t stream = 0);
GridFunction random_mean_zero_field(int n, int J, std::uint64_t seed, std::uint64_t stream = 0);

/// Haar polynomial with coefficients uniform in [-1, 1] on cube levels
/// [jmin, jmax] and the listed directions (all directions if empty); mean 0.
GridFunction random_haar_field(int n, int J, int jmin, int jmax, std::uint64_t seed, std::uint64_t stream = 0,
                               std::span<const Direction> dirs = {});

/// Real trigonometric field with random modes in the cone
/// |k_{i0}| >= max_{i != i0} |k_i| / 2, k_{i0} != 0, |k|_inf <= kmax,
/// avoiding Nyquist modes.
GridFunction random_cone_field(int n, int J, int i0, int kmax, std::uint64_t seed, std::uint64_t stream = 0);

}  // namespace hrl
