#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace affgd {

/// Deterministic random source. The distribution transforms are written out
/// explicitly (instead of std:: distributions, whose output sequences are
/// implementation-defined) so seeded streams are reproducible everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in (0, 1].
  double u01() { return static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(gen_() >> 11) * 0x1.0p-53);
  }

  /// Standard normal via Box-Muller.
  double normal() {
    const double u = u01();
    const double v = u01();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586477 * v);
  }

  /// Uniform index in [0, m). The modulo bias is irrelevant at data-generation
  /// scale.
  std::uint64_t index(std::uint64_t m) { return gen_() % m; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace affgd
