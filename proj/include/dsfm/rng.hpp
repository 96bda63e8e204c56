#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace dsfm {

// Seedable deterministic generator. Raw stream is std::mt19937_64; all
// derived samples (bounded ints, uniforms, normals) are computed here from
// raw 64-bit outputs so results do not depend on the standard library's
// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, n). Modulo mapping; bias is < n / 2^64.
  int uniform_int(int n) {
    return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n));
  }

  std::int64_t uniform_int64(std::int64_t n) {
    return static_cast<std::int64_t>(next_u64() %
                                     static_cast<std::uint64_t>(n));
  }

  // Uniform in [0, 1), 53-bit mantissa.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller; one sample per call, the pair's second half is kept.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    if (u1 <= 0) u1 = 0x1.0p-53;
    double rad = std::sqrt(-2.0 * std::log(u1));
    double ang = 2.0 * M_PI * u2;
    spare_ = rad * std::sin(ang);
    have_spare_ = true;
    return rad * std::cos(ang);
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace dsfm
