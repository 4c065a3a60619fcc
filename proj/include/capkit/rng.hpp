#pragma once

#include <cstdint>
#include <random>

namespace capkit {

// mt19937_64 with a fixed 53-bit mapping to doubles. The raw engine sequence
// is pinned by the standard; std distributions are not, so we avoid them.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // [0,1)
  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // (0,1)
  double open_unit() {
    double u = unit();
    while (u == 0.0) u = unit();
    return u;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(unit() * static_cast<double>(n));
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace capkit
