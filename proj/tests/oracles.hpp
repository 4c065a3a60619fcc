// Test-only oracles, kept independent of the library code paths they check:
// everything here works on plain doubles / callables and re-derives expected
// values by brute force or closed form.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace oracles {

// Both sides of the inner-product identity, evaluated separately.
struct PolarizationSides {
  double lhs;
  double rhs;
};

inline PolarizationSides polarization_sides(const std::vector<double>& u,
                                            const std::vector<double>& v,
                                            const std::vector<double>& p,
                                            const std::vector<double>& w) {
  auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
  };
  auto diff = [](const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
  };
  auto nsq = [&](const std::vector<double>& a) { return dot(a, a); };
  const double lhs = 2.0 * dot(diff(u, v), diff(p, w));
  const double rhs = nsq(diff(u, w)) + nsq(diff(v, p)) - nsq(diff(u, p)) -
                     nsq(diff(v, w));
  return {lhs, rhs};
}

// Brute-force nearest member of a region over a dense grid. 2-D only;
// `lo`/`hi` bound the search box.
inline std::vector<double> nearest_on_grid_2d(
    const std::function<bool(double, double)>& member, double lo, double hi,
    std::size_t steps, double x0, double x1) {
  double best_d = 1e300;
  std::vector<double> best{0.0, 0.0};
  const double h = (hi - lo) / static_cast<double>(steps);
  for (std::size_t i = 0; i <= steps; ++i) {
    for (std::size_t k = 0; k <= steps; ++k) {
      const double a = lo + h * static_cast<double>(i);
      const double b = lo + h * static_cast<double>(k);
      if (!member(a, b)) continue;
      const double d = (a - x0) * (a - x0) + (b - x1) * (b - x1);
      if (d < best_d) {
        best_d = d;
        best = {a, b};
      }
    }
  }
  return best;
}

// Direct evaluation of the attractive-point inequality over a 1-D sample.
inline bool attractive_1d(const std::function<double(double)>& map, double z,
                          const std::vector<double>& xs, double tol) {
  for (double x : xs) {
    if (std::abs(map(x) - z) > std::abs(x - z) + tol) return false;
  }
  return true;
}

// Steps a scale-map iteration needs before the residual |Tx-x| first drops
// to tol, by direct enumeration of the closed-form per-step factor.
inline std::size_t scale_steps_to_tolerance(double c, double alpha, double x0,
                                            double tol, bool picard_mann) {
  const double f = picard_mann ? ((1.0 - alpha) + alpha * c) * c
                               : (1.0 - alpha) + alpha * c;
  double r = std::abs(1.0 - c) * std::abs(x0);
  std::size_t k = 0;
  while (r > tol) {
    r *= f;
    ++k;
    if (k > 1000000) break;
  }
  return k;
}

}  // namespace oracles
