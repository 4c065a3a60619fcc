#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "capkit/errors.hpp"

namespace capkit {

// Absolute-plus-relative tolerance policy, fixed once for the whole toolkit.
struct Tol {
  double atol = 1e-9;
  double rtol = 1e-9;
  double at(double scale) const { return atol + rtol * std::abs(scale); }
};

// Immutable element of R^n. Construction rejects NaN/Inf and the empty
// vector; all operations return fresh values, so traces are reproducible.
class Point {
 public:
  explicit Point(std::vector<double> coords);
  static Point zeros(std::size_t dim);

  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::span<const double> coords() const { return coords_; }

  bool operator==(const Point&) const = default;

 private:
  std::vector<double> coords_;
};

Point add(const Point& u, const Point& v);
Point sub(const Point& u, const Point& v);
Point scaled(double c, const Point& u);

double inner(const Point& u, const Point& v);
double norm_sq(const Point& u);
double norm(const Point& u);
double dist(const Point& u, const Point& v);

// 2<u-v,p-w> - (|u-w|^2 + |v-p|^2 - |u-p|^2 - |v-w|^2).
// Identically zero in exact arithmetic; exists so the identity is assertable.
double polarization_gap(const Point& u, const Point& v, const Point& p,
                        const Point& w);

// (1-alpha)*x + alpha*tx. alpha must lie strictly inside (0,1).
Point mann_combination(const Point& x, const Point& tx, double alpha);

// Shortest round-trip decimal form; shared by CSV/JSON emitters and errors.
std::string format_double(double v);
std::string to_string(const Point& p);

}  // namespace capkit
