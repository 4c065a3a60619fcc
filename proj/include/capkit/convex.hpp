#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "capkit/geometry.hpp"

namespace capkit {

class ConvexSet;

struct Halfspace {
  Point normal;  // unit length after construction
  double offset;
};
struct Hyperplane {
  Point normal;  // unit length after construction
  double offset;
};
struct BoxSet {
  Point lower, upper;
};
struct BallSet {
  Point center;
  double radius;
};
struct AffineSubspace {
  Point anchor;
  std::vector<Point> basis;  // orthonormal after construction
};
struct IntersectionSet {
  std::vector<ConvexSet> sets;
};

struct DykstraOptions {
  double residual_target = 1e-10;
  std::size_t max_sweeps = 10000;
};

struct ProjectionResult {
  Point point;
  // Max displacement of the iterate over the last full sweep; 0 for sets
  // with closed-form projections.
  double residual = 0.0;
  std::size_t sweeps = 0;
  bool converged = true;
};

// Canonical convex regions with exact metric projection where a closed form
// exists, and Dykstra's algorithm for finite intersections. Nonemptiness of
// an intersection is the caller's responsibility.
class ConvexSet {
 public:
  static ConvexSet halfspace(Point normal, double offset);   // {x : <a,x> <= b}
  static ConvexSet hyperplane(Point normal, double offset);  // {x : <a,x> = b}
  static ConvexSet box(Point lower, Point upper);
  static ConvexSet ball(Point center, double radius);
  // Orthonormalizes the basis (Gram-Schmidt, two passes); throws on rank
  // deficiency. An empty basis gives the single point {anchor}.
  static ConvexSet affine_subspace(Point anchor, std::vector<Point> basis);
  static ConvexSet intersection(std::vector<ConvexSet> sets);

  std::size_t dim() const;
  const char* kind_name() const;

  bool contains(const Point& x, const Tol& tol = {}) const;
  Point project(const Point& x) const;
  ProjectionResult project_detailed(const Point& x,
                                    const DykstraOptions& opts = {}) const;

  template <class V>
  const V* get_if() const {
    return std::get_if<V>(&v_);
  }

  bool operator==(const ConvexSet&) const;

 private:
  using Variant = std::variant<Halfspace, Hyperplane, BoxSet, BallSet,
                               AffineSubspace, IntersectionSet>;
  explicit ConvexSet(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

// <x - Px, Px - z>, the projection variational inequality quantity.
// z must belong to s (up to tol); nonnegative up to tolerance for all inputs.
double variational_gap(const ConvexSet& s, const Point& x, const Point& z,
                       const Tol& tol = {});

}  // namespace capkit
