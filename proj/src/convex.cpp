#include "capkit/convex.hpp"

#include <algorithm>
#include <cmath>

namespace capkit {

namespace {

Point normalized(const Point& a, const char* what) {
  const double n = norm(a);
  if (n <= 0.0) {
    throw ValidationError(std::string(what) + ": normal must be nonzero");
  }
  return scaled(1.0 / n, a);
}

void require_dim(std::size_t have, std::size_t want, const char* what) {
  if (have != want) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" +
                         std::to_string(have) + " vs " + std::to_string(want) +
                         ")");
  }
}

// Two Gram-Schmidt passes; vectors that collapse below the deficiency
// threshold indicate a dependent input.
std::vector<Point> orthonormalize(const std::vector<Point>& input,
                                  std::size_t dim) {
  std::vector<Point> basis;
  basis.reserve(input.size());
  for (const Point& raw : input) {
    require_dim(raw.dim(), dim, "affine_subspace basis");
    const double scale = norm(raw);
    Point v = raw;
    for (int pass = 0; pass < 2; ++pass) {
      for (const Point& q : basis) {
        v = sub(v, scaled(inner(v, q), q));
      }
    }
    const double remainder = norm(v);
    if (remainder <= 1e-10 * (1.0 + scale)) {
      throw ValidationError(
          "affine_subspace: rank-deficient basis (vector " +
          std::to_string(basis.size()) + " is dependent)");
    }
    basis.push_back(scaled(1.0 / remainder, v));
  }
  return basis;
}

}  // namespace

ConvexSet ConvexSet::halfspace(Point normal, double offset) {
  Point unit = normalized(normal, "halfspace");
  const double scale = norm(normal);
  return ConvexSet(Variant(Halfspace{std::move(unit), offset / scale}));
}

ConvexSet ConvexSet::hyperplane(Point normal, double offset) {
  Point unit = normalized(normal, "hyperplane");
  const double scale = norm(normal);
  return ConvexSet(Variant(Hyperplane{std::move(unit), offset / scale}));
}

ConvexSet ConvexSet::box(Point lower, Point upper) {
  require_dim(lower.dim(), upper.dim(), "box");
  for (std::size_t i = 0; i < lower.dim(); ++i) {
    if (lower[i] > upper[i]) {
      throw ValidationError("box: lower exceeds upper in coordinate " +
                            std::to_string(i));
    }
  }
  return ConvexSet(Variant(BoxSet{std::move(lower), std::move(upper)}));
}

ConvexSet ConvexSet::ball(Point center, double radius) {
  if (radius < 0.0) {
    throw ValidationError("ball: radius must be >= 0");
  }
  return ConvexSet(Variant(BallSet{std::move(center), radius}));
}

ConvexSet ConvexSet::affine_subspace(Point anchor, std::vector<Point> basis) {
  std::vector<Point> ortho = orthonormalize(basis, anchor.dim());
  return ConvexSet(Variant(AffineSubspace{std::move(anchor), std::move(ortho)}));
}

ConvexSet ConvexSet::intersection(std::vector<ConvexSet> sets) {
  if (sets.empty()) {
    throw ValidationError("intersection: need at least one set");
  }
  const std::size_t d = sets.front().dim();
  for (const ConvexSet& s : sets) require_dim(s.dim(), d, "intersection");
  return ConvexSet(Variant(IntersectionSet{std::move(sets)}));
}

std::size_t ConvexSet::dim() const {
  return std::visit(
      [](const auto& s) -> std::size_t {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Halfspace> ||
                      std::is_same_v<T, Hyperplane>) {
          return s.normal.dim();
        } else if constexpr (std::is_same_v<T, BoxSet>) {
          return s.lower.dim();
        } else if constexpr (std::is_same_v<T, BallSet>) {
          return s.center.dim();
        } else if constexpr (std::is_same_v<T, AffineSubspace>) {
          return s.anchor.dim();
        } else {
          return s.sets.front().dim();
        }
      },
      v_);
}

const char* ConvexSet::kind_name() const {
  return std::visit(
      [](const auto& s) -> const char* {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Halfspace>) return "halfspace";
        if constexpr (std::is_same_v<T, Hyperplane>) return "hyperplane";
        if constexpr (std::is_same_v<T, BoxSet>) return "box";
        if constexpr (std::is_same_v<T, BallSet>) return "ball";
        if constexpr (std::is_same_v<T, AffineSubspace>) return "affine";
        return "intersection";
      },
      v_);
}

bool ConvexSet::contains(const Point& x, const Tol& tol) const {
  require_dim(x.dim(), dim(), "contains");
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Halfspace>) {
          return inner(s.normal, x) - s.offset <= tol.at(1.0 + norm(x));
        } else if constexpr (std::is_same_v<T, Hyperplane>) {
          return std::abs(inner(s.normal, x) - s.offset) <=
                 tol.at(1.0 + norm(x));
        } else if constexpr (std::is_same_v<T, BoxSet>) {
          for (std::size_t i = 0; i < x.dim(); ++i) {
            const double t = tol.at(1.0 + std::abs(x[i]));
            if (x[i] < s.lower[i] - t || x[i] > s.upper[i] + t) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, BallSet>) {
          return dist(x, s.center) - s.radius <= tol.at(1.0 + norm(x));
        } else if constexpr (std::is_same_v<T, AffineSubspace>) {
          return dist(x, project(x)) <= tol.at(1.0 + norm(x));
        } else {
          for (const ConvexSet& m : s.sets) {
            if (!m.contains(x, tol)) return false;
          }
          return true;
        }
      },
      v_);
}

Point ConvexSet::project(const Point& x) const {
  require_dim(x.dim(), dim(), "project");
  return std::visit(
      [&](const auto& s) -> Point {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Halfspace>) {
          const double slack = inner(s.normal, x) - s.offset;
          if (slack <= 0.0) return x;
          return sub(x, scaled(slack, s.normal));
        } else if constexpr (std::is_same_v<T, Hyperplane>) {
          const double slack = inner(s.normal, x) - s.offset;
          return sub(x, scaled(slack, s.normal));
        } else if constexpr (std::is_same_v<T, BoxSet>) {
          std::vector<double> out(x.dim());
          for (std::size_t i = 0; i < x.dim(); ++i) {
            out[i] = std::clamp(x[i], s.lower[i], s.upper[i]);
          }
          return Point(std::move(out));
        } else if constexpr (std::is_same_v<T, BallSet>) {
          const Point d = sub(x, s.center);
          const double n = norm(d);
          if (n <= s.radius) return x;
          if (n == 0.0) return s.center;
          return add(s.center, scaled(s.radius / n, d));
        } else if constexpr (std::is_same_v<T, AffineSubspace>) {
          const Point d = sub(x, s.anchor);
          Point out = s.anchor;
          for (const Point& q : s.basis) {
            out = add(out, scaled(inner(d, q), q));
          }
          return out;
        } else {
          return project_detailed(x).point;
        }
      },
      v_);
}

ProjectionResult ConvexSet::project_detailed(const Point& x,
                                             const DykstraOptions& opts) const {
  const auto* inter = get_if<IntersectionSet>();
  if (inter == nullptr) {
    return ProjectionResult{project(x), 0.0, 0, true};
  }
  // Dykstra: project y = cur + p_k onto each member in turn, keeping one
  // correction term p_k per set. Plain alternating projections would reach
  // the intersection but not the nearest point of it.
  const std::size_t m = inter->sets.size();
  std::vector<Point> corrections(m, Point::zeros(x.dim()));
  Point cur = x;
  double residual = 0.0;
  for (std::size_t sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    double max_move = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const Point y = add(cur, corrections[k]);
      Point next = inter->sets[k].project(y);
      corrections[k] = sub(y, next);
      max_move = std::max(max_move, dist(next, cur));
      cur = std::move(next);
    }
    residual = max_move;
    if (residual <= opts.residual_target) {
      return ProjectionResult{std::move(cur), residual, sweep, true};
    }
  }
  // Soft failure: hand back the best iterate and the achieved residual.
  return ProjectionResult{std::move(cur), residual, opts.max_sweeps, false};
}

bool ConvexSet::operator==(const ConvexSet& other) const {
  if (v_.index() != other.v_.index()) return false;
  return std::visit(
      [&](const auto& a) -> bool {
        using T = std::decay_t<decltype(a)>;
        const auto& b = std::get<T>(other.v_);
        if constexpr (std::is_same_v<T, Halfspace> ||
                      std::is_same_v<T, Hyperplane>) {
          return a.normal == b.normal && a.offset == b.offset;
        } else if constexpr (std::is_same_v<T, BoxSet>) {
          return a.lower == b.lower && a.upper == b.upper;
        } else if constexpr (std::is_same_v<T, BallSet>) {
          return a.center == b.center && a.radius == b.radius;
        } else if constexpr (std::is_same_v<T, AffineSubspace>) {
          return a.anchor == b.anchor && a.basis == b.basis;
        } else {
          return a.sets == b.sets;
        }
      },
      v_);
}

double variational_gap(const ConvexSet& s, const Point& x, const Point& z,
                       const Tol& tol) {
  if (!s.contains(z, tol)) {
    throw ValidationError("variational_gap: z = " + to_string(z) +
                          " is not a member of the " +
                          std::string(s.kind_name()) + " set");
  }
  const Point px = s.project(x);
  return inner(sub(x, px), sub(px, z));
}

}  // namespace capkit
