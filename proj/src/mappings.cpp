#include "capkit/mappings.hpp"

#include <algorithm>
#include <cmath>

#include "capkit/rng.hpp"

namespace capkit {

// ---------------------------------------------------------------------------
// DomainSpec

DomainSpec DomainSpec::box(Point lower, Point upper) {
  if (lower.dim() != upper.dim()) {
    throw DimensionError("box domain: corner dimensions differ");
  }
  for (std::size_t i = 0; i < lower.dim(); ++i) {
    if (lower[i] > upper[i]) {
      throw ValidationError("box domain: lower exceeds upper in coordinate " +
                            std::to_string(i));
    }
  }
  return DomainSpec(Variant(BoxDomain{std::move(lower), std::move(upper)}));
}

DomainSpec DomainSpec::ball(Point center, double radius) {
  if (radius < 0.0) throw ValidationError("ball domain: radius must be >= 0");
  return DomainSpec(Variant(BallDomain{std::move(center), radius}));
}

DomainSpec DomainSpec::halfline(double origin, bool upward, double window) {
  if (!(window > 0.0)) {
    throw ValidationError("halfline domain: sampling window must be > 0");
  }
  return DomainSpec(Variant(HalflineDomain{origin, upward, window}));
}

DomainSpec DomainSpec::finite(std::vector<Point> points) {
  if (points.empty()) {
    throw ValidationError("finite domain: need at least one point");
  }
  const std::size_t d = points.front().dim();
  for (const Point& p : points) {
    if (p.dim() != d) throw DimensionError("finite domain: mixed dimensions");
  }
  return DomainSpec(Variant(FiniteDomain{std::move(points)}));
}

std::size_t DomainSpec::dim() const {
  return std::visit(
      [](const auto& d) -> std::size_t {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, BoxDomain>) return d.lower.dim();
        if constexpr (std::is_same_v<T, BallDomain>) return d.center.dim();
        if constexpr (std::is_same_v<T, HalflineDomain>) return 1;
        if constexpr (std::is_same_v<T, FiniteDomain>) {
          return d.points.front().dim();
        }
      },
      v_);
}

const char* DomainSpec::kind_name() const {
  return std::visit(
      [](const auto& d) -> const char* {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, BoxDomain>) return "box";
        if constexpr (std::is_same_v<T, BallDomain>) return "ball";
        if constexpr (std::is_same_v<T, HalflineDomain>) return "halfline";
        if constexpr (std::is_same_v<T, FiniteDomain>) return "finite";
      },
      v_);
}

bool DomainSpec::contains(const Point& x, const Tol& tol) const {
  if (x.dim() != dim()) {
    throw DimensionError("domain contains: dimension mismatch");
  }
  return std::visit(
      [&](const auto& d) -> bool {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, BoxDomain>) {
          for (std::size_t i = 0; i < x.dim(); ++i) {
            const double t = tol.at(1.0 + std::abs(x[i]));
            if (x[i] < d.lower[i] - t || x[i] > d.upper[i] + t) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, BallDomain>) {
          return dist(x, d.center) - d.radius <= tol.at(1.0 + norm(x));
        } else if constexpr (std::is_same_v<T, HalflineDomain>) {
          const double t = tol.at(1.0 + std::abs(x[0]));
          return d.upward ? x[0] >= d.origin - t : x[0] <= d.origin + t;
        } else {
          for (const Point& p : d.points) {
            if (dist(x, p) <= tol.at(1.0 + norm(p))) return true;
          }
          return false;
        }
      },
      v_);
}

namespace {

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> out;
  out.reserve(count);
  if (count == 1) {
    out.push_back(0.5 * (lo + hi));
    return out;
  }
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(i + 1 == count ? hi : lo + step * static_cast<double>(i));
  }
  return out;
}

// Axis-wise Cartesian grid over a box, row-major in the last axis.
std::vector<Point> box_grid(const Point& lower, const Point& upper,
                            std::size_t count) {
  const std::size_t d = lower.dim();
  std::vector<std::vector<double>> axes(d);
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) {
    axes[i] = linspace(lower[i], upper[i], count);
    total *= count;
  }
  if (total > 200000) {
    throw ValidationError("grid sampler: " + std::to_string(total) +
                          " points exceed the 200000 cap");
  }
  std::vector<Point> out;
  out.reserve(total);
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t k = 0; k < total; ++k) {
    std::vector<double> c(d);
    for (std::size_t i = 0; i < d; ++i) c[i] = axes[i][idx[i]];
    out.emplace_back(std::move(c));
    for (std::size_t i = d; i-- > 0;) {
      if (++idx[i] < count) break;
      idx[i] = 0;
    }
  }
  return out;
}

}  // namespace

std::vector<Point> DomainSpec::sample(const SamplerSpec& sampler,
                                      std::uint64_t seed) const {
  const std::size_t count = std::visit(
      [](const auto& s) -> std::size_t {
        if (s.count == 0) {
          throw ValidationError("sampler: count must be >= 1");
        }
        return s.count;
      },
      sampler);
  const bool random = std::holds_alternative<RandomSampler>(sampler);
  Rng rng(seed);

  return std::visit(
      [&](const auto& d) -> std::vector<Point> {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, BoxDomain>) {
          if (!random) return box_grid(d.lower, d.upper, count);
          std::vector<Point> out;
          out.reserve(count);
          for (std::size_t k = 0; k < count; ++k) {
            std::vector<double> c(d.lower.dim());
            for (std::size_t i = 0; i < c.size(); ++i) {
              c[i] = rng.uniform(d.lower[i], d.upper[i]);
            }
            out.emplace_back(std::move(c));
          }
          return out;
        } else if constexpr (std::is_same_v<T, BallDomain>) {
          // Bounding-box grid (or draws) filtered by membership.
          std::vector<double> lo(d.center.dim()), hi(d.center.dim());
          for (std::size_t i = 0; i < lo.size(); ++i) {
            lo[i] = d.center[i] - d.radius;
            hi[i] = d.center[i] + d.radius;
          }
          const Point lower{std::vector<double>(lo)}, upper{std::vector<double>(hi)};
          std::vector<Point> out;
          if (!random) {
            for (Point& p : box_grid(lower, upper, count)) {
              if (dist(p, d.center) <= d.radius) out.push_back(std::move(p));
            }
            return out;
          }
          out.reserve(count);
          std::size_t attempts = 0;
          while (out.size() < count) {
            if (++attempts > 10000 * count) {
              throw ValidationError("ball sampler: rejection cap exceeded");
            }
            std::vector<double> c(lo.size());
            for (std::size_t i = 0; i < c.size(); ++i) {
              c[i] = rng.uniform(lo[i], hi[i]);
            }
            Point p(std::move(c));
            if (dist(p, d.center) <= d.radius) out.push_back(std::move(p));
          }
          return out;
        } else if constexpr (std::is_same_v<T, HalflineDomain>) {
          const double a = d.upward ? d.origin : d.origin - d.window;
          const double b = d.upward ? d.origin + d.window : d.origin;
          std::vector<Point> out;
          out.reserve(count);
          if (!random) {
            for (double t : linspace(a, b, count)) {
              out.emplace_back(std::vector<double>{t});
            }
            return out;
          }
          for (std::size_t k = 0; k < count; ++k) {
            out.emplace_back(std::vector<double>{rng.uniform(a, b)});
          }
          return out;
        } else {
          if (!random) return d.points;
          std::vector<Point> out;
          out.reserve(count);
          for (std::size_t k = 0; k < count; ++k) {
            out.push_back(d.points[rng.index(d.points.size())]);
          }
          return out;
        }
      },
      v_);
}

std::optional<ConvexSet> DomainSpec::as_convex_set() const {
  return std::visit(
      [](const auto& d) -> std::optional<ConvexSet> {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, BoxDomain>) {
          return ConvexSet::box(d.lower, d.upper);
        } else if constexpr (std::is_same_v<T, BallDomain>) {
          return ConvexSet::ball(d.center, d.radius);
        } else if constexpr (std::is_same_v<T, HalflineDomain>) {
          const double sign = d.upward ? -1.0 : 1.0;
          return ConvexSet::halfspace(Point{{sign}}, sign * d.origin);
        } else {
          return std::nullopt;
        }
      },
      v_);
}

// ---------------------------------------------------------------------------
// MappingSpec

double BerindeFamily::jump() const {
  return 0.5 * std::min(factor, residual_weight * (1.0 - factor));
}

bool ProjectedFamily::operator==(const ProjectedFamily& o) const {
  if (!(target == o.target)) return false;
  if (inner == o.inner) return true;
  return inner && o.inner && *inner == *o.inner;
}

MappingSpec::MappingSpec(MappingFamily family, DomainSpec domain,
                         bool into_domain)
    : family_(std::move(family)),
      domain_(std::move(domain)),
      into_domain_(into_domain) {
  const std::size_t d = domain_.dim();
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, AffineFamily>) {
          if (f.matrix.size() != d * d) {
            throw ValidationError("affine mapping: matrix must be " +
                                  std::to_string(d) + "x" + std::to_string(d));
          }
          if (f.offset.dim() != d) {
            throw DimensionError("affine mapping: offset dimension mismatch");
          }
          for (double v : f.matrix) {
            if (!std::isfinite(v)) {
              throw ValidationError("affine mapping: matrix entries must be finite");
            }
          }
        } else if constexpr (std::is_same_v<T, ScaleFamily>) {
          if (!std::isfinite(f.factor)) {
            throw ValidationError("scale mapping: factor must be finite");
          }
        } else if constexpr (std::is_same_v<T, TranslationFamily>) {
          if (f.offset.dim() != d) {
            throw DimensionError("translation mapping: offset dimension mismatch");
          }
        } else if constexpr (std::is_same_v<T, Rotation2dFamily>) {
          if (d != 2) {
            throw DimensionError("rotation2d mapping: domain must be 2-D");
          }
        } else if constexpr (std::is_same_v<T, ConstantFamily>) {
          if (f.value.dim() != d) {
            throw DimensionError("constant mapping: value dimension mismatch");
          }
        } else if constexpr (std::is_same_v<T, BerindeFamily>) {
          if (d != 1) {
            throw DimensionError("berinde mapping: domain must be 1-D");
          }
          if (!(f.factor > 0.0 && f.factor < 1.0)) {
            throw ValidationError("berinde mapping: factor must lie in (0,1)");
          }
          if (f.residual_weight < 0.0) {
            throw ValidationError("berinde mapping: residual weight must be >= 0");
          }
        } else if constexpr (std::is_same_v<T, ProjectedFamily>) {
          if (!f.inner) {
            throw ValidationError("projected mapping: missing inner mapping");
          }
          if (f.target.dim() != d || f.inner->domain().dim() != d) {
            throw DimensionError("projected mapping: dimension mismatch");
          }
        }
      },
      family_);
}

MappingSpec MappingSpec::identity(DomainSpec domain) {
  return MappingSpec(ScaleFamily{1.0}, std::move(domain), true);
}

const char* MappingSpec::family_name() const {
  return std::visit(
      [](const auto& f) -> const char* {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, AffineFamily>) return "affine";
        if constexpr (std::is_same_v<T, ScaleFamily>) return "scale";
        if constexpr (std::is_same_v<T, TranslationFamily>) return "translation";
        if constexpr (std::is_same_v<T, Rotation2dFamily>) return "rotation2d";
        if constexpr (std::is_same_v<T, ConstantFamily>) return "constant";
        if constexpr (std::is_same_v<T, BerindeFamily>) return "berinde";
        return "projected";
      },
      family_);
}

Point MappingSpec::eval(const Point& x, const Tol& tol) const {
  if (x.dim() != domain_.dim()) {
    throw DimensionError("eval: point dimension " + std::to_string(x.dim()) +
                         " does not match domain dimension " +
                         std::to_string(domain_.dim()));
  }
  if (!domain_.contains(x, tol)) {
    throw DomainError("eval: point " + to_string(x) + " lies outside the " +
                      std::string(domain_.kind_name()) + " domain of a " +
                      family_name() + " mapping");
  }
  Point image = std::visit(
      [&](const auto& f) -> Point {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, AffineFamily>) {
          const std::size_t d = x.dim();
          std::vector<double> out(d);
          for (std::size_t i = 0; i < d; ++i) {
            double acc = f.offset[i];
            for (std::size_t j = 0; j < d; ++j) {
              acc += f.matrix[i * d + j] * x[j];
            }
            out[i] = acc;
          }
          return Point(std::move(out));
        } else if constexpr (std::is_same_v<T, ScaleFamily>) {
          return scaled(f.factor, x);
        } else if constexpr (std::is_same_v<T, TranslationFamily>) {
          return add(x, f.offset);
        } else if constexpr (std::is_same_v<T, Rotation2dFamily>) {
          const double c = std::cos(f.angle), s = std::sin(f.angle);
          return Point({c * x[0] - s * x[1], s * x[0] + c * x[1]});
        } else if constexpr (std::is_same_v<T, ConstantFamily>) {
          return f.value;
        } else if constexpr (std::is_same_v<T, BerindeFamily>) {
          const double t = x[0];
          const double image1 = f.factor * t - (t > 0.5 ? f.jump() : 0.0);
          return Point({image1});
        } else {
          return f.target.project(f.inner->eval(x, tol));
        }
      },
      family_);
  if (into_domain_ && !domain_.contains(image, tol)) {
    throw DomainError("eval: mapping declared domain-preserving sent " +
                      to_string(x) + " to " + to_string(image) +
                      " outside its " + domain_.kind_name() + " domain");
  }
  return image;
}

// ---------------------------------------------------------------------------
// Class checks

double further_hybrid_lhs(const HybridParams& p, const Point& x,
                          const Point& tx, const Point& y, const Point& ty) {
  return p.alpha * norm_sq(sub(tx, ty)) + p.beta * norm_sq(sub(x, ty)) +
         p.gamma * norm_sq(sub(tx, y)) + p.delta * norm_sq(sub(x, y)) +
         p.epsilon * norm_sq(sub(x, tx));
}

double normally_hybrid_lhs(const HybridParams& p, const Point& x,
                           const Point& tx, const Point& y, const Point& ty) {
  return p.alpha * norm_sq(sub(tx, ty)) + p.beta * norm_sq(sub(x, ty)) +
         p.gamma * norm_sq(sub(tx, y)) + p.delta * norm_sq(sub(x, y));
}

double widely_hybrid_lhs(const HybridParams& p, const Point& x,
                         const Point& tx, const Point& y, const Point& ty) {
  if (!p.varsigma || !p.eta) {
    throw ValidationError(
        "widely-hybrid check: parameters varsigma and eta are required");
  }
  return p.alpha * norm_sq(sub(tx, ty)) + p.beta * norm_sq(sub(x, ty)) +
         p.gamma * norm_sq(sub(tx, y)) + p.delta * norm_sq(sub(x, y)) +
         p.epsilon * norm_sq(sub(x, tx)) + *p.varsigma * norm_sq(sub(y, ty)) +
         *p.eta * norm_sq(sub(sub(x, tx), sub(y, ty)));
}

const char* to_string(Verdict v) {
  return v == Verdict::HoldsOnSample ? "holds-on-sample" : "violated";
}

std::vector<PointPair> all_ordered_pairs(std::span<const Point> sample) {
  std::vector<PointPair> out;
  out.reserve(sample.size() * sample.size());
  for (const Point& x : sample) {
    for (const Point& y : sample) out.emplace_back(x, y);
  }
  return out;
}

namespace {

// Shared scan: verdict is violated as soon as one pair's LHS exceeds the
// squared-norm-scaled tolerance, so exact-equality families sitting at 0 do
// not flap.
template <class LhsFn>
ClassCheckReport scan_pairs(const char* class_name, const MappingSpec& m,
                            std::span<const PointPair> pairs, const Tol& tol,
                            LhsFn&& lhs_fn) {
  if (pairs.empty()) {
    throw ValidationError(std::string(class_name) +
                          " check: empty pair list");
  }
  ClassCheckReport report;
  report.class_name = class_name;
  report.pairs_tested = pairs.size();
  double worst_excess = 0.0;
  bool violated = false;
  for (const auto& [x, y] : pairs) {
    const Point tx = m.eval(x, tol);
    const Point ty = m.eval(y, tol);
    const double v = lhs_fn(x, tx, y, ty);
    const double allowance = tol.atol * (1.0 + norm_sq(x) + norm_sq(y));
    if (v > report.max_violation) report.max_violation = v;
    if (v > allowance && (!violated || v - allowance > worst_excess)) {
      violated = true;
      worst_excess = v - allowance;
      report.witness = PointPair{x, y};
    }
  }
  report.verdict = violated ? Verdict::Violated : Verdict::HoldsOnSample;
  if (!violated) report.witness.reset();
  return report;
}

}  // namespace

ClassCheckReport check_further_hybrid(const MappingSpec& m,
                                      const HybridParams& p,
                                      std::span<const PointPair> pairs,
                                      const Tol& tol) {
  return scan_pairs("further-hybrid", m, pairs, tol,
                    [&](const Point& x, const Point& tx, const Point& y,
                        const Point& ty) {
                      return further_hybrid_lhs(p, x, tx, y, ty);
                    });
}

ClassCheckReport check_normally_hybrid(const MappingSpec& m,
                                       const HybridParams& p,
                                       std::span<const PointPair> pairs,
                                       const Tol& tol) {
  return scan_pairs("normally-hybrid", m, pairs, tol,
                    [&](const Point& x, const Point& tx, const Point& y,
                        const Point& ty) {
                      return normally_hybrid_lhs(p, x, tx, y, ty);
                    });
}

ClassCheckReport check_widely_hybrid(const MappingSpec& m,
                                     const HybridParams& p,
                                     std::span<const PointPair> pairs,
                                     const Tol& tol) {
  if (!p.varsigma || !p.eta) {
    throw ValidationError(
        "widely-hybrid check: parameters varsigma and eta are required");
  }
  return scan_pairs("widely-hybrid", m, pairs, tol,
                    [&](const Point& x, const Point& tx, const Point& y,
                        const Point& ty) {
                      return widely_hybrid_lhs(p, x, tx, y, ty);
                    });
}

ClassCheckReport check_berinde_quasi_contractive(
    const MappingSpec& m, double a, double L,
    std::span<const PointPair> pairs, const Tol& tol) {
  if (!(a > 0.0 && a < 1.0) || L < 0.0) {
    throw ValidationError(
        "berinde check: need factor in (0,1) and weight >= 0");
  }
  return scan_pairs("berinde-quasi-contractive", m, pairs, tol,
                    [&](const Point& x, const Point& tx, const Point& y,
                        const Point& ty) {
                      return dist(tx, ty) - a * dist(x, y) -
                             L * dist(x, tx);
                    });
}

ClassCheckReport check_quasi_nonexpansive(const MappingSpec& m,
                                          std::span<const Point> fixed_points,
                                          std::span<const Point> sample,
                                          const Tol& tol) {
  if (fixed_points.empty() || sample.empty()) {
    throw ValidationError("quasi-nonexpansive check: empty inputs");
  }
  for (const Point& z : fixed_points) {
    const double residual = dist(m.eval(z, tol), z);
    if (residual > tol.at(1.0 + norm(z))) {
      // Bad test setup, not a class violation.
      throw ValidationError(
          "quasi-nonexpansive check: claimed fixed point " + to_string(z) +
          " has residual " + format_double(residual));
    }
  }
  ClassCheckReport report;
  report.class_name = "quasi-nonexpansive";
  report.pairs_tested = fixed_points.size() * sample.size();
  double worst_excess = 0.0;
  bool violated = false;
  for (const Point& x : sample) {
    const Point tx = m.eval(x, tol);
    for (const Point& z : fixed_points) {
      const double v = dist(tx, z) - dist(x, z);
      const double allowance = tol.at(1.0 + norm(x) + norm(z));
      if (v > report.max_violation) report.max_violation = v;
      if (v > allowance && (!violated || v - allowance > worst_excess)) {
        violated = true;
        worst_excess = v - allowance;
        report.witness = PointPair{x, z};
      }
    }
  }
  report.verdict = violated ? Verdict::Violated : Verdict::HoldsOnSample;
  if (!violated) report.witness.reset();
  return report;
}

ConditionCheck check_theorem_conditions(const HybridParams& p) {
  if (p.alpha + p.beta + p.gamma + p.delta < 0.0) {
    return {false, "alpha+beta+gamma+delta >= 0 fails"};
  }
  if (p.epsilon < 0.0) {
    return {false, "epsilon >= 0 fails"};
  }
  if (!(p.alpha + p.beta > 0.0) && !(p.alpha + p.gamma > 0.0)) {
    return {false, "neither alpha+beta > 0 nor alpha+gamma > 0"};
  }
  return {true, ""};
}

}  // namespace capkit
