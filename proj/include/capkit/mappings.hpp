#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "capkit/convex.hpp"
#include "capkit/geometry.hpp"

namespace capkit {

// ---------------------------------------------------------------------------
// Domains and samplers

struct GridSampler {
  std::size_t count = 41;  // per-axis, endpoints included
};
struct RandomSampler {
  std::size_t count = 200;  // seeded uniform draws
};
using SamplerSpec = std::variant<GridSampler, RandomSampler>;

struct BoxDomain {
  Point lower, upper;
  bool operator==(const BoxDomain&) const = default;
};
struct BallDomain {
  Point center;
  double radius;
  bool operator==(const BallDomain&) const = default;
};
// {t : t >= origin} when upward (else t <= origin). The window only bounds
// the sampler; membership is unbounded on the open side.
struct HalflineDomain {
  double origin = 0.0;
  bool upward = true;
  double window = 1.0;
  bool operator==(const HalflineDomain&) const = default;
};
struct FiniteDomain {
  std::vector<Point> points;
  bool operator==(const FiniteDomain&) const = default;
};

class DomainSpec {
 public:
  static DomainSpec box(Point lower, Point upper);
  static DomainSpec ball(Point center, double radius);
  static DomainSpec halfline(double origin, bool upward, double window);
  static DomainSpec finite(std::vector<Point> points);

  std::size_t dim() const;
  const char* kind_name() const;
  bool contains(const Point& x, const Tol& tol = {}) const;

  // Deterministic: same sampler and seed reproduce the identical list.
  std::vector<Point> sample(const SamplerSpec& sampler,
                            std::uint64_t seed) const;

  // The same region as a projectable set; finite domains have none.
  std::optional<ConvexSet> as_convex_set() const;

  template <class V>
  const V* get_if() const {
    return std::get_if<V>(&v_);
  }

  bool operator==(const DomainSpec&) const = default;

 private:
  using Variant =
      std::variant<BoxDomain, BallDomain, HalflineDomain, FiniteDomain>;
  explicit DomainSpec(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

// ---------------------------------------------------------------------------
// Mapping catalog

class MappingSpec;

struct AffineFamily {
  std::vector<double> matrix;  // row-major dim x dim
  Point offset;
  bool operator==(const AffineFamily&) const = default;
};
struct ScaleFamily {
  double factor = 1.0;
  bool operator==(const ScaleFamily&) const = default;
};
struct TranslationFamily {
  Point offset;
  bool operator==(const TranslationFamily&) const = default;
};
struct Rotation2dFamily {
  double angle = 0.0;
  bool operator==(const Rotation2dFamily&) const = default;
};
struct ConstantFamily {
  Point value;
  bool operator==(const ConstantFamily&) const = default;
};
// Concrete quasi-contractive instance on [0,1]: t -> factor*t, with a
// downward jump right of t = 1/2 of size jump() so the map is discontinuous
// (hence not nonexpansive) yet |Tx-Ty| <= factor*|x-y| + weight*|x-Tx| holds
// with the declared certificate. Fixed point 0.
struct BerindeFamily {
  double factor = 0.5;        // in (0,1)
  double residual_weight = 0.0;  // >= 0
  double jump() const;
  bool operator==(const BerindeFamily&) const = default;
};
struct ProjectedFamily {
  std::shared_ptr<const MappingSpec> inner;
  ConvexSet target;
  bool operator==(const ProjectedFamily& o) const;
};

using MappingFamily =
    std::variant<AffineFamily, ScaleFamily, TranslationFamily,
                 Rotation2dFamily, ConstantFamily, BerindeFamily,
                 ProjectedFamily>;

// Deterministic self-map (or map into space) over a declared domain.
// `into_domain` declares C->C; eval then checks the image stays inside.
class MappingSpec {
 public:
  MappingSpec(MappingFamily family, DomainSpec domain, bool into_domain);
  static MappingSpec identity(DomainSpec domain);

  const MappingFamily& family() const { return family_; }
  const DomainSpec& domain() const { return domain_; }
  bool into_domain() const { return into_domain_; }
  const char* family_name() const;

  Point eval(const Point& x, const Tol& tol = {}) const;

  bool operator==(const MappingSpec&) const = default;

 private:
  MappingFamily family_;
  DomainSpec domain_;
  bool into_domain_;
};

// ---------------------------------------------------------------------------
// Hybrid-class inequalities

struct HybridParams {
  double alpha = 0.0, beta = 0.0, gamma = 0.0, delta = 0.0, epsilon = 0.0;
  std::optional<double> varsigma;  // widely-hybrid check only
  std::optional<double> eta;
  bool operator==(const HybridParams&) const = default;
};

// Left-hand sides of the three quadratic class inequalities, evaluated on
// precomputed images. A mapping belongs to a class (on a sample) when the
// value is <= 0 for every pair.
double further_hybrid_lhs(const HybridParams& p, const Point& x,
                          const Point& tx, const Point& y, const Point& ty);
double normally_hybrid_lhs(const HybridParams& p, const Point& x,
                           const Point& tx, const Point& y, const Point& ty);
double widely_hybrid_lhs(const HybridParams& p, const Point& x,
                         const Point& tx, const Point& y, const Point& ty);

enum class Verdict { HoldsOnSample, Violated };
const char* to_string(Verdict v);

struct ClassCheckReport {
  std::string class_name;
  std::size_t pairs_tested = 0;
  double max_violation = 0.0;  // largest positive LHS seen, 0 if none
  std::optional<std::pair<Point, Point>> witness;  // worst pair, when violated
  Verdict verdict = Verdict::HoldsOnSample;
  // Finite evidence only: a holds verdict is not a proof over all of C.
  bool sampled = true;
  bool operator==(const ClassCheckReport&) const = default;
};

using PointPair = std::pair<Point, Point>;

// All ordered pairs of the sample, x = y included.
std::vector<PointPair> all_ordered_pairs(std::span<const Point> sample);

ClassCheckReport check_further_hybrid(const MappingSpec& m,
                                      const HybridParams& p,
                                      std::span<const PointPair> pairs,
                                      const Tol& tol = {});
// Same inequality with the epsilon term dropped.
ClassCheckReport check_normally_hybrid(const MappingSpec& m,
                                       const HybridParams& p,
                                       std::span<const PointPair> pairs,
                                       const Tol& tol = {});
// Seven-term inequality; varsigma and eta must be present.
ClassCheckReport check_widely_hybrid(const MappingSpec& m,
                                     const HybridParams& p,
                                     std::span<const PointPair> pairs,
                                     const Tol& tol = {});

// |Tx-Ty| <= a|x-y| + L|x-Tx| on every pair.
ClassCheckReport check_berinde_quasi_contractive(
    const MappingSpec& m, double a, double L,
    std::span<const PointPair> pairs, const Tol& tol = {});

// |Tx-z| <= |x-z| for every sample x and every listed fixed point z.
// A listed z failing its own fixed-point residual is a hard error.
ClassCheckReport check_quasi_nonexpansive(const MappingSpec& m,
                                          std::span<const Point> fixed_points,
                                          std::span<const Point> sample,
                                          const Tol& tol = {});

struct ConditionCheck {
  bool ok = false;
  std::string reason;  // first failing condition; empty when ok
};

// alpha+beta+gamma+delta >= 0, epsilon >= 0, and alpha+beta > 0 or
// alpha+gamma > 0.
ConditionCheck check_theorem_conditions(const HybridParams& p);

}  // namespace capkit
