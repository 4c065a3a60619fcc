#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "capkit/mappings.hpp"

namespace capkit {

// Membership of attractive-point sets is always decided against a finite
// domain sample; verdicts are evidence over that sample, not proofs.
struct AttractiveCheck {
  bool attractive = false;
  // Sample x maximizing |Tx-z| - |x-z| (reported whether or not that
  // maximum is positive), and the maximum itself.
  Point worst_witness;
  double worst_violation = 0.0;
};

AttractiveCheck is_attractive_point(const MappingSpec& m, const Point& z,
                                    std::span<const Point> domain_sample,
                                    const Tol& tol = {});

// max(|Sx-z|, |Tx-z|) <= |x-z| over the sample. Both mappings must share
// the same domain.
AttractiveCheck is_common_attractive(const MappingSpec& s,
                                     const MappingSpec& t, const Point& z,
                                     std::span<const Point> domain_sample,
                                     const Tol& tol = {});

struct CapEstimate {
  std::vector<Point> members;                // in candidate order
  std::vector<std::size_t> member_indices;   // indices into the candidate grid
  std::size_t candidates_tested = 0;
  std::size_t domain_sample_size = 0;
  double atol_used = 0.0;
};

CapEstimate estimate_cap_region(const MappingSpec& s, const MappingSpec& t,
                                std::span<const Point> domain_sample,
                                std::span<const Point> candidates,
                                const Tol& tol = {});

using MembershipPredicate = std::function<bool(const Point&)>;

struct ConvexityReport {
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::size_t segment_failures = 0;  // random convex combinations
  std::size_t limit_failures = 0;    // limits of convergent member sequences
  std::optional<Point> first_failure;
  bool passed() const { return segment_failures == 0 && limit_failures == 0; }
};

// Convexity: seeded pairs (u,v) of members and lambda in (0,1) must keep
// lambda*u + (1-lambda)*v inside the predicate. Closedness is probed as
// limit stability of sequences u + (v-u)/k.
ConvexityReport check_convexity_of_membership(const MembershipPredicate& pred,
                                              std::span<const Point> members,
                                              std::size_t trials,
                                              std::uint64_t seed);

// Projects z onto c and insists the projection is a common fixed point;
// a residual above tol is a loud error carrying both residuals.
Point cap_fixed_point_bridge(const MappingSpec& s, const MappingSpec& t,
                             const Point& z, const ConvexSet& c,
                             const Tol& tol = {});

struct EquivalenceReport {
  std::vector<std::size_t> cap_member_indices;  // sample indices in CAP and C
  std::vector<std::size_t> residual_failures;   // CAP members with Tz != z or Sz != z
  std::vector<std::size_t> cap_failures;        // listed fixed points outside CAP
  bool passed() const {
    return residual_failures.empty() && cap_failures.empty();
  }
};

// Both inclusions of "common attractive points inside C = common fixed
// points", each on samples. Callers should have verified the mappings are
// quasi-nonexpansive against fixed_points first.
EquivalenceReport check_cap_fixedpoint_equivalence(
    const MappingSpec& s, const MappingSpec& t,
    std::span<const Point> c_sample, std::span<const Point> fixed_points,
    const Tol& tol = {});

enum class OrbitVerdict { BoundedAtHorizon, Exceeded };
const char* to_string(OrbitVerdict v);

// Finite-horizon probe of an asymptotic property: both orbits S^n z and
// T^n z are tracked separately and both must stay within the bound.
struct OrbitReport {
  Point start;
  std::size_t horizon = 0;
  double bound = 0.0;
  double max_norm_s = 0.0;
  double max_norm_t = 0.0;
  OrbitVerdict verdict = OrbitVerdict::BoundedAtHorizon;
  std::size_t exceeded_step = 0;   // valid when verdict == Exceeded
  double exceeded_norm = 0.0;
};

OrbitReport orbit_bounded(const MappingSpec& s, const MappingSpec& t,
                          const Point& z, std::size_t horizon, double bound,
                          const Tol& tol = {});

}  // namespace capkit
