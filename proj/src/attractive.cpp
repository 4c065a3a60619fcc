#include "capkit/attractive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "capkit/rng.hpp"

namespace capkit {

namespace {

// Core scan shared by the single- and two-mapping membership tests.
// violation(x) = worst distance excess at sample point x.
template <class ViolationFn>
AttractiveCheck scan_sample(std::span<const Point> sample, const Point& z,
                            const Tol& tol, ViolationFn&& violation) {
  if (sample.empty()) {
    throw ValidationError("attractive-point check: empty domain sample");
  }
  AttractiveCheck out{true, sample.front(), -std::numeric_limits<double>::infinity()};
  bool ok = true;
  for (const Point& x : sample) {
    const double v = violation(x);
    if (v > out.worst_violation) {
      out.worst_violation = v;
      out.worst_witness = x;
    }
    if (v > tol.at(1.0 + norm(x) + norm(z))) ok = false;
  }
  out.attractive = ok;
  return out;
}

}  // namespace

AttractiveCheck is_attractive_point(const MappingSpec& m, const Point& z,
                                    std::span<const Point> domain_sample,
                                    const Tol& tol) {
  if (z.dim() != m.domain().dim()) {
    throw DimensionError("is_attractive_point: z dimension mismatch");
  }
  return scan_sample(domain_sample, z, tol, [&](const Point& x) {
    return dist(m.eval(x, tol), z) - dist(x, z);
  });
}

AttractiveCheck is_common_attractive(const MappingSpec& s,
                                     const MappingSpec& t, const Point& z,
                                     std::span<const Point> domain_sample,
                                     const Tol& tol) {
  if (!(s.domain() == t.domain())) {
    throw ValidationError(
        "is_common_attractive: mappings must share the same domain");
  }
  if (z.dim() != t.domain().dim()) {
    throw DimensionError("is_common_attractive: z dimension mismatch");
  }
  return scan_sample(domain_sample, z, tol, [&](const Point& x) {
    const double base = dist(x, z);
    return std::max(dist(s.eval(x, tol), z), dist(t.eval(x, tol), z)) - base;
  });
}

CapEstimate estimate_cap_region(const MappingSpec& s, const MappingSpec& t,
                                std::span<const Point> domain_sample,
                                std::span<const Point> candidates,
                                const Tol& tol) {
  if (candidates.empty()) {
    throw ValidationError("estimate_cap_region: empty candidate grid");
  }
  CapEstimate est;
  est.candidates_tested = candidates.size();
  est.domain_sample_size = domain_sample.size();
  est.atol_used = tol.atol;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (is_common_attractive(s, t, candidates[i], domain_sample, tol)
            .attractive) {
      est.members.push_back(candidates[i]);
      est.member_indices.push_back(i);
    }
  }
  return est;
}

ConvexityReport check_convexity_of_membership(const MembershipPredicate& pred,
                                              std::span<const Point> members,
                                              std::size_t trials,
                                              std::uint64_t seed) {
  if (members.empty()) {
    throw ValidationError("convexity check: empty member list");
  }
  for (const Point& m : members) {
    if (!pred(m)) {
      throw ValidationError("convexity check: listed member " + to_string(m) +
                            " fails the predicate");
    }
  }
  ConvexityReport report;
  report.trials = trials;
  report.seed = seed;
  Rng rng(seed);
  for (std::size_t k = 0; k < trials; ++k) {
    const Point& u = members[rng.index(members.size())];
    const Point& v = members[rng.index(members.size())];
    const double lambda = rng.open_unit();
    const Point mid = add(scaled(lambda, u), scaled(1.0 - lambda, v));
    if (!pred(mid)) {
      ++report.segment_failures;
      if (!report.first_failure) report.first_failure = mid;
    }
  }
  // Limit stability: walk u + (v-u)/k toward u and test the limit itself.
  const std::size_t limit_probes = std::min<std::size_t>(members.size() * 4, 64);
  for (std::size_t k = 0; k < limit_probes; ++k) {
    const Point& u = members[rng.index(members.size())];
    const Point& v = members[rng.index(members.size())];
    bool fail = false;
    for (double denom : {2.0, 8.0, 64.0, 1024.0}) {
      const Point p = add(u, scaled(1.0 / denom, sub(v, u)));
      if (!pred(p)) fail = true;
    }
    if (!pred(u)) fail = true;
    if (fail) {
      ++report.limit_failures;
      if (!report.first_failure) report.first_failure = u;
    }
  }
  return report;
}

Point cap_fixed_point_bridge(const MappingSpec& s, const MappingSpec& t,
                             const Point& z, const ConvexSet& c,
                             const Tol& tol) {
  const Point u = c.project(z);
  const double rs = dist(s.eval(u, tol), u);
  const double rt = dist(t.eval(u, tol), u);
  const double allowance = tol.at(1.0 + norm(u));
  if (rs > allowance || rt > allowance) {
    throw ValidationError(
        "fixed-point bridge: projection " + to_string(u) + " of " +
        to_string(z) + " is not a common fixed point (S residual " +
        format_double(rs) + ", T residual " + format_double(rt) + ")");
  }
  return u;
}

EquivalenceReport check_cap_fixedpoint_equivalence(
    const MappingSpec& s, const MappingSpec& t,
    std::span<const Point> c_sample, std::span<const Point> fixed_points,
    const Tol& tol) {
  if (c_sample.empty()) {
    throw ValidationError("equivalence check: empty domain sample");
  }
  EquivalenceReport report;
  for (std::size_t i = 0; i < c_sample.size(); ++i) {
    const Point& z = c_sample[i];
    if (!is_common_attractive(s, t, z, c_sample, tol).attractive) continue;
    report.cap_member_indices.push_back(i);
    const double rs = dist(s.eval(z, tol), z);
    const double rt = dist(t.eval(z, tol), z);
    if (std::max(rs, rt) > tol.at(1.0 + norm(z))) {
      report.residual_failures.push_back(i);
    }
  }
  for (std::size_t i = 0; i < fixed_points.size(); ++i) {
    if (!is_common_attractive(s, t, fixed_points[i], c_sample, tol)
             .attractive) {
      report.cap_failures.push_back(i);
    }
  }
  return report;
}

const char* to_string(OrbitVerdict v) {
  return v == OrbitVerdict::BoundedAtHorizon ? "bounded-at-horizon"
                                             : "exceeded";
}

OrbitReport orbit_bounded(const MappingSpec& s, const MappingSpec& t,
                          const Point& z, std::size_t horizon, double bound,
                          const Tol& tol) {
  if (horizon < 1) throw ValidationError("orbit check: horizon must be >= 1");
  if (!(bound > 0.0)) throw ValidationError("orbit check: bound must be > 0");
  OrbitReport report{z, horizon, bound};
  report.max_norm_s = report.max_norm_t = norm(z);
  if (report.max_norm_s > bound) {
    report.verdict = OrbitVerdict::Exceeded;
    report.exceeded_step = 0;
    report.exceeded_norm = report.max_norm_s;
    return report;
  }
  Point ps = z, pt = z;
  for (std::size_t n = 1; n <= horizon; ++n) {
    try {
      ps = s.eval(ps, tol);
      pt = t.eval(pt, tol);
    } catch (const DomainError& e) {
      throw DomainError("orbit check: iterate left the domain at step " +
                        std::to_string(n) + ": " + e.what());
    }
    const double ns = norm(ps), nt = norm(pt);
    report.max_norm_s = std::max(report.max_norm_s, ns);
    report.max_norm_t = std::max(report.max_norm_t, nt);
    if (std::max(ns, nt) > bound) {
      report.verdict = OrbitVerdict::Exceeded;
      report.exceeded_step = n;
      report.exceeded_norm = std::max(ns, nt);
      return report;
    }
  }
  report.verdict = OrbitVerdict::BoundedAtHorizon;
  return report;
}

}  // namespace capkit
