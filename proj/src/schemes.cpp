#include "capkit/schemes.hpp"

#include <algorithm>
#include <cmath>

namespace capkit {

const char* to_string(SchemeKind k) {
  switch (k) {
    case SchemeKind::Picard: return "picard";
    case SchemeKind::Mann: return "mann";
    case SchemeKind::Ishikawa: return "ishikawa";
    case SchemeKind::PicardMann: return "picard_mann";
    case SchemeKind::TwoMapPicardMann: return "two_map_picard_mann";
  }
  return "?";
}

std::optional<SchemeKind> scheme_kind_from_string(const std::string& s) {
  if (s == "picard") return SchemeKind::Picard;
  if (s == "mann") return SchemeKind::Mann;
  if (s == "ishikawa") return SchemeKind::Ishikawa;
  if (s == "picard_mann") return SchemeKind::PicardMann;
  if (s == "two_map_picard_mann") return SchemeKind::TwoMapPicardMann;
  return std::nullopt;
}

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::ToleranceMet: return "tolerance-met";
    case StopReason::MaxIters: return "max-iters";
    case StopReason::Diverged: return "diverged";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// StepSequence

namespace {

void require_open_unit(double a, const char* what) {
  if (!(a > 0.0 && a < 1.0)) {
    throw ValidationError(std::string(what) +
                          ": step outside (0,1): " + format_double(a));
  }
}

double product_bound(double lo, double hi) {
  // alpha*(1-alpha) is concave, so the infimum over [lo,hi] sits at an end.
  return std::min(lo * (1.0 - lo), hi * (1.0 - hi));
}

}  // namespace

StepSequence StepSequence::constant(double alpha) {
  require_open_unit(alpha, "constant step sequence");
  return StepSequence(StepKind::Constant, alpha, alpha, 0.0,
                      alpha * (1.0 - alpha));
}

StepSequence StepSequence::periodic(double a, double b) {
  require_open_unit(a, "periodic step sequence");
  require_open_unit(b, "periodic step sequence");
  return StepSequence(StepKind::Periodic, a, b, 0.0, product_bound(std::min(a, b), std::max(a, b)));
}

StepSequence StepSequence::harmonic_floor(double a, double b, double floor) {
  if (floor < 0.0 || floor >= 0.5) {
    throw ValidationError("harmonic step sequence: floor must lie in [0, 0.5)");
  }
  // Values run from b (n = 1) toward the limit a, then clamp.
  double lo = std::min(a, b), hi = std::max(a, b);
  if (floor > 0.0) {
    lo = std::clamp(lo, floor, 1.0 - floor);
    hi = std::clamp(hi, floor, 1.0 - floor);
  }
  if (!(lo > 0.0 && hi < 1.0)) {
    throw ValidationError(
        "harmonic step sequence: liminf alpha_n(1-alpha_n) bound is 0 "
        "(steps drift to 0 or 1 without clipping)");
  }
  return StepSequence(StepKind::HarmonicFloor, a, b, floor,
                      product_bound(lo, hi));
}

double StepSequence::alpha(std::size_t n) const {
  switch (kind_) {
    case StepKind::Constant:
      return a_;
    case StepKind::Periodic:
      return (n % 2 == 1) ? a_ : b_;
    case StepKind::HarmonicFloor: {
      double v = a_ + (b_ - a_) / static_cast<double>(n);
      if (floor_ > 0.0) v = std::clamp(v, floor_, 1.0 - floor_);
      return v;
    }
  }
  return a_;
}

// ---------------------------------------------------------------------------
// run_scheme

ConvergenceTrace run_scheme(SchemeKind kind,
                            const std::optional<MappingSpec>& s,
                            const MappingSpec& t, const Point& x0,
                            const StepSequence& steps,
                            const std::optional<StepSequence>& ishikawa_beta,
                            const StopRule& stop, const Probes& probes,
                            const Tol& tol) {
  if (kind == SchemeKind::TwoMapPicardMann) {
    if (!s) {
      throw ValidationError(
          "run_scheme: the two-mapping scheme needs a second mapping");
    }
    if (!(s->domain() == t.domain())) {
      throw ValidationError("run_scheme: S and T must share the same domain");
    }
  }
  if (kind == SchemeKind::Ishikawa && !ishikawa_beta) {
    throw ValidationError("run_scheme: ishikawa needs a beta step sequence");
  }
  if (stop.max_iters < 1) {
    throw ValidationError("run_scheme: max_iters must be >= 1");
  }
  if (!t.domain().contains(x0, tol)) {
    throw DomainError("run_scheme: x0 = " + to_string(x0) +
                      " lies outside the domain");
  }

  const double div_bound = stop.divergence_bound > 0.0
                               ? stop.divergence_bound
                               : 1e8 * (1.0 + norm(x0));

  ConvergenceTrace trace;
  trace.kind = kind;
  trace.iterates.push_back(x0);

  auto eval_at_step = [&](const MappingSpec& m, const Point& p,
                          std::size_t n) -> Point {
    try {
      return m.eval(p, tol);
    } catch (const DomainError& e) {
      throw DomainError("run_scheme: step " + std::to_string(n) + ": " +
                        e.what());
    }
  };

  for (std::size_t n = 1;; ++n) {
    const Point& x = trace.iterates.back();
    const Point tx = eval_at_step(t, x, n);
    const double rt = dist(tx, x);
    trace.residuals_t.push_back(rt);
    double rs = 0.0;
    if (kind == SchemeKind::TwoMapPicardMann) {
      rs = dist(eval_at_step(*s, x, n), x);
      trace.residuals_s.push_back(rs);
    }
    if (probes.z_ref) trace.dist_to_ref.push_back(dist(x, *probes.z_ref));
    if (probes.cap_set) trace.projections.push_back(probes.cap_set->project(x));

    if (norm(x) > div_bound) {
      trace.stop_reason = StopReason::Diverged;
      break;
    }
    const bool met = rt <= stop.tol &&
                     (kind != SchemeKind::TwoMapPicardMann || rs <= stop.tol);
    if (met) {
      trace.stop_reason = StopReason::ToleranceMet;
      break;
    }
    // max_iters caps the number of scheme updates applied after x_1.
    if (n > stop.max_iters) {
      trace.stop_reason = StopReason::MaxIters;
      break;
    }

    Point next = x;
    switch (kind) {
      case SchemeKind::Picard:
        next = tx;
        break;
      case SchemeKind::Mann: {
        const double a = steps.alpha(n);
        trace.alphas.push_back(a);
        next = mann_combination(x, tx, a);
        break;
      }
      case SchemeKind::Ishikawa: {
        const double b = ishikawa_beta->alpha(n);
        const double a = steps.alpha(n);
        trace.betas.push_back(b);
        trace.alphas.push_back(a);
        const Point y = mann_combination(x, tx, b);
        trace.aux.push_back(y);
        const Point ty = eval_at_step(t, y, n);
        next = mann_combination(x, ty, a);
        break;
      }
      case SchemeKind::PicardMann: {
        const double a = steps.alpha(n);
        trace.alphas.push_back(a);
        const Point y = mann_combination(x, tx, a);
        trace.aux.push_back(y);
        next = eval_at_step(t, y, n);
        break;
      }
      case SchemeKind::TwoMapPicardMann: {
        const double a = steps.alpha(n);
        trace.alphas.push_back(a);
        const Point y = mann_combination(x, tx, a);
        trace.aux.push_back(y);
        next = eval_at_step(*s, y, n);
        break;
      }
    }
    trace.iterates.push_back(std::move(next));
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Diagnostics

MonotoneCheck fejer_check(const ConvergenceTrace& trace, const Point& z,
                          double tol) {
  MonotoneCheck out;
  for (std::size_t n = 0; n + 1 < trace.iterates.size(); ++n) {
    const double before = dist(trace.iterates[n], z);
    const double after = dist(trace.iterates[n + 1], z);
    const double excess = after - before - tol;
    if (excess > 0.0) {
      if (out.ok) out.first_violation = n + 1;
      out.worst_excess = std::max(out.worst_excess, excess);
      out.ok = false;
    }
  }
  return out;
}

MonotoneCheck energy_inequality_check(const ConvergenceTrace& trace,
                                      const Point& z, double tol) {
  if (trace.kind != SchemeKind::Mann && trace.kind != SchemeKind::PicardMann &&
      trace.kind != SchemeKind::TwoMapPicardMann) {
    throw ValidationError(
        "energy inequality check applies to the Mann-type half-step schemes");
  }
  MonotoneCheck out;
  for (std::size_t n = 0; n < trace.alphas.size(); ++n) {
    const double a = trace.alphas[n];
    const double before = norm_sq(sub(trace.iterates[n], z));
    const double after = norm_sq(sub(trace.iterates[n + 1], z));
    const double drop = a * (1.0 - a) * trace.residuals_t[n] * trace.residuals_t[n];
    const double excess = after - (before - drop) - tol;
    if (excess > 0.0) {
      if (out.ok) out.first_violation = n + 1;
      out.worst_excess = std::max(out.worst_excess, excess);
      out.ok = false;
    }
  }
  return out;
}

bool residual_limit_check(const ConvergenceTrace& trace, double tol,
                          std::size_t window) {
  if (window < 1) throw ValidationError("residual_limit_check: window >= 1");
  const std::size_t n = trace.residuals_t.size();
  const std::size_t w = std::min(window, n);
  for (std::size_t i = n - w; i < n; ++i) {
    if (trace.residuals_t[i] > tol) return false;
    if (!trace.residuals_s.empty() && trace.residuals_s[i] > tol) return false;
  }
  return true;
}

ProjectionSequenceCheck projection_sequence_check(const ConvergenceTrace& trace,
                                                  double tol,
                                                  std::size_t window,
                                                  double limit_tol) {
  if (trace.projections.empty()) {
    throw ValidationError(
        "projection_sequence_check: trace has no projection probe");
  }
  ProjectionSequenceCheck out{true, 0.0, trace.projections.back(), 0.0, true};
  const std::size_t deltas = trace.projections.size() - 1;
  const std::size_t w = std::min(window, deltas);
  for (std::size_t i = deltas - w; i < deltas; ++i) {
    out.max_window_delta =
        std::max(out.max_window_delta,
                 dist(trace.projections[i + 1], trace.projections[i]));
  }
  out.cauchy_ok = out.max_window_delta <= tol;
  out.limit_vs_final = dist(out.limit, trace.iterates.back());
  if (trace.stop_reason == StopReason::ToleranceMet) {
    out.limit_ok = out.limit_vs_final <= limit_tol;
  }
  return out;
}

std::optional<std::size_t> iterations_to_tolerance(
    const ConvergenceTrace& trace, double tol) {
  for (std::size_t i = 0; i < trace.residuals_t.size(); ++i) {
    if (trace.residuals_t[i] <= tol &&
        (trace.residuals_s.empty() || trace.residuals_s[i] <= tol)) {
      return i;  // updates applied before iterate i+1 (1-based) hit tol
    }
  }
  return std::nullopt;
}

std::vector<ComparisonRow> compare_schemes(
    std::span<const RaceScenario> scenarios, double tol, const Tol& geom_tol) {
  std::vector<ComparisonRow> rows;
  for (const RaceScenario& sc : scenarios) {
    for (SchemeKind kind : sc.kinds) {
      Probes probes;
      probes.z_ref = sc.z_ref;
      const ConvergenceTrace trace = run_scheme(
          kind, sc.s, sc.t, sc.x0, sc.steps, sc.beta, sc.stop, probes, geom_tol);
      ComparisonRow row;
      row.scenario = sc.name;
      row.kind = kind;
      row.iterations_to_tolerance = iterations_to_tolerance(trace, tol);
      row.final_residual = trace.residuals_t.back();
      if (!trace.residuals_s.empty()) {
        row.final_residual = std::max(row.final_residual, trace.residuals_s.back());
      }
      if (sc.z_ref) row.final_dist = dist(trace.iterates.back(), *sc.z_ref);
      row.stop_reason = trace.stop_reason;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace capkit
