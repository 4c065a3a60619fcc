#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "capkit/convex.hpp"
#include "capkit/mappings.hpp"

namespace capkit {

enum class SchemeKind { Picard, Mann, Ishikawa, PicardMann, TwoMapPicardMann };
const char* to_string(SchemeKind k);
std::optional<SchemeKind> scheme_kind_from_string(const std::string& s);

enum class StepKind { Constant, Periodic, HarmonicFloor };

// Step sizes alpha_n in (0,1) carrying an analytic lower bound on
// alpha_n*(1-alpha_n); parameters that drive the bound to zero are rejected
// at construction.
class StepSequence {
 public:
  static StepSequence constant(double alpha);
  // Alternates a (odd n) and b (even n).
  static StepSequence periodic(double a, double b);
  // a + (b-a)/n, clamped into [floor, 1-floor] when floor > 0.
  static StepSequence harmonic_floor(double a, double b, double floor);

  double alpha(std::size_t n) const;  // n >= 1
  double liminf_bound() const { return liminf_bound_; }

  StepKind kind() const { return kind_; }
  double param_a() const { return a_; }
  double param_b() const { return b_; }
  double param_floor() const { return floor_; }

  bool operator==(const StepSequence&) const = default;

 private:
  StepSequence(StepKind kind, double a, double b, double floor, double bound)
      : kind_(kind), a_(a), b_(b), floor_(floor), liminf_bound_(bound) {}
  StepKind kind_;
  double a_ = 0.5, b_ = 0.5, floor_ = 0.0;
  double liminf_bound_ = 0.25;
};

struct StopRule {
  double tol = 1e-9;  // negative disables the residual stop
  std::size_t max_iters = 10000;
  double divergence_bound = 0.0;  // <= 0 means 1e8 * (1 + |x0|)
};

struct Probes {
  std::optional<Point> z_ref;
  std::optional<ConvexSet> cap_set;
};

enum class StopReason { ToleranceMet, MaxIters, Diverged };
const char* to_string(StopReason r);

// Full iterate history of a scheme run. All per-step series have one entry
// per iterate; transition data (alphas, aux points) have one entry fewer.
struct ConvergenceTrace {
  SchemeKind kind = SchemeKind::Mann;
  std::vector<Point> iterates;      // x_1 .. x_N
  std::vector<Point> aux;           // y_n, for schemes that define it
  std::vector<double> alphas;       // alpha_n used per transition
  std::vector<double> betas;        // ishikawa only
  std::vector<double> residuals_t;  // |T x_n - x_n|
  std::vector<double> residuals_s;  // |S x_n - x_n| (two-mapping scheme only)
  std::vector<double> dist_to_ref;  // when z_ref probe present
  std::vector<Point> projections;   // P x_n when cap_set probe present
  StopReason stop_reason = StopReason::MaxIters;

  bool uses_s() const { return kind == SchemeKind::TwoMapPicardMann; }
  std::size_t length() const { return iterates.size(); }
};

// Runs the selected recurrence from x0 until the residual stop, the
// iteration cap, or divergence. s is required for the two-mapping scheme
// and ignored otherwise; ishikawa_beta is required for Ishikawa.
ConvergenceTrace run_scheme(SchemeKind kind,
                            const std::optional<MappingSpec>& s,
                            const MappingSpec& t, const Point& x0,
                            const StepSequence& steps,
                            const std::optional<StepSequence>& ishikawa_beta,
                            const StopRule& stop, const Probes& probes,
                            const Tol& tol = {});

struct MonotoneCheck {
  bool ok = true;
  std::size_t first_violation = 0;  // 1-based index n of the violating pair
  double worst_excess = 0.0;
};

// dist(x_{n+1}, z) <= dist(x_n, z) + tol for every consecutive pair.
// Only meaningful when z is attractive for the scheme's mappings.
MonotoneCheck fejer_check(const ConvergenceTrace& trace, const Point& z,
                          double tol);

// Per-step energy bound |x_{n+1}-z|^2 <= |x_n-z|^2
//   - alpha_n(1-alpha_n)|Tx_n-x_n|^2 + tol.
// Applies to the Mann-type half-step schemes (mann, picard_mann, two-map).
MonotoneCheck energy_inequality_check(const ConvergenceTrace& trace,
                                      const Point& z, double tol);

// Max residual over the final window (clamped to the trace length).
bool residual_limit_check(const ConvergenceTrace& trace, double tol,
                          std::size_t window);

struct ProjectionSequenceCheck {
  bool cauchy_ok = false;
  double max_window_delta = 0.0;
  Point limit;                 // final projection
  double limit_vs_final = 0.0; // dist(limit, last iterate)
  bool limit_ok = true;        // enforced only when the run converged
  bool ok() const { return cauchy_ok && limit_ok; }
};

// Requires trace.projections; checks the projected sequence is eventually
// still and, on converged runs, that its limit matches the final iterate.
ProjectionSequenceCheck projection_sequence_check(const ConvergenceTrace& trace,
                                                  double tol,
                                                  std::size_t window,
                                                  double limit_tol);

struct RaceScenario {
  std::string name;
  std::optional<MappingSpec> s;
  MappingSpec t;
  Point x0;
  StepSequence steps;
  std::optional<StepSequence> beta;
  StopRule stop;
  std::vector<SchemeKind> kinds;
  std::optional<Point> z_ref;
};

struct ComparisonRow {
  std::string scenario;
  SchemeKind kind = SchemeKind::Mann;
  // Scheme updates applied before all residuals first dropped to tol;
  // absent when the run never got there.
  std::optional<std::size_t> iterations_to_tolerance;
  double final_residual = 0.0;
  std::optional<double> final_dist;  // to z_ref, when supplied
  StopReason stop_reason = StopReason::MaxIters;
};

std::optional<std::size_t> iterations_to_tolerance(
    const ConvergenceTrace& trace, double tol);

std::vector<ComparisonRow> compare_schemes(
    std::span<const RaceScenario> scenarios, double tol, const Tol& geom_tol = {});

}  // namespace capkit
