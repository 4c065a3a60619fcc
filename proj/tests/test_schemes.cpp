#include <doctest.h>

#include <cmath>
#include <numbers>

#include "capkit/schemes.hpp"
#include "oracles.hpp"

using namespace capkit;

namespace {

DomainSpec seg(double lo, double hi) {
  return DomainSpec::box(Point({lo}), Point({hi}));
}

const StopRule kDefaultStop{1e-12, 10000, 0.0};
const StopRule kForced500{-1.0, 500, 1e300};

ConvergenceTrace run1(SchemeKind kind, const MappingSpec& t, double x0,
                      const StopRule& stop, const Probes& probes = {}) {
  return run_scheme(kind, std::nullopt, t, Point({x0}),
                    StepSequence::constant(0.5), std::nullopt, stop, probes);
}

}  // namespace

TEST_CASE("step sequences certify their liminf bound") {
  CHECK(StepSequence::constant(0.5).liminf_bound() == 0.25);
  CHECK(StepSequence::constant(0.9).liminf_bound() ==
        doctest::Approx(0.09).epsilon(1e-12));
  CHECK_THROWS_WITH_AS(StepSequence::constant(1.0),
                       doctest::Contains("(0,1)"), ValidationError);
  CHECK_THROWS_AS(StepSequence::constant(0.0), ValidationError);

  const StepSequence per = StepSequence::periodic(0.4, 0.6);
  CHECK(per.alpha(1) == 0.4);
  CHECK(per.alpha(2) == 0.6);
  CHECK(per.alpha(3) == 0.4);
  CHECK(per.liminf_bound() == doctest::Approx(0.24).epsilon(1e-12));

  const StepSequence harm = StepSequence::harmonic_floor(0.2, 0.8, 0.05);
  CHECK(harm.alpha(1) == 0.8);
  CHECK(harm.alpha(1000) == doctest::Approx(0.2006).epsilon(1e-6));
  CHECK(harm.liminf_bound() == doctest::Approx(0.16).epsilon(1e-12));

  // Drifting to zero without clipping has liminf bound 0 and is rejected.
  CHECK_THROWS_WITH_AS(StepSequence::harmonic_floor(0.0, 0.5, 0.0),
                       doctest::Contains("liminf"), ValidationError);
}

TEST_CASE("picard-mann on the halving map follows the closed form") {
  const MappingSpec halve(ScaleFamily{0.5}, seg(-1, 1), true);
  StopRule stop{-1.0, 10, 0.0};
  const auto trace = run1(SchemeKind::PicardMann, halve, 1.0, stop);
  REQUIRE(trace.length() == 11);
  CHECK(trace.stop_reason == StopReason::MaxIters);
  CHECK(trace.iterates.back()[0] ==
        doctest::Approx(std::pow(0.375, 10)).epsilon(1e-12));
  REQUIRE(trace.aux.size() == 10);
  CHECK(trace.aux[0][0] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(trace.residuals_t[0] == 0.5);
}

TEST_CASE("mann on the flip map lands exactly on zero") {
  const MappingSpec flip(ScaleFamily{-1.0}, seg(-1, 1), true);
  const auto trace = run1(SchemeKind::Mann, flip, 1.0, kDefaultStop);
  REQUIRE(trace.length() == 2);
  CHECK(trace.iterates[1] == Point({0.0}));
  CHECK(trace.stop_reason == StopReason::ToleranceMet);

  StopRule forced{-1.0, 5, 0.0};
  const auto longer = run1(SchemeKind::Mann, flip, 1.0, forced);
  REQUIRE(longer.length() == 6);
  for (std::size_t i = 1; i < longer.length(); ++i) {
    CHECK(longer.iterates[i] == Point({0.0}));
  }
}

TEST_CASE("ishikawa recurrence, two hand-computed steps") {
  const MappingSpec halve(ScaleFamily{0.5}, seg(-1, 1), true);
  StopRule stop{-1.0, 2, 0.0};
  const auto trace =
      run_scheme(SchemeKind::Ishikawa, std::nullopt, halve, Point({1.0}),
                 StepSequence::constant(0.5), StepSequence::constant(0.5),
                 stop, {});
  // y = 0.75 x, x+ = 0.5 x + 0.5 * 0.5 * y = 0.6875 x.
  REQUIRE(trace.length() == 3);
  CHECK(trace.iterates[1][0] == doctest::Approx(0.6875).epsilon(1e-15));
  CHECK(trace.iterates[2][0] ==
        doctest::Approx(0.6875 * 0.6875).epsilon(1e-15));
  CHECK(trace.aux[0][0] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK_THROWS_AS(run_scheme(SchemeKind::Ishikawa, std::nullopt, halve,
                             Point({1.0}), StepSequence::constant(0.5),
                             std::nullopt, stop, {}),
                  ValidationError);
}

TEST_CASE("two-map reductions are bit-identical") {
  for (double c : {0.5, -0.25}) {
    const MappingSpec t(ScaleFamily{c}, seg(-1, 1), true);
    const MappingSpec id = MappingSpec::identity(seg(-1, 1));
    const auto mann = run1(SchemeKind::Mann, t, 0.9, kForced500);
    const auto as_two = run_scheme(SchemeKind::TwoMapPicardMann, id, t,
                                   Point({0.9}), StepSequence::constant(0.5),
                                   std::nullopt, kForced500, {});
    CHECK(mann.iterates == as_two.iterates);
    CHECK(mann.residuals_t == as_two.residuals_t);

    const auto pm = run1(SchemeKind::PicardMann, t, 0.9, kForced500);
    const auto as_two_same = run_scheme(SchemeKind::TwoMapPicardMann, t, t,
                                        Point({0.9}), StepSequence::constant(0.5),
                                        std::nullopt, kForced500, {});
    CHECK(pm.iterates == as_two_same.iterates);
  }
  const MappingSpec halve(ScaleFamily{0.5}, seg(-1, 1), true);
  CHECK_THROWS_AS(run_scheme(SchemeKind::TwoMapPicardMann, std::nullopt, halve,
                             Point({1.0}), StepSequence::constant(0.5),
                             std::nullopt, kDefaultStop, {}),
                  ValidationError);
}

TEST_CASE("domain exits and divergence") {
  const MappingSpec bad(ScaleFamily{2.0}, seg(-1, 1), false);
  CHECK_THROWS_WITH_AS(run1(SchemeKind::Mann, bad, 1.0, kDefaultStop),
                       doctest::Contains("step 2"), DomainError);

  const DomainSpec ray = DomainSpec::halfline(0.0, true, 2.0);
  const MappingSpec doubling(ScaleFamily{2.0}, ray, true);
  StopRule div{1e-12, 10000, 100.0};
  const auto trace = run1(SchemeKind::Mann, doubling, 1.0, div);
  CHECK(trace.stop_reason == StopReason::Diverged);
  CHECK(norm(trace.iterates.back()) > 100.0);
  for (std::size_t i = 0; i + 1 < trace.length(); ++i) {
    CHECK(norm(trace.iterates[i]) <= 100.0);
  }
}

TEST_CASE("fejer monotonicity check") {
  const MappingSpec halve(ScaleFamily{0.5}, seg(-1, 1), true);
  const auto good = run1(SchemeKind::PicardMann, halve, 1.0, kDefaultStop);
  CHECK(fejer_check(good, Point({0.0}), 1e-12).ok);

  const MappingSpec flip(ScaleFamily{-1.0}, seg(-1, 1), true);
  CHECK(fejer_check(run1(SchemeKind::Mann, flip, 1.0, kDefaultStop),
                    Point({0.0}), 1e-12)
            .ok);

  const DomainSpec ray = DomainSpec::halfline(0.0, true, 2.0);
  const MappingSpec doubling(ScaleFamily{2.0}, ray, true);
  StopRule div{1e-12, 100, 1000.0};
  const auto control = run1(SchemeKind::Mann, doubling, 1.0, div);
  const auto fejer = fejer_check(control, Point({0.0}), 1e-12);
  CHECK_FALSE(fejer.ok);
  CHECK(fejer.first_violation == 1);
}

TEST_CASE("per-step energy inequality") {
  const MappingSpec halve(ScaleFamily{0.5}, seg(-1, 1), true);
  const auto good = run1(SchemeKind::PicardMann, halve, 1.0, kDefaultStop);
  CHECK(energy_inequality_check(good, Point({0.0}), 1e-9).ok);

  const DomainSpec ray = DomainSpec::halfline(0.0, true, 2.0);
  const MappingSpec doubling(ScaleFamily{2.0}, ray, true);
  StopRule div{1e-12, 100, 1000.0};
  const auto control = run1(SchemeKind::Mann, doubling, 1.0, div);
  CHECK_FALSE(energy_inequality_check(control, Point({0.0}), 1e-9).ok);

  const auto picard = run1(SchemeKind::Picard, halve, 1.0, kDefaultStop);
  CHECK_THROWS_AS(energy_inequality_check(picard, Point({0.0}), 1e-9),
                  ValidationError);
}

TEST_CASE("residual limit over the final window") {
  const MappingSpec halve(ScaleFamily{0.5}, seg(-1, 1), true);
  StopRule sixty{-1.0, 60, 0.0};
  CHECK(residual_limit_check(run1(SchemeKind::PicardMann, halve, 1.0, sixty),
                             1e-8, 10));

  const auto id_trace = run1(SchemeKind::Mann, MappingSpec::identity(seg(-1, 1)),
                             0.7, kDefaultStop);
  REQUIRE(id_trace.length() == 1);  // residual is zero from the first iterate
  CHECK(residual_limit_check(id_trace, 1e-8, 10));

  StopRule three{-1.0, 3, 0.0};
  CHECK_FALSE(residual_limit_check(run1(SchemeKind::PicardMann, halve, 1.0, three),
                                   1e-8, 10));
}

TEST_CASE("projection sequence check") {
  const MappingSpec halve(ScaleFamily{0.5}, seg(-1, 1), true);
  Probes probes;
  probes.cap_set = ConvexSet::ball(Point({0.0}), 0.0);
  const auto trace = run1(SchemeKind::PicardMann, halve, 1.0, kDefaultStop, probes);
  const auto res = projection_sequence_check(trace, 1e-8, 10, 1e-6);
  CHECK(res.ok());
  CHECK(res.limit == Point({0.0}));
  CHECK(res.max_window_delta == 0.0);

  // Picard on a rotation orbits the circle forever, yet every iterate
  // projects to the center, so the projected sequence still settles.
  const DomainSpec disk = DomainSpec::ball(Point({0, 0}), 1.0);
  const MappingSpec rot(Rotation2dFamily{1.0}, disk, true);
  Probes probes2;
  probes2.cap_set = ConvexSet::ball(Point({0.0, 0.0}), 0.0);
  StopRule fifty{1e-12, 50, 0.0};
  const auto orbit = run_scheme(SchemeKind::Picard, std::nullopt, rot,
                                Point({1.0, 0.0}), StepSequence::constant(0.5),
                                std::nullopt, fifty, probes2);
  CHECK(orbit.stop_reason == StopReason::MaxIters);
  CHECK(norm(orbit.iterates.back()) == doctest::Approx(1.0).epsilon(1e-9));
  const auto settle = projection_sequence_check(orbit, 1e-8, 10, 1e-6);
  CHECK(settle.cauchy_ok);
  CHECK(settle.limit == Point({0.0, 0.0}));
  CHECK(settle.limit_ok);  // not enforced: the run did not converge

  const auto bare = run1(SchemeKind::PicardMann, halve, 1.0, kDefaultStop);
  CHECK_THROWS_AS(projection_sequence_check(bare, 1e-8, 10, 1e-6),
                  ValidationError);
}

TEST_CASE("iterate norms stay inside the fejer ball") {
  const MappingSpec halve(ScaleFamily{0.5}, seg(-1, 1), true);
  for (SchemeKind kind : {SchemeKind::Picard, SchemeKind::Mann,
                          SchemeKind::PicardMann}) {
    const auto trace = run1(kind, halve, 0.9, kDefaultStop);
    const double cap = dist(trace.iterates.front(), Point({0.0})) + 0.0 + 1e-9;
    for (const Point& x : trace.iterates) CHECK(norm(x) <= cap);
  }

  // Same bound against a nonzero attractive point (2-D affine contraction).
  const MappingSpec affine(
      AffineFamily{{0.5, 0.25, 0.0, 0.5}, Point({0.1, 0.05})},
      DomainSpec::box(Point({-1, -1}), Point({1, 1})), true);
  const Point z({0.25, 0.1});
  const auto trace =
      run_scheme(SchemeKind::PicardMann, std::nullopt, affine,
                 Point({0.9, -0.6}), StepSequence::constant(0.5), std::nullopt,
                 kDefaultStop, {});
  const double cap = dist(trace.iterates.front(), z) + norm(z) + 1e-9;
  for (const Point& x : trace.iterates) CHECK(norm(x) <= cap);
}

TEST_CASE("projection probe through an intersection runs dykstra per step") {
  const DomainSpec unit = DomainSpec::box(Point({0.0}), Point({1.0}));
  const MappingSpec s(ConstantFamily{Point({0.0})}, unit, true);
  const MappingSpec t(ScaleFamily{0.5}, unit, true);
  Probes probes;
  probes.z_ref = Point({0.0});
  probes.cap_set = ConvexSet::intersection(
      {ConvexSet::halfspace(Point({1.0}), 0.0),
       ConvexSet::ball(Point({0.0}), 0.5)});
  const auto trace =
      run_scheme(SchemeKind::TwoMapPicardMann, s, t, Point({1.0}),
                 StepSequence::constant(0.5), std::nullopt, kDefaultStop,
                 probes);
  REQUIRE_FALSE(trace.projections.empty());
  // Nonnegative iterates all project onto the clamp at 0.
  for (const Point& p : trace.projections) CHECK(dist(p, Point({0.0})) < 1e-8);
  const auto res = projection_sequence_check(trace, 1e-8, 10, 1e-6);
  CHECK(res.ok());
  CHECK(dist(res.limit, Point({0.0})) < 1e-8);
}

TEST_CASE("scheme race on contractions matches the closed-form prediction") {
  std::vector<RaceScenario> races;
  for (double c : {0.3, 0.5, 0.8}) {
    races.push_back(RaceScenario{
        "scale-" + format_double(c), std::nullopt,
        MappingSpec(ScaleFamily{c}, seg(-1, 1), true), Point({1.0}),
        StepSequence::constant(0.5), std::nullopt, StopRule{1e-8, 10000, 0.0},
        {SchemeKind::PicardMann, SchemeKind::Mann}, Point({0.0})});
  }
  const auto rows = compare_schemes(races, 1e-8);
  REQUIRE(rows.size() == 6);
  for (std::size_t i = 0; i < races.size(); ++i) {
    const double c = std::vector<double>{0.3, 0.5, 0.8}[i];
    const auto& pm = rows[2 * i];
    const auto& mann = rows[2 * i + 1];
    REQUIRE(pm.iterations_to_tolerance.has_value());
    REQUIRE(mann.iterations_to_tolerance.has_value());
    CHECK(*pm.iterations_to_tolerance < *mann.iterations_to_tolerance);
    const auto predicted_pm =
        oracles::scale_steps_to_tolerance(c, 0.5, 1.0, 1e-8, true);
    const auto predicted_mann =
        oracles::scale_steps_to_tolerance(c, 0.5, 1.0, 1e-8, false);
    CHECK(std::llabs(static_cast<long long>(*pm.iterations_to_tolerance) -
                     static_cast<long long>(predicted_pm)) <= 1);
    CHECK(std::llabs(static_cast<long long>(*mann.iterations_to_tolerance) -
                     static_cast<long long>(predicted_mann)) <= 1);
  }

  // Identity: everything is converged at the first iterate.
  RaceScenario idle{"identity", std::nullopt,
                    MappingSpec::identity(seg(-1, 1)), Point({0.4}),
                    StepSequence::constant(0.5), StepSequence::constant(0.5),
                    StopRule{1e-8, 100, 0.0},
                    {SchemeKind::Picard, SchemeKind::Mann, SchemeKind::Ishikawa,
                     SchemeKind::PicardMann},
                    Point({0.4})};
  for (const auto& row : compare_schemes(std::vector<RaceScenario>{idle}, 1e-8)) {
    REQUIRE(row.iterations_to_tolerance.has_value());
    CHECK(*row.iterations_to_tolerance == 0);
  }

  // Racing the two-map scheme with S = T reproduces the picard-mann row.
  const MappingSpec halve(ScaleFamily{0.5}, seg(-1, 1), true);
  RaceScenario twin{"twin", halve, halve, Point({1.0}),
                    StepSequence::constant(0.5), std::nullopt,
                    StopRule{1e-8, 10000, 0.0},
                    {SchemeKind::PicardMann, SchemeKind::TwoMapPicardMann},
                    Point({0.0})};
  const auto twin_rows = compare_schemes(std::vector<RaceScenario>{twin}, 1e-8);
  REQUIRE(twin_rows.size() == 2);
  CHECK(twin_rows[0].iterations_to_tolerance == twin_rows[1].iterations_to_tolerance);
  CHECK(twin_rows[0].final_residual == twin_rows[1].final_residual);
}
