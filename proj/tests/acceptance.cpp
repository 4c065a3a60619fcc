// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. Expected values come from closed forms or from the
// independent oracles in oracles.hpp, never from the code paths under test.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "capkit/emit.hpp"
#include "capkit/rng.hpp"
#include "capkit/scenario.hpp"
#include "oracles.hpp"

using namespace capkit;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void criterion(int num, const std::string& name, bool pass,
               const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", num,
              name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(double v) { return format_double(v); }

bool scenario_converges(const Scenario& sc) {
  bool has_stop = false;
  for (const auto& [key, value] : sc.expected) {
    if (key.size() > 5 && key.substr(key.size() - 5) == "/stop") {
      has_stop = true;
      if (value != "tolerance-met") return false;
    }
  }
  return has_stop;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct ForcedRun {
  std::string scenario;
  SchemeRequest request;
  ConvergenceTrace trace;
  Point z_ref;
};

}  // namespace

int main() {
  const fs::path scenario_dir = CAPKIT_SCENARIO_DIR;
  const auto files = scenario_files_in(scenario_dir);
  std::vector<Scenario> scenarios;
  std::vector<RunBundle> bundles;
  for (const auto& f : files) {
    scenarios.push_back(load_scenario(f));
    bundles.push_back(run_scenario(scenarios.back()));
  }

  // -------------------------------------------------------------- 1
  {
    Rng rng(424242);
    double worst = 0.0;
    std::size_t tuples = 0;
    for (std::size_t dim = 1; dim <= 5; ++dim) {
      for (int trial = 0; trial < 2000; ++trial) {
        std::vector<std::vector<double>> t(4, std::vector<double>(dim));
        for (auto& v : t) {
          for (double& c : v) c = rng.uniform(-10.0, 10.0);
        }
        const double gap = polarization_gap(Point(t[0]), Point(t[1]),
                                            Point(t[2]), Point(t[3]));
        worst = std::max(worst, std::abs(gap));
        ++tuples;
      }
    }
    criterion(1, "polarization identity on seeded random tuples",
              tuples == 10000 && worst < 1e-9,
              std::to_string(tuples) + " tuples in R^1..R^5, max |gap| = " +
                  fmt(worst));
  }

  // -------------------------------------------------------------- 2
  {
    double worst = 0.0;
    std::size_t pairs_checked = 0;
    for (const Scenario& sc : scenarios) {
      if (!sc.hybrid) continue;
      const auto sample = sc.domain.sample(sc.sampler, sc.seed);
      HybridParams base = sc.hybrid->params;
      if (!base.varsigma) base.varsigma = 0.0;
      if (!base.eta) base.eta = 0.0;
      HybridParams eps0 = base;
      eps0.epsilon = 0.0;
      HybridParams no_tail = base;
      no_tail.varsigma = 0.0;
      no_tail.eta = 0.0;
      for (const MappingSpec* m : {&sc.s, &sc.t}) {
        for (const Point& x : sample) {
          const Point tx = m->eval(x);
          for (const Point& y : sample) {
            const Point ty = m->eval(y);
            worst = std::max(
                worst, std::abs(further_hybrid_lhs(eps0, x, tx, y, ty) -
                                normally_hybrid_lhs(base, x, tx, y, ty)));
            worst = std::max(
                worst, std::abs(widely_hybrid_lhs(no_tail, x, tx, y, ty) -
                                further_hybrid_lhs(base, x, tx, y, ty)));
            ++pairs_checked;
          }
        }
      }
    }
    criterion(2, "class-reduction chain is value-for-value",
              pairs_checked > 0 && worst < 1e-12,
              std::to_string(pairs_checked) +
                  " mapping-pairs, max |difference| = " + fmt(worst));
  }

  // -------------------------------------------------------------- 3
  {
    struct Row {
      HybridParams p;
      bool expect_ok;
      const char* reason_part;
    };
    const std::vector<Row> table = {
        {{1, 0, 0, -0.25, 0, {}, {}}, true, ""},
        {{1, 0, 0, -1, 0, {}, {}}, true, ""},
        {{1, 0, 0, -1, -0.5, {}, {}}, false, "epsilon"},
        {{0, 0, 0, 0, 0, {}, {}}, false, "neither"},
        {{0, 1, 0, -1, 0, {}, {}}, true, ""},
        {{0, 0, 1, -1, 0, {}, {}}, true, ""},
        {{1, -1, 0, -0.5, 0, {}, {}}, false, "alpha+beta+gamma+delta"},
        {{1, -1, -1, 1, 0, {}, {}}, false, "neither"},
    };
    std::size_t matched = 0;
    for (const Row& row : table) {
      const ConditionCheck got = check_theorem_conditions(row.p);
      const bool reason_ok =
          row.expect_ok || got.reason.find(row.reason_part) != std::string::npos;
      if (got.ok == row.expect_ok && reason_ok) ++matched;
    }
    criterion(3, "theorem-conditions gate truth table",
              matched == table.size(),
              std::to_string(matched) + "/8 boundary vectors matched");
  }

  // Shared forced-length runs for criteria 4, 5, 6.
  std::vector<ForcedRun> forced;
  bool all_certified = true;
  std::string certify_note;
  for (const Scenario& sc : scenarios) {
    if (!scenario_converges(sc) || !sc.probes.z_ref) continue;
    const auto sample = sc.domain.sample(sc.sampler, sc.seed);
    if (!is_common_attractive(sc.s, sc.t, *sc.probes.z_ref, sample, sc.tol)
             .attractive) {
      all_certified = false;
      certify_note = sc.name + ": z_ref failed certification";
      continue;
    }
    for (const SchemeRequest& req : sc.schemes) {
      StopRule stop{-1.0, 10000, 1e300};
      std::optional<MappingSpec> s_arg;
      if (req.kind == SchemeKind::TwoMapPicardMann) s_arg = sc.s;
      ForcedRun run{sc.name, req,
                    run_scheme(req.kind, s_arg, sc.t, *sc.x0, req.steps,
                               req.beta_steps, stop, {}),
                    *sc.probes.z_ref};
      forced.push_back(std::move(run));
    }
  }

  // -------------------------------------------------------------- 4
  {
    std::size_t checked = 0;
    std::size_t violations = 0;
    bool long_enough = !forced.empty();
    for (const ForcedRun& run : forced) {
      if (run.trace.length() < 200) long_enough = false;
      const auto fejer = fejer_check(run.trace, run.z_ref, 1e-12);
      if (!fejer.ok) ++violations;
      ++checked;
    }
    criterion(4, "fejer monotonicity at 1e-12 over >= 200 steps",
              all_certified && long_enough && checked > 0 && violations == 0,
              std::to_string(checked) + " certified runs, " +
                  std::to_string(violations) + " violations" +
                  (certify_note.empty() ? "" : "; " + certify_note));
  }

  // -------------------------------------------------------------- 5
  {
    std::size_t checked = 0;
    std::size_t violations = 0;
    for (const ForcedRun& run : forced) {
      if (run.request.kind != SchemeKind::Mann &&
          run.request.kind != SchemeKind::PicardMann &&
          run.request.kind != SchemeKind::TwoMapPicardMann) {
        continue;
      }
      const auto energy = energy_inequality_check(run.trace, run.z_ref, 1e-9);
      if (!energy.ok) ++violations;
      ++checked;
    }
    criterion(5, "one-step energy inequality at 1e-9",
              checked > 0 && violations == 0,
              std::to_string(checked) + " Mann-type runs, " +
                  std::to_string(violations) + " violations");
  }

  // -------------------------------------------------------------- 6
  {
    std::size_t checked = 0;
    std::size_t misses = 0;
    for (const ForcedRun& run : forced) {
      if (run.trace.length() > 10001) ++misses;  // ran past 10^4 iterations
      if (!residual_limit_check(run.trace, 1e-8, 10)) ++misses;
      ++checked;
    }
    criterion(6, "residual limit: final-window max < 1e-8 within 10^4 iters",
              checked > 0 && misses == 0,
              std::to_string(checked) + " runs, window 10");
  }

  // -------------------------------------------------------------- 7
  {
    std::size_t checked = 0;
    std::size_t misses = 0;
    double worst_delta = 0.0, worst_limit = 0.0;
    for (std::size_t i = 0; i < bundles.size(); ++i) {
      if (!scenario_converges(scenarios[i]) || !scenarios[i].probes.cap_set) {
        continue;
      }
      for (const SchemeRun& run : bundles[i].runs) {
        if (!run.proj_seq) continue;
        ++checked;
        worst_delta = std::max(worst_delta, run.proj_seq->max_window_delta);
        worst_limit = std::max(worst_limit, run.proj_seq->limit_vs_final);
        if (run.proj_seq->max_window_delta >= 1e-8 ||
            run.proj_seq->limit_vs_final >= 1e-6) {
          ++misses;
        }
      }
    }
    criterion(7, "projection sequence settles and matches the limit",
              checked > 0 && misses == 0,
              std::to_string(checked) + " runs, max window delta = " +
                  fmt(worst_delta) + ", max |limit - final| = " +
                  fmt(worst_limit));
  }

  // -------------------------------------------------------------- 8
  {
    std::size_t checked = 0;
    std::size_t misses = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < bundles.size(); ++i) {
      for (const BridgeResult& br : bundles[i].bridges) {
        ++checked;
        if (!br.ok || !br.fixed_point) {
          ++misses;
          continue;
        }
        const double rs = dist(scenarios[i].s.eval(*br.fixed_point),
                               *br.fixed_point);
        const double rt = dist(scenarios[i].t.eval(*br.fixed_point),
                               *br.fixed_point);
        worst = std::max({worst, rs, rt});
        if (rs >= 1e-9 || rt >= 1e-9) ++misses;
      }
    }
    criterion(8, "projection bridge lands on common fixed points",
              checked > 0 && misses == 0,
              std::to_string(checked) + " bridge points, max residual = " +
                  fmt(worst));
  }

  // -------------------------------------------------------------- 9
  {
    // Constant-zero pair on [0,1]; the scenario's domain sample is the
    // endpoint grid {0,1}, for which the region reduces to |z| <= |1-z|,
    // the halfline with boundary 1/2.
    const DomainSpec unit = DomainSpec::box(Point({0.0}), Point({1.0}));
    const MappingSpec to_zero(ConstantFamily{Point({0.0})}, unit, true);
    const auto sample = unit.sample(GridSampler{2}, 9);
    const auto candidates =
        DomainSpec::box(Point({-1.0}), Point({1.0})).sample(GridSampler{201}, 9);
    const auto est =
        estimate_cap_region(to_zero, to_zero, sample, candidates, Tol{});

    // Independent oracle: direct double loop over candidates and samples.
    std::vector<double> oracle_members;
    for (const Point& z : candidates) {
      bool member = true;
      for (const Point& x : sample) {
        const double allowance = 1e-9 * (1.0 + std::abs(x[0]) + std::abs(z[0]));
        if (std::abs(z[0]) > std::abs(x[0] - z[0]) + allowance) member = false;
      }
      if (member) oracle_members.push_back(z[0]);
    }
    bool equal = est.members.size() == oracle_members.size();
    if (equal) {
      for (std::size_t i = 0; i < oracle_members.size(); ++i) {
        if (est.members[i][0] != oracle_members[i]) equal = false;
      }
    }
    const double cell = 2.0 / 200.0;
    const double boundary = est.members.empty() ? -2.0 : est.members.back()[0];
    const bool boundary_ok = std::abs(boundary - 0.5) <= cell + 1e-12;
    criterion(9, "cap region estimate matches the halfline oracle",
              equal && boundary_ok,
              std::to_string(est.members.size()) +
                  " members over a 201-point grid, boundary = " +
                  fmt(boundary) + ", domain sample {0,1}");
  }

  // -------------------------------------------------------------- 10
  {
    std::size_t checked = 0;
    std::size_t failures = 0;
    for (const RunBundle& bundle : bundles) {
      if (!bundle.cap_convexity) continue;
      ++checked;
      if (bundle.cap_convexity->trials != 1000 ||
          !bundle.cap_convexity->passed()) {
        ++failures;
      }
    }
    criterion(10, "sampled cap regions are convex under seeded combinations",
              checked == 5 && failures == 0,
              std::to_string(checked) +
                  " scenarios with members, 1000 trials each, " +
                  std::to_string(failures) + " failures");
  }

  // -------------------------------------------------------------- 11
  {
    std::size_t found = 0;
    std::size_t passed = 0;
    for (std::size_t i = 0; i < bundles.size(); ++i) {
      const std::string& name = scenarios[i].name;
      if (name != "rotation-isometry" && name != "contraction-halving") continue;
      if (!bundles[i].equivalence) continue;
      ++found;
      if (bundles[i].equivalence->passed() &&
          !bundles[i].equivalence->cap_member_indices.empty()) {
        ++passed;
      }
    }
    criterion(11, "cap/fixed-point equivalence on rotation and contraction",
              found == 2 && passed == 2,
              std::to_string(passed) + "/2 scenarios, both inclusions clean");
  }

  // -------------------------------------------------------------- 12
  {
    bool ok = true;
    std::string detail;
    std::size_t predicted_step = 0;
    double bound = 10.0;
    while (std::pow(2.0, static_cast<double>(predicted_step)) <= bound) {
      ++predicted_step;
    }
    for (std::size_t i = 0; i < bundles.size(); ++i) {
      if (!bundles[i].orbit) continue;
      const OrbitReport& orbit = *bundles[i].orbit;
      const std::string& name = scenarios[i].name;
      if (name == "expansive-control") {
        if (orbit.verdict != OrbitVerdict::Exceeded ||
            orbit.exceeded_step != predicted_step ||
            orbit.exceeded_norm != 16.0) {
          ok = false;
        }
        detail = "expansive exceeded at step " +
                 std::to_string(orbit.exceeded_step) + " with norm " +
                 fmt(orbit.exceeded_norm) + " (predicted step " +
                 std::to_string(predicted_step) + ")";
      } else if (name == "contraction-halving" || name == "rotation-isometry") {
        if (orbit.verdict != OrbitVerdict::BoundedAtHorizon) ok = false;
      }
    }
    criterion(12, "orbit boundedness probes", ok, detail);
  }

  // -------------------------------------------------------------- 13
  {
    std::size_t checked = 0;
    std::size_t mismatches = 0;
    const StopRule forced500{-1.0, 500, 1e300};
    for (const Scenario& sc : scenarios) {
      const MappingSpec id = MappingSpec::identity(sc.t.domain());
      const StepSequence steps = StepSequence::constant(0.5);
      const auto mann = run_scheme(SchemeKind::Mann, std::nullopt, sc.t, *sc.x0,
                                   steps, std::nullopt, forced500, {});
      const auto two_id =
          run_scheme(SchemeKind::TwoMapPicardMann, id, sc.t, *sc.x0, steps,
                     std::nullopt, forced500, {});
      const auto pm = run_scheme(SchemeKind::PicardMann, std::nullopt, sc.t,
                                 *sc.x0, steps, std::nullopt, forced500, {});
      const auto two_same =
          run_scheme(SchemeKind::TwoMapPicardMann, sc.t, sc.t, *sc.x0, steps,
                     std::nullopt, forced500, {});
      ++checked;
      if (mann.iterates != two_id.iterates || mann.iterates.size() != 501) {
        ++mismatches;
      }
      if (pm.iterates != two_same.iterates) ++mismatches;
    }
    criterion(13, "two-map scheme reductions are bit-identical over 500 steps",
              checked == scenarios.size() && mismatches == 0,
              std::to_string(checked) + " scenarios, " +
                  std::to_string(mismatches) + " mismatches");
  }

  // -------------------------------------------------------------- 14
  {
    bool ok = true;
    std::string detail;
    for (double c : {0.3, 0.5, 0.8}) {
      RaceScenario race{"scale-" + fmt(c),
                        std::nullopt,
                        MappingSpec(ScaleFamily{c},
                                    DomainSpec::box(Point({-1.0}), Point({1.0})),
                                    true),
                        Point({1.0}),
                        StepSequence::constant(0.5),
                        std::nullopt,
                        StopRule{1e-8, 10000, 0.0},
                        {SchemeKind::PicardMann, SchemeKind::Mann},
                        Point({0.0})};
      const auto rows = compare_schemes(std::vector<RaceScenario>{race}, 1e-8);
      const auto& pm = rows[0];
      const auto& mann = rows[1];
      if (!pm.iterations_to_tolerance || !mann.iterations_to_tolerance) {
        ok = false;
        continue;
      }
      const long long got_pm =
          static_cast<long long>(*pm.iterations_to_tolerance);
      const long long got_mann =
          static_cast<long long>(*mann.iterations_to_tolerance);
      const long long want_pm = static_cast<long long>(
          oracles::scale_steps_to_tolerance(c, 0.5, 1.0, 1e-8, true));
      const long long want_mann = static_cast<long long>(
          oracles::scale_steps_to_tolerance(c, 0.5, 1.0, 1e-8, false));
      if (got_pm >= got_mann || std::llabs(got_pm - want_pm) > 1 ||
          std::llabs(got_mann - want_mann) > 1) {
        ok = false;
      }
      detail += "c=" + fmt(c) + ": pm " + std::to_string(got_pm) + "/" +
                std::to_string(want_pm) + ", mann " + std::to_string(got_mann) +
                "/" + std::to_string(want_mann) + "  ";
    }
    criterion(14, "picard-mann beats mann at the predicted iteration counts",
              ok, "measured/predicted  " + detail);
  }

  // -------------------------------------------------------------- 15
  {
    const fs::path out_a = "acceptance_det_a";
    const fs::path out_b = "acceptance_det_b";
    fs::remove_all(out_a);
    fs::remove_all(out_b);
    const SuiteResult ra = run_suite(files, out_a, {});
    const SuiteResult rb = run_suite(files, out_b, {});
    bool identical = ra.total_failures == 0 && rb.total_failures == 0;
    std::size_t compared = 0;
    std::vector<fs::path> rel_a;
    for (const auto& e : fs::recursive_directory_iterator(out_a)) {
      if (e.is_regular_file()) rel_a.push_back(fs::relative(e.path(), out_a));
    }
    std::sort(rel_a.begin(), rel_a.end());
    for (const auto& rel : rel_a) {
      if (!fs::exists(out_b / rel) ||
          read_file(out_a / rel) != read_file(out_b / rel)) {
        identical = false;
      }
      ++compared;
    }
    criterion(15, "suite reruns are byte-identical",
              identical && compared > 0,
              std::to_string(compared) + " files compared, " +
                  std::to_string(ra.total_failures) + " verdict failures");
  }

  std::printf("acceptance: %d of 15 criteria failed\n", g_failures);
  return g_failures;
}
