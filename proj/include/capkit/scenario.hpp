#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "capkit/attractive.hpp"
#include "capkit/schemes.hpp"

namespace capkit {

using ojson = nlohmann::ordered_json;

struct SchemeRequest {
  std::string label;  // kind name, suffixed when a kind repeats
  SchemeKind kind = SchemeKind::Mann;
  StepSequence steps = StepSequence::constant(0.5);
  std::optional<StepSequence> beta_steps;  // ishikawa
  StopRule stop;
};

struct CandidateGrid {
  Point lower, upper;
  std::size_t count = 201;  // per axis
};

struct CapConfig {
  CandidateGrid candidates;
  std::size_t convexity_trials = 1000;
};

struct OrbitConfig {
  Point start;
  std::size_t horizon = 10000;
  double bound = 0.0;  // <= 0 means 1e6 * (1 + |start|)
};

struct ProbeConfig {
  std::optional<Point> z_ref;
  std::optional<ConvexSet> cap_set;
  std::vector<Point> bridge_z;
};

// Diagnostic tolerances; defaults mirror the regression thresholds the
// bundled scenarios are checked against.
struct DiagnosticsConfig {
  double fejer_tol = 1e-12;
  double energy_tol = 1e-9;
  double residual_tol = 1e-8;
  std::size_t window = 10;
  double proj_tol = 1e-8;
  double proj_limit_tol = 1e-6;
  bool operator==(const DiagnosticsConfig&) const = default;
};

struct HybridVariant {
  std::string label;
  HybridParams params;
};

struct HybridConfig {
  HybridParams params;
  std::vector<std::string> checks;  // further-hybrid, normally-hybrid,
                                    // widely-hybrid, quasi-nonexpansive,
                                    // berinde-quasi-contractive
  std::vector<HybridVariant> variants;
  std::optional<std::pair<double, double>> berinde_certificate;  // (a, L)
};

struct Scenario {
  std::string name;
  std::uint64_t seed = 1;
  Tol tol;
  DomainSpec domain;
  SamplerSpec sampler;
  MappingSpec s, t;
  std::optional<HybridConfig> hybrid;
  std::vector<Point> fixed_points;
  std::optional<CapConfig> cap;
  std::optional<OrbitConfig> orbit;
  std::optional<Point> x0;
  std::vector<SchemeRequest> schemes;
  ProbeConfig probes;
  DiagnosticsConfig diag;
  std::vector<std::pair<std::string, std::string>> expected;  // verdict -> value
};

Scenario scenario_from_json(const ojson& j);
Scenario load_scenario(const std::filesystem::path& path);
ojson scenario_to_json(const Scenario& sc);

// Serialization helpers shared with the emitters.
ojson point_to_json(const Point& p);
Point point_from_json(const ojson& j, const char* what);
ojson convex_set_to_json(const ConvexSet& s);
ConvexSet convex_set_from_json(const ojson& j);
ojson mapping_to_json(const MappingSpec& m);
MappingSpec mapping_from_json(const ojson& j, const DomainSpec& domain);
ojson hybrid_params_to_json(const HybridParams& p);
HybridParams hybrid_params_from_json(const ojson& j);

// ---------------------------------------------------------------------------
// Execution

struct SchemeRun {
  SchemeRequest request;
  ConvergenceTrace trace;
  std::optional<MonotoneCheck> fejer;
  std::optional<MonotoneCheck> energy;
  std::optional<bool> residual_limit;
  std::optional<ProjectionSequenceCheck> proj_seq;
};

struct BridgeResult {
  Point z;
  std::optional<Point> fixed_point;
  bool ok = false;
  std::string error;
};

struct ScenarioVerdict {
  std::string name;
  std::string value;
  std::optional<std::string> expected;
  bool pass() const { return !expected || *expected == value; }
};

struct RunBundle {
  Scenario scenario;
  std::vector<Point> domain_sample;
  std::vector<std::pair<std::string, ClassCheckReport>> class_checks;
  std::vector<std::pair<std::string, ConditionCheck>> condition_checks;
  std::optional<CapEstimate> cap;
  std::optional<ConvexityReport> cap_convexity;
  std::optional<EquivalenceReport> equivalence;
  std::optional<OrbitReport> orbit;
  std::vector<SchemeRun> runs;
  std::vector<ComparisonRow> comparison;
  std::vector<BridgeResult> bridges;
  std::vector<ScenarioVerdict> verdicts;
  std::size_t failures = 0;
};

// Executes class checks, condition gates, CAP estimation, the orbit probe,
// scheme runs with diagnostics and the comparison table, then scores the
// verdicts against the scenario's expected block. Hard errors are rethrown
// with the pipeline phase prepended.
RunBundle run_scenario(const Scenario& sc);

}  // namespace capkit
