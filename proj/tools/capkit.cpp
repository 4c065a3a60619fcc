// Command-line front end: `check` runs the class verifiers of one scenario,
// `run` executes a full scenario pipeline, `compare` races the iteration
// schemes, `suite` runs every bundled scenario in a directory.
//
// Exit codes: 0 all verdicts pass; N (capped at 63) = failed verdicts;
// 64 usage error; 65 scenario validation error.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "capkit/emit.hpp"
#include "capkit/scenario.hpp"

namespace fs = std::filesystem;
using namespace capkit;

namespace {

constexpr int kUsageError = 64;
constexpr int kValidationError = 65;

int clamp_failures(std::size_t n) {
  return static_cast<int>(std::min<std::size_t>(n, 63));
}

struct CommonArgs {
  std::string scenario;
  std::string out = "out";
  std::string format = "csv";
  std::uint64_t seed = 0;
  bool seed_set = false;
  double tol = 0.0;
  bool tol_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool scenario_required) {
  auto* opt = cmd->add_option("--scenario", args.scenario,
                              "Scenario JSON file (or directory for suite)");
  if (scenario_required) opt->required();
  cmd->add_option("--out", args.out, "Output directory");
  cmd->add_option("--format", args.format, "Output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", args.seed, "Override the scenario seed")
      ->each([&](const std::string&) { args.seed_set = true; });
  cmd->add_option("--tol", args.tol, "Override the scenario absolute tolerance")
      ->each([&](const std::string&) { args.tol_set = true; });
}

Scenario load_with_overrides(const CommonArgs& args) {
  Scenario sc = load_scenario(args.scenario);
  if (args.seed_set) sc.seed = args.seed;
  if (args.tol_set) sc.tol.atol = args.tol;
  return sc;
}

void print_verdicts(const RunBundle& bundle) {
  for (const ScenarioVerdict& v : bundle.verdicts) {
    std::string line = v.pass() ? "  [ok]   " : "  [FAIL] ";
    line += v.name + " = " + v.value;
    if (v.expected && !v.pass()) line += " (expected " + *v.expected + ")";
    std::puts(line.c_str());
  }
}

int cmd_check(const CommonArgs& args) {
  Scenario sc = load_with_overrides(args);
  if (!sc.hybrid) {
    std::puts("scenario requests no class checks");
    return 0;
  }
  // Strip everything but the verifier phases.
  sc.schemes.clear();
  sc.cap.reset();
  sc.orbit.reset();
  sc.probes = ProbeConfig{};
  std::erase_if(sc.expected, [](const auto& kv) {
    return kv.first.rfind("class/", 0) != 0 &&
           kv.first.rfind("theorem_conditions", 0) != 0;
  });
  RunBundle bundle = run_scenario(sc);
  std::printf("scenario %s: class checks over %zu sample points\n",
              sc.name.c_str(), bundle.domain_sample.size());
  for (const auto& [key, report] : bundle.class_checks) {
    std::printf("  %-44s %-16s max_violation=%s pairs=%zu\n", key.c_str(),
                to_string(report.verdict), format_double(report.max_violation).c_str(),
                report.pairs_tested);
  }
  for (const auto& [key, cond] : bundle.condition_checks) {
    std::printf("  %-44s %s%s%s\n", key.c_str(), cond.ok ? "pass" : "fail",
                cond.ok ? "" : ": ", cond.reason.c_str());
  }
  print_verdicts(bundle);
  return clamp_failures(bundle.failures);
}

int cmd_run(const CommonArgs& args) {
  Scenario sc = load_with_overrides(args);
  RunBundle bundle = run_scenario(sc);
  const auto format = emit_format_from_string(args.format);
  const auto files = emit(bundle, *format, args.out);
  std::printf("scenario %s: %zu verdicts, %zu failed\n", sc.name.c_str(),
              bundle.verdicts.size(), bundle.failures);
  print_verdicts(bundle);
  for (const auto& f : files) std::printf("  wrote %s\n", f.string().c_str());
  return clamp_failures(bundle.failures);
}

int cmd_compare(const CommonArgs& args) {
  Scenario sc = load_with_overrides(args);
  RunBundle bundle = run_scenario(sc);
  std::printf("%-24s %-22s %-12s %-14s %s\n", "scenario", "scheme",
              "iters_to_tol", "final_residual", "final_dist_to_zref");
  for (const ComparisonRow& row : bundle.comparison) {
    std::printf("%-24s %-22s %-12s %-14s %s\n", row.scenario.c_str(),
                to_string(row.kind),
                row.iterations_to_tolerance
                    ? std::to_string(*row.iterations_to_tolerance).c_str()
                    : "inf",
                format_double(row.final_residual).c_str(),
                row.final_dist ? format_double(*row.final_dist).c_str() : "-");
  }
  if (!args.out.empty()) {
    const auto format = emit_format_from_string(args.format);
    emit(bundle, *format, args.out);
  }
  return 0;
}

int cmd_suite(const CommonArgs& args) {
  const fs::path where = args.scenario.empty() ? fs::path("scenarios")
                                               : fs::path(args.scenario);
  std::vector<fs::path> files;
  if (fs::is_directory(where)) {
    files = scenario_files_in(where);
  } else {
    files.push_back(where);
  }
  if (files.empty()) {
    std::fprintf(stderr, "no scenario files under %s\n", where.string().c_str());
    return kValidationError;
  }
  SuiteOptions options;
  options.format = *emit_format_from_string(args.format);
  if (args.seed_set) options.seed_override = args.seed;
  if (args.tol_set) options.atol_override = args.tol;
  const SuiteResult result = run_suite(files, args.out, options);
  for (const SuiteEntry& entry : result.entries) {
    if (!entry.error.empty()) {
      std::printf("[FAIL] %s: %s\n", entry.name.c_str(), entry.error.c_str());
    } else if (entry.failures > 0) {
      std::printf("[FAIL] %s: %zu verdicts failed\n", entry.name.c_str(),
                  entry.failures);
    } else {
      std::printf("[PASS] %s\n", entry.name.c_str());
    }
  }
  std::printf("suite: %zu scenario(s), %zu failure(s)\n", result.entries.size(),
              result.total_failures);
  return clamp_failures(result.total_failures);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attractive-point iteration toolkit"};
  app.require_subcommand(1);

  CommonArgs check_args, run_args, compare_args, suite_args;
  auto* check = app.add_subcommand("check", "Run the mapping-class verifiers only");
  add_common(check, check_args, true);
  auto* run = app.add_subcommand("run", "Run a full scenario and emit outputs");
  add_common(run, run_args, true);
  auto* compare = app.add_subcommand("compare", "Race the iteration schemes");
  add_common(compare, compare_args, true);
  auto* suite = app.add_subcommand("suite", "Run every scenario in a directory");
  add_common(suite, suite_args, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kUsageError;
  }

  try {
    if (check->parsed()) return cmd_check(check_args);
    if (run->parsed()) return cmd_run(run_args);
    if (compare->parsed()) return cmd_compare(compare_args);
    return cmd_suite(suite_args);
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kValidationError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kValidationError;
  }
}
