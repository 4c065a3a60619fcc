#include "capkit/emit.hpp"

#include <algorithm>
#include <fstream>

namespace capkit {

namespace fs = std::filesystem;

std::optional<EmitFormat> emit_format_from_string(const std::string& s) {
  if (s == "csv") return EmitFormat::Csv;
  if (s == "json") return EmitFormat::Json;
  return std::nullopt;
}

namespace {

void write_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out) throw Error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string trace_csv(const ConvergenceTrace& trace) {
  const std::size_t d = trace.iterates.front().dim();
  std::string out = "n";
  for (std::size_t i = 0; i < d; ++i) out += ",x" + std::to_string(i);
  out += ",residual_T,residual_S,dist_to_zref,proj_step_delta\n";
  for (std::size_t n = 0; n < trace.iterates.size(); ++n) {
    out += std::to_string(n + 1);
    for (std::size_t i = 0; i < d; ++i) {
      out += "," + format_double(trace.iterates[n][i]);
    }
    out += "," + format_double(trace.residuals_t[n]);
    out += ",";
    if (!trace.residuals_s.empty()) out += format_double(trace.residuals_s[n]);
    out += ",";
    if (!trace.dist_to_ref.empty()) out += format_double(trace.dist_to_ref[n]);
    out += ",";
    if (!trace.projections.empty() && n > 0) {
      out += format_double(dist(trace.projections[n], trace.projections[n - 1]));
    }
    out += "\n";
  }
  return out;
}

ojson trace_json(const ConvergenceTrace& trace) {
  ojson j;
  j["kind"] = to_string(trace.kind);
  j["stop_reason"] = to_string(trace.stop_reason);
  ojson its = ojson::array();
  for (const Point& p : trace.iterates) its.push_back(point_to_json(p));
  j["iterates"] = its;
  j["residuals_T"] = trace.residuals_t;
  if (!trace.residuals_s.empty()) j["residuals_S"] = trace.residuals_s;
  if (!trace.dist_to_ref.empty()) j["dist_to_zref"] = trace.dist_to_ref;
  if (!trace.projections.empty()) {
    ojson ps = ojson::array();
    for (const Point& p : trace.projections) ps.push_back(point_to_json(p));
    j["projections"] = ps;
  }
  if (!trace.alphas.empty()) j["alphas"] = trace.alphas;
  if (!trace.betas.empty()) j["betas"] = trace.betas;
  return j;
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::string out =
      "scheme,iterations_to_tolerance,final_residual,final_dist_to_zref,"
      "stop_reason\n";
  for (const ComparisonRow& r : rows) {
    out += to_string(r.kind);
    out += ",";
    out += r.iterations_to_tolerance
               ? std::to_string(*r.iterations_to_tolerance)
               : std::string("inf");
    out += "," + format_double(r.final_residual);
    out += ",";
    if (r.final_dist) out += format_double(*r.final_dist);
    out += ",";
    out += to_string(r.stop_reason);
    out += "\n";
  }
  return out;
}

ojson comparison_json(const std::vector<ComparisonRow>& rows) {
  ojson arr = ojson::array();
  for (const ComparisonRow& r : rows) {
    ojson j;
    j["scheme"] = to_string(r.kind);
    if (r.iterations_to_tolerance) {
      j["iterations_to_tolerance"] = *r.iterations_to_tolerance;
    } else {
      j["iterations_to_tolerance"] = nullptr;
    }
    j["final_residual"] = r.final_residual;
    if (r.final_dist) j["final_dist_to_zref"] = *r.final_dist;
    j["stop_reason"] = to_string(r.stop_reason);
    arr.push_back(j);
  }
  return arr;
}

ojson class_check_json(const ClassCheckReport& r) {
  ojson j;
  j["class"] = r.class_name;
  j["pairs_tested"] = r.pairs_tested;
  j["max_violation"] = r.max_violation;
  j["verdict"] = to_string(r.verdict);
  j["sampled"] = r.sampled;
  if (r.witness) {
    j["witness"] = ojson{{"x", point_to_json(r.witness->first)},
                         {"y", point_to_json(r.witness->second)}};
  }
  return j;
}

ojson summary_json(const RunBundle& b) {
  ojson j;
  j["scenario"] = b.scenario.name;
  j["seed"] = b.scenario.seed;
  j["domain_sample_size"] = b.domain_sample.size();
  j["failures"] = b.failures;

  ojson verdicts = ojson::array();
  for (const ScenarioVerdict& v : b.verdicts) {
    ojson vj;
    vj["name"] = v.name;
    vj["value"] = v.value;
    if (v.expected) vj["expected"] = *v.expected;
    vj["pass"] = v.pass();
    verdicts.push_back(vj);
  }
  j["verdicts"] = verdicts;

  if (!b.class_checks.empty()) {
    ojson arr = ojson::array();
    for (const auto& [key, report] : b.class_checks) {
      ojson cj = class_check_json(report);
      cj["key"] = key;
      arr.push_back(cj);
    }
    j["class_checks"] = arr;
  }
  if (!b.condition_checks.empty()) {
    ojson arr = ojson::array();
    for (const auto& [key, cond] : b.condition_checks) {
      arr.push_back(ojson{{"key", key}, {"ok", cond.ok}, {"reason", cond.reason}});
    }
    j["condition_checks"] = arr;
  }
  if (b.cap) {
    ojson cj;
    cj["candidates_tested"] = b.cap->candidates_tested;
    cj["domain_sample_size"] = b.cap->domain_sample_size;
    cj["atol"] = b.cap->atol_used;
    cj["member_count"] = b.cap->members.size();
    cj["member_indices"] = b.cap->member_indices;
    ojson members = ojson::array();
    for (const Point& m : b.cap->members) members.push_back(point_to_json(m));
    cj["members"] = members;
    j["cap_estimate"] = cj;
  }
  if (b.cap_convexity) {
    j["cap_convexity"] = ojson{{"trials", b.cap_convexity->trials},
                               {"seed", b.cap_convexity->seed},
                               {"segment_failures", b.cap_convexity->segment_failures},
                               {"limit_failures", b.cap_convexity->limit_failures}};
  }
  if (b.equivalence) {
    j["equivalence"] = ojson{
        {"cap_members_in_sample", b.equivalence->cap_member_indices},
        {"residual_failures", b.equivalence->residual_failures},
        {"cap_failures", b.equivalence->cap_failures}};
  }
  if (b.orbit) {
    ojson oj;
    oj["start"] = point_to_json(b.orbit->start);
    oj["horizon"] = b.orbit->horizon;
    oj["bound"] = b.orbit->bound;
    oj["max_norm_S"] = b.orbit->max_norm_s;
    oj["max_norm_T"] = b.orbit->max_norm_t;
    oj["verdict"] = to_string(b.orbit->verdict);
    if (b.orbit->verdict == OrbitVerdict::Exceeded) {
      oj["exceeded_step"] = b.orbit->exceeded_step;
      oj["exceeded_norm"] = b.orbit->exceeded_norm;
    }
    j["orbit"] = oj;
  }
  if (!b.runs.empty()) {
    ojson arr = ojson::array();
    for (const SchemeRun& run : b.runs) {
      ojson rj;
      rj["label"] = run.request.label;
      rj["kind"] = to_string(run.request.kind);
      rj["stop_reason"] = to_string(run.trace.stop_reason);
      rj["iterates"] = run.trace.length();
      rj["final_residual_T"] = run.trace.residuals_t.back();
      if (run.fejer) {
        rj["fejer"] = ojson{{"ok", run.fejer->ok},
                            {"first_violation", run.fejer->first_violation},
                            {"worst_excess", run.fejer->worst_excess}};
      }
      if (run.energy) {
        rj["energy"] = ojson{{"ok", run.energy->ok},
                             {"first_violation", run.energy->first_violation},
                             {"worst_excess", run.energy->worst_excess}};
      }
      if (run.residual_limit) rj["residual_limit"] = *run.residual_limit;
      if (run.proj_seq) {
        rj["projection_sequence"] =
            ojson{{"cauchy_ok", run.proj_seq->cauchy_ok},
                  {"max_window_delta", run.proj_seq->max_window_delta},
                  {"limit", point_to_json(run.proj_seq->limit)},
                  {"limit_vs_final", run.proj_seq->limit_vs_final},
                  {"limit_ok", run.proj_seq->limit_ok}};
      }
      arr.push_back(rj);
    }
    j["schemes"] = arr;
  }
  if (!b.bridges.empty()) {
    ojson arr = ojson::array();
    for (const BridgeResult& br : b.bridges) {
      ojson bj;
      bj["z"] = point_to_json(br.z);
      bj["ok"] = br.ok;
      if (br.fixed_point) bj["fixed_point"] = point_to_json(*br.fixed_point);
      if (!br.error.empty()) bj["error"] = br.error;
      arr.push_back(bj);
    }
    j["bridges"] = arr;
  }
  return j;
}

}  // namespace

std::vector<fs::path> emit(const RunBundle& bundle, EmitFormat format,
                           const fs::path& out_dir) {
  const fs::path dir = out_dir / bundle.scenario.name;
  fs::create_directories(dir);
  std::vector<fs::path> written;

  for (const SchemeRun& run : bundle.runs) {
    const std::string stem = "trace_" + run.request.label;
    if (format == EmitFormat::Csv) {
      const fs::path p = dir / (stem + ".csv");
      write_atomic(p, trace_csv(run.trace));
      written.push_back(p);
    } else {
      const fs::path p = dir / (stem + ".json");
      write_atomic(p, trace_json(run.trace).dump(2) + "\n");
      written.push_back(p);
    }
  }

  if (!bundle.comparison.empty()) {
    if (format == EmitFormat::Csv) {
      const fs::path p = dir / "comparison.csv";
      write_atomic(p, comparison_csv(bundle.comparison));
      written.push_back(p);
    } else {
      const fs::path p = dir / "comparison.json";
      write_atomic(p, comparison_json(bundle.comparison).dump(2) + "\n");
      written.push_back(p);
    }
  }

  const fs::path scenario_path = dir / "scenario.json";
  write_atomic(scenario_path, scenario_to_json(bundle.scenario).dump(2) + "\n");
  written.push_back(scenario_path);

  const fs::path summary_path = dir / "summary.json";
  write_atomic(summary_path, summary_json(bundle).dump(2) + "\n");
  written.push_back(summary_path);

  return written;
}

std::vector<fs::path> scenario_files_in(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw ValidationError("not a scenario directory: " + dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

SuiteResult run_suite(std::span<const fs::path> files, const fs::path& out_dir,
                      const SuiteOptions& options) {
  SuiteResult result;
  for (const fs::path& file : files) {
    SuiteEntry entry;
    entry.name = file.stem().string();
    try {
      Scenario sc = load_scenario(file);
      if (options.seed_override) sc.seed = *options.seed_override;
      if (options.atol_override) sc.tol.atol = *options.atol_override;
      entry.name = sc.name;
      RunBundle bundle = run_scenario(sc);
      emit(bundle, options.format, out_dir);
      entry.failures = bundle.failures;
    } catch (const std::exception& e) {
      entry.failures = 1;
      entry.error = e.what();
    }
    result.total_failures += entry.failures;
    result.entries.push_back(std::move(entry));
  }
  return result;
}

}  // namespace capkit
