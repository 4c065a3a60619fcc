#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "capkit/scenario.hpp"

namespace capkit {

enum class EmitFormat { Csv, Json };
std::optional<EmitFormat> emit_format_from_string(const std::string& s);

// Writes one trace file per scheme run, the normalized scenario, a summary
// and the comparison table under out_dir/<scenario-name>/. Files are written
// whole-then-renamed so a failure never leaves partial output, and identical
// bundles produce byte-identical files.
std::vector<std::filesystem::path> emit(const RunBundle& bundle,
                                        EmitFormat format,
                                        const std::filesystem::path& out_dir);

struct SuiteOptions {
  EmitFormat format = EmitFormat::Csv;
  std::optional<std::uint64_t> seed_override;
  std::optional<double> atol_override;
};

struct SuiteEntry {
  std::string name;
  std::size_t failures = 0;
  std::string error;  // nonempty when the scenario aborted
};

struct SuiteResult {
  std::vector<SuiteEntry> entries;
  std::size_t total_failures = 0;
};

// Loads, runs and emits every scenario file (sorted by path). A scenario
// that aborts with a hard error counts as one failure and does not stop
// the rest of the suite.
SuiteResult run_suite(std::span<const std::filesystem::path> files,
                      const std::filesystem::path& out_dir,
                      const SuiteOptions& options = {});

// Sorted list of the *.json files directly inside dir.
std::vector<std::filesystem::path> scenario_files_in(
    const std::filesystem::path& dir);

}  // namespace capkit
