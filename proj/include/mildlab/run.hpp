#pragma once

// Orchestration behind the command-line front end: builds study contexts
// from a RunConfig, runs the selected work and writes the artifacts.
//
// Layout of a run directory:
//   manifest.json                 config digest, normalized config, verdicts
//   noise/path_<seed>.csv|.json   sample-noise
//   solve/trajectory_<seed>.csv   solve (+ diagnostics_<seed>.json)
//   <study>/report.json|series.csv
//   invariants/<check>/report.json|series.csv

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mildlab/config.hpp"
#include "mildlab/verify.hpp"

namespace mildlab {

/// Environment variable that re-roots relative output directories.
inline constexpr const char* kOutputRootVariable = "MILDLAB_OUTPUT_ROOT";

enum ExitCode : int { exit_pass = 0, exit_error = 1, exit_inconclusive = 2 };

struct RunOptions {
    std::size_t workers = 1;
    /// Overrides the environment variable when set.
    std::optional<std::filesystem::path> output_root;
    /// Progress lines; null silences them.
    std::ostream* log = nullptr;
};

/// Resolved run directory: config.output, re-rooted under the output root
/// (option, else environment variable) when it is a relative path.
std::filesystem::path run_directory(const RunConfig& config, const RunOptions& options);

/// Writes through a sibling temporary file and renames it into place.
/// Throws std::runtime_error naming the path on failure.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Shared study inputs with per-section overrides applied.
StudyContext make_context(const RunConfig& config, const StudyOverrides& overrides, std::size_t workers);

/// Runs one configured study. Throws InvalidArgument when the name is
/// unknown or its section is absent from the config.
std::vector<StudyReport> run_study(const RunConfig& config, const std::string& name, std::size_t workers);

/// The invariant suite: scalar identities for the test drifts and the
/// configured drift, closed forms, inequalities, semigroup axioms, grid
/// identities and noise exactness.
std::vector<StudyReport> run_invariants(const RunConfig& config, std::size_t workers);

/// Verdict-based exit code: pass only if every report passes, inconclusive
/// if none fails but some are inconclusive.
int exit_code_for(const std::vector<StudyReport>& reports);

/// Executes `subcommand` (sample-noise, solve, study, check-invariants) and
/// writes its artifacts. `study` names the study for the study subcommand;
/// "all" runs every configured section.
int run(const RunConfig& config, const std::string& subcommand, const std::string& study, const RunOptions& options);

}  // namespace mildlab
