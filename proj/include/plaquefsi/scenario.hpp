#pragma once

#include "plaquefsi/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

namespace plaquefsi {

/// Process exit codes of a run.
inline constexpr int kExitConverged = 0;
inline constexpr int kExitInvariantAbort = 1;
inline constexpr int kExitNoContraction = 2;

/// Column version of the diagnostics and iterate CSV files.
inline constexpr int kCsvVersion = 1;

struct RunOutcome {
    int exit_code = kExitInvariantAbort;
    std::filesystem::path directory;
    std::optional<PicardResult> result;
    std::optional<InitialData> initial;
    /// Contents of summary.txt, one key=value per entry.
    std::map<std::string, std::string> summary;
};

/// Execute one scenario and write into `directory`:
///   config.ini       the effective configuration
///   mesh.txt         mesh export
///   fields_<k>.csv   snapshots every `output.cadence` steps and at the end
///   diagnostics.csv  per-step invariants (column meanings in the header)
///   picard.csv       per-iterate difference norms and contraction ratios
///   summary.txt      key=value summary
/// Exit code 0 on convergence, 2 when the iteration does not contract or
/// exhausts max_iter, 1 when an invariant aborts the run. Outputs are
/// bit-identical across runs with the same configuration. Progress goes to
/// `log` when given. Filesystem failures throw Error.
RunOutcome run_scenario(const RunConfig& cfg, const std::filesystem::path& directory, std::ostream* log = nullptr);

/// Write the mesh of a configuration.
void export_mesh(const RunConfig& cfg, const std::filesystem::path& file);

/// Header and rows of diagnostics.csv.
void write_diagnostics_csv(std::ostream& os, const std::vector<StepDiagnostics>& diag);

/// Map a Picard status to a process exit code.
int exit_code_for(PicardStatus status);

}  // namespace plaquefsi
