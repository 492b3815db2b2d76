#pragma once

// Subcommand bodies of the allee_patch tool. Each returns the tables it
// wrote; files go to the output directory.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "allee/io/config.hpp"
#include "allee/io/table.hpp"

namespace allee::io {

/// Process exit codes.
enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumeric = 3 };

struct CommandOptions {
  std::optional<std::filesystem::path> out_dir;  // overrides [output] dir
  int jobs = 1;
  std::optional<std::string> seed_set;  // overrides [classify] seeds
  bool svg = false;
};

struct CommandResult {
  std::vector<std::filesystem::path> files;
  std::vector<ResultTable> tables;
};

/// Output failure (unwritable directory or file); exit code 2.
class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The config with command-line overrides applied. The provenance hash is
/// taken from this config.
RunConfig effective_config(const RunConfig& c, const CommandOptions& o);

/// trajectory_<i>.csv per x0 (columns t,u1,v1,u2,v2; header only for
/// t_end = 0) and trajectory.svg overlaying them in the chosen projection.
CommandResult cmd_simulate(const RunConfig& c, const CommandOptions& o);

/// equilibria.csv: every equilibrium with its location and stability.
CommandResult cmd_equilibria(const RunConfig& c, const CommandOptions& o);

/// eigen.csv: four eigenvalues per equilibrium; closed form for O, O_l,
/// O_11 and AA, quartic roots otherwise.
CommandResult cmd_eigen(const RunConfig& c, const CommandOptions& o);

/// boundaries.csv: sampled H1, H2, 3D Hopf estimate, SC, SB and cusp.
CommandResult cmd_boundaries(const RunConfig& c, const CommandOptions& o);

/// portrait.csv and portrait.svg (cells colored by domain).
CommandResult cmd_sweep(const RunConfig& c, const CommandOptions& o);

/// refuge_scan.csv (regime per alpha) and refuge_thresholds.csv.
CommandResult cmd_scan_refuge(const RunConfig& c, const CommandOptions& o);

/// classify.csv: one attractor report per seed.
CommandResult cmd_classify(const RunConfig& c, const CommandOptions& o);

inline constexpr std::string_view kCommands[] = {"simulate", "equilibria", "eigen", "boundaries",
                                                 "sweep", "scan-refuge", "classify"};

/// Loads the config, runs the named command and maps failures to exit
/// codes: configuration and output errors 2, numeric failures 3. Messages go
/// to err, written file paths to out.
int run_command(std::string_view name, const std::filesystem::path& config,
                const CommandOptions& o, std::ostream& out, std::ostream& err);

}  // namespace allee::io
