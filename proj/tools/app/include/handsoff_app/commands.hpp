#pragma once

// Subcommands of the handsoff tool. Each returns a process exit code and
// writes human-readable output to `out`, diagnostics to `err`.

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "handsoff/turnpike.hpp"
#include "handsoff_app/config.hpp"

namespace handsoff::app {

enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 1,
  kExitCheckFailed = 2,
  kExitSolverFailure = 3,
};

struct Overrides {
  std::optional<int> steps_per_unit_time;
  std::optional<double> support_threshold;
  std::optional<std::filesystem::path> output_dir;
};

/// Throws ConfigError on out-of-range values.
void apply_overrides(RunConfig& cfg, const Overrides& ov);

/// HANDSOFF_THREADS when set to a positive integer, else the hardware
/// concurrency (at least 1).
[[nodiscard]] std::size_t sweep_threads();

int cmd_check(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_solve(const RunConfig& cfg, double horizon, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunConfig& cfg, std::size_t threads, std::ostream& out, std::ostream& err);

struct Anchor {
  std::string name;
  std::string expected;
  std::string tolerance;
  std::string measured;
  bool passed = false;
};

/// The reference-experiment checks: the zero interval and l0 measure at the
/// shortest horizon, and the residence / mid-norm trends over the sweep.
[[nodiscard]] std::vector<Anchor> evaluate_anchors(const std::vector<HorizonOutcome>& outcomes);

/// check + sweep on the reference configuration, then the anchor table.
int cmd_reproduce(const RunConfig& cfg, std::size_t threads, std::ostream& out,
                  std::ostream& err);

}  // namespace handsoff::app
