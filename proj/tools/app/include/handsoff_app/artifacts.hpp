#pragma once

// Files written by the tool: trajectory CSVs, JSON summaries and plot data.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "handsoff/handsoff_solver.hpp"
#include "handsoff/turnpike.hpp"

namespace handsoff::app {

class ArtifactError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 17 significant digits, enough to round-trip any double.
[[nodiscard]] std::string format_number(double v);

/// Shortest decimal form of a horizon, used in file names ("T2", "T0.5").
[[nodiscard]] std::string horizon_tag(double horizon);

/// Columns t,u_1..u_m,x_1..x_n,p_1..p_n; N + 1 rows, the last one repeats
/// u_{N-1}.
[[nodiscard]] std::string trajectory_csv(const HandsOffSolution& sol);

struct LoadedTrajectory {
  std::vector<double> times;
  ControlTrajectory control;  // N cells
  StateTrajectory state;      // N + 1 samples
  std::vector<Vector> costate;
};

[[nodiscard]] LoadedTrajectory parse_trajectory_csv(const std::string& text);
[[nodiscard]] LoadedTrajectory read_trajectory_csv(const std::filesystem::path& path);

/// The longest run of cells on which every control component is exactly 0.
[[nodiscard]] std::optional<SupportInterval> longest_zero_interval(const HandsOffSolution& sol);

[[nodiscard]] std::string solution_summary_json(const BoundaryProblem& bp,
                                                const HandsOffSolution& sol);
[[nodiscard]] std::string turnpike_report_json(const TurnpikeReport& report);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace handsoff::app
