#pragma once

// Run configuration for the handsoff tool.
//
// The file is a JSON object:
//
//   {
//     "system":    { "a": [[1, 1], [0, -1]], "b": [[1], [1]] },
//     "endpoints": { "x0": [1, -2], "xf": [1, 0] },
//     "horizons":  [2, 4, 8, 16, 32],
//     "steps_per_unit_time": 200,          optional, default 200
//     "epsilons": [0.01, 0.05, 0.1, 0.5],  optional
//     "support_threshold": 1e-6,           optional
//     "output_dir": "out"                  optional, default "handsoff_out"
//   }
//
// Matrices are row-major lists of rows. Unknown keys are rejected.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "handsoff/linalg.hpp"
#include "handsoff/handsoff_solver.hpp"
#include "handsoff/lti_model.hpp"
#include "handsoff/turnpike.hpp"

namespace handsoff::app {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  Matrix a;
  Matrix b;
  Vector x0;
  Vector xf;
  std::vector<double> horizons;
  int steps_per_unit_time = kDefaultStepsPerUnitTime;
  std::vector<double> epsilons = kDefaultEpsilons;
  double support_threshold = kSupportThreshold;
  std::filesystem::path output_dir = "handsoff_out";

  /// Problem at one horizon (not necessarily one of `horizons`).
  [[nodiscard]] BoundaryProblem problem(double horizon) const;
};

/// Parses config text. `origin` names the source in diagnostics.
/// Throws ConfigError with a line number (syntax) or field path (content).
[[nodiscard]] RunConfig parse_config(const std::string& text, const std::string& origin);
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);

/// The plant, endpoints and horizons of the reference experiment.
[[nodiscard]] RunConfig reference_config();

/// Renders a config back to the JSON grammar above.
[[nodiscard]] std::string to_json(const RunConfig& cfg);

}  // namespace handsoff::app
