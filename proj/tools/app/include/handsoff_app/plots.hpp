#pragma once

// Plain two-column plot data and standalone SVG renderings.

#include <filesystem>
#include <string>
#include <vector>

#include "handsoff/handsoff_solver.hpp"

namespace handsoff::app {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

[[nodiscard]] std::string render_svg(const Chart& chart);

/// Staircase of each control component against t.
[[nodiscard]] Chart control_chart(const HandsOffSolution& sol);
/// x_2 against x_1 for each solution (first two state components).
[[nodiscard]] Chart phase_chart(const std::vector<const HandsOffSolution*>& sols);
/// ||x(t)||_2 against t / T for each solution.
[[nodiscard]] Chart normalized_norm_chart(const std::vector<const HandsOffSolution*>& sols);

/// Whitespace-separated columns, one row per sample, '#' header line.
[[nodiscard]] std::string series_dat(const Series& s, const std::string& x_name,
                                     const std::string& y_name);

/// Writes fig1_control_T*.dat/.svg for `control_sol` (when given) and the
/// phase-plane and normalized-norm data for every solution in `sols`.
void write_plots(const std::filesystem::path& dir, const HandsOffSolution* control_sol,
                 const std::vector<const HandsOffSolution*>& sols);

}  // namespace handsoff::app
