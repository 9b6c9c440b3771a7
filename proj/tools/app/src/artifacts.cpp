#include "handsoff_app/artifacts.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace handsoff::app {

using nlohmann::json;

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string horizon_tag(double horizon) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, horizon);
  return "T" + std::string(buf, res.ptr);
}

std::string trajectory_csv(const HandsOffSolution& sol) {
  const std::size_t cells = sol.control.cells();
  if (cells == 0) throw ArtifactError("trajectory: solution has no cells");
  const std::size_t m = sol.control.values.front().size();
  const std::size_t n = sol.state.values.front().size();
  std::string out = "t";
  for (std::size_t i = 1; i <= m; ++i) out += ",u_" + std::to_string(i);
  for (std::size_t i = 1; i <= n; ++i) out += ",x_" + std::to_string(i);
  for (std::size_t i = 1; i <= n; ++i) out += ",p_" + std::to_string(i);
  out += '\n';
  for (std::size_t k = 0; k < sol.state.values.size(); ++k) {
    out += format_number(sol.state.time(k));
    const Vector& u = sol.control.values[std::min(k, cells - 1)];
    for (double v : u) out += "," + format_number(v);
    for (double v : sol.state.values[k]) out += "," + format_number(v);
    for (double v : sol.costate.values[k]) out += "," + format_number(v);
    out += '\n';
  }
  return out;
}

LoadedTrajectory parse_trajectory_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ArtifactError("trajectory: empty file");
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t np = 0;
  {
    std::istringstream hs(line);
    std::string col;
    std::getline(hs, col, ',');
    if (col != "t") throw ArtifactError("trajectory: first column must be t");
    while (std::getline(hs, col, ',')) {
      const std::string prefix = col.substr(0, 2);
      const std::size_t expect = 1 + (prefix == "u_" ? m : prefix == "x_" ? n : np);
      if (col != prefix + std::to_string(expect)) {
        throw ArtifactError("trajectory: unexpected header column '" + col + "'");
      }
      if (prefix == "u_" && n == 0 && np == 0) {
        ++m;
      } else if (prefix == "x_" && np == 0) {
        ++n;
      } else if (prefix == "p_") {
        ++np;
      } else {
        throw ArtifactError("trajectory: header columns out of order at '" + col + "'");
      }
    }
  }
  if (m == 0 || n == 0 || np != n) throw ArtifactError("trajectory: malformed header");

  LoadedTrajectory tr;
  std::vector<Vector> controls;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<double> vals;
    const char* p = line.data();
    const char* end = p + line.size();
    while (p <= end) {
      double v = 0.0;
      const auto res = std::from_chars(p, end, v);
      if (res.ec != std::errc()) {
        throw ArtifactError("trajectory: row " + std::to_string(row) + ": bad number");
      }
      vals.push_back(v);
      p = res.ptr;
      if (p == end) break;
      if (*p != ',') throw ArtifactError("trajectory: row " + std::to_string(row) + ": bad separator");
      ++p;
    }
    if (vals.size() != 1 + m + 2 * n) {
      throw ArtifactError("trajectory: row " + std::to_string(row) + " has " +
                          std::to_string(vals.size()) + " fields");
    }
    tr.times.push_back(vals[0]);
    controls.emplace_back(std::vector<double>(vals.begin() + 1, vals.begin() + 1 + m));
    tr.state.values.emplace_back(
        std::vector<double>(vals.begin() + 1 + m, vals.begin() + 1 + m + n));
    tr.costate.emplace_back(std::vector<double>(vals.begin() + 1 + m + n, vals.end()));
  }
  if (tr.times.size() < 2) throw ArtifactError("trajectory: needs at least two rows");
  const std::size_t cells = tr.times.size() - 1;
  const double step = tr.times.back() / static_cast<double>(cells);
  controls.pop_back();
  tr.control.step = step;
  tr.control.values = std::move(controls);
  tr.state.step = step;
  return tr;
}

LoadedTrajectory read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArtifactError(path.string() + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_trajectory_csv(ss.str());
}

std::optional<SupportInterval> longest_zero_interval(const HandsOffSolution& sol) {
  std::optional<SupportInterval> best;
  const std::size_t cells = sol.control.cells();
  std::size_t k = 0;
  while (k < cells) {
    if (norm_inf(sol.control.values[k]) != 0.0) {
      ++k;
      continue;
    }
    std::size_t j = k;
    while (j < cells && norm_inf(sol.control.values[j]) == 0.0) ++j;
    const SupportInterval run{sol.control.time(k), sol.control.time(j)};
    if (!best || run.end - run.start > best->end - best->start) best = run;
    k = j;
  }
  return best;
}

namespace {

json intervals_json(const std::vector<SupportInterval>& ivs) {
  json out = json::array();
  for (const SupportInterval& iv : ivs) out.push_back({iv.start, iv.end});
  return out;
}

}  // namespace

std::string solution_summary_json(const BoundaryProblem& bp, const HandsOffSolution& sol) {
  const BangOffBangReport bob = verify_bangoffbang(sol);
  json s;
  s["horizon"] = sol.horizon;
  s["steps_per_unit_time"] = bp.steps_per_unit_time;
  s["cells"] = sol.control.cells();
  s["step"] = sol.control.step;
  s["l0_measure"] = sol.l0_measure;
  s["l1_cost"] = sol.l1_cost;
  s["support_intervals"] = intervals_json(sol.support_intervals);
  if (auto zero = longest_zero_interval(sol)) {
    s["longest_zero_interval"] = {zero->start, zero->end};
  } else {
    s["longest_zero_interval"] = nullptr;
  }
  s["bangoffbang_violation"] = sol.bangoffbang_violation;
  s["bangoffbang"] = {{"passed", bob.passed},
                      {"switching_instants", bob.switching_instants},
                      {"excluded_cells", bob.excluded_cells},
                      {"violating_cells", bob.violating_cells},
                      {"normality_guaranteed", bob.normality_guaranteed},
                      {"possible_singular_arcs", bob.possible_singular_arcs}};
  s["control_law_agreement"] = control_law_agreement(bp.sys, sol);
  s["terminal_error"] = norm_inf(sol.state.values.back() - bp.xf);
  s["dynamics_residual"] = dynamics_residual(bp.sys, sol.state, sol.control);
  s["lp_objective"] = sol.lp_objective;
  s["lp_iterations"] = sol.lp_iterations;
  s["normal"] = sol.normal;
  s["trajectory"] = "traj_" + horizon_tag(sol.horizon) + ".csv";
  return s.dump(2) + "\n";
}

std::string turnpike_report_json(const TurnpikeReport& report) {
  auto fit_json = [](const std::optional<EnvelopeFit>& f) -> json {
    if (!f) return nullptr;
    return {{"k", f->k}, {"a", f->a}, {"slack", f->slack}};
  };
  json r;
  r["horizons"] = report.horizons;
  r["epsilons"] = report.epsilons;
  json rows = json::array();
  for (const HorizonSummary& s : report.per_horizon) {
    json row;
    row["horizon"] = s.horizon;
    row["solved"] = s.solved;
    if (!s.solved) {
      row["error"] = s.error;
      rows.push_back(row);
      continue;
    }
    row["l0_measure"] = s.l0_measure;
    row["l1_cost"] = s.l1_cost;
    row["support_intervals"] = intervals_json(s.support_intervals);
    row["residence_fraction"] = s.residence_fraction;
    row["mid_state_norm"] = s.mid_state_norm;
    row["peak_profile"] = s.peak_profile;
    row["bangoffbang_violation"] = s.bangoffbang_violation;
    rows.push_back(row);
  }
  r["per_horizon"] = rows;
  r["envelope_fit"] = fit_json(report.fit);
  if (!report.fit_error.empty()) r["fit_error"] = report.fit_error;
  json cross;
  cross["fit_horizon"] = report.cross_fit_horizon ? json(*report.cross_fit_horizon) : json(nullptr);
  cross["fit"] = fit_json(report.cross_fit);
  cross["allowance"] = report.allowance;
  json checks = json::array();
  bool all = !report.cross_checks.empty();
  for (const EnvelopeCheck& c : report.cross_checks) {
    checks.push_back({{"horizon", c.horizon}, {"ratio", c.ratio}, {"passed", c.passed}});
    all = all && c.passed;
  }
  cross["checks"] = checks;
  cross["passed"] = all;
  r["envelope_cross_check"] = cross;
  r["residence_monotone"] = report.residence_monotone;
  r["mid_norm_monotone"] = report.mid_norm_monotone;
  return r.dump(2) + "\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ArtifactError(path.string() + ": cannot write");
  out << text;
  if (!out) throw ArtifactError(path.string() + ": write failed");
}

}  // namespace handsoff::app
