#include "handsoff_app/plots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "handsoff_app/artifacts.hpp"

namespace handsoff::app {
namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 450.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

void pad_range(double& lo, double& hi) {
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
    return;
  }
  const double margin = 0.05 * (hi - lo);
  lo -= margin;
  hi += margin;
}

}  // namespace

std::string render_svg(const Chart& chart) {
  double xlo = std::numeric_limits<double>::infinity();
  double xhi = -xlo;
  double ylo = xlo;
  double yhi = -xlo;
  for (const Series& s : chart.series) {
    for (double v : s.x) xlo = std::min(xlo, v), xhi = std::max(xhi, v);
    for (double v : s.y) ylo = std::min(ylo, v), yhi = std::max(yhi, v);
  }
  if (!std::isfinite(xlo)) xlo = 0.0, xhi = 1.0, ylo = 0.0, yhi = 1.0;
  pad_range(xlo, xhi);
  pad_range(ylo, yhi);
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xlo) / (xhi - xlo) * pw; };
  auto py = [&](double y) { return kTop + (yhi - y) / (yhi - ylo) * ph; };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(kWidth) +
         "\" height=\"" + fixed(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + fixed(kLeft + pw / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
         escape(chart.title) + "</text>\n";
  out += "<rect x=\"" + fixed(kLeft) + "\" y=\"" + fixed(kTop) + "\" width=\"" + fixed(pw) +
         "\" height=\"" + fixed(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = xlo + (xhi - xlo) * i / 4.0;
    const double yv = ylo + (yhi - ylo) * i / 4.0;
    out += "<line x1=\"" + fixed(px(xv)) + "\" y1=\"" + fixed(kTop + ph) + "\" x2=\"" +
           fixed(px(xv)) + "\" y2=\"" + fixed(kTop + ph + 5) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + fixed(px(xv)) + "\" y=\"" + fixed(kTop + ph + 18) +
           "\" text-anchor=\"middle\">" + tick(xv) + "</text>\n";
    out += "<line x1=\"" + fixed(kLeft - 5) + "\" y1=\"" + fixed(py(yv)) + "\" x2=\"" +
           fixed(kLeft) + "\" y2=\"" + fixed(py(yv)) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + fixed(kLeft - 8) + "\" y=\"" + fixed(py(yv) + 4) +
           "\" text-anchor=\"end\">" + tick(yv) + "</text>\n";
  }
  out += "<text x=\"" + fixed(kLeft + pw / 2) + "\" y=\"" + fixed(kHeight - 10) +
         "\" text-anchor=\"middle\">" + escape(chart.x_label) + "</text>\n";
  out += "<text x=\"16\" y=\"" + fixed(kTop + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         fixed(kTop + ph / 2) + ")\">" + escape(chart.y_label) + "</text>\n";

  for (std::size_t i = 0; i < chart.series.size(); ++i) {
    const Series& s = chart.series[i];
    const char* color = kPalette[i % std::size(kPalette)];
    out += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
      out += fixed(px(s.x[k])) + "," + fixed(py(s.y[k])) + " ";
    }
    out += "\"/>\n";
    const double ly = kTop + 10 + 18.0 * static_cast<double>(i);
    out += "<line x1=\"" + fixed(kWidth - kRight + 15) + "\" y1=\"" + fixed(ly) + "\" x2=\"" +
           fixed(kWidth - kRight + 40) + "\" y2=\"" + fixed(ly) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + fixed(kWidth - kRight + 46) + "\" y=\"" + fixed(ly + 4) + "\">" +
           escape(s.label) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

Chart control_chart(const HandsOffSolution& sol) {
  Chart c{"Control, T = " + horizon_tag(sol.horizon).substr(1), "t", "u(t)", {}};
  const std::size_t m = sol.control.cells() == 0 ? 0 : sol.control.values.front().size();
  for (std::size_t i = 0; i < m; ++i) {
    Series s{"u_" + std::to_string(i + 1), {}, {}};
    for (std::size_t k = 0; k < sol.control.cells(); ++k) {
      s.x.push_back(sol.control.time(k));
      s.y.push_back(sol.control.values[k][i]);
      s.x.push_back(sol.control.time(k + 1));
      s.y.push_back(sol.control.values[k][i]);
    }
    c.series.push_back(std::move(s));
  }
  return c;
}

Chart phase_chart(const std::vector<const HandsOffSolution*>& sols) {
  Chart c{"State trajectories", "x_1", "x_2", {}};
  for (const HandsOffSolution* sol : sols) {
    Series s{"T = " + horizon_tag(sol->horizon).substr(1), {}, {}};
    for (const Vector& x : sol->state.values) {
      s.x.push_back(x[0]);
      s.y.push_back(x.size() > 1 ? x[1] : 0.0);
    }
    c.series.push_back(std::move(s));
  }
  return c;
}

Chart normalized_norm_chart(const std::vector<const HandsOffSolution*>& sols) {
  Chart c{"State magnitude against normalized time", "t / T", "||x(t)||_2", {}};
  for (const HandsOffSolution* sol : sols) {
    Series s{"T = " + horizon_tag(sol->horizon).substr(1), {}, {}};
    for (std::size_t k = 0; k < sol->state.values.size(); ++k) {
      s.x.push_back(sol->state.time(k) / sol->horizon);
      s.y.push_back(norm2(sol->state.values[k]));
    }
    c.series.push_back(std::move(s));
  }
  return c;
}

std::string series_dat(const Series& s, const std::string& x_name, const std::string& y_name) {
  std::string out = "# " + x_name + " " + y_name + "\n";
  for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
    out += format_number(s.x[k]) + " " + format_number(s.y[k]) + "\n";
  }
  return out;
}

void write_plots(const std::filesystem::path& dir, const HandsOffSolution* control_sol,
                 const std::vector<const HandsOffSolution*>& sols) {
  if (control_sol != nullptr) {
    const Chart c = control_chart(*control_sol);
    const std::string tag = horizon_tag(control_sol->horizon);
    for (const Series& s : c.series) {
      write_text(dir / ("fig1_control_" + tag + "_" + s.label + ".dat"), series_dat(s, "t", s.label));
    }
    write_text(dir / ("fig1_control_" + tag + ".svg"), render_svg(c));
  }
  if (sols.empty()) return;
  const Chart phase = phase_chart(sols);
  const Chart norms = normalized_norm_chart(sols);
  for (std::size_t i = 0; i < sols.size(); ++i) {
    const std::string tag = horizon_tag(sols[i]->horizon);
    write_text(dir / ("fig2_states_" + tag + ".dat"), series_dat(phase.series[i], "x_1", "x_2"));
    write_text(dir / ("fig3_state_norm_" + tag + ".dat"),
               series_dat(norms.series[i], "t/T", "norm_x"));
  }
  write_text(dir / "fig2_states.svg", render_svg(phase));
  write_text(dir / "fig3_state_norm.svg", render_svg(norms));
}

}  // namespace handsoff::app
