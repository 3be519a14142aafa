#include <algorithm>
#include <limits>

#include <fmt/format.h>

#include "cbandit/harness.hpp"

namespace cbandit {

namespace {

constexpr double kWidth = 720, kHeight = 440;
constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 50;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                   "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

// Value after the '=' of a sweep label such as "exp2/m=10".
double sweep_value(const std::string& experiment) {
  const auto eq = experiment.rfind('=');
  return eq == std::string::npos ? 0.0 : std::stod(experiment.substr(eq + 1));
}

std::string tick(double v) { return fmt::format("{:.4g}", v); }

}  // namespace

std::string report_svg(const RegretReport& report) {
  const ExperimentPlan& plan = report.plan;
  const bool by_m = !plan.m_values.empty() && plan.horizons.size() == 1;

  std::vector<Series> series;
  auto find = [&](const std::string& name) -> Series& {
    for (Series& s : series)
      if (s.name == name) return s;
    series.push_back({name, {}});
    return series.back();
  };
  for (const CellSummary& c : report.cells) {
    if (c.instance) continue;
    if (by_m) {
      find(c.algorithm).points.emplace_back(sweep_value(c.experiment), c.mean);
    } else {
      const bool grouped = c.experiment.find('/') != std::string::npos;
      const std::string name = grouped ? fmt::format("{} {}", c.algorithm, c.experiment) : c.algorithm;
      find(name).points.emplace_back(static_cast<double>(c.horizon), c.mean);
    }
  }

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y1 = 0.0;
  for (const Series& s : series)
    for (auto [x, y] : s.points) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
    }
  if (series.empty()) x0 = 0, x1 = 1;
  if (x1 <= x0) x1 = x0 + 1;
  if (y1 <= 0) y1 = 1;
  y1 *= 1.05;

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return kTop + ph - y / y1 * ph; };

  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      kWidth, kHeight);
  out += fmt::format("<text x=\"{}\" y=\"22\" font-size=\"15\">{}: mean regret vs {}</text>\n",
                     kLeft, experiment_name(plan.id), by_m ? "m" : "horizon");
  out += fmt::format(
      "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n"
      "<line x1=\"{0}\" y1=\"{3}\" x2=\"{0}\" y2=\"{1}\" stroke=\"black\"/>\n",
      kLeft, kTop + ph, kLeft + pw, kTop);
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0, yv = y1 * i / 4.0;
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", sx(xv),
                       kTop + ph + 18, tick(xv));
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{}</text>\n", kLeft - 6,
                       sy(yv) + 4, tick(yv));
    out += fmt::format(
        "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#ddd\"/>\n", kLeft,
        sy(yv), kLeft + pw, sy(yv));
  }
  out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n",
                     kLeft + pw / 2, kHeight - 10, by_m ? "m" : "T");

  for (std::size_t k = 0; k < series.size(); ++k) {
    Series& s = series[k];
    std::sort(s.points.begin(), s.points.end());
    const char* color = kColors[k % std::size(kColors)];
    std::string pts;
    for (auto [x, y] : s.points) pts += fmt::format("{:.1f},{:.1f} ", sx(x), sy(y));
    out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>\n",
                       color, pts);
    for (auto [x, y] : s.points)
      out += fmt::format("<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"2.5\" fill=\"{}\"/>\n", sx(x), sy(y),
                         color);
    const double ly = kTop + 14 + 18.0 * static_cast<double>(k);
    out += fmt::format(
        "<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" stroke=\"{3}\" "
        "stroke-width=\"2\"/>\n<text x=\"{4:.1f}\" y=\"{5:.1f}\">{6}</text>\n",
        kLeft + pw + 12, ly, kLeft + pw + 32, color, kLeft + pw + 38, ly + 4, s.name);
  }
  out += "</svg>\n";
  return out;
}

}  // namespace cbandit
