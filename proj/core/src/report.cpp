#include "panelcast/report.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <string_view>

#include "panelcast/csv.hpp"
#include "panelcast/errors.hpp"

namespace panelcast {

namespace {

constexpr double kMarginLeft = 90.0;
constexpr double kMarginRight = 30.0;
constexpr double kMarginTop = 50.0;
constexpr double kMarginBottom = 70.0;

std::string escape_xml(std::string_view text) {
  std::string out;
  for (const char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  double pixel_lo = 0.0;
  double pixel_hi = 1.0;

  double map(double v) const { return pixel_lo + (v - lo) / (hi - lo) * (pixel_hi - pixel_lo); }
};

}  // namespace

ErrorBarChart render_error_bars(const AggregateReport& report, const ErrorBarOptions& options) {
  if (report.per_state.empty()) throw EmptyInput("error bar chart needs at least one state");
  if (options.width <= 0 || options.height <= 0) throw InvalidArgument("chart size must be positive");

  ErrorBarChart chart;
  chart.half_width = std::sqrt(std::max(report.test_mse.mean, 0.0));
  chart.title = options.title;
  chart.x_label = options.x_label;
  chart.y_label = options.y_label;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : report.per_state) {
    chart.points.push_back({s.state, s.actual, s.mean_predicted, chart.half_width});
    lo = std::min({lo, s.actual, s.mean_predicted - chart.half_width});
    hi = std::max({hi, s.actual, s.mean_predicted + chart.half_width});
  }
  // Both axes share one domain so the reference line is the diagonal.
  const double pad = hi > lo ? 0.05 * (hi - lo) : std::max(1.0, 0.05 * std::abs(hi));
  lo -= pad;
  hi += pad;

  const double w = options.width;
  const double h = options.height;
  const Axis x{lo, hi, kMarginLeft, w - kMarginRight};
  const Axis y{lo, hi, h - kMarginBottom, kMarginTop};

  std::string svg;
  svg += fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n",
      options.width, options.height);
  svg += fmt::format("  <rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", options.width, options.height);
  svg += fmt::format("  <text class=\"title\" x=\"{:.2f}\" y=\"28\" text-anchor=\"middle\" font-size=\"18\">{}</text>\n",
                     w / 2.0, escape_xml(options.title));

  svg += "  <g class=\"axes\" stroke=\"black\" stroke-width=\"1\">\n";
  svg += fmt::format("    <line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\"/>\n", x.pixel_lo, y.pixel_lo,
                     x.pixel_hi, y.pixel_lo);
  svg += fmt::format("    <line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\"/>\n", x.pixel_lo, y.pixel_lo,
                     x.pixel_lo, y.pixel_hi);
  svg += "  </g>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = lo + (hi - lo) * i / 4.0;
    svg += fmt::format(
        "  <text class=\"tick\" x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\" font-size=\"11\">{:.0f}</text>\n",
        x.map(v), y.pixel_lo + 18.0, v);
    svg += fmt::format(
        "  <text class=\"tick\" x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\" font-size=\"11\">{:.0f}</text>\n",
        x.pixel_lo - 6.0, y.map(v) + 4.0, v);
  }
  svg += fmt::format(
      "  <text class=\"x-label\" x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
      (x.pixel_lo + x.pixel_hi) / 2.0, h - 20.0, escape_xml(options.x_label));
  svg += fmt::format(
      "  <text class=\"y-label\" x=\"20\" y=\"{0:.2f}\" text-anchor=\"middle\" font-size=\"14\" "
      "transform=\"rotate(-90 20 {0:.2f})\">{1}</text>\n",
      (y.pixel_lo + y.pixel_hi) / 2.0, escape_xml(options.y_label));

  svg += fmt::format(
      "  <line class=\"reference\" x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"gray\" "
      "stroke-dasharray=\"6 4\"/>\n",
      x.map(lo), y.map(lo), x.map(hi), y.map(hi));

  for (const auto& p : chart.points) {
    const double px = x.map(p.actual);
    const double top = y.map(p.mean_predicted + p.half_width);
    const double bottom = y.map(p.mean_predicted - p.half_width);
    svg += fmt::format("  <g class=\"state\" data-state=\"{}\">\n", escape_xml(p.state));
    svg += fmt::format(
        "    <line class=\"bar\" x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"steelblue\" "
        "data-half-width=\"{3}\"/>\n",
        px, top, bottom, csv::format_double(p.half_width));
    svg += fmt::format("    <circle class=\"marker\" cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"4\" fill=\"firebrick\"/>\n", px,
                       y.map(p.mean_predicted));
    svg += fmt::format("    <text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"10\">{}</text>\n", px + 6.0,
                       y.map(p.mean_predicted) - 6.0, escape_xml(p.state));
    svg += "  </g>\n";
  }
  svg += "</svg>\n";
  chart.svg = std::move(svg);
  return chart;
}

void write_svg(const ErrorBarChart& chart, const std::filesystem::path& path) {
  auto out = csv::open_output(path);
  out << chart.svg;
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace panelcast
