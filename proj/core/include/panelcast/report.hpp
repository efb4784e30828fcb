#ifndef PANELCAST_REPORT_HPP_
#define PANELCAST_REPORT_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "panelcast/metrics.hpp"

namespace panelcast {

struct ErrorBarOptions {
  int width = 800;
  int height = 600;
  std::string title = "Predicted vs actual violent crime";
  std::string x_label = "Actual violent crime";
  std::string y_label = "Mean predicted violent crime";
};

struct ErrorBarPoint {
  std::string state;
  double actual = 0.0;
  double mean_predicted = 0.0;
  double half_width = 0.0;
};

struct ErrorBarChart {
  std::vector<ErrorBarPoint> points;
  double half_width = 0.0;  // sqrt of the mean test MSE, shared by every bar
  std::string title;
  std::string x_label;
  std::string y_label;
  std::string svg;
};

/// One marker per state at (actual, mean predicted) with vertical bars of
/// half-width sqrt(mean test MSE), plus a y = x reference line. Throws
/// EmptyInput for a report without states and InvalidArgument for a
/// non-positive canvas.
ErrorBarChart render_error_bars(const AggregateReport& report, const ErrorBarOptions& options = {});

void write_svg(const ErrorBarChart& chart, const std::filesystem::path& path);

}  // namespace panelcast

#endif  // PANELCAST_REPORT_HPP_
