#pragma once

#include <string>
#include <vector>

namespace bfb {

/// Minimal self-contained SVG line plots (no external renderer).
struct SvgSeries {
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  std::string label;
  bool dashed = false;
};

/// x-y line chart; log10 axes optional. Returns the SVG document text.
std::string svg_line_chart(const std::vector<SvgSeries>& series, const std::string& title,
                           const std::string& x_label, const std::string& y_label,
                           bool log_x = false, bool log_y = false);

/// Closed curves in the plane (boundary shapes), equal-aspect.
std::string svg_closed_curves(const std::vector<SvgSeries>& curves, const std::string& title);

} // namespace bfb
