#include "bfb/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace bfb {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 60.0;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void grow(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(hi > lo)) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double span = hi - lo;
    lo -= 0.05 * span;
    hi += 0.05 * span;
  }
};

} // namespace

std::string svg_line_chart(const std::vector<SvgSeries>& series, const std::string& title,
                           const std::string& x_label, const std::string& y_label,
                           bool log_x, bool log_y) {
  auto tx = [log_x](double v) { return log_x ? std::log10(std::max(v, 1e-300)) : v; };
  auto ty = [log_y](double v) { return log_y ? std::log10(std::max(v, 1e-300)) : v; };

  Range rx, ry;
  for (const auto& s : series) {
    for (double v : s.x) rx.grow(tx(v));
    for (double v : s.y) ry.grow(ty(v));
  }
  rx.pad();
  ry.pad();

  auto px = [&rx](double v) {
    return kMargin + (v - rx.lo) / (rx.hi - rx.lo) * (kWidth - 2 * kMargin);
  };
  auto py = [&ry](double v) {
    return kHeight - kMargin - (v - ry.lo) / (ry.hi - ry.lo) * (kHeight - 2 * kMargin);
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
      << title << "</text>\n";

  // axes
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\""
      << kWidth - kMargin << "\" y2=\"" << kHeight - kMargin
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin
      << "\" y2=\"" << kHeight - kMargin << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 16
      << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label
      << (log_x ? " (log10)" : "") << "</text>\n";
  out << "<text x=\"18\" y=\"" << kHeight / 2
      << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 18 "
      << kHeight / 2 << ")\">" << y_label << (log_y ? " (log10)" : "") << "</text>\n";

  // tick labels at the axis extremes
  out << "<text x=\"" << kMargin << "\" y=\"" << kHeight - kMargin + 16
      << "\" font-size=\"10\" text-anchor=\"middle\">" << num(rx.lo) << "</text>\n";
  out << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kHeight - kMargin + 16
      << "\" font-size=\"10\" text-anchor=\"middle\">" << num(rx.hi) << "</text>\n";
  out << "<text x=\"" << kMargin - 6 << "\" y=\"" << kHeight - kMargin
      << "\" font-size=\"10\" text-anchor=\"end\">" << num(ry.lo) << "</text>\n";
  out << "<text x=\"" << kMargin - 6 << "\" y=\"" << kMargin + 4
      << "\" font-size=\"10\" text-anchor=\"end\">" << num(ry.hi) << "</text>\n";

  double legend_y = kMargin + 6.0;
  for (const auto& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"";
    if (s.dashed) {
      out << " stroke-dasharray=\"6 4\"";
    }
    out << " points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      out << num(px(tx(s.x[i]))) << "," << num(py(ty(s.y[i]))) << " ";
    }
    out << "\"/>\n";
    if (!s.label.empty()) {
      out << "<text x=\"" << kWidth - kMargin - 4 << "\" y=\"" << legend_y
          << "\" font-size=\"11\" text-anchor=\"end\" fill=\"" << s.color << "\">"
          << s.label << "</text>\n";
      legend_y += 14.0;
    }
  }
  out << "</svg>\n";
  return out.str();
}

std::string svg_closed_curves(const std::vector<SvgSeries>& curves,
                              const std::string& title) {
  Range rx, ry;
  for (const auto& c : curves) {
    for (double v : c.x) rx.grow(v);
    for (double v : c.y) ry.grow(v);
  }
  rx.pad();
  ry.pad();
  // equal aspect
  const double span = std::max(rx.hi - rx.lo, ry.hi - ry.lo);
  const double cx = 0.5 * (rx.lo + rx.hi);
  const double cy = 0.5 * (ry.lo + ry.hi);
  rx = {cx - span / 2, cx + span / 2};
  ry = {cy - span / 2, cy + span / 2};

  const double side = std::min(kWidth, kHeight) - 2 * kMargin;
  auto px = [&](double v) { return kMargin + (v - rx.lo) / span * side; };
  auto py = [&](double v) { return kMargin + side - (v - ry.lo) / span * side; };

  std::ostringstream out;
  const double w = side + 2 * kMargin;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << w
      << "\" viewBox=\"0 0 " << w << " " << w << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
      << title << "</text>\n";
  double legend_y = kMargin + 6.0;
  for (const auto& c : curves) {
    out << "<polygon fill=\"none\" stroke=\"" << c.color << "\" stroke-width=\"1.5\"";
    if (c.dashed) {
      out << " stroke-dasharray=\"6 4\"";
    }
    out << " points=\"";
    for (std::size_t i = 0; i < c.x.size(); ++i) {
      out << num(px(c.x[i])) << "," << num(py(c.y[i])) << " ";
    }
    out << "\"/>\n";
    if (!c.label.empty()) {
      out << "<text x=\"" << w - kMargin - 4 << "\" y=\"" << legend_y
          << "\" font-size=\"11\" text-anchor=\"end\" fill=\"" << c.color << "\">" << c.label
          << "</text>\n";
      legend_y += 14.0;
    }
  }
  out << "</svg>\n";
  return out.str();
}

} // namespace bfb
