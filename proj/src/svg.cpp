#include "spfts/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "spfts/errors.hpp"

namespace spfts {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 64, kRight = 24, kTop = 40, kBottom = 48;

std::string escape_xml(const std::string& s) {
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

}  // namespace

LinePlot::LinePlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void LinePlot::add_line(const std::vector<double>& xs, const std::vector<double>& ys,
                        const std::string& label, const std::string& color, double width,
                        bool dashed) {
  if (xs.size() != ys.size() || xs.empty()) {
    throw ConfigError("plot series needs equally sized, nonempty x and y");
  }
  series_.push_back({xs, ys, label, color, width, dashed});
}

void LinePlot::write_svg(const std::string& path) const {
  double x_min = std::numeric_limits<double>::max(), x_max = std::numeric_limits<double>::lowest();
  double y_min = x_min, y_max = x_max;
  for (const auto& s : series_) {
    for (double x : s.xs) { x_min = std::min(x_min, x); x_max = std::max(x_max, x); }
    for (double y : s.ys) { y_min = std::min(y_min, y); y_max = std::max(y_max, y); }
  }
  if (series_.empty()) { x_min = 0; x_max = 1; y_min = 0; y_max = 1; }
  if (x_max <= x_min) x_max = x_min + 1;
  if (y_max <= y_min) y_max = y_min + 1;
  const double y_pad = 0.05 * (y_max - y_min);
  y_min -= y_pad;
  y_max += y_pad;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const auto sx = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  const auto sy = [&](double y) { return kTop + (y_max - y) / (y_max - y_min) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='" << kHeight
      << "' viewBox='0 0 " << kWidth << " " << kHeight << "'>\n";
  if (!metadata_.empty()) svg << "<!-- " << escape_xml(metadata_) << " -->\n";
  svg << "<rect width='100%' height='100%' fill='white'/>\n";
  svg << "<text x='" << kWidth / 2 << "' y='24' text-anchor='middle' font-size='15' "
      << "font-family='sans-serif'>" << escape_xml(title_) << "</text>\n";

  // frame and ticks
  svg << "<rect x='" << kLeft << "' y='" << kTop << "' width='" << plot_w << "' height='"
      << plot_h << "' fill='none' stroke='#444'/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = x_min + i * (x_max - x_min) / 4;
    const double fy = y_min + i * (y_max - y_min) / 4;
    svg << "<text x='" << sx(fx) << "' y='" << kHeight - kBottom + 18
        << "' text-anchor='middle' font-size='11' font-family='sans-serif'>";
    svg << std::setprecision(3) << fx << "</text>\n";
    svg << "<text x='" << kLeft - 8 << "' y='" << sy(fy) + 4
        << "' text-anchor='end' font-size='11' font-family='sans-serif'>";
    svg << std::setprecision(3) << fy << "</text>\n";
    svg << "<line x1='" << sx(fx) << "' y1='" << kTop + plot_h << "' x2='" << sx(fx) << "' y2='"
        << kTop + plot_h + 4 << "' stroke='#444'/>\n";
    svg << "<line x1='" << kLeft - 4 << "' y1='" << sy(fy) << "' x2='" << kLeft << "' y2='"
        << sy(fy) << "' stroke='#444'/>\n";
  }
  svg << "<text x='" << kWidth / 2 << "' y='" << kHeight - 10
      << "' text-anchor='middle' font-size='12' font-family='sans-serif'>" << escape_xml(x_label_)
      << "</text>\n";
  svg << "<text x='16' y='" << kHeight / 2
      << "' text-anchor='middle' font-size='12' font-family='sans-serif' transform='rotate(-90 16 "
      << kHeight / 2 << ")'>" << escape_xml(y_label_) << "</text>\n";

  for (const auto& s : series_) {
    svg << "<polyline fill='none' stroke='" << s.color << "' stroke-width='" << s.width << "'";
    if (s.dashed) svg << " stroke-dasharray='6,4'";
    svg << " points='";
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      svg << sx(s.xs[i]) << "," << sy(s.ys[i]) << " ";
    }
    svg << "'/>\n";
  }

  double ly = kTop + 14;
  for (const auto& s : series_) {
    svg << "<line x1='" << kLeft + plot_w - 130 << "' y1='" << ly - 4 << "' x2='"
        << kLeft + plot_w - 108 << "' y2='" << ly - 4 << "' stroke='" << s.color
        << "' stroke-width='" << s.width << "'" << (s.dashed ? " stroke-dasharray='6,4'" : "")
        << "/>\n";
    svg << "<text x='" << kLeft + plot_w - 102 << "' y='" << ly
        << "' font-size='11' font-family='sans-serif'>" << escape_xml(s.label) << "</text>\n";
    ly += 16;
  }
  svg << "</svg>\n";

  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << svg.str();
}

void LinePlot::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << "series,x,y\n";
  out.precision(17);
  for (const auto& s : series_) {
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      out << s.label << "," << s.xs[i] << "," << s.ys[i] << "\n";
    }
  }
}

}  // namespace spfts
