#pragma once

#include <string>
#include <vector>

namespace spfts {

// Minimal standalone SVG line plots; every figure is paired with a CSV of the
// plotted points so the curves can be regenerated without the tool.
class LinePlot {
 public:
  LinePlot(std::string title, std::string x_label, std::string y_label);

  // Free-form provenance string embedded as an XML comment in the SVG.
  void set_metadata(std::string metadata) { metadata_ = std::move(metadata); }

  void add_line(const std::vector<double>& xs, const std::vector<double>& ys,
                const std::string& label, const std::string& color, double width = 1.5,
                bool dashed = false);

  void write_svg(const std::string& path) const;
  void write_csv(const std::string& path) const;

 private:
  struct Series {
    std::vector<double> xs, ys;
    std::string label, color;
    double width;
    bool dashed;
  };

  std::string title_, x_label_, y_label_, metadata_;
  std::vector<Series> series_;
};

}  // namespace spfts
