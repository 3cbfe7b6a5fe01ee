#pragma once

#include <string>
#include <utility>
#include <vector>

namespace uplift::svg {

struct Series {
  std::vector<std::pair<double, double>> points;
  std::string color = "#1f6fb4";
  bool dashed = false;
};

// All charts render into a fixed 800x500 viewport with deterministic output.

std::string line_chart(const std::string& title, const std::string& x_label,
                       const std::string& y_label, const std::vector<Series>& series);

std::string bar_chart(const std::string& title, const std::string& x_label,
                      const std::string& y_label, const std::vector<double>& values);

// b x b cell grid; values indexed ix*b + iy with iy growing upward. Cells with
// valid=false are drawn gray; the rest run red (lowest) to blue (highest).
std::string heatmap(const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<double>& x_edges,
                    const std::vector<double>& y_edges,
                    const std::vector<double>& values, const std::vector<bool>& valid);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace uplift::svg
