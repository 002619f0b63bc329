#pragma once

// Minimal SVG renderers for the benchmark outputs. Coordinates are printed
// with fixed precision so the files are byte-stable.

#include <string>
#include <vector>

namespace corrscreen::svg {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct BoxGroup {
  std::string label;
  std::vector<double> values;
};

std::string line_plot(const std::vector<Series>& series, const std::string& title,
                      const std::string& x_label, const std::string& y_label);

/// Median, quartile box and 1.5 IQR whiskers per group.
std::string box_plot(const std::vector<BoxGroup>& groups, const std::string& title,
                     const std::string& y_label);

}  // namespace corrscreen::svg
