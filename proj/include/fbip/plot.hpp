#pragma once

#include <string>
#include <vector>

namespace fbip {

// Minimal single-series SVG line plot (autoscaled axes, tick labels). Strictly
// a convenience for eyeballing runs; CSV remains the data contract.
void write_line_plot_svg(const std::string& path, const std::vector<double>& x,
                         const std::vector<double>& y, const std::string& title,
                         const std::string& x_label, const std::string& y_label);

}  // namespace fbip
