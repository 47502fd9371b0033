#pragma once

#include <string>
#include <vector>

namespace odt {

struct SvgSeries {
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f6fb2";
    std::string label;
};

// Minimal self-contained SVG line plot (axes, ticks, legend). log_y switches
// the vertical axis to log10; non-positive values are dropped from log plots.
std::string svg_line_plot(const std::vector<SvgSeries>& series, const std::string& title,
                          const std::string& x_label, const std::string& y_label,
                          bool log_y = false);

}  // namespace odt
