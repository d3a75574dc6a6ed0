#pragma once

#include <string>
#include <vector>

namespace momdens {

struct SvgSeries {
    std::string name;
    std::string color;
    std::vector<double> xs;
    std::vector<double> ys;
};

// Minimal deterministic line chart. The output is a pure function of the
// arguments, so regenerating a chart from archived table data reproduces the
// file byte for byte.
std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label,
                           const std::vector<SvgSeries>& series,
                           int width = 880, int height = 560);

}  // namespace momdens
