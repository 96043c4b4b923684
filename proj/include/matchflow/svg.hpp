#pragma once

// Minimal static SVG output for line charts and heatmaps.

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace matchflow::svg {

struct Line {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct ChartText {
    std::string title;
    std::string x_label;
    std::string y_label;
};

std::string line_chart(const std::vector<Line>& lines, const ChartText& text);

// Rows of `values` are drawn bottom to top, columns left to right.
std::string heatmap(const Eigen::MatrixXd& values, const std::vector<double>& row_coords,
                    const std::vector<double>& col_coords, const ChartText& text);

} // namespace matchflow::svg
