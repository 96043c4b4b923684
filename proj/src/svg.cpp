#include "matchflow/svg.hpp"

#include "matchflow/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

namespace matchflow::svg {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

constexpr std::array<const char*, 6> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void settle() {
        if (!std::isfinite(lo)) {
            lo = 0.0;
            hi = 1.0;
        } else if (lo == hi) {
            lo -= 0.5;
            hi += 0.5;
        }
    }
};

std::string header(const ChartText& text) {
    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
                    num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) +
                    "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + num(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
         escape(text.title) + "</text>\n";
    s += "<text x=\"" + num(kLeft + (kWidth - kLeft - kRight) / 2) + "\" y=\"" + num(kHeight - 12) +
         "\" text-anchor=\"middle\">" + escape(text.x_label) + "</text>\n";
    s += "<text x=\"18\" y=\"" + num(kTop + (kHeight - kTop - kBottom) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         num(kTop + (kHeight - kTop - kBottom) / 2) + ")\">" + escape(text.y_label) + "</text>\n";
    return s;
}

std::string axes(const Range& xr, const Range& yr) {
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    std::string s = "<rect x=\"" + num(x0) + "\" y=\"" + num(y1) + "\" width=\"" + num(x1 - x0) + "\" height=\"" +
                    num(y0 - y1) + "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double f = i / 4.0;
        const double px = x0 + f * (x1 - x0);
        const double py = y0 - f * (y0 - y1);
        s += "<text x=\"" + num(px) + "\" y=\"" + num(y0 + 16) + "\" text-anchor=\"middle\">" +
             tick(xr.lo + f * (xr.hi - xr.lo)) + "</text>\n";
        s += "<text x=\"" + num(x0 - 6) + "\" y=\"" + num(py + 4) + "\" text-anchor=\"end\">" +
             tick(yr.lo + f * (yr.hi - yr.lo)) + "</text>\n";
    }
    return s;
}

} // namespace

std::string line_chart(const std::vector<Line>& lines, const ChartText& text) {
    Range xr, yr;
    for (const auto& l : lines) {
        if (l.x.size() != l.y.size()) fail(ErrorKind::Shape, "line x and y lengths differ");
        for (double v : l.x) xr.add(v);
        for (double v : l.y) yr.add(v);
    }
    xr.settle();
    yr.settle();
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    auto px = [&](double v) { return x0 + (v - xr.lo) / (xr.hi - xr.lo) * (x1 - x0); };
    auto py = [&](double v) { return y0 - (v - yr.lo) / (yr.hi - yr.lo) * (y0 - y1); };

    std::string s = header(text) + axes(xr, yr);
    for (std::size_t k = 0; k < lines.size(); ++k) {
        const char* colour = kPalette[k % kPalette.size()];
        std::string pts;
        for (std::size_t i = 0; i < lines[k].x.size(); ++i) {
            if (!std::isfinite(lines[k].x[i]) || !std::isfinite(lines[k].y[i])) continue;
            if (!pts.empty()) pts += ' ';
            pts += num(px(lines[k].x[i])) + "," + num(py(lines[k].y[i]));
        }
        s += "<polyline fill=\"none\" stroke=\"" + std::string(colour) + "\" stroke-width=\"1.5\" points=\"" + pts +
             "\"/>\n";
        const double ly = y1 + 14.0 + 18.0 * static_cast<double>(k);
        s += "<line x1=\"" + num(x1 + 12) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(x1 + 32) + "\" y2=\"" +
             num(ly - 4) + "\" stroke=\"" + colour + "\" stroke-width=\"2\"/>\n";
        s += "<text x=\"" + num(x1 + 38) + "\" y=\"" + num(ly) + "\">" + escape(lines[k].label) + "</text>\n";
    }
    return s + "</svg>\n";
}

std::string heatmap(const Eigen::MatrixXd& values, const std::vector<double>& row_coords,
                    const std::vector<double>& col_coords, const ChartText& text) {
    if (static_cast<Eigen::Index>(row_coords.size()) != values.rows() ||
        static_cast<Eigen::Index>(col_coords.size()) != values.cols()) {
        fail(ErrorKind::Shape, "heatmap coordinates do not match the value matrix");
    }
    Range xr, yr, zr;
    for (double v : col_coords) xr.add(v);
    for (double v : row_coords) yr.add(v);
    for (Eigen::Index i = 0; i < values.size(); ++i) zr.add(values.data()[i]);
    xr.settle();
    yr.settle();
    zr.settle();

    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    const double cw = (x1 - x0) / static_cast<double>(std::max<Eigen::Index>(values.cols(), 1));
    const double ch = (y0 - y1) / static_cast<double>(std::max<Eigen::Index>(values.rows(), 1));
    std::string s = header(text) + axes(xr, yr);
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        for (Eigen::Index c = 0; c < values.cols(); ++c) {
            const double f = std::clamp((values(r, c) - zr.lo) / (zr.hi - zr.lo), 0.0, 1.0);
            // white to dark blue
            const int red = static_cast<int>(std::lround(255.0 * (1.0 - 0.9 * f)));
            const int green = static_cast<int>(std::lround(255.0 * (1.0 - 0.75 * f)));
            const int blue = static_cast<int>(std::lround(255.0 * (1.0 - 0.45 * f)));
            char fill[16];
            std::snprintf(fill, sizeof fill, "#%02x%02x%02x", red, green, blue);
            s += "<rect x=\"" + num(x0 + static_cast<double>(c) * cw) + "\" y=\"" +
                 num(y0 - static_cast<double>(r + 1) * ch) + "\" width=\"" + num(cw + 0.05) + "\" height=\"" +
                 num(ch + 0.05) + "\" fill=\"" + fill + "\"/>\n";
        }
    }
    s += "<text x=\"" + num(x1 + 12) + "\" y=\"" + num(y1 + 14) + "\">max " + tick(zr.hi) + "</text>\n";
    s += "<text x=\"" + num(x1 + 12) + "\" y=\"" + num(y1 + 32) + "\">min " + tick(zr.lo) + "</text>\n";
    return s + "</svg>\n";
}

} // namespace matchflow::svg
