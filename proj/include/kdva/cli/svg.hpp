#pragma once

// Minimal static SVG line charts: one polyline per series, optional log axes.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "kdva/cli/csv.hpp"
#include "kdva/errors.hpp"

namespace kdva::cli {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct ChartSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
};

namespace detail {

inline std::string escape_xml(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

inline std::string fmt(double x) { return format_number(x, 6); }

}  // namespace detail

inline std::string render_svg(const ChartSpec& spec, const std::vector<Series>& series) {
    constexpr double width = 640, height = 420, left = 70, right = 20, top = 40, bottom = 50;
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

    auto tx = [&](double v) { return spec.log_x ? std::log10(v) : v; };
    auto ty = [&](double v) { return spec.log_y ? std::log10(v) : v; };
    auto usable = [&](double x, double y) {
        return std::isfinite(tx(x)) && std::isfinite(ty(y)) && (!spec.log_x || x > 0) && (!spec.log_y || y > 0);
    };

    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            x0 = std::min(x0, tx(s.x[i]));
            x1 = std::max(x1, tx(s.x[i]));
            y0 = std::min(y0, ty(s.y[i]));
            y1 = std::max(y1, ty(s.y[i]));
        }
    }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 == x0) x0 -= 0.5, x1 += 0.5;
    if (y1 == y0) y0 -= 0.5, y1 += 0.5;
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;

    auto px = [&](double v) { return left + (tx(v) - x0) / (x1 - x0) * (width - left - right); };
    auto py = [&](double v) { return height - bottom - (ty(v) - y0) / (y1 - y0) * (height - top - bottom); };

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" viewBox=\"0 0 640 420\">\n";
    svg += "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
    svg += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" +
           detail::escape_xml(spec.title) + "</text>\n";
    svg += "<rect x=\"70\" y=\"40\" width=\"550\" height=\"330\" fill=\"none\" stroke=\"black\"/>\n";

    for (int k = 0; k <= 4; ++k) {
        const double gx = x0 + (x1 - x0) * k / 4.0;
        const double gy = y0 + (y1 - y0) * k / 4.0;
        const double sx = left + (width - left - right) * k / 4.0;
        const double sy = height - bottom - (height - top - bottom) * k / 4.0;
        svg += "<text x=\"" + detail::fmt(sx) + "\" y=\"388\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"11\">" + detail::fmt(spec.log_x ? std::pow(10.0, gx) : gx) + "</text>\n";
        svg += "<text x=\"64\" y=\"" + detail::fmt(sy + 4) + "\" text-anchor=\"end\" font-family=\"sans-serif\" "
               "font-size=\"11\">" + detail::fmt(spec.log_y ? std::pow(10.0, gy) : gy) + "</text>\n";
    }
    svg += "<text x=\"345\" y=\"410\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
           detail::escape_xml(spec.x_label) + "</text>\n";
    svg += "<text x=\"16\" y=\"205\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
           "transform=\"rotate(-90 16 205)\">" + detail::escape_xml(spec.y_label) + "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = palette[k % std::size(palette)];
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            svg += (first ? "" : " ") + detail::fmt(px(s.x[i])) + "," + detail::fmt(py(s.y[i]));
            first = false;
        }
        svg += "\"/>\n";
        const double ly = 58 + 16.0 * static_cast<double>(k);
        svg += "<line x1=\"500\" x2=\"520\" y1=\"" + detail::fmt(ly) + "\" y2=\"" + detail::fmt(ly) + "\" stroke=\"" +
               color + "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"526\" y=\"" + detail::fmt(ly + 4) + "\" font-family=\"sans-serif\" font-size=\"11\">" +
               detail::escape_xml(s.name) + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

inline void write_svg(const std::string& path, const ChartSpec& spec, const std::vector<Series>& series) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) fail(ErrorKind::ValidationError, "cannot open " + path + " for writing", "outputs.svg_path");
    file << render_svg(spec, series);
}

}  // namespace kdva::cli
