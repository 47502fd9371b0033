#include "odt/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace odt {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

std::string svg_line_plot(const std::vector<SvgSeries>& series, const std::string& title,
                          const std::string& x_label, const std::string& y_label,
                          bool log_y) {
    const double W = 640, H = 420;
    const double L = 70, R = 20, T = 34, B = 50;

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series)
        for (size_t i = 0; i < s.x.size(); ++i) {
            const double yv = log_y ? (s.y[i] > 0.0 ? std::log10(s.y[i])
                                                    : std::numeric_limits<double>::quiet_NaN())
                                    : s.y[i];
            if (std::isnan(yv)) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, yv);
            ymax = std::max(ymax, yv);
        }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    if (!(ymax > ymin)) ymax = ymin + 1.0;
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
    auto py = [&](double yv) { return H - B - (yv - ymin) / (ymax - ymin) * (H - T - B); };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(W) + "\" height=\"" +
           fmt(H) + "\" viewBox=\"0 0 " + fmt(W) + " " + fmt(H) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + fmt(W / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\" "
           "font-family=\"sans-serif\">" + title + "</text>\n";

    const int ticks = 5;
    for (int i = 0; i <= ticks; ++i) {
        const double fx = xmin + (xmax - xmin) * i / ticks;
        const double fy = ymin + (ymax - ymin) * i / ticks;
        svg += "<line x1=\"" + fmt(px(fx)) + "\" y1=\"" + fmt(H - B) + "\" x2=\"" +
               fmt(px(fx)) + "\" y2=\"" + fmt(H - B + 5) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + fmt(px(fx)) + "\" y=\"" + fmt(H - B + 18) +
               "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">" +
               fmt(fx) + "</text>\n";
        svg += "<line x1=\"" + fmt(L - 5) + "\" y1=\"" + fmt(py(fy)) + "\" x2=\"" + fmt(L) +
               "\" y2=\"" + fmt(py(fy)) + "\" stroke=\"black\"/>\n";
        const std::string ylab = log_y ? ("1e" + fmt(fy)) : fmt(fy);
        svg += "<text x=\"" + fmt(L - 8) + "\" y=\"" + fmt(py(fy) + 4) +
               "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" + ylab +
               "</text>\n";
    }
    svg += "<rect x=\"" + fmt(L) + "\" y=\"" + fmt(T) + "\" width=\"" + fmt(W - L - R) +
           "\" height=\"" + fmt(H - T - B) + "\" fill=\"none\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fmt((L + W - R) / 2) + "\" y=\"" + fmt(H - 12) +
           "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">" + x_label +
           "</text>\n";
    svg += "<text x=\"16\" y=\"" + fmt((T + H - B) / 2) +
           "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\" "
           "transform=\"rotate(-90 16 " + fmt((T + H - B) / 2) + ")\">" + y_label +
           "</text>\n";

    double legend_y = T + 16;
    for (const auto& s : series) {
        std::string points;
        for (size_t i = 0; i < s.x.size(); ++i) {
            const double yv = log_y ? (s.y[i] > 0.0 ? std::log10(s.y[i])
                                                    : std::numeric_limits<double>::quiet_NaN())
                                    : s.y[i];
            if (std::isnan(yv)) continue;
            points += fmt(px(s.x[i])) + "," + fmt(py(yv)) + " ";
        }
        svg += "<polyline fill=\"none\" stroke=\"" + s.color +
               "\" stroke-width=\"1.6\" points=\"" + points + "\"/>\n";
        if (!s.label.empty()) {
            svg += "<line x1=\"" + fmt(W - R - 150) + "\" y1=\"" + fmt(legend_y) + "\" x2=\"" +
                   fmt(W - R - 126) + "\" y2=\"" + fmt(legend_y) + "\" stroke=\"" + s.color +
                   "\" stroke-width=\"1.6\"/>\n";
            svg += "<text x=\"" + fmt(W - R - 120) + "\" y=\"" + fmt(legend_y + 4) +
                   "\" font-size=\"11\" font-family=\"sans-serif\">" + s.label + "</text>\n";
            legend_y += 16;
        }
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace odt
