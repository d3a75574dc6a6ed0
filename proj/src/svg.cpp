#include "momdens/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "momdens/errors.hpp"

namespace momdens {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Range {
    double lo, hi;
};

Range data_range(const std::vector<SvgSeries>& series, bool use_x) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& s : series) {
        const auto& v = use_x ? s.xs : s.ys;
        for (double d : v) {
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
    }
    if (!(lo < hi)) {
        lo -= 1.0;
        hi += 1.0;
    }
    return {lo, hi};
}

// Round tick spacing to 1/2/5 times a power of ten.
double nice_step(double span) {
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double frac = raw / mag;
    if (frac <= 1.0) return mag;
    if (frac <= 2.0) return 2.0 * mag;
    if (frac <= 5.0) return 5.0 * mag;
    return 10.0 * mag;
}

}  // namespace

std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label,
                           const std::vector<SvgSeries>& series, int width,
                           int height) {
    if (series.empty())
        throw InvalidInput("chart needs at least one series");

    const double margin_left = 70, margin_right = 160, margin_top = 48,
                 margin_bottom = 56;
    const double plot_w = width - margin_left - margin_right;
    const double plot_h = height - margin_top - margin_bottom;

    Range xr = data_range(series, true);
    Range yr = data_range(series, false);
    // A little headroom above the curves.
    yr.hi += 0.05 * (yr.hi - yr.lo);

    const auto sx = [&](double x) {
        return margin_left + (x - xr.lo) / (xr.hi - xr.lo) * plot_w;
    };
    const auto sy = [&](double y) {
        return margin_top + plot_h - (y - yr.lo) / (yr.hi - yr.lo) * plot_h;
    };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
        << height << "\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << height
        << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << title
        << "</text>\n";

    // Axes box
    out << "<rect x=\"" << fmt(margin_left) << "\" y=\"" << fmt(margin_top)
        << "\" width=\"" << fmt(plot_w) << "\" height=\"" << fmt(plot_h)
        << "\" fill=\"none\" stroke=\"black\"/>\n";

    // Ticks
    const double xstep = nice_step(xr.hi - xr.lo);
    for (double t = std::ceil(xr.lo / xstep) * xstep; t <= xr.hi + 1e-12 * xstep;
         t += xstep) {
        out << "<line x1=\"" << fmt(sx(t)) << "\" y1=\""
            << fmt(margin_top + plot_h) << "\" x2=\"" << fmt(sx(t))
            << "\" y2=\"" << fmt(margin_top + plot_h + 5)
            << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << fmt(sx(t)) << "\" y=\""
            << fmt(margin_top + plot_h + 20)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"11\">"
            << fmt(t) << "</text>\n";
    }
    const double ystep = nice_step(yr.hi - yr.lo);
    for (double t = std::ceil(yr.lo / ystep) * ystep; t <= yr.hi + 1e-12 * ystep;
         t += ystep) {
        out << "<line x1=\"" << fmt(margin_left - 5) << "\" y1=\"" << fmt(sy(t))
            << "\" x2=\"" << fmt(margin_left) << "\" y2=\"" << fmt(sy(t))
            << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << fmt(margin_left - 9) << "\" y=\""
            << fmt(sy(t) + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
               "font-size=\"11\">"
            << fmt(t) << "</text>\n";
    }

    out << "<text x=\"" << fmt(margin_left + plot_w / 2) << "\" y=\""
        << fmt(height - 14.0)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"13\">"
        << x_label << "</text>\n";
    out << "<text x=\"18\" y=\"" << fmt(margin_top + plot_h / 2)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"13\" transform=\"rotate(-90 18 "
        << fmt(margin_top + plot_h / 2) << ")\">" << y_label << "</text>\n";

    // Curves
    for (const auto& s : series) {
        if (s.xs.size() != s.ys.size())
            throw InvalidInput("series '" + s.name + "' has mismatched sizes");
        out << "<polyline fill=\"none\" stroke=\"" << s.color
            << "\" stroke-width=\"1.6\" points=\"";
        for (std::size_t i = 0; i < s.xs.size(); ++i) {
            if (i)
                out << " ";
            out << fmt(sx(s.xs[i])) << "," << fmt(sy(s.ys[i]));
        }
        out << "\"/>\n";
    }

    // Legend
    double ly = margin_top + 10;
    for (const auto& s : series) {
        const double lx = margin_left + plot_w + 14;
        out << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly) << "\" x2=\""
            << fmt(lx + 22) << "\" y2=\"" << fmt(ly) << "\" stroke=\""
            << s.color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << fmt(lx + 28) << "\" y=\"" << fmt(ly + 4)
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.name
            << "</text>\n";
        ly += 18;
    }

    out << "</svg>\n";
    return out.str();
}

}  // namespace momdens
