#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "p2pir/common/errors.hpp"

namespace p2pir::tools {

namespace {

constexpr double kWidth = 720, kHeight = 440;
constexpr double kLeft = 80, kRight = 180, kTop = 40, kBottom = 60;
const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fmt(double v) {
    std::ostringstream o;
    o.precision(4);
    o << v;
    return o.str();
}

struct Axis {
    double lo, hi;
    bool log;
    double map(double v, double a, double b) const {
        double t;
        if (log) t = (std::log10(v) - std::log10(lo)) / (std::log10(hi) - std::log10(lo));
        else t = (v - lo) / (hi - lo);
        return a + t * (b - a);
    }
};

Axis axis_for(const Plot& p, bool x, bool log) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& s : p.series)
        for (double v : x ? s.xs : s.ys) {
            if (log && v <= 0) continue;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    if (!std::isfinite(lo)) lo = log ? 1 : 0, hi = lo + 1;
    if (!log && !x) lo = std::min(lo, 0.0);
    if (hi == lo) hi = lo + (log ? lo : 1);
    return {lo, hi, log};
}

}  // namespace

std::string render_svg(const Plot& plot) {
    const Axis ax = axis_for(plot, true, plot.log_x);
    const Axis ay = axis_for(plot, false, plot.log_y);
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(plot.title)
      << "</text>\n";
    o << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0 << "\" stroke=\"black\"/>\n";
    o << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1 << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double f = i / 4.0;
        const double xv = ax.log ? std::pow(10, std::log10(ax.lo) + f * (std::log10(ax.hi) - std::log10(ax.lo)))
                                 : ax.lo + f * (ax.hi - ax.lo);
        const double yv = ay.log ? std::pow(10, std::log10(ay.lo) + f * (std::log10(ay.hi) - std::log10(ay.lo)))
                                 : ay.lo + f * (ay.hi - ay.lo);
        const double px = x0 + f * (x1 - x0), py = y0 + f * (y1 - y0);
        o << "<text x=\"" << px << "\" y=\"" << y0 + 18 << "\" text-anchor=\"middle\">" << fmt(xv) << "</text>\n";
        o << "<text x=\"" << x0 - 6 << "\" y=\"" << py + 4 << "\" text-anchor=\"end\">" << fmt(yv) << "</text>\n";
        o << "<line x1=\"" << x0 << "\" y1=\"" << py << "\" x2=\"" << x1 << "\" y2=\"" << py
          << "\" stroke=\"#ddd\"/>\n";
    }
    o << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 18 << "\" text-anchor=\"middle\">"
      << escape(plot.x_label) << "</text>\n";
    o << "<text transform=\"translate(18," << (y0 + y1) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(plot.y_label) << "</text>\n";
    for (std::size_t si = 0; si < plot.series.size(); ++si) {
        const Series& s = plot.series[si];
        const char* color = kColors[si % std::size(kColors)];
        std::ostringstream pts;
        for (std::size_t i = 0; i < std::min(s.xs.size(), s.ys.size()); ++i) {
            if ((ax.log && s.xs[i] <= 0) || (ay.log && s.ys[i] <= 0)) continue;
            const double px = ax.map(s.xs[i], x0, x1), py = ay.map(s.ys[i], y0, y1);
            pts << px << "," << py << " ";
            o << "<circle cx=\"" << px << "\" cy=\"" << py << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"" << pts.str()
          << "\"/>\n";
        const double ly = kTop + 20 + 18 * static_cast<double>(si);
        o << "<rect x=\"" << x1 + 16 << "\" y=\"" << ly - 9 << "\" width=\"12\" height=\"12\" fill=\"" << color
          << "\"/>\n";
        o << "<text x=\"" << x1 + 34 << "\" y=\"" << ly + 1 << "\">" << escape(s.name) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

void write_svg(const std::string& path, const Plot& plot) {
    std::ofstream f(path);
    if (!f) throw InvalidArgument("cannot write " + path);
    f << render_svg(plot);
}

}  // namespace p2pir::tools
