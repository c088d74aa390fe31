#ifndef CSPIN_SVG_HPP
#define CSPIN_SVG_HPP

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "io.hpp"

// Minimal self-contained SVG line plots: axes, ticks, polylines, legend.

namespace cspin {

struct PlotSeries {
    std::string label;
    std::vector<double> x, y;
};

struct LinePlot {
    std::string title, xlabel, ylabel;
    bool log_x = false;
    std::vector<PlotSeries> series;
    int width = 720, height = 480;

    void add(const std::string& label, const std::vector<double>& x, const std::vector<double>& y) {
        series.push_back({label, x, y});
    }

    std::string render() const;
};

namespace detail {

inline std::vector<double> nice_ticks(double lo, double hi, int target = 6) {
    std::vector<double> t;
    if (!(hi > lo)) return {lo};
    const double raw = (hi - lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (raw <= m * mag) {
            step = m * mag;
            break;
        }
    const double first = std::ceil(lo / step) * step;
    for (double v = first; v <= hi + 1e-9 * step; v += step) t.push_back(v);
    return t;
}

inline std::string tick_label(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

} // namespace detail

inline std::string LinePlot::render() const {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                    "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};
    const int ml = 70, mr = 20, mt = 40, mb = 55;
    const double pw = width - ml - mr, ph = height - mt - mb;

    double xlo = 0, xhi = 1, ylo = 0, yhi = 1;
    bool have = false;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            double xv = s.x[i];
            if (log_x) {
                if (!(xv > 0)) continue;
                xv = std::log10(xv);
            }
            if (!std::isfinite(xv) || !std::isfinite(s.y[i])) continue;
            if (!have) {
                xlo = xhi = xv;
                ylo = yhi = s.y[i];
                have = true;
            }
            xlo = std::min(xlo, xv); xhi = std::max(xhi, xv);
            ylo = std::min(ylo, s.y[i]); yhi = std::max(yhi, s.y[i]);
        }
    if (xhi - xlo < 1e-300) { xlo -= 0.5; xhi += 0.5; }
    if (yhi - ylo < 1e-300) { ylo -= 0.5; yhi += 0.5; }
    const double ypad = 0.05 * (yhi - ylo);
    ylo -= ypad; yhi += ypad;

    auto px = [&](double x) { return ml + pw * (x - xlo) / (xhi - xlo); };
    auto py = [&](double y) { return mt + ph * (1.0 - (y - ylo) / (yhi - ylo)); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
       << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<g font-family=\"sans-serif\" font-size=\"13\">\n";
    os << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"16\">"
       << title << "</text>\n";

    os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t : detail::nice_ticks(xlo, xhi)) {
        const double x = px(t);
        os << "<line x1=\"" << x << "\" y1=\"" << mt + ph << "\" x2=\"" << x << "\" y2=\""
           << mt + ph + 5 << "\" stroke=\"black\"/>\n";
        std::string lbl = log_x ? ("1e" + detail::tick_label(t)) : detail::tick_label(t);
        os << "<text x=\"" << x << "\" y=\"" << mt + ph + 20 << "\" text-anchor=\"middle\">" << lbl
           << "</text>\n";
    }
    for (double t : detail::nice_ticks(ylo, yhi)) {
        const double y = py(t);
        os << "<line x1=\"" << ml - 5 << "\" y1=\"" << y << "\" x2=\"" << ml << "\" y2=\"" << y
           << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << ml - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">"
           << detail::tick_label(t) << "</text>\n";
    }
    os << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 12
       << "\" text-anchor=\"middle\">" << xlabel << "</text>\n";
    os << "<text x=\"18\" y=\"" << mt + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
       << mt + ph / 2 << ")\">" << ylabel << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = palette[si % 10];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            double xv = s.x[i];
            if (log_x) {
                if (!(xv > 0)) continue;
                xv = std::log10(xv);
            }
            if (!std::isfinite(xv) || !std::isfinite(s.y[i])) continue;
            os << px(xv) << ',' << py(s.y[i]) << ' ';
        }
        os << "\"/>\n";
    }

    // legend (only labeled series)
    int li = 0;
    for (std::size_t si = 0; si < series.size(); ++si) {
        if (series[si].label.empty()) continue;
        const double y = mt + 14 + 16 * li++;
        os << "<line x1=\"" << ml + pw - 140 << "\" y1=\"" << y << "\" x2=\"" << ml + pw - 115
           << "\" y2=\"" << y << "\" stroke=\"" << palette[si % 10] << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << ml + pw - 110 << "\" y=\"" << y + 4 << "\">" << series[si].label
           << "</text>\n";
    }

    os << "</g>\n</svg>\n";
    return os.str();
}

inline void write_plot(const std::string& path, const LinePlot& plot) {
    write_file(path, plot.render());
}

} // namespace cspin

#endif
