#pragma once

// Hand-written minimal SVG 1.1 polyline plots: axes, tick labels, one or
// more series, optional legend. No dependencies, byte-stable output.

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "slc/num_format.hpp"

namespace slc {

struct XY {
    double x = 0.0;
    double y = 0.0;
};

class SvgPlot {
public:
    SvgPlot(std::string title, std::string x_label, std::string y_label)
        : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

    void set_equal_aspect(bool on) { equal_aspect_ = on; }

    void add_series(std::string name, std::vector<XY> points) {
        series_.push_back({std::move(name), std::move(points)});
    }

    void write(std::ostream& os) const {
        const double w = 720.0, h = 520.0;
        const double ml = 70.0, mr = 30.0, mt = 40.0, mb = 55.0;

        double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
        bool any = false;
        for (const auto& s : series_) {
            for (const auto& p : s.points) {
                if (!any) {
                    x0 = x1 = p.x;
                    y0 = y1 = p.y;
                    any = true;
                } else {
                    x0 = std::min(x0, p.x);
                    x1 = std::max(x1, p.x);
                    y0 = std::min(y0, p.y);
                    y1 = std::max(y1, p.y);
                }
            }
        }
        if (x1 - x0 < 1e-12) { x0 -= 0.5; x1 += 0.5; }
        if (y1 - y0 < 1e-12) { y0 -= 0.5; y1 += 0.5; }
        double sx = (w - ml - mr) / (x1 - x0);
        double sy = (h - mt - mb) / (y1 - y0);
        if (equal_aspect_) {
            sx = sy = std::min(sx, sy);
        }
        const auto px = [&](double x) { return ml + (x - x0) * sx; };
        const auto py = [&](double y) { return h - mb - (y - y0) * sy; };

        os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
           << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
           << format_fixed(w, 0) << "\" height=\"" << format_fixed(h, 0) << "\">\n"
           << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        os << "<text x=\"" << format_fixed(w / 2.0, 1) << "\" y=\"22\" text-anchor=\"middle\" "
              "font-family=\"sans-serif\" font-size=\"15\">" << title_ << "</text>\n";

        // Axes.
        os << "<line x1=\"" << format_fixed(ml, 1) << "\" y1=\"" << format_fixed(h - mb, 1)
           << "\" x2=\"" << format_fixed(w - mr, 1) << "\" y2=\"" << format_fixed(h - mb, 1)
           << "\" stroke=\"black\"/>\n";
        os << "<line x1=\"" << format_fixed(ml, 1) << "\" y1=\"" << format_fixed(mt, 1)
           << "\" x2=\"" << format_fixed(ml, 1) << "\" y2=\"" << format_fixed(h - mb, 1)
           << "\" stroke=\"black\"/>\n";

        // Tick labels at the data extremes.
        os << "<text x=\"" << format_fixed(px(x0), 1) << "\" y=\"" << format_fixed(h - mb + 18, 1)
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
           << format_g15(x0) << "</text>\n";
        os << "<text x=\"" << format_fixed(px(x1), 1) << "\" y=\"" << format_fixed(h - mb + 18, 1)
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
           << format_g15(x1) << "</text>\n";
        os << "<text x=\"" << format_fixed(ml - 8, 1) << "\" y=\"" << format_fixed(py(y0) + 4, 1)
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
           << format_g15(y0) << "</text>\n";
        os << "<text x=\"" << format_fixed(ml - 8, 1) << "\" y=\"" << format_fixed(py(y1) + 4, 1)
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
           << format_g15(y1) << "</text>\n";

        // Axis labels.
        os << "<text x=\"" << format_fixed((ml + w - mr) / 2.0, 1) << "\" y=\""
           << format_fixed(h - 14, 1)
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label_
           << "</text>\n";
        os << "<text x=\"18\" y=\"" << format_fixed((mt + h - mb) / 2.0, 1)
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
              "transform=\"rotate(-90 18 " << format_fixed((mt + h - mb) / 2.0, 1) << ")\">"
           << y_label_ << "</text>\n";

        static const char* kColors[] = {"#1f5fbf", "#c23b22", "#2a8c55", "#8450a8"};
        std::size_t ci = 0;
        for (const auto& s : series_) {
            const char* color = kColors[ci % 4];
            if (s.points.size() >= 2) {
                os << "<polyline fill=\"none\" stroke=\"" << color
                   << "\" stroke-width=\"1.5\" points=\"";
                for (std::size_t i = 0; i < s.points.size(); ++i) {
                    if (i) os << ' ';
                    os << format_fixed(px(s.points[i].x), 2) << ','
                       << format_fixed(py(s.points[i].y), 2);
                }
                os << "\"/>\n";
            }
            if (!s.name.empty()) {
                const double ly = mt + 16.0 * static_cast<double>(ci);
                os << "<rect x=\"" << format_fixed(w - mr - 130, 1) << "\" y=\""
                   << format_fixed(ly - 9, 1) << "\" width=\"10\" height=\"10\" fill=\"" << color
                   << "\"/>\n";
                os << "<text x=\"" << format_fixed(w - mr - 115, 1) << "\" y=\""
                   << format_fixed(ly, 1)
                   << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.name << "</text>\n";
            }
            ++ci;
        }
        os << "</svg>\n";
    }

private:
    struct Series {
        std::string name;
        std::vector<XY> points;
    };

    std::string title_;
    std::string x_label_;
    std::string y_label_;
    bool equal_aspect_ = false;
    std::vector<Series> series_;
};

}  // namespace slc
