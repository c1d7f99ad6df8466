#include "fbip/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "fbip/errors.hpp"

namespace fbip {

namespace {

std::string tick_label(double v) {
    std::ostringstream os;
    os << std::setprecision(4) << std::defaultfloat << v;
    return os.str();
}

}  // namespace

void write_line_plot_svg(const std::string& path, const std::vector<double>& x,
                         const std::vector<double>& y, const std::string& title,
                         const std::string& x_label, const std::string& y_label) {
    if (x.size() != y.size()) throw IoError("write_line_plot_svg: x/y size mismatch");

    const int width = 860, height = 520;
    const int ml = 80, mr = 25, mt = 45, mb = 55;
    const double pw = width - ml - mr, ph = height - mt - mb;

    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    if (!x.empty()) {
        xmin = *std::min_element(x.begin(), x.end());
        xmax = *std::max_element(x.begin(), x.end());
        ymin = *std::min_element(y.begin(), y.end());
        ymax = *std::max_element(y.begin(), y.end());
    }
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) {
        ymax += 0.5 * std::max(1e-12, std::abs(ymax));
        ymin -= 0.5 * std::max(1e-12, std::abs(ymin));
        if (ymax == ymin) { ymax = ymin + 1.0; }
    }
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto px = [&](double v) { return ml + (v - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double v) { return mt + (ymax - v) / (ymax - ymin) * ph; };

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("write_line_plot_svg: cannot open '" + path + "'");
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" font-family=\"sans-serif\" font-size=\"13\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        << title << "</text>\n";

    // Frame + ticks.
    out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    const int nticks = 5;
    for (int i = 0; i <= nticks; ++i) {
        const double fx = xmin + (xmax - xmin) * i / nticks;
        const double fy = ymin + (ymax - ymin) * i / nticks;
        out << "<line x1=\"" << px(fx) << "\" y1=\"" << mt + ph << "\" x2=\"" << px(fx)
            << "\" y2=\"" << mt + ph + 5 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << px(fx) << "\" y=\"" << mt + ph + 20
            << "\" text-anchor=\"middle\">" << tick_label(fx) << "</text>\n";
        out << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(fy) << "\" x2=\"" << ml << "\" y2=\""
            << py(fy) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << ml - 8 << "\" y=\"" << py(fy) + 4 << "\" text-anchor=\"end\">"
            << tick_label(fy) << "</text>\n";
    }
    out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
    out << "<text x=\"18\" y=\"" << mt + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
        << mt + ph / 2 << ")\">" << y_label << "</text>\n";

    if (!x.empty()) {
        // Decimate very long series; a plot does not need 10^6 vertices.
        const std::size_t max_points = 4000;
        const std::size_t stride = std::max<std::size_t>(1, x.size() / max_points);
        out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1\" points=\"";
        for (std::size_t i = 0; i < x.size(); i += stride)
            out << px(x[i]) << "," << py(y[i]) << " ";
        if ((x.size() - 1) % stride != 0)
            out << px(x.back()) << "," << py(y.back());
        out << "\"/>\n";
    }
    out << "</svg>\n";
    if (!out) throw IoError("write_line_plot_svg: write failure on '" + path + "'");
}

}  // namespace fbip
