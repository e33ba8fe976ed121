#include "occsim/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace occsim {

namespace {

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace

void write_sweep_svg(std::ostream& out, const SweepTable& table, const std::string& title) {
    const int width = 720, height = 480;
    const double ml = 80, mr = 20, mt = 40, mb = 60;
    const double pw = width - ml - mr, ph = height - mt - mb;

    double xmin = std::numeric_limits<double>::max(), xmax = std::numeric_limits<double>::lowest();
    double ymin = std::numeric_limits<double>::max(), ymax = std::numeric_limits<double>::lowest();
    const std::size_t ncols = table.columns.size();
    for (const auto& row : table.rows) {
        xmin = std::min(xmin, row[0]);
        xmax = std::max(xmax, row[0]);
        for (std::size_t c = 1; c < ncols && c < row.size(); ++c) {
            if (table.columns[c] == "samples") continue;
            ymin = std::min(ymin, row[c]);
            ymax = std::max(ymax, row[c]);
        }
    }
    if (table.rows.empty() || xmin == xmax) { xmin = 0; xmax = 1; }
    if (ymin >= ymax) { ymin = 0; ymax = 1; }
    const double ypad = (ymax - ymin) * 0.05;
    ymin -= ypad;
    ymax += ypad;

    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return mt + ph - (y - ymin) / (ymax - ymin) * ph; };

    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
        << "' viewBox='0 0 " << width << ' ' << height << "'>\n"
        << "<rect width='100%' height='100%' fill='white'/>\n"
        << "<text x='" << width / 2 << "' y='24' text-anchor='middle' font-size='16'>" << title
        << "</text>\n"
        << "<rect x='" << ml << "' y='" << mt << "' width='" << pw << "' height='" << ph
        << "' fill='none' stroke='#333'/>\n";

    for (int i = 0; i <= 5; ++i) {
        const double fx = xmin + (xmax - xmin) * i / 5.0;
        const double fy = ymin + (ymax - ymin) * i / 5.0;
        out << "<line x1='" << num(px(fx)) << "' y1='" << mt << "' x2='" << num(px(fx)) << "' y2='"
            << mt + ph << "' stroke='#ddd'/>\n"
            << "<text x='" << num(px(fx)) << "' y='" << mt + ph + 18
            << "' text-anchor='middle' font-size='11'>" << num(fx) << "</text>\n"
            << "<line x1='" << ml << "' y1='" << num(py(fy)) << "' x2='" << ml + pw << "' y2='"
            << num(py(fy)) << "' stroke='#ddd'/>\n"
            << "<text x='" << ml - 6 << "' y='" << num(py(fy) + 4)
            << "' text-anchor='end' font-size='11'>" << num(fy) << "</text>\n";
    }
    out << "<text x='" << width / 2 << "' y='" << height - 14
        << "' text-anchor='middle' font-size='13'>" << table.parameter << "</text>\n";

    int color = 0;
    for (std::size_t c = 1; c < ncols; ++c) {
        if (table.columns[c] == "samples") continue;
        out << "<polyline fill='none' stroke='" << kColors[color % 6] << "' stroke-width='2' points='";
        for (const auto& row : table.rows)
            if (c < row.size()) out << num(px(row[0])) << ',' << num(py(row[c])) << ' ';
        out << "'/>\n";
        out << "<text x='" << ml + 10 << "' y='" << mt + 16 + 14 * color << "' font-size='11' fill='"
            << kColors[color % 6] << "'>" << table.columns[c] << "</text>\n";
        ++color;
    }
    out << "</svg>\n";
}

} // namespace occsim
