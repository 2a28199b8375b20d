#pragma once

#include <string>
#include <vector>

namespace p2pir::tools {

struct Series {
    std::string name;
    std::vector<double> xs;
    std::vector<double> ys;
};

struct Plot {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    std::vector<Series> series;
};

// Static line chart with markers, axes, min/max tick labels and a legend.
std::string render_svg(const Plot& plot);
void write_svg(const std::string& path, const Plot& plot);

}  // namespace p2pir::tools
