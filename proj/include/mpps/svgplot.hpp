#pragma once

#include <string>
#include <vector>

namespace mpps::svg {

struct Series {
    std::string label;
    std::vector<double> x, y;
};

struct PlotSpec {
    std::string title, xlabel, ylabel;
    std::vector<Series> series;
};

// Self-contained SVG line plot (axes, ticks, legend, fixed palette).  Series
// longer than a couple thousand points are thinned by striding; the plots are
// illustrations, not data carriers — the CSVs hold the full resolution.
std::string render_plot(const PlotSpec& spec, int width = 900, int height = 540);

// Horizontal row of square panels (used for coordinate-plane projections).
std::string render_panels(const std::vector<PlotSpec>& panels, int panel_width = 420,
                          int panel_height = 420);

} // namespace mpps::svg
