#include "mpps/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace mpps::svg {

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};
constexpr std::size_t kMaxPointsPerSeries = 2400;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string fmt_px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    void finish() {
        if (!(lo <= hi)) {
            lo = 0.0;
            hi = 1.0;
        }
        if (hi - lo < 1e-12) {
            double c = 0.5 * (lo + hi);
            lo = c - 0.5;
            hi = c + 0.5;
        }
        double pad = 0.04 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
};

// Tick spacing of the form {1,2,5}*10^k giving roughly `target` intervals.
double tick_step(double lo, double hi, int target) {
    double raw = (hi - lo) / target;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (raw <= m * mag * (1.0 + 1e-12)) return m * mag;
    return 10.0 * mag;
}

void render_into(std::string& out, const PlotSpec& spec, int width, int height, double ox,
                 double oy) {
    const double ml = 58, mr = 16, mt = spec.title.empty() ? 14 : 34, mb = 42;
    const double px0 = ox + ml, px1 = ox + width - mr;
    const double py0 = oy + height - mb, py1 = oy + mt; // y axis points up

    Range rx, ry;
    for (const Series& s : spec.series) {
        for (double v : s.x) rx.add(v);
        for (double v : s.y) ry.add(v);
    }
    rx.finish();
    ry.finish();

    auto X = [&](double v) { return px0 + (v - rx.lo) / (rx.hi - rx.lo) * (px1 - px0); };
    auto Y = [&](double v) { return py0 - (v - ry.lo) / (ry.hi - ry.lo) * (py0 - py1); };

    out += "<rect x=\"" + fmt_px(ox) + "\" y=\"" + fmt_px(oy) + "\" width=\"" +
           std::to_string(width) + "\" height=\"" + std::to_string(height) +
           "\" fill=\"white\" stroke=\"none\"/>\n";

    // Gridlines and ticks.
    double sx = tick_step(rx.lo, rx.hi, 8), sy = tick_step(ry.lo, ry.hi, 6);
    for (double v = std::ceil(rx.lo / sx) * sx; v <= rx.hi + 1e-12 * sx; v += sx) {
        out += "<line x1=\"" + fmt_px(X(v)) + "\" y1=\"" + fmt_px(py0) + "\" x2=\"" + fmt_px(X(v)) +
               "\" y2=\"" + fmt_px(py1) + "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
        out += "<text x=\"" + fmt_px(X(v)) + "\" y=\"" + fmt_px(py0 + 16) +
               "\" font-size=\"11\" text-anchor=\"middle\" fill=\"#444\">" + fmt(v) + "</text>\n";
    }
    for (double v = std::ceil(ry.lo / sy) * sy; v <= ry.hi + 1e-12 * sy; v += sy) {
        out += "<line x1=\"" + fmt_px(px0) + "\" y1=\"" + fmt_px(Y(v)) + "\" x2=\"" + fmt_px(px1) +
               "\" y2=\"" + fmt_px(Y(v)) + "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
        out += "<text x=\"" + fmt_px(px0 - 6) + "\" y=\"" + fmt_px(Y(v) + 4) +
               "\" font-size=\"11\" text-anchor=\"end\" fill=\"#444\">" + fmt(v) + "</text>\n";
    }

    // Axes frame.
    out += "<rect x=\"" + fmt_px(px0) + "\" y=\"" + fmt_px(py1) + "\" width=\"" +
           fmt_px(px1 - px0) + "\" height=\"" + fmt_px(py0 - py1) +
           "\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n";

    // Data.
    for (std::size_t si = 0; si < spec.series.size(); ++si) {
        const Series& s = spec.series[si];
        std::size_t n = std::min(s.x.size(), s.y.size());
        if (n < 2) continue;
        std::size_t stride = (n + kMaxPointsPerSeries - 1) / kMaxPointsPerSeries;
        std::string pts;
        for (std::size_t j = 0; j < n; j += stride) {
            pts += fmt_px(X(s.x[j])) + "," + fmt_px(Y(s.y[j])) + " ";
        }
        if ((n - 1) % stride != 0) pts += fmt_px(X(s.x[n - 1])) + "," + fmt_px(Y(s.y[n - 1]));
        out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" +
               kPalette[si % 6] + "\" stroke-width=\"1.3\"/>\n";
    }

    // Legend (top-right inside the frame).
    double ly = py1 + 14;
    for (std::size_t si = 0; si < spec.series.size(); ++si) {
        if (spec.series[si].label.empty()) continue;
        out += "<line x1=\"" + fmt_px(px1 - 120) + "\" y1=\"" + fmt_px(ly - 4) + "\" x2=\"" +
               fmt_px(px1 - 96) + "\" y2=\"" + fmt_px(ly - 4) + "\" stroke=\"" + kPalette[si % 6] +
               "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + fmt_px(px1 - 90) + "\" y=\"" + fmt_px(ly) +
               "\" font-size=\"12\" fill=\"#222\">" + spec.series[si].label + "</text>\n";
        ly += 16;
    }

    if (!spec.title.empty())
        out += "<text x=\"" + fmt_px(ox + width / 2.0) + "\" y=\"" + fmt_px(oy + 20) +
               "\" font-size=\"14\" text-anchor=\"middle\" fill=\"#111\">" + spec.title +
               "</text>\n";
    if (!spec.xlabel.empty())
        out += "<text x=\"" + fmt_px((px0 + px1) / 2.0) + "\" y=\"" + fmt_px(py0 + 34) +
               "\" font-size=\"12\" text-anchor=\"middle\" fill=\"#222\">" + spec.xlabel +
               "</text>\n";
    if (!spec.ylabel.empty())
        out += "<text x=\"" + fmt_px(ox + 14) + "\" y=\"" + fmt_px((py0 + py1) / 2.0) +
               "\" font-size=\"12\" text-anchor=\"middle\" fill=\"#222\" transform=\"rotate(-90 " +
               fmt_px(ox + 14) + " " + fmt_px((py0 + py1) / 2.0) + ")\">" + spec.ylabel +
               "</text>\n";
}

std::string document(int width, int height, const std::string& body) {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" "
           "width=\"" +
           std::to_string(width) + "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " +
           std::to_string(width) + " " + std::to_string(height) + "\">\n" + body + "</svg>\n";
}

} // namespace

std::string render_plot(const PlotSpec& spec, int width, int height) {
    std::string body;
    render_into(body, spec, width, height, 0, 0);
    return document(width, height, body);
}

std::string render_panels(const std::vector<PlotSpec>& panels, int panel_width, int panel_height) {
    std::string body;
    int ox = 0;
    for (const PlotSpec& p : panels) {
        render_into(body, p, panel_width, panel_height, ox, 0);
        ox += panel_width;
    }
    return document(panel_width * static_cast<int>(panels.size()), panel_height, body);
}

} // namespace mpps::svg
