#pragma once

#include <algorithm>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "capcover/core.hpp"
#include "capcover/instance.hpp"
#include "capcover/solution.hpp"

namespace capcover {

// Renders a planar instance (and optionally a solution) as an SVG figure:
// every ball a circle, points as dots, selected balls emphasized, integral
// assignments drawn as segments, and any expanded ball outlined dashed at
// its realized serving radius.
inline std::string render_svg(const MetricInstance& inst,
                              const RoundedSolution* sol = nullptr) {
    if (!inst.euclidean() || inst.euclid().dim != 2)
        throw input_error("plot needs a 2-dimensional euclidean instance");
    const auto& g = inst.euclid();

    double lo_x = 1e300, lo_y = 1e300, hi_x = -1e300, hi_y = -1e300;
    auto grow = [&](double x, double y, double pad) {
        lo_x = std::min(lo_x, x - pad);
        lo_y = std::min(lo_y, y - pad);
        hi_x = std::max(hi_x, x + pad);
        hi_y = std::max(hi_y, y + pad);
    };
    for (const auto& p : g.points) grow(p[0], p[1], 0.0);
    std::vector<double> draw_radius(inst.num_balls());
    for (int i = 0; i < inst.num_balls(); ++i)
        draw_radius[i] = inst.balls[i].radius;
    if (sol)
        for (size_t s = 0; s < sol->selected.size(); ++s)
            draw_radius[sol->selected[s]] =
                std::max(draw_radius[sol->selected[s]],
                         sol->expansion[s] * inst.balls[sol->selected[s]].radius);
    for (int i = 0; i < inst.num_balls(); ++i) {
        const auto& c = g.centers[inst.balls[i].center];
        grow(c[0], c[1], draw_radius[i]);
    }
    double span = std::max(hi_x - lo_x, hi_y - lo_y);
    if (span <= 0) span = 1.0;
    const double margin = 0.05 * span;
    lo_x -= margin;
    lo_y -= margin;
    span += 2 * margin;
    const double stroke = span / 400.0;
    const double dot = span / 200.0;

    std::vector<char> is_selected(inst.num_balls(), 0);
    std::vector<double> beta(inst.num_balls(), 1.0);
    if (sol)
        for (size_t s = 0; s < sol->selected.size(); ++s) {
            is_selected[sol->selected[s]] = 1;
            beta[sol->selected[s]] = sol->expansion[s];
        }

    std::string out;
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" "
                  "viewBox=\"%.6f %.6f %.6f %.6f\">\n",
                  lo_x, lo_y, span, span);
    out += buf;

    if (sol) {
        for (int j = 0; j < inst.num_points(); ++j) {
            int i = sol->assignment[j];
            if (i < 0 || i >= inst.num_balls()) continue;
            const auto& p = g.points[j];
            const auto& c = g.centers[inst.balls[i].center];
            std::snprintf(buf, sizeof buf,
                          "<line class=\"assign\" x1=\"%.6f\" y1=\"%.6f\" x2=\"%.6f\" "
                          "y2=\"%.6f\" stroke=\"#7799cc\" stroke-width=\"%.6f\"/>\n",
                          p[0], p[1], c[0], c[1], stroke * 0.6);
            out += buf;
        }
    }
    for (int i = 0; i < inst.num_balls(); ++i) {
        const auto& c = g.centers[inst.balls[i].center];
        const char* color = is_selected[i] ? "#cc3333" : "#999999";
        double width = is_selected[i] ? stroke * 2.0 : stroke;
        std::snprintf(buf, sizeof buf,
                      "<circle class=\"ball\" cx=\"%.6f\" cy=\"%.6f\" r=\"%.6f\" "
                      "fill=\"none\" stroke=\"%s\" stroke-width=\"%.6f\"/>\n",
                      c[0], c[1], inst.balls[i].radius, color, width);
        out += buf;
        if (is_selected[i] && beta[i] > 1.0 + 1e-9) {
            std::snprintf(buf, sizeof buf,
                          "<circle class=\"expanded\" cx=\"%.6f\" cy=\"%.6f\" r=\"%.6f\" "
                          "fill=\"none\" stroke=\"#cc3333\" stroke-width=\"%.6f\" "
                          "stroke-dasharray=\"%.6f %.6f\"/>\n",
                          c[0], c[1], beta[i] * inst.balls[i].radius, stroke, 3 * stroke,
                          3 * stroke);
            out += buf;
        }
    }
    for (int j = 0; j < inst.num_points(); ++j) {
        const auto& p = g.points[j];
        std::snprintf(buf, sizeof buf,
                      "<circle class=\"pt\" cx=\"%.6f\" cy=\"%.6f\" r=\"%.6f\" fill=\"#222222\"/>\n",
                      p[0], p[1], dot);
        out += buf;
    }
    out += "</svg>\n";
    return out;
}

}  // namespace capcover
