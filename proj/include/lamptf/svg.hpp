#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "lamptf/io.hpp"
#include "lamptf/phase.hpp"

namespace lamptf {

inline constexpr const char* kSvgGeneratorVersion = "lamptf-svg/1";

namespace detail {

struct SvgMapper {
    Window w;
    double size = 800.0;
    double margin = 70.0;

    double px(double x) const { return margin + (x - w.x0) / (w.x1 - w.x0) * (size - 2 * margin); }
    double py(double y) const { return size - margin - (y - w.y0) / (w.y1 - w.y0) * (size - 2 * margin); }
};

inline std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

/// Tick positions at a 1/2/5 decade step covering [lo, hi].
inline std::vector<double> nice_ticks(double lo, double hi, int target = 8) {
    const double range = hi - lo;
    double step = std::pow(10.0, std::floor(std::log10(range / target)));
    const double scaled = range / target / step;
    if (scaled > 5.0)
        step *= 10.0;
    else if (scaled > 2.0)
        step *= 5.0;
    else if (scaled > 1.0)
        step *= 2.0;
    std::vector<double> ticks;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-12 * range; t += step)
        ticks.push_back(std::abs(t) < 1e-12 * range ? 0.0 : t);
    return ticks;
}

inline void append_polyline(std::string& out, const SvgMapper& m,
                            const std::vector<CurveSample>& samples, const char* style) {
    if (samples.size() < 2) return;
    out += "  <polyline fill=\"none\" ";
    out += style;
    out += " points=\"";
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (i) out += ' ';
        out += svg_num(m.px(samples[i].state[0]));
        out += ',';
        out += svg_num(m.py(samples[i].state[1]));
    }
    out += "\"/>\n";
}

inline void append_glyph(std::string& out, const SvgMapper& m, const FixedPoint& fp) {
    const double x = m.px(fp.coords.x), y = m.py(fp.coords.y);
    const double r = 6.0;
    switch (fp.kind) {
        case PointKind::Saddle: // cross
            out += "  <g stroke=\"#b22222\" stroke-width=\"2.5\">\n";
            out += "    <line x1=\"" + svg_num(x - r) + "\" y1=\"" + svg_num(y - r) + "\" x2=\"" +
                   svg_num(x + r) + "\" y2=\"" + svg_num(y + r) + "\"/>\n";
            out += "    <line x1=\"" + svg_num(x - r) + "\" y1=\"" + svg_num(y + r) + "\" x2=\"" +
                   svg_num(x + r) + "\" y2=\"" + svg_num(y - r) + "\"/>\n";
            out += "  </g>\n";
            break;
        case PointKind::StableNode:
        case PointKind::UnstableNode: // disc, filled for stable
            out += "  <circle cx=\"" + svg_num(x) + "\" cy=\"" + svg_num(y) + "\" r=\"" + svg_num(r) +
                   "\" stroke=\"#1f4e9c\" stroke-width=\"2\" fill=\"" +
                   (fp.kind == PointKind::StableNode ? "#1f4e9c" : "#ffffff") + "\"/>\n";
            break;
        case PointKind::StableFocus:
        case PointKind::UnstableFocus: // spiral marker: two concentric circles
            out += "  <g stroke=\"#1f8c4e\" stroke-width=\"2\" fill=\"none\">\n";
            out += "    <circle cx=\"" + svg_num(x) + "\" cy=\"" + svg_num(y) + "\" r=\"" + svg_num(r) + "\"/>\n";
            out += "    <circle cx=\"" + svg_num(x) + "\" cy=\"" + svg_num(y) + "\" r=\"" + svg_num(r / 2) + "\"/>\n";
            out += "  </g>\n";
            break;
        case PointKind::Center:
            out += "  <circle cx=\"" + svg_num(x) + "\" cy=\"" + svg_num(y) + "\" r=\"" + svg_num(r) +
                   "\" stroke=\"#555555\" stroke-width=\"2\" fill=\"none\" stroke-dasharray=\"3 2\"/>\n";
            break;
        case PointKind::Degenerate: // square
            out += "  <rect x=\"" + svg_num(x - r) + "\" y=\"" + svg_num(y - r) + "\" width=\"" +
                   svg_num(2 * r) + "\" height=\"" + svg_num(2 * r) +
                   "\" stroke=\"#555555\" stroke-width=\"2\" fill=\"none\"/>\n";
            break;
    }
}

} // namespace detail

/// Render a portrait as a self-contained 800x800 SVG: trajectories as solid
/// polylines, nullclines dashed, equilibria as kind-keyed glyphs
/// (saddle = cross, node = disc), linear axes with tick labels.
inline std::string render_portrait_svg(const PhasePortrait& portrait) {
    const detail::SvgMapper m{portrait.window};
    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += std::string("<!-- generator: ") + kSvgGeneratorVersion + " -->\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" "
           "viewBox=\"0 0 800 800\">\n";
    out += "  <rect x=\"0\" y=\"0\" width=\"800\" height=\"800\" fill=\"#ffffff\"/>\n";
    out += "  <clipPath id=\"plot\"><rect x=\"" + detail::svg_num(m.margin) + "\" y=\"" +
           detail::svg_num(m.margin) + "\" width=\"" + detail::svg_num(m.size - 2 * m.margin) +
           "\" height=\"" + detail::svg_num(m.size - 2 * m.margin) + "\"/></clipPath>\n";

    // axes frame and ticks
    out += "  <rect x=\"" + detail::svg_num(m.margin) + "\" y=\"" + detail::svg_num(m.margin) +
           "\" width=\"" + detail::svg_num(m.size - 2 * m.margin) + "\" height=\"" +
           detail::svg_num(m.size - 2 * m.margin) + "\" fill=\"none\" stroke=\"#000000\"/>\n";
    for (double t : detail::nice_ticks(portrait.window.x0, portrait.window.x1)) {
        const double x = m.px(t);
        out += "  <line x1=\"" + detail::svg_num(x) + "\" y1=\"" + detail::svg_num(m.size - m.margin) +
               "\" x2=\"" + detail::svg_num(x) + "\" y2=\"" +
               detail::svg_num(m.size - m.margin + 6) + "\" stroke=\"#000000\"/>\n";
        out += "  <text x=\"" + detail::svg_num(x) + "\" y=\"" + detail::svg_num(m.size - m.margin + 22) +
               "\" font-size=\"13\" text-anchor=\"middle\">" + fmt_short(t) + "</text>\n";
    }
    for (double t : detail::nice_ticks(portrait.window.y0, portrait.window.y1)) {
        const double y = m.py(t);
        out += "  <line x1=\"" + detail::svg_num(m.margin - 6) + "\" y1=\"" + detail::svg_num(y) +
               "\" x2=\"" + detail::svg_num(m.margin) + "\" y2=\"" + detail::svg_num(y) +
               "\" stroke=\"#000000\"/>\n";
        out += "  <text x=\"" + detail::svg_num(m.margin - 10) + "\" y=\"" + detail::svg_num(y + 4) +
               "\" font-size=\"13\" text-anchor=\"end\">" + fmt_short(t) + "</text>\n";
    }
    out += "  <text x=\"400\" y=\"" + detail::svg_num(m.size - m.margin + 45) +
           "\" font-size=\"15\" text-anchor=\"middle\">X</text>\n";
    out += "  <text x=\"" + detail::svg_num(m.margin - 45) +
           "\" y=\"400\" font-size=\"15\" text-anchor=\"middle\">Y</text>\n";

    out += "  <g clip-path=\"url(#plot)\">\n";
    for (const auto& group : {portrait.isoclines.m_zero, portrait.isoclines.n_zero}) {
        for (const Polyline& pl : group) {
            out += "  <polyline fill=\"none\" stroke=\"#999999\" stroke-width=\"1.2\" "
                   "stroke-dasharray=\"6 4\" points=\"";
            for (std::size_t i = 0; i < pl.pts.size(); ++i) {
                if (i) out += ' ';
                out += detail::svg_num(m.px(pl.pts[i].x)) + "," + detail::svg_num(m.py(pl.pts[i].y));
            }
            out += "\"/>\n";
        }
    }
    for (const Trajectory& tr : portrait.trajectories) {
        detail::append_polyline(out, m, tr.forward.samples,
                                "stroke=\"#2b2b2b\" stroke-width=\"1\"");
        detail::append_polyline(out, m, tr.backward.samples,
                                "stroke=\"#2b2b2b\" stroke-width=\"1\"");
    }
    out += "  </g>\n";

    for (const FixedPoint& fp : portrait.points) detail::append_glyph(out, m, fp);
    out += "</svg>\n";
    return out;
}

} // namespace lamptf
