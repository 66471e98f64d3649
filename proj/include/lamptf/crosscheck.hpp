#pragma once

// Brute-force cross-check for the shooting solver: classical fixed-step RK4
// plus plain bisection, sharing nothing with the adaptive integrator or the
// event machinery. Deliberately simple; used by tests and the reproduction
// suite as an independent route to the critical slope.

#include <cmath>

#include "lamptf/error.hpp"

namespace lamptf::crosscheck {

/// -1 undershoot (y crossed zero), +1 overshoot (y' turned positive),
/// 0 monotone to x_max.
/// Steps are h except in the start-up layer, where they are capped at x/50 so
/// the x^{-q} scale is resolved (plain h across [x0, h] would sample the
/// singular acceleration only at its left edge).
inline int rk4_shot_kind(double p, double B, double x_max, double h) {
    const double q = p / (p + 1.0);
    const double x0 = 1e-6;
    // two-term start-up expansion, written out locally on purpose
    double y = 1.0 + B * x0 + std::pow(x0, 2.0 - q) / ((1.0 - q) * (2.0 - q));
    double v = B + std::pow(x0, 1.0 - q) / (1.0 - q);
    auto acc = [q](double x, double yy) {
        return std::pow(x, -q) * std::pow(yy > 0.0 ? yy : 0.0, 1.0 + q);
    };
    double x = x0;
    while (x < x_max) {
        const double hh = std::min({h, x / 50.0, x_max - x});
        const double k1y = v, k1v = acc(x, y);
        const double k2y = v + 0.5 * hh * k1v, k2v = acc(x + 0.5 * hh, y + 0.5 * hh * k1y);
        const double k3y = v + 0.5 * hh * k2v, k3v = acc(x + 0.5 * hh, y + 0.5 * hh * k2y);
        const double k4y = v + hh * k3v, k4v = acc(x + hh, y + hh * k3y);
        y += hh / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        v += hh / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        x += hh;
        if (y <= 0.0) return -1;
        if (v >= 0.0) return +1;
    }
    return 0;
}

/// Critical slope by bisection on the RK4 trichotomy.
inline double critical_slope_rk4(double p, double x_max = 100.0, double h = 2e-4,
                                 double tol = 1e-8) {
    double lo = std::nan(""), hi = std::nan("");
    for (double B = -10.0; B <= 0.25; B += 0.5) {
        const int k = rk4_shot_kind(p, B, x_max, h);
        if (k < 0) lo = B;
        if (k > 0 && !std::isnan(lo)) {
            hi = B;
            break;
        }
    }
    if (std::isnan(lo) || std::isnan(hi))
        throw BracketError("critical_slope_rk4: no bracket in [-10, 0]");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const int k = rk4_shot_kind(p, mid, x_max, h);
        if (k < 0)
            lo = mid;
        else if (k > 0)
            hi = mid;
        else
            break; // monotone to x_max: bracket already tighter than it can resolve
    }
    return 0.5 * (lo + hi);
}

} // namespace lamptf::crosscheck
