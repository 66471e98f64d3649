#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <utility>
#include <vector>

#include "lamptf/error.hpp"
#include "lamptf/family.hpp"
#include "lamptf/integrate.hpp"

namespace lamptf {

/// Two-term start-up expansion off the singular origin:
///   y(x0)  = 1 + B x0 + x0^{2-q} / ((1-q)(2-q))
///   y'(x0) = B + x0^{1-q} / (1-q)
/// valid because q < 1 makes y'' integrable; the truncation error is
/// o(x0^{2-q}) (next orders are O(x0^{3-q}) and O(x0^{3-2q})).
struct SeriesStart {
    double y;
    double dy;
};

inline SeriesStart series_start(double p, double B, double x0) {
    if (std::isnan(p) || p <= 0.0 || std::isinf(p))
        throw ParameterError("series_start: requires finite p > 0");
    if (!(x0 > 0.0)) throw SingularError("series_start: x0 must be positive (origin is singular)");
    const double q = p / (p + 1.0);
    const double y = 1.0 + B * x0 + std::pow(x0, 2.0 - q) / ((1.0 - q) * (2.0 - q));
    const double dy = B + std::pow(x0, 1.0 - q) / (1.0 - q);
    return SeriesStart{y, dy};
}

enum class ShotKind { Undershoot, Overshoot, Monotone };

inline const char* to_string(ShotKind k) {
    switch (k) {
        case ShotKind::Undershoot: return "Undershoot";
        case ShotKind::Overshoot: return "Overshoot";
        case ShotKind::Monotone: return "Monotone";
    }
    return "?";
}

struct ShotOutcome {
    ShotKind kind;
    double x_mark; ///< zero crossing, turning point, or x_max
    SolutionCurve curve;
};

struct ShootOptions {
    double x0 = 1e-6;
    double rtol = 1e-10;
    double atol = 1e-14;
};

/// One shot of the slope-B trajectory. Events on y = 0 (undershoot) and
/// y' = 0 (overshoot); divergence of the overshoot branch is terminated by
/// the integrator's overflow bound and classified as Overshoot.
inline ShotOutcome shoot(double p, double B, double x_max, const ShootOptions& opt = {}) {
    if (std::isnan(p) || p <= 0.0 || std::isinf(p))
        throw ParameterError("shoot: requires finite p > 0");
    if (!(x_max > opt.x0)) throw ParameterError("shoot: x_max must exceed the series-start offset");

    const double q = p / (p + 1.0);
    const SeriesStart s0 = series_start(p, B, opt.x0);

    IVProblem prob;
    // y is clamped at 0 inside trial stages; the y = 0 event ends the run
    // before the clamp matters for the stored solution.
    prob.rhs = [q](double x, std::span<const double> y, std::span<double> f) {
        f[0] = y[1];
        f[1] = std::pow(x, -q) * std::pow(std::max(y[0], 0.0), 1.0 + q);
    };
    prob.t0 = opt.x0;
    prob.t_end = x_max;
    prob.state0 = {s0.y, s0.dy};
    prob.rtol = opt.rtol;
    prob.atol = opt.atol;

    if (s0.dy >= 0.0) {
        // slope already nonnegative at the start: convexity keeps it so
        SolutionCurve c;
        std::vector<double> f(2);
        prob.rhs(opt.x0, prob.state0, f);
        c.samples.push_back({opt.x0, prob.state0, f});
        c.status = SolveStatus::EventStopped;
        c.event_info = {{opt.x0, 1}};
        return ShotOutcome{ShotKind::Overshoot, opt.x0, std::move(c)};
    }

    const std::array<EventFn, 2> events = {
        [](double, std::span<const double> y) { return y[0]; },
        [](double, std::span<const double> y) { return y[1]; },
    };
    SolutionCurve curve = integrate_ivp(prob, events);

    switch (curve.status) {
        case SolveStatus::EventStopped: {
            const auto [t_event, which] = *curve.event_info;
            if (which == 0) return ShotOutcome{ShotKind::Undershoot, t_event, std::move(curve)};
            return ShotOutcome{ShotKind::Overshoot, t_event, std::move(curve)};
        }
        case SolveStatus::Diverged:
            return ShotOutcome{ShotKind::Overshoot, curve.t_last(), std::move(curve)};
        case SolveStatus::Completed:
            return ShotOutcome{ShotKind::Monotone, x_max, std::move(curve)};
        case SolveStatus::StepUnderflow: {
            std::ostringstream os;
            os << "shoot: step underflow at x=" << curve.t_last() << " (p=" << p << ", B=" << B << ")";
            throw Error(os.str());
        }
    }
    throw Error("shoot: unreachable");
}

struct SolveOptions {
    double slope_tol = 1e-10;
    double x_max = 50.0;
    ShootOptions shot = {};
};

/// A solved boundary-value problem for one family member.
struct TFSolution {
    double p = 0.0;
    double slope = 0.0;                        ///< critical initial derivative estimate (bracket midpoint)
    std::pair<double, double> bracket = {0, 0}; ///< final certified (undershoot, overshoot) slopes
    SolutionCurve curve;                       ///< representative trajectory, trimmed to y > 0, y' < 0
    std::vector<std::pair<double, double>> ratio_tail; ///< (x, y/y0) on a log-spaced tail grid
    ShotKind representative_kind = ShotKind::Monotone;
};

namespace detail {

// Classify a slope, extending x_max when the shot stays monotone: slopes very
// close to critical neither cross zero nor turn upward inside the window.
inline ShotKind classify_slope(double p, double B, double x_max, const ShootOptions& opt) {
    double xm = x_max;
    for (int attempt = 0; attempt < 4; ++attempt) {
        const ShotKind k = shoot(p, B, xm, opt).kind;
        if (k != ShotKind::Monotone) return k;
        xm *= 2.0;
    }
    return ShotKind::Monotone;
}

} // namespace detail

/// Bisection on the initial slope between a certified undershoot and a
/// certified overshoot, down to a bracket of width slope_tol. The stored
/// representative curve is the final midpoint shot (undershoot side of the
/// exact slope), which stays positive longest before crossing.
inline TFSolution solve_bvp(double p, const SolveOptions& opt = {}) {
    if (std::isnan(p) || p <= 0.0 || std::isinf(p))
        throw ParameterError("solve_bvp: requires finite p > 0");
    if (!(opt.slope_tol >= 1e-12))
        throw ParameterError("solve_bvp: slope_tol must be at least 1e-12");

    // initial bracket: scan B upward from -10 in steps of 0.5
    double lo = std::numeric_limits<double>::quiet_NaN();
    double hi = std::numeric_limits<double>::quiet_NaN();
    for (double B = -10.0; B <= 0.25; B += 0.5) {
        const ShotKind k = detail::classify_slope(p, B, opt.x_max, opt.shot);
        if (k == ShotKind::Undershoot) {
            lo = B;
        } else if (k == ShotKind::Overshoot) {
            hi = B;
            break;
        }
    }
    if (std::isnan(lo) || std::isnan(hi)) {
        std::ostringstream os;
        os << "solve_bvp: no undershoot/overshoot bracket for p=" << p << " with B in [-10, 0]";
        throw BracketError(os.str());
    }

    while (hi - lo > opt.slope_tol) {
        const double mid = 0.5 * (lo + hi);
        const ShotKind k = detail::classify_slope(p, mid, opt.x_max, opt.shot);
        if (k == ShotKind::Undershoot)
            lo = mid;
        else if (k == ShotKind::Overshoot)
            hi = mid;
        else {
            std::ostringstream os;
            os << "solve_bvp: slope " << mid << " unresolved at extended x_max (bracket width "
               << hi - lo << ")";
            throw BracketError(os.str());
        }
    }

    TFSolution sol;
    sol.p = p;
    sol.bracket = {lo, hi};
    sol.slope = 0.5 * (lo + hi);

    ShotOutcome rep = shoot(p, sol.slope, opt.x_max, opt.shot);
    if (rep.kind == ShotKind::Overshoot) {
        // keep the representative on the undershoot side of the bracket
        rep = shoot(p, lo, opt.x_max, opt.shot);
    }
    sol.representative_kind = rep.kind;
    sol.curve = std::move(rep.curve);

    // trim to the strictly decreasing, positive part
    const auto& samples = sol.curve.samples;
    double t_cut = samples.back().t;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!(samples[i].state[0] > 0.0) || !(samples[i].state[1] < 0.0)) {
            t_cut = i > 0 ? samples[i - 1].t : samples[0].t;
            break;
        }
    }
    sol.curve.truncate_after(t_cut);

    // ratio tail on a log-spaced grid over the last two decades of the curve
    const ParticularSolution y0 = particular_solution(p);
    const double x_end = sol.curve.t_last();
    const double x_lo = std::max(sol.curve.t_begin(), x_end / 100.0);
    const int n_tail = 33;
    for (int i = 0; i < n_tail; ++i) {
        const double x = x_lo * std::pow(x_end / x_lo, static_cast<double>(i) / (n_tail - 1));
        const double w = dense_eval(sol.curve, x)[0] / y0.value(x);
        sol.ratio_tail.emplace_back(x, w);
    }
    return sol;
}

/// w(x) = y(x)/y0(x) samples along the solved curve's tail.
inline std::vector<std::pair<double, double>> asymptotic_ratio(const TFSolution& sol) {
    return sol.ratio_tail;
}

/// Evaluate w = y/y0 at a single x inside the stored curve span.
inline double ratio_at(const TFSolution& sol, double x) {
    return dense_eval(sol.curve, x)[0] / particular_solution(sol.p).value(x);
}

} // namespace lamptf
