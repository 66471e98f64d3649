#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lamptf/error.hpp"

namespace lamptf {

using Rhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;
using EventFn = std::function<double(double t, std::span<const double> y)>;

struct IVProblem {
    Rhs rhs;
    double t0 = 0.0;
    std::vector<double> state0;
    double t_end = 1.0;
    double rtol = 1e-10;
    double atol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    bool fixed_step = false;       ///< take steps of exactly max_step, no error control
    double overflow_norm = 1e12;   ///< sup-norm bound; exceeding it ends the run as Diverged
};

enum class SolveStatus { Completed, EventStopped, StepUnderflow, Diverged };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Completed: return "Completed";
        case SolveStatus::EventStopped: return "EventStopped";
        case SolveStatus::StepUnderflow: return "StepUnderflow";
        case SolveStatus::Diverged: return "Diverged";
    }
    return "?";
}

struct CurveSample {
    double t;
    std::vector<double> state;
    std::vector<double> deriv;
};

namespace detail {

// Dense-output segment: quartic continuous extension of one accepted step,
// P(theta) = c1 + theta (c2 + (1-theta)(c3 + theta (c4 + (1-theta) c5))).
struct DenseSegment {
    double t0, h;
    std::vector<double> c1, c2, c3, c4, c5;

    void eval(double theta, std::span<double> out) const {
        const double om = 1.0 - theta;
        for (std::size_t i = 0; i < c1.size(); ++i)
            out[i] = c1[i] + theta * (c2[i] + om * (c3[i] + theta * (c4[i] + om * c5[i])));
    }
    // dP/dt = dP/dtheta / h
    void eval_derivative(double theta, std::span<double> out) const {
        const double d3 = 1.0 - 2.0 * theta;
        const double d4 = theta * (2.0 - 3.0 * theta);
        const double d5 = 2.0 * theta * (1.0 - theta) * (1.0 - 2.0 * theta);
        for (std::size_t i = 0; i < c1.size(); ++i)
            out[i] = (c2[i] + d3 * c3[i] + d4 * c4[i] + d5 * c5[i]) / h;
    }
};

} // namespace detail

struct SolutionCurve {
    std::vector<CurveSample> samples;
    std::vector<detail::DenseSegment> segments;
    SolveStatus status = SolveStatus::Completed;
    std::optional<std::pair<double, int>> event_info; ///< (t_event, event index)

    double t_begin() const { return samples.front().t; }
    double t_last() const { return samples.back().t; }

    /// Drop samples past t_cut (in integration direction); the dense span
    /// follows the samples.
    void truncate_after(double t_cut) {
        const double dir = samples.size() > 1 && samples[1].t < samples[0].t ? -1.0 : 1.0;
        while (samples.size() > 1 && dir * (samples.back().t - t_cut) > 0.0) samples.pop_back();
        while (!segments.empty() && dir * (segments.back().t0 - samples.back().t) >= 0.0)
            segments.pop_back();
    }
};

namespace detail {

// Dormand-Prince 5(4) tableau.
inline constexpr double DP_C[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double DP_A[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
// b - bhat, the embedded error weights.
inline constexpr double DP_E[7] = {71.0 / 57600, 0.0,          -71.0 / 16695, 71.0 / 1920,
                                   -17253.0 / 339200, 22.0 / 525, -1.0 / 40};
// Dense-output weights for the quartic continuous extension.
inline constexpr double DP_D[7] = {-12715105075.0 / 11282082432.0,
                                   0.0,
                                   87487479700.0 / 32700410799.0,
                                   -10690763975.0 / 1880347072.0,
                                   701980252875.0 / 199316789632.0,
                                   -1453857185.0 / 822651844.0,
                                   69997945.0 / 29380423.0};

inline double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Hairer's starting-step heuristic for an order-5 method.
inline double initial_step(const IVProblem& prob, std::span<const double> f0, double dir) {
    const std::size_t n = prob.state0.size();
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double sc = prob.atol + prob.rtol * std::abs(prob.state0[i]);
        d0 = std::max(d0, std::abs(prob.state0[i]) / sc);
        d1 = std::max(d1, std::abs(f0[i]) / sc);
    }
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, std::abs(prob.t_end - prob.t0));

    std::vector<double> y1(n), f1(n);
    for (std::size_t i = 0; i < n; ++i) y1[i] = prob.state0[i] + dir * h0 * f0[i];
    prob.rhs(prob.t0 + dir * h0, y1, f1);
    double d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double sc = prob.atol + prob.rtol * std::abs(prob.state0[i]);
        d2 = std::max(d2, std::abs(f1[i] - f0[i]) / sc);
    }
    d2 /= h0;
    double h1;
    if (std::max(d1, d2) <= 1e-15)
        h1 = std::max(1e-6, h0 * 1e-3);
    else
        h1 = std::pow(0.01 / std::max(d1, d2), 1.0 / 5.0);
    return std::min({100.0 * h0, h1, std::abs(prob.t_end - prob.t0), prob.max_step});
}

} // namespace detail

/// Adaptive explicit Runge-Kutta 5(4) initial-value integration with a free
/// quartic dense output and terminal events located by bisection on it.
/// Events use sign-change semantics; the first event in a step stops the run.
inline SolutionCurve integrate_ivp(const IVProblem& prob, std::span<const EventFn> events = {}) {
    if (!(prob.rtol > 0.0) || !(prob.atol > 0.0))
        throw ParameterError("integrate_ivp: rtol and atol must be positive");
    if (prob.t_end == prob.t0) throw ParameterError("integrate_ivp: t_end must differ from t0");
    if (prob.fixed_step && !(prob.max_step > 0.0 && std::isfinite(prob.max_step)))
        throw ParameterError("integrate_ivp: fixed_step requires a finite positive max_step");
    const std::size_t n = prob.state0.size();
    if (n == 0) throw ParameterError("integrate_ivp: empty state");

    const double dir = prob.t_end > prob.t0 ? 1.0 : -1.0;

    auto call_rhs = [&](double t, std::span<const double> y, std::span<double> f) {
        try {
            prob.rhs(t, y, f);
        } catch (const std::exception& e) {
            std::ostringstream os;
            os << "integrate_ivp: rhs failed at t=" << t << ", state=(";
            for (std::size_t i = 0; i < y.size(); ++i) os << (i ? ", " : "") << y[i];
            os << "): " << e.what();
            throw Error(os.str());
        }
        for (double v : f)
            if (!std::isfinite(v)) {
                std::ostringstream os;
                os << "integrate_ivp: rhs not finite at t=" << t;
                throw DomainError(os.str());
            }
    };

    SolutionCurve out;
    std::vector<double> y = prob.state0;
    std::vector<double> f0(n);
    call_rhs(prob.t0, y, f0);
    out.samples.push_back({prob.t0, y, f0});

    std::vector<double> g0(events.size());
    for (std::size_t e = 0; e < events.size(); ++e) g0[e] = events[e](prob.t0, y);

    double t = prob.t0;
    double h = prob.fixed_step ? prob.max_step : detail::initial_step(prob, f0, dir);

    std::vector<std::vector<double>> k(7, std::vector<double>(n));
    k[0] = f0;
    std::vector<double> ytmp(n), ynew(n), yerr(n);
    double err_prev = 1.0;

    const std::size_t max_steps = 10'000'000;

    for (std::size_t step = 0; step < max_steps; ++step) {
        if (dir * (t - prob.t_end) >= 0.0) break;

        h = std::min(h, prob.max_step);
        bool last = false;
        if (dir * (t + dir * h - prob.t_end) >= 0.0) {
            h = std::abs(prob.t_end - t);
            last = true;
        }
        // a short closing step is legitimate; underflow means the controller
        // gave up inside the span
        if (!last && h < 1e-14 * std::max(1.0, std::abs(t))) {
            out.status = SolveStatus::StepUnderflow;
            return out;
        }

        // stages 2..7 (k1 is FSAL from the previous step)
        for (int s = 1; s < 7; ++s) {
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                for (int j = 0; j < s; ++j) acc += detail::DP_A[s][j] * k[j][i];
                ytmp[i] = y[i] + dir * h * acc;
            }
            call_rhs(t + dir * h * detail::DP_C[s], ytmp, k[s]);
        }
        // stage 7 argument is the 5th-order solution itself
        ynew = ytmp;

        double err = 0.0;
        if (!prob.fixed_step) {
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                for (int j = 0; j < 7; ++j) acc += detail::DP_E[j] * k[j][i];
                yerr[i] = dir * h * acc;
                const double sc = prob.atol + prob.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
                err += (yerr[i] / sc) * (yerr[i] / sc);
            }
            err = std::sqrt(err / static_cast<double>(n));
            if (!(err <= 1.0)) { // reject
                const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 1.0);
                h *= fac;
                continue;
            }
        }

        // accept: build the dense segment
        detail::DenseSegment seg;
        seg.t0 = t;
        seg.h = dir * h;
        seg.c1 = y;
        seg.c2.resize(n);
        seg.c3.resize(n);
        seg.c4.resize(n);
        seg.c5.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double dy = ynew[i] - y[i];
            const double bspl = dir * h * k[0][i] - dy;
            seg.c2[i] = dy;
            seg.c3[i] = bspl;
            seg.c4[i] = dy - dir * h * k[6][i] - bspl;
            double acc = 0.0;
            for (int j = 0; j < 7; ++j) acc += detail::DP_D[j] * k[j][i];
            seg.c5[i] = dir * h * acc;
        }

        const double t_new = last ? prob.t_end : t + dir * h;

        // event check on this step
        int hit = -1;
        double theta_hit = 2.0;
        std::vector<double> ghere(events.size());
        for (std::size_t e = 0; e < events.size(); ++e) {
            ghere[e] = events[e](t_new, ynew);
            const bool crossed = (g0[e] < 0.0 && ghere[e] >= 0.0) || (g0[e] > 0.0 && ghere[e] <= 0.0);
            if (!crossed) continue;
            double lo = 0.0, hi = 1.0;
            double glo = g0[e];
            std::vector<double> ymid(n);
            while ((hi - lo) * std::abs(seg.h) > 1e-12) {
                const double mid = 0.5 * (lo + hi);
                seg.eval(mid, ymid);
                const double gm = events[e](t + seg.h * mid, ymid);
                if ((glo < 0.0) == (gm < 0.0)) {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            const double th = 0.5 * (lo + hi);
            if (th < theta_hit) {
                theta_hit = th;
                hit = static_cast<int>(e);
            }
        }

        out.segments.push_back(seg);

        if (hit >= 0) {
            const double t_event = t + seg.h * theta_hit;
            std::vector<double> ye(n), fe(n);
            out.segments.back().eval(theta_hit, ye);
            call_rhs(t_event, ye, fe);
            out.samples.push_back({t_event, ye, fe});
            out.status = SolveStatus::EventStopped;
            out.event_info = {t_event, hit};
            return out;
        }

        k[0] = k[6]; // FSAL: stage 7 is the derivative at the new point
        out.samples.push_back({t_new, ynew, k[0]});
        y = ynew;
        t = t_new;
        g0 = ghere;

        if (detail::sup_norm(y) > prob.overflow_norm) {
            out.status = SolveStatus::Diverged;
            return out;
        }
        if (last) {
            out.status = SolveStatus::Completed;
            return out;
        }

        if (!prob.fixed_step) {
            // PI step controller, safety 0.9, growth clamped to [0.2, 5].
            const double e1 = std::max(err, 1e-10);
            double fac = 0.9 * std::pow(e1, -0.7 / 5.0) * std::pow(std::max(err_prev, 1e-10), 0.4 / 5.0);
            fac = std::clamp(fac, 0.2, 5.0);
            h = std::min(h * fac, prob.max_step);
            err_prev = e1;
        }
    }
    if (dir * (t - prob.t_end) < 0.0)
        throw Error("integrate_ivp: step budget exhausted before reaching t_end");
    out.status = SolveStatus::Completed;
    return out;
}

namespace detail {

inline const DenseSegment& locate_segment(const SolutionCurve& curve, double t) {
    if (curve.segments.empty()) throw DomainError("dense_eval: curve has no dense segments");
    // valid span runs between the first and last stored sample
    const double a = curve.samples.front().t;
    const double b = curve.samples.back().t;
    const double dir = curve.segments.front().h >= 0.0 ? 1.0 : -1.0;
    if (dir * (t - a) < 0.0 || dir * (t - b) > 0.0)
        throw DomainError("dense_eval: t outside the curve span");
    std::size_t lo = 0, hi = curve.segments.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi + 1) / 2;
        if (dir * (t - curve.segments[mid].t0) >= 0.0)
            lo = mid;
        else
            hi = mid - 1;
    }
    return curve.segments[lo];
}

} // namespace detail

/// Evaluate the dense interpolant at t (must lie within the curve span).
inline std::vector<double> dense_eval(const SolutionCurve& curve, double t) {
    const auto& seg = detail::locate_segment(curve, t);
    std::vector<double> out(seg.c1.size());
    seg.eval((t - seg.t0) / seg.h, out);
    return out;
}

/// Time derivative of the dense interpolant at t.
inline std::vector<double> dense_eval_derivative(const SolutionCurve& curve, double t) {
    const auto& seg = detail::locate_segment(curve, t);
    std::vector<double> out(seg.c1.size());
    seg.eval_derivative((t - seg.t0) / seg.h, out);
    return out;
}

} // namespace lamptf
