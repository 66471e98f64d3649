#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lamptf/error.hpp"
#include "lamptf/family.hpp"
#include "lamptf/integrate.hpp"
#include "lamptf/parallel.hpp"

namespace lamptf {

struct Vec2 {
    double x = 0.0, y = 0.0;
};

/// The planar autonomous system
///   dX/dt = -X (1 + X - Y)          = M(X, Y)
///   dY/dt =  Y (lambda + 1 + n X - Y) = N(X, Y)
/// obtained from the self-adjoint form via X = xi eta'/eta,
/// Y = xi^{lambda-1} eta^n / eta', xi = e^t.
struct AutonomousSystem {
    double n = 1.5;
    double lambda = 2.0;
};

/// System with the Emden-Fowler labels of the family member.
inline AutonomousSystem family_system(const FamilyParams& params) {
    return AutonomousSystem{params.n, params.lambda};
}

/// System for the self-adjoint companion the family equation itself maps onto
/// through z(x) = x y(1/x): that form carries no explicit xi factor, so the
/// effective labels are n = 1 + q and lambda = 2 for every p. Coincides with
/// family_system at p = 1.
inline AutonomousSystem companion_system(double p) {
    const FamilyParams fp = family_params(p);
    if (!(fp.q > 0.0)) throw ParameterError("companion_system: requires p > 0");
    return AutonomousSystem{1.0 + fp.q, 2.0};
}

inline std::pair<double, double> system_rhs(const AutonomousSystem& sys, double X, double Y) {
    return {-X * (1.0 + X - Y), Y * (sys.lambda + 1.0 + sys.n * X - Y)};
}

template <class T>
struct Mat2 {
    T m11, m12, m21, m22;
};

/// Jacobian entries of the vector field; templated on the scalar so the exact
/// rational route can reuse the same formulas.
template <class T>
Mat2<T> jacobian_entries(const T& n, const T& lambda, const T& X, const T& Y) {
    return Mat2<T>{T(-1) - T(2) * X + Y, X, n * Y, lambda + T(1) + n * X - T(2) * Y};
}

inline Mat2<double> jacobian(const AutonomousSystem& sys, double X, double Y) {
    return jacobian_entries<double>(sys.n, sys.lambda, X, Y);
}

struct FixedPointSet {
    std::vector<Vec2> points;  ///< (0,0), (-1,0), (0,lambda+1) and, when n != 1, the oblique one
    bool fourth_missing = false;
};

/// Equilibria of the system, in the fixed order
/// (0,0), (-1,0), (0, lambda+1), (-lambda/(n-1), 1-lambda/(n-1)).
inline FixedPointSet fixed_points(const AutonomousSystem& sys) {
    FixedPointSet out;
    out.points = {{0.0, 0.0}, {-1.0, 0.0}, {0.0, sys.lambda + 1.0}};
    if (sys.n == 1.0) {
        out.fourth_missing = true; // nullclines Y = 1 + X and Y = lambda + 1 + X are parallel
        return out;
    }
    const double r = sys.lambda / (sys.n - 1.0);
    out.points.push_back({-r, 1.0 - r});
    return out;
}

enum class PointKind { Saddle, StableNode, UnstableNode, StableFocus, UnstableFocus, Center, Degenerate };

inline const char* to_string(PointKind k) {
    switch (k) {
        case PointKind::Saddle: return "Saddle";
        case PointKind::StableNode: return "StableNode";
        case PointKind::UnstableNode: return "UnstableNode";
        case PointKind::StableFocus: return "StableFocus";
        case PointKind::UnstableFocus: return "UnstableFocus";
        case PointKind::Center: return "Center";
        case PointKind::Degenerate: return "Degenerate";
    }
    return "?";
}

struct FixedPoint {
    Vec2 coords{};
    double trace = 0.0;         ///< delta_1
    double det = 0.0;           ///< delta_2
    double discriminant = 0.0;  ///< Delta = delta_1^2 - 4 delta_2
    PointKind kind = PointKind::Degenerate;
    std::complex<double> theta1, theta2; ///< roots of theta^2 - delta_1 theta + delta_2
    bool eigen_real = false;
    Vec2 v1{}, v2{};            ///< unit eigenvectors (real, distinct eigenvalues only)
    std::string note;           ///< annotation, e.g. time-direction reading of a node
};

namespace detail {

inline Vec2 unit_eigenvector(const Mat2<double>& J, double theta) {
    // null vector of (J - theta I) from the better-conditioned row
    const double r1x = J.m11 - theta, r1y = J.m12;
    const double r2x = J.m21, r2y = J.m22 - theta;
    double vx, vy;
    if (std::abs(r1x) + std::abs(r1y) >= std::abs(r2x) + std::abs(r2y)) {
        vx = -r1y;
        vy = r1x;
    } else {
        vx = -r2y;
        vy = r2x;
    }
    const double nrm = std::hypot(vx, vy);
    if (nrm == 0.0) return Vec2{1.0, 0.0}; // J == theta I: every direction works
    vx /= nrm;
    vy /= nrm;
    if (vx < 0.0 || (vx == 0.0 && vy < 0.0)) {
        vx = -vx;
        vy = -vy;
    }
    return Vec2{vx, vy};
}

} // namespace detail

/// Trace/determinant/discriminant classification of a 2x2 Jacobian with the
/// analytic eigen-decomposition. Degenerate covers det = 0 or a vanishing
/// discriminant (within 1e-12, scaled).
inline FixedPoint classify(const Mat2<double>& J) {
    FixedPoint fp;
    fp.trace = J.m11 + J.m22;
    fp.det = J.m11 * J.m22 - J.m12 * J.m21;
    fp.discriminant = fp.trace * fp.trace - 4.0 * fp.det;

    const double scale = std::max({1.0, std::abs(fp.trace), std::abs(fp.det), std::abs(fp.discriminant)});
    const double tol = 1e-12 * scale;

    if (fp.discriminant >= 0.0) {
        const double root = std::sqrt(std::max(fp.discriminant, 0.0));
        fp.theta1 = 0.5 * (fp.trace + root);
        fp.theta2 = 0.5 * (fp.trace - root);
        fp.eigen_real = true;
        if (fp.discriminant > tol) {
            fp.v1 = detail::unit_eigenvector(J, fp.theta1.real());
            fp.v2 = detail::unit_eigenvector(J, fp.theta2.real());
        }
    } else {
        const double im = 0.5 * std::sqrt(-fp.discriminant);
        fp.theta1 = {0.5 * fp.trace, im};
        fp.theta2 = {0.5 * fp.trace, -im};
    }

    if (std::abs(fp.det) <= tol || std::abs(fp.discriminant) <= tol) {
        fp.kind = PointKind::Degenerate;
    } else if (fp.det < 0.0) {
        fp.kind = PointKind::Saddle;
    } else if (fp.discriminant > 0.0) {
        fp.kind = fp.trace > 0.0 ? PointKind::UnstableNode : PointKind::StableNode;
        if (fp.kind == PointKind::UnstableNode)
            fp.note = "repelling for increasing t; attracting node in reversed time "
                      "(xi -> 0 means x -> infinity)";
    } else {
        if (std::abs(fp.trace) <= tol)
            fp.kind = PointKind::Center;
        else
            fp.kind = fp.trace > 0.0 ? PointKind::UnstableFocus : PointKind::StableFocus;
    }
    return fp;
}

inline FixedPoint classify_at(const AutonomousSystem& sys, double X, double Y) {
    FixedPoint fp = classify(jacobian(sys, X, Y));
    fp.coords = {X, Y};
    return fp;
}

/// All equilibria with their classification, in the canonical order.
inline std::vector<FixedPoint> classified_fixed_points(const AutonomousSystem& sys) {
    std::vector<FixedPoint> out;
    for (const Vec2& pt : fixed_points(sys).points) out.push_back(classify_at(sys, pt.x, pt.y));
    return out;
}

/// Unit eigenvector pair of a hyperbolic point with real distinct eigenvalues.
inline std::pair<Vec2, Vec2> saddle_flow_directions(const FixedPoint& fp) {
    if (!fp.eigen_real || fp.discriminant <= 0.0)
        throw DomainError("saddle_flow_directions: eigenvalues must be real and distinct");
    return {fp.v1, fp.v2};
}

/// Flow directions at the p = 1 oblique saddle in the fixed reporting
/// convention (1, 1 - theta1/4) and (2 (3 - theta2/9), 1), returned as given.
/// The first is the row-one eigenvector scaled to unit X component; the second
/// reproduces the reported closed form (note: it is not a null vector of the
/// Jacobian; the row-two eigenvector would carry 2 (3 - theta2)/9 instead).
inline std::pair<Vec2, Vec2> tf_saddle_direction_report() {
    const double root = std::sqrt(73.0);
    const double theta1 = 0.5 * (7.0 + root);
    const double theta2 = 0.5 * (7.0 - root);
    return {Vec2{1.0, 1.0 - theta1 / 4.0}, Vec2{2.0 * (3.0 - theta2 / 9.0), 1.0}};
}

/// The saddle eigenvalues of the companion system split as
/// theta = (1 + 2/p) + r with r the two Cauchy-Euler exponents of the
/// perturbation around y0. Both sides are computed independently and the
/// identity is checked before returning.
struct EigenPerturbationLink {
    double theta1, theta2;    ///< saddle eigenvalues
    double theta0_1, theta0_2; ///< perturbed parts theta - (1 + 2/p)
};

inline EigenPerturbationLink eigen_perturbation_link(double p) {
    const AutonomousSystem sys = companion_system(p);
    const auto pts = fixed_points(sys);
    const Vec2 saddle = pts.points.at(3);
    const FixedPoint fp = classify_at(sys, saddle.x, saddle.y);
    if (!fp.eigen_real) throw Error("eigen_perturbation_link: saddle eigenvalues not real");
    const double base = 1.0 + 2.0 / p;
    EigenPerturbationLink link{fp.theta1.real(), fp.theta2.real(),
                               fp.theta1.real() - base, fp.theta2.real() - base};
    const PerturbationExpansion pe = perturbation_expansion(p);
    const double mismatch = std::max(std::abs(link.theta0_1 - pe.exp_plus),
                                     std::abs(link.theta0_2 - pe.exp_minus));
    if (mismatch > 1e-9) {
        std::ostringstream os;
        os << "eigen_perturbation_link: eigenvalue/exponent mismatch " << mismatch << " at p=" << p;
        throw Error(os.str());
    }
    return link;
}

/// Reconstruction of the particular solution from the oblique saddle of the
/// companion system: XY = xi^lambda eta^{n-1} is constant there, and mapping
/// eta back through y = x eta(x) gives back k_p x^{-(1+2/p)}.
struct SaddleRecovery {
    double product;    ///< X3 * Y3
    double amplitude;  ///< reconstructed k_p
    double exponent;   ///< reconstructed decay power
};

inline SaddleRecovery saddle_recovers_y0(double p) {
    const AutonomousSystem sys = companion_system(p);
    const auto pts = fixed_points(sys);
    const Vec2 saddle = pts.points.at(3);
    const double product = saddle.x * saddle.y;
    const double q = sys.n - 1.0;
    // eta = (XY)^{1/(n-1)} xi^{-lambda/(n-1)}, then y = x eta(x)
    const double amplitude = detail::pow_exactish(product, 1.0 / q);
    const double exponent = sys.lambda / q - 1.0;
    return SaddleRecovery{product, amplitude, exponent};
}

struct Window {
    double x0 = -6.0, x1 = 2.0, y0 = -5.0, y1 = 4.0;

    bool degenerate() const { return !(x1 > x0) || !(y1 > y0); }
    double diagonal() const { return std::hypot(x1 - x0, y1 - y0); }
    bool contains(double x, double y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
};

struct Polyline {
    std::vector<Vec2> pts;
};

struct NullclineSet {
    std::vector<Polyline> m_zero; ///< X = 0 and Y = 1 + X
    std::vector<Polyline> n_zero; ///< Y = 0 and Y = lambda + 1 + n X
};

namespace detail {

inline std::optional<Polyline> sampled_segment(Vec2 a, Vec2 b, int n_samples) {
    Polyline p;
    p.pts.reserve(static_cast<std::size_t>(n_samples));
    for (int i = 0; i < n_samples; ++i) {
        const double t = static_cast<double>(i) / (n_samples - 1);
        p.pts.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
    return p;
}

// Clip the line y = c0 + c1 x to the window; returns the visible piece.
inline std::optional<Polyline> clipped_line(double c0, double c1, const Window& w, int n_samples) {
    double xa = w.x0, xb = w.x1;
    if (c1 != 0.0) {
        const double x_at_y0 = (w.y0 - c0) / c1;
        const double x_at_y1 = (w.y1 - c0) / c1;
        xa = std::max(xa, std::min(x_at_y0, x_at_y1));
        xb = std::min(xb, std::max(x_at_y0, x_at_y1));
    } else if (c0 < w.y0 || c0 > w.y1) {
        return std::nullopt;
    }
    if (!(xb > xa)) return std::nullopt;
    return sampled_segment({xa, c0 + c1 * xa}, {xb, c0 + c1 * xb}, n_samples);
}

} // namespace detail

/// M = 0 and N = 0 loci as polylines clipped to the window.
inline NullclineSet nullclines(const AutonomousSystem& sys, const Window& w) {
    if (w.degenerate()) throw ParameterError("nullclines: degenerate window");
    constexpr int kSamples = 33;
    NullclineSet out;
    if (0.0 >= w.x0 && 0.0 <= w.x1)
        out.m_zero.push_back(*detail::sampled_segment({0.0, w.y0}, {0.0, w.y1}, kSamples));
    if (auto l = detail::clipped_line(1.0, 1.0, w, kSamples)) out.m_zero.push_back(*l);
    if (0.0 >= w.y0 && 0.0 <= w.y1)
        out.n_zero.push_back(*detail::sampled_segment({w.x0, 0.0}, {w.x1, 0.0}, kSamples));
    if (auto l = detail::clipped_line(sys.lambda + 1.0, sys.n, w, kSamples)) out.n_zero.push_back(*l);
    return out;
}

struct Trajectory {
    Vec2 seed{};
    SolutionCurve forward;
    SolutionCurve backward;
    bool truncated_forward = false;  ///< hit the blow-up bound going forward
    bool truncated_backward = false;
};

struct PhasePortrait {
    AutonomousSystem system;
    std::vector<FixedPoint> points;       ///< all equilibria, classified
    std::vector<Trajectory> trajectories;
    NullclineSet isoclines;
    Window window;
    double t_span = 10.0;
};

/// 16 window-boundary seeds plus 4 seeds per saddle offset 1e-3 along each
/// eigendirection, so separatrix structure shows without tracing manifolds.
inline std::vector<Vec2> default_seeds(const AutonomousSystem& sys, const Window& w) {
    std::vector<Vec2> seeds;
    const double fr[4] = {0.125, 0.375, 0.625, 0.875};
    for (double f : fr) {
        seeds.push_back({w.x0 + f * (w.x1 - w.x0), w.y0});
        seeds.push_back({w.x0 + f * (w.x1 - w.x0), w.y1});
        seeds.push_back({w.x0, w.y0 + f * (w.y1 - w.y0)});
        seeds.push_back({w.x1, w.y0 + f * (w.y1 - w.y0)});
    }
    for (const FixedPoint& fp : classified_fixed_points(sys)) {
        if (fp.kind != PointKind::Saddle) continue;
        const auto [v1, v2] = saddle_flow_directions(fp);
        const double eps = 1e-3;
        seeds.push_back({fp.coords.x + eps * v1.x, fp.coords.y + eps * v1.y});
        seeds.push_back({fp.coords.x - eps * v1.x, fp.coords.y - eps * v1.y});
        seeds.push_back({fp.coords.x + eps * v2.x, fp.coords.y + eps * v2.y});
        seeds.push_back({fp.coords.x - eps * v2.x, fp.coords.y - eps * v2.y});
    }
    return seeds;
}

struct PortraitOptions {
    double rtol = 1e-9;
    double atol = 1e-11;
};

/// Trajectory bundle: each seed is integrated forward and backward over
/// t_span; blow-up is truncated at 1e3 times the window diagonal and recorded,
/// never fatal. Seeds run concurrently; assembly is by seed index.
inline PhasePortrait portrait(const AutonomousSystem& sys, std::span<const Vec2> seeds,
                              double t_span, const Window& w, const PortraitOptions& opt = {}) {
    if (w.degenerate()) throw ParameterError("portrait: degenerate window");
    if (seeds.empty()) throw ParameterError("portrait: need at least one seed");
    if (!(t_span > 0.0)) throw ParameterError("portrait: t_span must be positive");

    PhasePortrait out;
    out.system = sys;
    out.window = w;
    out.t_span = t_span;
    out.points = classified_fixed_points(sys);
    out.isoclines = nullclines(sys, w);
    out.trajectories.resize(seeds.size());

    const double bound = 1e3 * w.diagonal();
    auto rhs = [sys](double, std::span<const double> s, std::span<double> f) {
        const auto [m, n] = system_rhs(sys, s[0], s[1]);
        f[0] = m;
        f[1] = n;
    };

    parallel_for(seeds.size(), [&](std::size_t i) {
        Trajectory traj;
        traj.seed = seeds[i];
        for (int dir = 0; dir < 2; ++dir) {
            IVProblem prob;
            prob.rhs = rhs;
            prob.t0 = 0.0;
            prob.t_end = dir == 0 ? t_span : -t_span;
            prob.state0 = {seeds[i].x, seeds[i].y};
            prob.rtol = opt.rtol;
            prob.atol = opt.atol;
            prob.overflow_norm = bound;
            SolutionCurve c;
            bool truncated = false;
            try {
                c = integrate_ivp(prob);
                truncated = c.status != SolveStatus::Completed;
            } catch (const Error&) {
                // keep the seed as a one-point trajectory; truncation is per
                // trajectory, never fatal to the portrait
                std::vector<double> f(2);
                rhs(0.0, prob.state0, f);
                c.samples.push_back({0.0, prob.state0, f});
                c.status = SolveStatus::Diverged;
                truncated = true;
            }
            if (dir == 0) {
                traj.forward = std::move(c);
                traj.truncated_forward = truncated;
            } else {
                traj.backward = std::move(c);
                traj.truncated_backward = truncated;
            }
        }
        out.trajectories[i] = std::move(traj);
    });
    return out;
}

} // namespace lamptf
