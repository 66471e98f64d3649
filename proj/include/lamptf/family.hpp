#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "lamptf/error.hpp"
#include "lamptf/interp.hpp"

namespace lamptf {

namespace detail {

/// pow with exact fast paths: integral exponents are evaluated by repeated
/// multiplication and half-integral ones through sqrt, so family constants
/// like k_1 = 12^2 = 144 come out digit-exact.
inline double pow_exactish(double base, double e) {
    if (std::isfinite(e) && std::rint(e) == e && std::abs(e) <= 64.0) {
        long n = static_cast<long>(e);
        bool inv = n < 0;
        if (inv) n = -n;
        double acc = 1.0, b = base;
        while (n > 0) {
            if (n & 1) acc *= b;
            b *= b;
            n >>= 1;
        }
        return inv ? 1.0 / acc : acc;
    }
    if (std::isfinite(e) && std::rint(2.0 * e) == 2.0 * e && base >= 0.0 && std::abs(e) <= 64.0)
        return pow_exactish(base, e - 0.5) * std::sqrt(base);
    return std::pow(base, e);
}

} // namespace detail

/// Location of one member of the one-parameter family
/// y'' = x^{-q} y^{1+q}, q = p/(p+1), inside Emden-Fowler space.
struct FamilyParams {
    double p;       ///< family parameter; +infinity is the exact limit member
    double n;       ///< dependent-variable exponent, 2 - 1/(p+1)
    double lambda;  ///< independent-variable exponent, 3 - 2/(p+1)
    double q;       ///< singularity exponent p/(p+1)
    bool extended;  ///< true for p < -1 (parameter map only, no solving support)
    bool limit;     ///< true for the p -> infinity member (exact limit values)
};

/// Parameter maps for any real p except the degenerate points.
/// p = +infinity is accepted and produces the exact limit (n=2, lambda=3, q=1).
inline FamilyParams family_params(double p) {
    if (std::isnan(p)) throw ParameterError("family_params: p is NaN");
    if (p == 0.0) throw ParameterError("family_params: p = 0 is the degenerate linear case");
    if (p == -1.0) throw ParameterError("family_params: p = -1 leaves the exponent maps undefined");
    if (std::isinf(p)) {
        if (p < 0) throw ParameterError("family_params: p = -infinity is not admissible");
        return FamilyParams{p, 2.0, 3.0, 1.0, false, true};
    }
    const double inv = 1.0 / (p + 1.0);
    return FamilyParams{p, 2.0 - inv, 3.0 - 2.0 * inv, p / (p + 1.0), p < -1.0, false};
}

/// Exact power-law solution y0(x) = k_p x^{-(1+2/p)} of the family equation.
struct ParticularSolution {
    double k;         ///< amplitude [(2+2/p)(1+2/p)]^{1+1/p}
    double exponent;  ///< decay power 1 + 2/p

    double value(double x) const { return k * detail::pow_exactish(x, -exponent); }
    double second_derivative(double x) const {
        return k * exponent * (exponent + 1.0) * detail::pow_exactish(x, -exponent - 2.0);
    }
};

inline ParticularSolution particular_solution(double p) {
    if (std::isnan(p) || p <= 0.0)
        throw ParameterError("particular_solution: requires p > 0");
    if (std::isinf(p)) return ParticularSolution{2.0, 1.0};
    const double r1 = 2.0 + 2.0 / p;
    const double r2 = 1.0 + 2.0 / p;
    return ParticularSolution{detail::pow_exactish(r1 * r2, 1.0 + 1.0 / p), r2};
}

/// Right-hand side of y'' = x^{-q} y^{1+q}.
inline double ef_rhs(const FamilyParams& params, double x, double y) {
    if (!(x > 0.0)) throw SingularError("ef_rhs: x <= 0 is the singular point of the equation");
    if (y < 0.0) throw DomainError("ef_rhs: y < 0 puts the fractional power on a complex branch");
    return detail::pow_exactish(x, -params.q) * detail::pow_exactish(y, 1.0 + params.q);
}

/// Coefficients of the rescaled oscillator form in t = ln x for the ratio w = y/y0:
/// w'' - (3 + 4/p) w' + kappa w = kappa w^{2 - 1/(p+1)}.
struct OscillatorCoefficients {
    double zeta;   ///< damping ratio -(3/2 + 2/p) k_p^{(1/(p+1)-1)/2}
    double kappa;  ///< specific stiffness k_p^{1-1/(p+1)}, equal to the nonlinearity strength
    double r1;     ///< characteristic root 2 + 2/p of the linear part
    double r2;     ///< characteristic root 1 + 2/p
};

inline OscillatorCoefficients oscillator_coefficients(double p) {
    if (std::isnan(p) || p <= 0.0)
        throw ParameterError("oscillator_coefficients: requires p > 0");
    if (std::isinf(p)) {
        const double kappa = 2.0;
        return OscillatorCoefficients{-1.5 / std::sqrt(kappa), kappa, 2.0, 1.0};
    }
    const double r1 = 2.0 + 2.0 / p;
    const double r2 = 1.0 + 2.0 / p;
    const double kappa = r1 * r2; // k_p^{p/(p+1)} collapses to the root product
    const double zeta = -(1.5 + 2.0 / p) / std::sqrt(kappa);
    return OscillatorCoefficients{zeta, kappa, r1, r2};
}

/// d^2w/dt^2 of the oscillator form, nonlinearity kept on the right-hand side.
inline double oscillator_rhs(double p, double w, double wdot) {
    if (w < 0.0) throw DomainError("oscillator_rhs: w < 0 puts the fractional power on a complex branch");
    const OscillatorCoefficients c = oscillator_coefficients(p);
    const double friction = std::isinf(p) ? 3.0 : 3.0 + 4.0 / p;
    const double q1 = std::isinf(p) ? 2.0 : 2.0 - 1.0 / (p + 1.0);
    return friction * wdot - c.kappa * w + c.kappa * detail::pow_exactish(w, q1);
}

/// A curve sampled on a strictly monotone positive grid.
struct SampledCurve {
    std::vector<double> x;
    std::vector<double> y;
};

/// The involutive change z(x) = x y(1/x): maps samples of one form of the
/// equation onto the other on the reflected grid 1/x, returned ascending.
inline SampledCurve canonical_transform(const SampledCurve& curve) {
    const std::size_t n = curve.x.size();
    if (n != curve.y.size()) throw DomainError("canonical_transform: size mismatch");
    if (n == 0) throw DomainError("canonical_transform: empty curve");
    bool inc = true, dec = true;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(curve.x[i] > 0.0)) throw DomainError("canonical_transform: abscissae must be positive");
        if (i > 0) {
            inc = inc && curve.x[i] > curve.x[i - 1];
            dec = dec && curve.x[i] < curve.x[i - 1];
        }
    }
    if (n > 1 && !inc && !dec) throw DomainError("canonical_transform: grid must be strictly monotone");

    SampledCurve out;
    out.x.resize(n);
    out.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = inc ? n - 1 - i : i; // reflected grid ascends
        out.x[i] = 1.0 / curve.x[j];
        out.y[i] = curve.y[j] / curve.x[j];
    }
    return out;
}

/// Max residual of the self-adjoint form |(xi^2 eta')'/xi^2 - xi^{lambda-2} eta^n|
/// over the interior of the grid, with eta'' taken from differences of the
/// supplied eta'. Serves as the oracle for the transform chain.
inline double self_adjoint_residual(const FamilyParams& params,
                                    std::span<const double> xi,
                                    std::span<const double> eta,
                                    std::span<const double> deta) {
    const std::size_t n = xi.size();
    if (eta.size() != n || deta.size() != n) throw DomainError("self_adjoint_residual: size mismatch");
    if (n < 3) throw DomainError("self_adjoint_residual: need at least 3 samples");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(xi[i] > 0.0)) throw DomainError("self_adjoint_residual: xi must be positive");
        if (eta[i] < 0.0) throw DomainError("self_adjoint_residual: eta must be nonnegative");
    }
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hl = xi[i] - xi[i - 1];
        const double hr = xi[i + 1] - xi[i];
        // second derivative of eta as the nonuniform central difference of eta'
        const double d2 = (hl * hl * (deta[i + 1] - deta[i]) + hr * hr * (deta[i] - deta[i - 1])) /
                          (hl * hr * (hl + hr));
        const double lhs = d2 + 2.0 * deta[i] / xi[i];
        const double rhs = detail::pow_exactish(xi[i], params.lambda - 2.0) *
                           detail::pow_exactish(eta[i], params.n);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

/// Coefficients of the expansion around y0 for the deviation eps = y - y0:
///   eps'' = c_lin eps / x^2 + c_quad x^{pow_quad} eps^2 - c_cub x^{pow_cub} eps^3 + ...
/// (the cubic term enters with a minus sign; c_cub is stored positive).
/// Truncating at the linear term gives a Cauchy-Euler equation whose power
/// solutions x^r have r(r-1) = c_lin.
struct PerturbationExpansion {
    double c_lin;
    double exp_minus;  ///< negative Cauchy-Euler root (1 - sqrt(1+4 c_lin))/2
    double exp_plus;   ///< positive Cauchy-Euler root (1 + sqrt(1+4 c_lin))/2
    double c_quad;
    double pow_quad;   ///< 2/p - 1
    double c_cub;
    double pow_cub;    ///< 4/p
};

inline PerturbationExpansion perturbation_expansion(double p) {
    if (std::isnan(p) || p <= 0.0 || std::isinf(p))
        throw ParameterError("perturbation_expansion: requires finite p > 0");
    const double kp = particular_solution(p).k;
    const double pp1 = p + 1.0;
    const double c_lin = (2.0 * p + 1.0) / pp1 * detail::pow_exactish(kp, p / pp1);
    const double root = std::sqrt(1.0 + 4.0 * c_lin);
    const double c_quad = p * (2.0 * p + 1.0) / (2.0 * pp1 * pp1) * detail::pow_exactish(kp, -1.0 / pp1);
    const double c_cub = p * (2.0 * p + 1.0) / (6.0 * pp1 * pp1 * pp1) *
                         detail::pow_exactish(kp, -(1.0 + 1.0 / pp1));
    return PerturbationExpansion{c_lin,
                                 0.5 * (1.0 - root),
                                 0.5 * (1.0 + root),
                                 c_quad,
                                 2.0 / p - 1.0,
                                 c_cub,
                                 4.0 / p};
}

} // namespace lamptf
