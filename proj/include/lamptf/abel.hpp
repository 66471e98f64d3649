#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <span>
#include <sstream>
#include <vector>

#include "lamptf/error.hpp"
#include "lamptf/family.hpp"
#include "lamptf/interp.hpp"
#include "lamptf/rational.hpp"

namespace lamptf {

/// Coefficient functions of the first-kind Abel equation dz/dw = f2 z^2 + f3 z^3
/// obtained from the oscillator form via s = dw/dt, z = 1/s:
///   f2 = -(3 + 4/p)   (constant),
///   f3(w) = 2 (1 + 1/p)(1 + 2/p) (w - w^{2 - 1/(p+1)}).
struct AbelForm {
    double p;
    double f2;      ///< constant coefficient, negative for all p > 0
    double f3_amp;  ///< amplitude 2 (1 + 1/p)(1 + 2/p)
    double f3_pow;  ///< exponent 2 - 1/(p+1) of the subtracted term

    double f3(double w) const { return f3_amp * (w - detail::pow_exactish(w, f3_pow)); }
    double df3(double w) const {
        return f3_amp * (1.0 - f3_pow * detail::pow_exactish(w, f3_pow - 1.0));
    }
};

inline AbelForm abel_coefficients(double p) {
    if (std::isnan(p) || p <= 0.0) throw ParameterError("abel_coefficients: requires p > 0");
    if (std::isinf(p)) return AbelForm{p, -3.0, 2.0, 2.0};
    return AbelForm{p, -(3.0 + 4.0 / p), 2.0 * (1.0 + 1.0 / p) * (1.0 + 2.0 / p),
                    2.0 - 1.0 / (p + 1.0)};
}

/// ds/dw of the second-kind form s s' - (3 + 4/p) s + f3_amp (w - w^{f3_pow}) = 0.
inline double abel_second_kind_rhs(double p, double w, double s) {
    if (w < 0.0) throw DomainError("abel_second_kind_rhs: w must be nonnegative");
    if (s == 0.0) throw SingularError("abel_second_kind_rhs: s = 0 is a singular point");
    const AbelForm a = abel_coefficients(p);
    return -a.f2 - a.f3(w) / s;
}

/// The invariant Phi_p(w) = A + B w^{pow} with
///   A = 2(3p+4)(3p+2) / (27 p^3),
///   B = -18 (3p+4)(p+2)(2p+1) / (27 p^3),
///   pow = 1 - 1/(p+1).
struct AbelInvariant {
    double A;
    double B;
    double pow;

    double value(double w) const { return A + B * detail::pow_exactish(w, pow); }
    double derivative(double w) const { return B * pow * detail::pow_exactish(w, pow - 1.0); }
    /// w where the invariant vanishes.
    double root() const { return detail::pow_exactish(-A / B, 1.0 / pow); }
};

inline AbelInvariant abel_invariant_form(double p) {
    if (std::isnan(p) || p <= 0.0) throw ParameterError("abel_invariant: requires p > 0");
    if (std::isinf(p)) return AbelInvariant{0.0, -4.0, 1.0};
    const double p3 = 27.0 * p * p * p;
    const double A = 2.0 * (3.0 * p + 4.0) * (3.0 * p + 2.0) / p3;
    const double B = -18.0 * (3.0 * p + 4.0) * (p + 2.0) * (2.0 * p + 1.0) / p3;
    return AbelInvariant{A, B, 1.0 - 1.0 / (p + 1.0)};
}

/// Closed form of the invariant at a point.
inline double abel_invariant(double p, double w) {
    if (w < 0.0) throw DomainError("abel_invariant: w must be nonnegative");
    return abel_invariant_form(p).value(w);
}

/// The defining combination (1/3)(f3 f2' - f2 f3') + (2/27) f2^3 (f2' = 0 here),
/// kept as an independent route for checking the closed form.
inline double abel_invariant_defining(double p, double w) {
    if (w < 0.0) throw DomainError("abel_invariant_defining: w must be nonnegative");
    const AbelForm a = abel_coefficients(p);
    return -a.f2 * a.df3(w) / 3.0 + (2.0 / 27.0) * a.f2 * a.f2 * a.f2;
}

/// Real branch of x^{5/3} used on both sides of the invariant's root.
inline double real_pow_5_3(double x) {
    return std::copysign(std::pow(std::abs(x), 5.0 / 3.0), x);
}

/// alpha required by the integrability condition
///   f3 Phi' + (f2^2 - 3 f3') Phi = 3 alpha Phi^{5/3}
/// from pointwise values of the ingredients. An equation is integrable by
/// quadrature only if this alpha comes out the same at every w.
inline double alpha_from_parts(double f2, double f3, double df3, double phi, double dphi) {
    if (phi == 0.0) throw SingularError("alpha_from_parts: invariant vanishes at this point");
    return (f3 * dphi + (f2 * f2 - 3.0 * df3) * phi) / (3.0 * real_pow_5_3(phi));
}

/// alpha(w) for the family member p.
inline double integrability_alpha(double p, double w) {
    if (!(w > 0.0)) throw DomainError("integrability_alpha: requires w > 0");
    const AbelForm a = abel_coefficients(p);
    const AbelInvariant inv = abel_invariant_form(p);
    const double phi = inv.value(w);
    if (phi == 0.0) {
        std::ostringstream os;
        os << "integrability_alpha: invariant root at w=" << w << " (p=" << p << ")";
        throw SingularError(os.str());
    }
    return alpha_from_parts(a.f2, a.f3(w), a.df3(w), phi, inv.derivative(w));
}

enum class IntegrabilityVerdict { Integrable, NonIntegrable, Indeterminate };

inline const char* to_string(IntegrabilityVerdict v) {
    switch (v) {
        case IntegrabilityVerdict::Integrable: return "Integrable";
        case IntegrabilityVerdict::NonIntegrable: return "NonIntegrable";
        case IntegrabilityVerdict::Indeterminate: return "Indeterminate";
    }
    return "?";
}

struct IntegrabilityReport {
    double p = 0.0;
    std::vector<std::pair<double, double>> samples; ///< (w, alpha) at accepted grid points
    double alpha_spread = 0.0;                      ///< max - min over accepted samples
    double spread_phi_positive = 0.0;               ///< spread restricted to Phi > 0 samples
    double spread_phi_negative = 0.0;               ///< spread restricted to Phi < 0 samples
    IntegrabilityVerdict verdict = IntegrabilityVerdict::Indeterminate;
    std::vector<double> excluded;                   ///< grid points near the invariant root
    double tol = 0.0;
};

/// Default sampling grid {0.05, 0.15, ..., 0.95}.
inline std::vector<double> default_w_grid() {
    std::vector<double> g(10);
    for (int i = 0; i < 10; ++i) g[i] = 0.05 + 0.1 * i;
    return g;
}

/// Samples alpha(w) over the grid and declares the equation integrable only if
/// the samples agree to tol across at least 8 valid points. Grid points within
/// relative distance 1e-3 of the invariant's root are excluded.
inline IntegrabilityReport check_integrability(double p, std::span<const double> w_grid,
                                               double tol = 1e-8) {
    IntegrabilityReport rep;
    rep.p = p;
    rep.tol = tol;
    const AbelInvariant inv = abel_invariant_form(p);
    const double w_root = inv.root();

    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    double lo_pos = lo, hi_pos = hi, lo_neg = lo, hi_neg = hi;
    for (double w : w_grid) {
        if (!(w > 0.0)) throw DomainError("check_integrability: grid points must be positive");
        if (std::abs(w - w_root) <= 1e-3 * w_root || inv.value(w) == 0.0) {
            rep.excluded.push_back(w);
            continue;
        }
        const double a = integrability_alpha(p, w);
        rep.samples.emplace_back(w, a);
        lo = std::min(lo, a);
        hi = std::max(hi, a);
        if (inv.value(w) > 0.0) {
            lo_pos = std::min(lo_pos, a);
            hi_pos = std::max(hi_pos, a);
        } else {
            lo_neg = std::min(lo_neg, a);
            hi_neg = std::max(hi_neg, a);
        }
    }
    if (rep.samples.empty()) {
        rep.verdict = IntegrabilityVerdict::Indeterminate;
        return rep;
    }
    rep.alpha_spread = hi - lo;
    rep.spread_phi_positive = hi_pos >= lo_pos ? hi_pos - lo_pos : 0.0;
    rep.spread_phi_negative = hi_neg >= lo_neg ? hi_neg - lo_neg : 0.0;
    if (rep.alpha_spread >= tol)
        rep.verdict = IntegrabilityVerdict::NonIntegrable;
    else if (rep.samples.size() >= 8)
        rep.verdict = IntegrabilityVerdict::Integrable;
    else
        rep.verdict = IntegrabilityVerdict::Indeterminate;
    return rep;
}

/// The integrability condition at p = 1 recomputed in exact rational
/// arithmetic and multiplied through by the clearing factor, bringing it to
///   c0 + c1 sqrt(w) + c2 w = base^{2/3} (r0 + r1 sqrt(w))^{5/3} alpha.
/// Everything is derived from f2, f3 and the invariant; nothing is hardcoded.
struct ClearedCondition {
    Rational c0, c1, c2;        ///< cleared left-hand coefficients in u = sqrt(w)
    std::int64_t radical_base;  ///< base of the ^{2/3} factor on the alpha side
    Rational root_c0, root_c1;  ///< primitive coefficients of the radicand
    Rational clearing_factor;
    bool radical_certified;     ///< exact identity (3 F)^3 (a/b)^5 == base^2 held
};

inline ClearedCondition tf_cleared_condition() {
    // p = 1: every ingredient is a polynomial in u = sqrt(w) over the rationals
    const Rational f2(-7);
    const RatPoly f3{Rational(0), Rational(0), Rational(12), Rational(-12)}; // 12 u^2 - 12 u^3
    const RatPoly df3_dw{Rational(12), Rational(-18)};                       // 12 - 18 u
    const RatPoly phi{Rational(70, 27), Rational(-42)};                      // 70/27 - 42 u

    // dPhi/dw = (dPhi/du) / (2u); the product f3 * dPhi/dw stays polynomial
    const RatPoly dphi_du = phi.derivative_u();
    const RatPoly f3_over_u = f3.shifted_down();
    const RatPoly term1 = Rational(1, 2) * (f3_over_u * dphi_du);

    const RatPoly lin{f2 * f2 - Rational(3) * df3_dw.coeff(0), Rational(-3) * df3_dw.coeff(1)};
    const RatPoly lhs = term1 + lin * phi;

    // content/primitive split of the invariant: phi = (a/b)(r0 + r1 u)
    std::int64_t num_gcd = std::gcd(std::llabs(phi.coeff(0).num()), std::llabs(phi.coeff(1).num()));
    std::int64_t den_lcm = std::lcm(phi.coeff(0).den(), phi.coeff(1).den());
    const Rational content(num_gcd, den_lcm);
    const Rational r0 = phi.coeff(0) / content;
    const Rational r1 = phi.coeff(1) / content;

    // clearing factor F = b^{5/3} / (3a) = c^5 / (3a) with b = c^3;
    // it turns 3 (a/b)^{5/3} into a^{2/3} on the alpha side
    const std::int64_t b = content.den();
    std::int64_t c = std::llround(std::cbrt(static_cast<double>(b)));
    if (c * c * c != b) throw Error("tf_cleared_condition: invariant denominator is not a cube");
    const Rational F = rat_pow(Rational(c), 5) / (Rational(3) * Rational(content.num()));

    ClearedCondition out;
    out.c0 = F * lhs.coeff(0);
    out.c1 = F * lhs.coeff(1);
    out.c2 = F * lhs.coeff(2);
    out.radical_base = content.num();
    out.root_c0 = r0;
    out.root_c1 = r1;
    out.clearing_factor = F;
    // certify (3F)^3 (a/b)^5 == a^2 exactly, i.e. the alpha factor is a^{2/3}
    out.radical_certified =
        rat_pow(Rational(3) * F, 3) * rat_pow(content, 5) == rat_pow(Rational(content.num()), 2);
    return out;
}

/// Change of variables w = tau^{(p+1)(p+2)}, s = (1 + 2/p)(1 - tau^{p(p+1)} u) w
/// that carries the second-kind form to the first-order equation for u(tau).
struct LampTransform {
    double tau;
    double u;
};

inline LampTransform lampariello_transform(double p, double w, double s) {
    if (std::isnan(p) || p <= 0.0 || std::isinf(p))
        throw ParameterError("lampariello_transform: requires finite p > 0");
    if (!(w > 0.0)) throw DomainError("lampariello_transform: requires w > 0");
    const double tau = std::pow(w, 1.0 / ((p + 1.0) * (p + 2.0)));
    const double u = std::pow(tau, -p * (p + 1.0)) * (1.0 - s / ((1.0 + 2.0 / p) * w));
    return LampTransform{tau, u};
}

inline std::pair<double, double> lampariello_inverse(double p, double tau, double u) {
    if (std::isnan(p) || p <= 0.0 || std::isinf(p))
        throw ParameterError("lampariello_inverse: requires finite p > 0");
    if (!(tau > 0.0)) throw DomainError("lampariello_inverse: requires tau > 0");
    const double w = std::pow(tau, (p + 1.0) * (p + 2.0));
    const double s = (1.0 + 2.0 / p) * (1.0 - std::pow(tau, p * (p + 1.0)) * u) * w;
    return {w, s};
}

/// du/dtau = -2 (p+1)^2 tau^{p-1} (1 - tau^{p^2} u^2) / (1 - tau^{p(p+1)} u).
inline double majorana_rhs(double p, double tau, double u) {
    if (std::isnan(p) || p <= 0.0 || std::isinf(p))
        throw ParameterError("majorana_rhs: requires finite p > 0");
    if (tau < 0.0) throw DomainError("majorana_rhs: requires tau >= 0");
    const double den = 1.0 - std::pow(tau, p * (p + 1.0)) * u;
    if (den == 0.0) {
        std::ostringstream os;
        os << "majorana_rhs: singular locus at tau=" << tau << ", u=" << u;
        throw SingularError(os.str());
    }
    const double tp = p == 1.0 ? 1.0 : std::pow(tau, p - 1.0); // tau^0 == 1 including tau = 0
    const double num = tp * (1.0 - std::pow(tau, p * p) * u * u);
    return -2.0 * (p + 1.0) * (p + 1.0) * num / den;
}

struct MajoranaReport {
    double max_residual = 0.0;
    std::size_t n_used = 0;
    std::size_t n_excluded = 0;
    double tau_min = 0.0, tau_max = 0.0;
    /// rows (tau, u, du/dtau by finite differences, du/dtau by the closed form)
    std::vector<std::array<double, 4>> table;
};

struct MajoranaOptions {
    std::size_t n_resample = 1200;      ///< uniform-in-tau resample size
    double locus_threshold = 0.05;      ///< exclude |1 - tau^{p(p+1)} u| below this
};

/// Maps a sampled (w, s) trajectory of the oscillator flow through the
/// Lampariello transformation, differentiates u along tau with 4th-order
/// central differences on a uniform resample, and reports the worst deviation
/// from the first-order equation away from its singular locus.
inline MajoranaReport majorana_consistency(double p, std::span<const double> w,
                                           std::span<const double> s,
                                           const MajoranaOptions& opt = {}) {
    if (w.size() != s.size()) throw DomainError("majorana_consistency: size mismatch");
    std::vector<double> taus, us;
    std::size_t excluded = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const LampTransform t = lampariello_transform(p, w[i], s[i]);
        const double den = 1.0 - std::pow(t.tau, p * (p + 1.0)) * t.u;
        if (std::abs(den) < opt.locus_threshold) {
            ++excluded;
            continue;
        }
        taus.push_back(t.tau);
        us.push_back(t.u);
    }
    if (taus.size() < 5) {
        std::ostringstream os;
        os << "majorana_consistency: only " << taus.size()
           << " usable samples away from the singular locus (need 5)";
        throw DomainError(os.str());
    }
    for (std::size_t i = 1; i < taus.size(); ++i)
        if (!(taus[i] > taus[i - 1]))
            throw DomainError("majorana_consistency: trajectory must be strictly monotone in tau");

    const MonotoneCubic interp(taus, us);
    const std::size_t m = std::max<std::size_t>(opt.n_resample, 16);
    const double a = taus.front(), b = taus.back();
    const double h = (b - a) / static_cast<double>(m - 1);
    std::vector<double> U(m);
    for (std::size_t i = 0; i < m; ++i) U[i] = interp(a + h * static_cast<double>(i));

    MajoranaReport rep;
    rep.n_excluded = excluded;
    rep.tau_min = a;
    rep.tau_max = b;
    for (std::size_t i = 2; i + 2 < m; ++i) {
        const double tau = a + h * static_cast<double>(i);
        const double den = 1.0 - std::pow(tau, p * (p + 1.0)) * U[i];
        if (std::abs(den) < opt.locus_threshold) continue;
        const double du_fd = (U[i - 2] - 8.0 * U[i - 1] + 8.0 * U[i + 1] - U[i + 2]) / (12.0 * h);
        const double du_rhs = majorana_rhs(p, tau, U[i]);
        rep.table.push_back({tau, U[i], du_fd, du_rhs});
        rep.max_residual = std::max(rep.max_residual, std::abs(du_fd - du_rhs));
        ++rep.n_used;
    }
    if (rep.n_used < 5) throw DomainError("majorana_consistency: fewer than 5 usable resample points");
    return rep;
}

} // namespace lamptf
