#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "lamptf/abel.hpp"

using namespace lamptf;
using Catch::Approx;

TEST_CASE("abel coefficients across the family") {
    const AbelForm a1 = abel_coefficients(1.0);
    CHECK(a1.f2 == -7.0);
    CHECK(a1.f3_amp == 12.0);
    CHECK(a1.f3_pow == 1.5);

    const AbelForm a2 = abel_coefficients(2.0);
    CHECK(a2.f2 == -5.0);
    CHECK(a2.f3_amp == 6.0);
    CHECK(a2.f3_pow == Approx(5.0 / 3.0).margin(1e-15));

    const AbelForm ainf = abel_coefficients(std::numeric_limits<double>::infinity());
    CHECK(ainf.f2 == -3.0);
    CHECK(ainf.f3_amp == 2.0);
    CHECK(ainf.f3_pow == 2.0);

    for (double p : {0.1, 0.5, 1.0, 3.0, 50.0}) {
        CHECK(abel_coefficients(p).f2 < 0.0);
        CHECK(abel_coefficients(p).f3(1.0) == 0.0); // f3 vanishes at the ratio equilibrium
    }
    CHECK_THROWS_AS(abel_coefficients(0.0), ParameterError);
}

TEST_CASE("second-kind right side") {
    CHECK(abel_second_kind_rhs(1.0, 1.0, 1.0) == Approx(7.0).margin(1e-14));
    CHECK(abel_second_kind_rhs(1.0, 0.25, 1.0) == Approx(5.5).margin(1e-13));
    CHECK(abel_second_kind_rhs(1.0, 0.0, 2.0) == Approx(7.0).margin(1e-14));
    CHECK(abel_second_kind_rhs(3.0, 0.0, -1.0) == Approx(3.0 + 4.0 / 3.0).margin(1e-14));
    CHECK_THROWS_AS(abel_second_kind_rhs(1.0, 0.5, 0.0), SingularError);
    CHECK_THROWS_AS(abel_second_kind_rhs(1.0, -0.5, 1.0), DomainError);
}

TEST_CASE("invariant closed form at p = 1") {
    CHECK(abel_invariant(1.0, 0.0) == Approx(70.0 / 27.0).margin(1e-15));
    CHECK(abel_invariant(1.0, 1.0) == Approx(70.0 / 27.0 - 42.0).margin(1e-13));
    const double w_root = std::pow(5.0 / 81.0, 2.0);
    CHECK(abel_invariant(1.0, w_root) == Approx(0.0).margin(1e-13));
    CHECK(abel_invariant_form(1.0).root() == Approx(w_root).epsilon(1e-12));

    // 50-point specialization check against 70/27 - 42 sqrt(w)
    for (int i = 1; i <= 50; ++i) {
        const double w = i / 50.0;
        CHECK(std::abs(abel_invariant(1.0, w) - (70.0 / 27.0 - 42.0 * std::sqrt(w))) < 1e-13);
    }
}

TEST_CASE("invariant closed form equals the defining combination") {
    for (double p : {0.5, 1.0, 2.0, 5.0}) {
        for (int i = 1; i <= 20; ++i) {
            const double w = i / 20.0;
            const double closed = abel_invariant(p, w);
            const double defining = abel_invariant_defining(p, w);
            CHECK(std::abs(closed - defining) < 1e-12 * (1.0 + std::abs(closed)));
        }
    }
}

TEST_CASE("alpha varies across w: the family is not integrable by quadrature") {
    const double a1 = integrability_alpha(1.0, 0.01);
    const double a2 = integrability_alpha(1.0, 0.25);
    CHECK(std::abs(a1 - a2) > 0.1);

    const auto grid = default_w_grid();
    for (double p : {0.5, 1.0, 2.0, 5.0}) {
        const IntegrabilityReport rep = check_integrability(p, grid);
        CHECK(rep.verdict == IntegrabilityVerdict::NonIntegrable);
        CHECK(rep.samples.size() >= 8);
        CHECK(rep.alpha_spread > 0.1);
    }
}

TEST_CASE("alpha spread at p = 1 is robust, not marginal") {
    std::vector<double> grid;
    for (int i = 0; i < 10; ++i) grid.push_back(0.05 + 0.1 * i);
    const IntegrabilityReport rep = check_integrability(1.0, grid);
    CHECK(rep.alpha_spread > 0.1);
    // the whole default grid sits on the Phi < 0 side of the root
    CHECK(rep.spread_phi_negative == Approx(rep.alpha_spread));
    CHECK(rep.excluded.empty());
}

TEST_CASE("manufactured integrable pair is recognized as a positive control") {
    // f2 = a w, f3 = b w^3 satisfies the condition with constant alpha:
    // Phi = (2a^3/27 - 2ab/3) w^3, both condition sides scale like w^5.
    const double a = 3.0, b = 2.0;
    auto f2 = [&](double w) { return a * w; };
    auto f3 = [&](double w) { return b * w * w * w; };
    auto df3 = [&](double w) { return 3.0 * b * w * w; };
    const double C = -a * b * 2.0 / 3.0 + 2.0 * a * a * a / 27.0;
    auto phi = [&](double w) { return C * w * w * w; };
    auto dphi = [&](double w) { return 3.0 * C * w * w; };

    double lo = 1e300, hi = -1e300;
    for (double w : default_w_grid()) {
        const double alpha = alpha_from_parts(f2(w), f3(w), df3(w), phi(w), dphi(w));
        lo = std::min(lo, alpha);
        hi = std::max(hi, alpha);
    }
    CHECK(hi - lo < 1e-10);
    // analytic value of the constant: (a^2 - 6b) / (3 |C|^{2/3}) with the sign branch
    const double expected = (a * a - 3.0 * b * 2.0) / (3.0 * real_pow_5_3(C) / C);
    CHECK(lo == Approx(expected).epsilon(1e-12));
}

TEST_CASE("alpha is excluded exactly at the invariant root") {
    const double w_root = abel_invariant_form(1.0).root();
    CHECK_THROWS_AS(alpha_from_parts(-7.0, 1.0, 1.0, 0.0, 1.0), SingularError);
    CHECK_THROWS_AS(integrability_alpha(1.0, -0.5), DomainError);

    // a grid living entirely inside the excluded neighbourhood is indeterminate
    std::vector<double> bad{w_root * 0.9995, w_root * 1.0005};
    const IntegrabilityReport rep = check_integrability(1.0, bad);
    CHECK(rep.verdict == IntegrabilityVerdict::Indeterminate);
    CHECK(rep.excluded.size() == 2);
}

TEST_CASE("cleared integrability condition at p = 1, exact arithmetic") {
    const ClearedCondition cc = tf_cleared_condition();
    CHECK(cc.c0 == Rational(195));
    CHECK(cc.c1 == Rational(-3807));
    CHECK(cc.c2 == Rational(-11664));
    CHECK(cc.radical_base == 14);
    CHECK(cc.root_c0 == Rational(5));
    CHECK(cc.root_c1 == Rational(-81));
    CHECK(cc.clearing_factor == Rational(81, 14));
    CHECK(cc.radical_certified);
}

TEST_CASE("cleared condition matches the double-precision route pointwise") {
    const ClearedCondition cc = tf_cleared_condition();
    const AbelForm a = abel_coefficients(1.0);
    const AbelInvariant inv = abel_invariant_form(1.0);
    for (double w : {0.05, 0.2, 0.5, 0.9}) {
        const double u = std::sqrt(w);
        const double lhs = cc.c0.to_double() + cc.c1.to_double() * u + cc.c2.to_double() * w;
        const double raw = a.f3(w) * inv.derivative(w) +
                           (a.f2 * a.f2 - 3.0 * a.df3(w)) * inv.value(w);
        CHECK(lhs == Approx(cc.clearing_factor.to_double() * raw).epsilon(1e-12));
        // and the alpha side: 14^{2/3} (5 - 81 sqrt(w))^{5/3} alpha
        const double alpha = integrability_alpha(1.0, w);
        const double radical = std::cbrt(14.0 * 14.0) *
                               real_pow_5_3(5.0 - 81.0 * u) * alpha;
        CHECK(lhs == Approx(radical).epsilon(1e-10));
    }
}

TEST_CASE("lampariello transform round-trips") {
    std::mt19937 rng(424242);
    std::uniform_real_distribution<double> wdist(1e-3, 2.0), sdist(-3.0, 3.0);
    for (double p : {0.5, 1.0, 2.0, 7.0}) {
        for (int i = 0; i < 200; ++i) {
            const double w = wdist(rng), s = sdist(rng);
            const LampTransform t = lampariello_transform(p, w, s);
            const auto [w2, s2] = lampariello_inverse(p, t.tau, t.u);
            CHECK(std::abs(w2 - w) <= 1e-12 * std::max(1.0, std::abs(w)));
            CHECK(std::abs(s2 - s) <= 1e-12 * std::max(1.0, std::abs(s)));
        }
    }
}

TEST_CASE("lampariello transform markers") {
    // w = 1, s = 0 sits at tau = 1, u = 1
    const LampTransform t0 = lampariello_transform(1.0, 1.0, 0.0);
    CHECK(t0.tau == 1.0);
    CHECK(t0.u == 1.0);
    // p = 1, w = 1, s = 3 = (1 + 2/p) w gives u = 0
    const LampTransform t1 = lampariello_transform(1.0, 1.0, 3.0);
    CHECK(t1.tau == 1.0);
    CHECK(t1.u == 0.0);
    CHECK_THROWS_AS(lampariello_transform(1.0, 0.0, 0.0), DomainError);
}

TEST_CASE("majorana right side") {
    CHECK(majorana_rhs(1.0, 0.0, 0.7) == -8.0);
    CHECK(majorana_rhs(1.0, 0.0, -12.0) == -8.0);
    CHECK(majorana_rhs(1.0, 0.5, 1.0) == Approx(-16.0 / 3.0).margin(1e-13));
    CHECK_THROWS_AS(majorana_rhs(1.0, 1.0, 1.0), SingularError);
    CHECK_THROWS_AS(majorana_rhs(1.0, -0.1, 1.0), DomainError);
    // general-p form at p = 2
    const double tau = 0.5, u = 0.3;
    const double p = 2.0;
    const double expect = -2.0 * 9.0 * std::pow(tau, 1.0) *
                          (1.0 - std::pow(tau, 4.0) * u * u) /
                          (1.0 - std::pow(tau, 6.0) * u);
    CHECK(majorana_rhs(p, tau, u) == Approx(expect).margin(1e-14));
}

TEST_CASE("majorana consistency rejects degenerate trajectories") {
    // constant trajectory w = 1, s = 0 sits on the singular locus entirely
    std::vector<double> w(10, 1.0), s(10, 0.0);
    CHECK_THROWS_WITH(majorana_consistency(1.0, w, s),
                      Catch::Matchers::ContainsSubstring("usable samples"));
}

TEST_CASE("majorana consistency flags a trajectory violating the equation") {
    // start from the exact relation tau -> (w, s) with s deliberately scaled
    std::vector<double> w, s;
    for (int i = 0; i < 400; ++i) {
        const double tau = 0.05 + 0.9 * i / 399.0;
        const auto [wi, si] = lampariello_inverse(1.0, tau, 0.2); // u = const, s off-flow
        w.push_back(wi);
        s.push_back(si * 1.1);
    }
    const MajoranaReport rep = majorana_consistency(1.0, w, s);
    CHECK(rep.max_residual > 0.01);
}
