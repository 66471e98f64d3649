#pragma once

// The reproduction suite: every published quantity this library rebuilds,
// checked at a pinned tolerance. One entry per criterion; the CLI `reproduce`
// command and the acceptance test binary both run exactly this list.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "lamptf/abel.hpp"
#include "lamptf/bvp.hpp"
#include "lamptf/crosscheck.hpp"
#include "lamptf/family.hpp"
#include "lamptf/phase.hpp"
#include "lamptf/rational.hpp"
#include "lamptf/svg.hpp"
#include "lamptf/tables.hpp"

namespace lamptf {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string details;
};

struct ReproduceOptions {
    double k1_override = 0.0; ///< nonzero replaces k_1 in criterion 1 (fault-injection hook for tests)
};

struct ReproduceReport {
    std::vector<CriterionResult> results;
    bool all_pass = true;
    double elapsed_s = 0.0;
};

namespace detail {

inline std::string fmtg(double v, int prec = 6) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    return buf;
}

class CriterionRecorder {
  public:
    explicit CriterionRecorder(ReproduceReport& rep) : rep_(rep) {}

    template <class F>
    void run(int id, const std::string& name, F&& body) {
        CriterionResult r;
        r.id = id;
        r.name = name;
        std::ostringstream detail;
        try {
            r.pass = body(detail);
        } catch (const std::exception& e) {
            r.pass = false;
            detail << " exception: " << e.what();
        }
        r.details = detail.str();
        rep_.results.push_back(std::move(r));
        rep_.all_pass = rep_.all_pass && rep_.results.back().pass;
    }

  private:
    ReproduceReport& rep_;
};

inline Vec2 unit(Vec2 v) {
    const double n = std::hypot(v.x, v.y);
    return Vec2{v.x / n, v.y / n};
}

// componentwise agreement of two directions after unit normalization
inline double direction_gap(Vec2 a, Vec2 b) {
    const Vec2 ua = unit(a), ub = unit(b);
    const double same = std::max(std::abs(ua.x - ub.x), std::abs(ua.y - ub.y));
    const double flip = std::max(std::abs(ua.x + ub.x), std::abs(ua.y + ub.y));
    return std::min(same, flip);
}

} // namespace detail

inline ReproduceReport run_reproduction(const ReproduceOptions& opt = {}) {
    using clock = std::chrono::steady_clock;
    const auto t_start = clock::now();
    auto seconds_since = [](clock::time_point t0) {
        return std::chrono::duration<double>(clock::now() - t0).count();
    };

    ReproduceReport rep;
    detail::CriterionRecorder rec(rep);
    constexpr double kInf = std::numeric_limits<double>::infinity();

    rec.run(1, "exact family constants", [&](std::ostringstream& d) {
        const auto t0 = clock::now();
        const double k1 = opt.k1_override != 0.0 ? opt.k1_override : particular_solution(1.0).k;
        const OscillatorCoefficients c1 = oscillator_coefficients(1.0);
        const OscillatorCoefficients cinf = oscillator_coefficients(kInf);
        const double zeta1_err = std::abs(c1.zeta + 7.0 * std::sqrt(3.0) / 12.0);
        const double zetainf_err = std::abs(cinf.zeta + 3.0 * std::sqrt(2.0) / 4.0);
        const double dt = seconds_since(t0);
        const bool pass = k1 == 144.0 && c1.r1 == 4.0 && c1.r2 == 3.0 && c1.kappa == 12.0 &&
                          cinf.kappa == 2.0 && zeta1_err <= 1e-14 && zetainf_err <= 1e-14 &&
                          dt < 1e-3;
        d << "k1=" << detail::fmtg(k1, 17) << " r1=" << c1.r1 << " r2=" << c1.r2
          << " kappa1=" << c1.kappa << " kappa_inf=" << cinf.kappa
          << " |zeta1+7sqrt3/12|=" << detail::fmtg(zeta1_err)
          << " |zeta_inf+3sqrt2/4|=" << detail::fmtg(zetainf_err)
          << " runtime=" << detail::fmtg(dt * 1e3) << "ms";
        return pass;
    });

    rec.run(2, "perturbation exponents at p=1", [&](std::ostringstream& d) {
        const PerturbationExpansion pe = perturbation_expansion(1.0);
        const double root = std::sqrt(73.0);
        const double err = std::max(std::abs(pe.exp_minus - 0.5 * (1.0 - root)),
                                    std::abs(pe.exp_plus - 0.5 * (1.0 + root)));
        char minus[32], plus[32];
        std::snprintf(minus, sizeof(minus), "%.3f", pe.exp_minus);
        std::snprintf(plus, sizeof(plus), "%.3f", pe.exp_plus);
        const bool printed = std::string(minus) == "-3.772" && std::string(plus) == "4.772";
        d << "exponents=(" << minus << ", " << plus << ") closed-form err=" << detail::fmtg(err);
        return err <= 1e-12 && printed;
    });

    rec.run(3, "invariant closed form vs defining combination at p=1", [&](std::ostringstream& d) {
        double worst = 0.0;
        for (int i = 1; i <= 50; ++i) {
            const double w = static_cast<double>(i) / 50.0;
            worst = std::max(worst, std::abs(abel_invariant(1.0, w) - abel_invariant_defining(1.0, w)));
            worst = std::max(worst,
                             std::abs(abel_invariant(1.0, w) - (70.0 / 27.0 - 42.0 * std::sqrt(w))));
        }
        d << "max |closed - defining| = " << detail::fmtg(worst) << " over 50 points";
        return worst < 1e-13;
    });

    rec.run(4, "non-integrability certificate", [&](std::ostringstream& d) {
        const auto t0 = clock::now();
        const auto grid = default_w_grid();
        const IntegrabilityReport r1 = check_integrability(1.0, grid);
        bool family_ok = r1.verdict == IntegrabilityVerdict::NonIntegrable && r1.alpha_spread > 0.1;
        d << "alpha spread p=1: " << detail::fmtg(r1.alpha_spread);
        for (double p : {0.5, 2.0, 5.0}) {
            const IntegrabilityReport r = check_integrability(p, grid);
            family_ok = family_ok && r.verdict == IntegrabilityVerdict::NonIntegrable;
            d << " p=" << detail::fmtg(p) << ":" << to_string(r.verdict);
        }
        // manufactured integrable pair f2 = a w, f3 = b w^3: constant alpha
        const double a = 3.0, b = 2.0;
        const double C = -a * b * 2.0 / 3.0 + 2.0 * a * a * a / 27.0;
        double lo = 1e300, hi = -1e300;
        for (double w : grid) {
            const double alpha = alpha_from_parts(a * w, b * w * w * w, 3.0 * b * w * w,
                                                  C * w * w * w, 3.0 * C * w * w);
            lo = std::min(lo, alpha);
            hi = std::max(hi, alpha);
        }
        const double control_spread = hi - lo;
        const double dt = seconds_since(t0);
        d << " control spread=" << detail::fmtg(control_spread)
          << " runtime=" << detail::fmtg(dt * 1e3) << "ms";
        return family_ok && control_spread < 1e-10 && dt < 1e-2;
    });

    rec.run(5, "cleared condition constants at p=1 (exact rationals)", [&](std::ostringstream& d) {
        const ClearedCondition cc = tf_cleared_condition();
        const bool pass = cc.c0 == Rational(195) && cc.c1 == Rational(-3807) &&
                          cc.c2 == Rational(-11664) && cc.radical_base == 14 &&
                          cc.root_c0 == Rational(5) && cc.root_c1 == Rational(-81) &&
                          cc.radical_certified;
        d << "cleared: " << cc.c0.str() << " " << cc.c1.str() << "*sqrt(w) " << cc.c2.str()
          << "*w, factor " << cc.radical_base << "^(2/3) (" << cc.root_c0.str() << " "
          << cc.root_c1.str() << "*sqrt(w))^(5/3), certified="
          << (cc.radical_certified ? "yes" : "no");
        return pass;
    });

    rec.run(6, "trace table of the four fixed points", [&](std::ostringstream& d) {
        // exact rational route
        const Rational n(3, 2), lam(2);
        const Rational X[4] = {Rational(0), Rational(-1), Rational(0), Rational(-4)};
        const Rational Y[4] = {Rational(0), Rational(0), Rational(3), Rational(-3)};
        const Rational expect[4][3] = {{Rational(2), Rational(-3), Rational(16)},
                                       {Rational(5, 2), Rational(3, 2), Rational(1, 4)},
                                       {Rational(-1), Rational(-6), Rational(25)},
                                       {Rational(7), Rational(-6), Rational(73)}};
        bool pass = true;
        for (int i = 0; i < 4; ++i) {
            const Mat2<Rational> J = jacobian_entries<Rational>(n, lam, X[i], Y[i]);
            const Rational tr = J.m11 + J.m22;
            const Rational det = J.m11 * J.m22 - J.m12 * J.m21;
            const Rational disc = tr * tr - Rational(4) * det;
            pass = pass && tr == expect[i][0] && det == expect[i][1] && disc == expect[i][2];
        }
        // double route must agree digit-exact and classify saddles by det < 0
        const auto pts = classified_fixed_points(AutonomousSystem{1.5, 2.0});
        pass = pass && pts.size() == 4;
        for (int i = 0; i < 4 && pass; ++i) {
            pass = pts[i].trace == expect[i][0].to_double() &&
                   pts[i].det == expect[i][1].to_double() &&
                   pts[i].discriminant == expect[i][2].to_double();
            if (expect[i][1] < Rational(0)) pass = pass && pts[i].kind == PointKind::Saddle;
        }
        d << "(2,-3,16) (5/2,3/2,1/4) (-1,-6,25) (7,-6,73) digit-exact, saddles at det<0";
        return pass;
    });

    rec.run(7, "saddle eigenvalues and reported flow directions", [&](std::ostringstream& d) {
        const FixedPoint saddle = classify_at(AutonomousSystem{1.5, 2.0}, -4.0, -3.0);
        const double root = std::sqrt(73.0);
        const double eig_err = std::max(std::abs(saddle.theta1.real() - 0.5 * (7.0 + root)),
                                        std::abs(saddle.theta2.real() - 0.5 * (7.0 - root)));
        const auto [u1, u2] = tf_saddle_direction_report();
        const double gap1 = detail::direction_gap(u1, Vec2{1.0, -0.943});
        const double gap2 = detail::direction_gap(u2, Vec2{6.171, 1.0});
        d << "eig err=" << detail::fmtg(eig_err) << " direction gaps=(" << detail::fmtg(gap1)
          << ", " << detail::fmtg(gap2) << ") vs (1,-0.943),(6.171,1)";
        return eig_err <= 1e-12 && gap1 <= 5e-4 && gap2 <= 5e-4;
    });

    rec.run(8, "eigenvalue-perturbation link", [&](std::ostringstream& d) {
        double worst = 0.0;
        for (double p : {1.0, 2.0, 5.0}) {
            const EigenPerturbationLink link = eigen_perturbation_link(p);
            const PerturbationExpansion pe = perturbation_expansion(p);
            worst = std::max({worst, std::abs(link.theta0_1 - pe.exp_plus),
                              std::abs(link.theta0_2 - pe.exp_minus)});
        }
        d << "max |theta0 - exponent| = " << detail::fmtg(worst) << " over p in {1,2,5}";
        return worst <= 1e-12;
    });

    rec.run(9, "saddle recovers the particular solution", [&](std::ostringstream& d) {
        const SaddleRecovery r = saddle_recovers_y0(1.0);
        const ParticularSolution y0 = particular_solution(1.0);
        d << "product=" << detail::fmtg(r.product, 17) << " amplitude="
          << detail::fmtg(r.amplitude, 17) << " exponent=" << detail::fmtg(r.exponent, 17);
        return r.product == 12.0 && r.amplitude == 144.0 && r.exponent == 3.0 &&
               r.amplitude == y0.k && r.exponent == y0.exponent;
    });

    // the p=1 solution is shared by criteria 10 and 11
    TFSolution tf_solution;
    rec.run(10, "shooting solver against the brute-force route", [&](std::ostringstream& d) {
        const auto t0 = clock::now();
        SolveOptions o1;
        o1.slope_tol = 1e-10;
        o1.shot.rtol = 1e-12;
        o1.shot.atol = 1e-16;
        tf_solution = solve_bvp(1.0, o1);
        bool pass = tf_solution.bracket.second - tf_solution.bracket.first <= o1.slope_tol;

        // bracket endpoints certify opposite kinds (overshoot may need a
        // longer window to reveal itself)
        const ShotKind lo_kind = shoot(1.0, tf_solution.bracket.first, o1.x_max, o1.shot).kind;
        ShotKind hi_kind = shoot(1.0, tf_solution.bracket.second, o1.x_max, o1.shot).kind;
        for (double xm = 2.0 * o1.x_max; hi_kind == ShotKind::Monotone && xm <= 8.0 * o1.x_max;
             xm *= 2.0)
            hi_kind = shoot(1.0, tf_solution.bracket.second, xm, o1.shot).kind;
        pass = pass && lo_kind == ShotKind::Undershoot && hi_kind == ShotKind::Overshoot;

        SolveOptions o2;
        o2.slope_tol = 1e-8;
        const TFSolution sol2 = solve_bvp(2.0, o2);
        pass = pass && sol2.bracket.second - sol2.bracket.first <= o2.slope_tol;

        const double oracle = crosscheck::critical_slope_rk4(1.0, 100.0, 2e-4, 1e-8);
        const double slope_gap = std::abs(tf_solution.slope - oracle);
        pass = pass && slope_gap < 1e-5;

        // interpolant-derivative residual outside the start-up layer
        double resid = 0.0;
        const FamilyParams fp = family_params(1.0);
        const auto& samples = tf_solution.curve.samples;
        for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
            const double tm = 0.5 * (samples[i].t + samples[i + 1].t);
            if (tm < 1e-3) continue;
            const auto st = dense_eval(tf_solution.curve, tm);
            const auto dst = dense_eval_derivative(tf_solution.curve, tm);
            resid = std::max(resid, std::abs(dst[1] - ef_rhs(fp, tm, st[0])));
        }
        pass = pass && resid < 1e-6;

        const double w10 = ratio_at(tf_solution, 10.0);
        const double w50 = ratio_at(tf_solution, 50.0);
        const bool tail_within = std::abs(w50 - 1.0) < 0.05;
        const bool tail_closer = std::abs(w50 - 1.0) < std::abs(w10 - 1.0);
        const double dt = seconds_since(t0);
        d << "slope=" << detail::fmtg(tf_solution.slope, 12) << " |slope-oracle|="
          << detail::fmtg(slope_gap) << " residual(x>1e-3)=" << detail::fmtg(resid)
          << " w(10)=" << detail::fmtg(w10) << " w(50)=" << detail::fmtg(w50)
          << " runtime=" << detail::fmtg(dt) << "s";
        if (!tail_within)
            d << " [|w(50)-1|=" << detail::fmtg(std::abs(w50 - 1.0))
              << " exceeds 0.05: the tail correction decays like x^-0.772, reaching 5% of the "
                 "particular solution only near x~860]";
        return pass && tail_within && tail_closer && dt < 30.0;
    });

    rec.run(11, "first-order reduction along the solved trajectory", [&](std::ostringstream& d) {
        if (tf_solution.curve.samples.empty()) {
            SolveOptions o;
            o.slope_tol = 1e-10;
            o.shot.rtol = 1e-12;
            o.shot.atol = 1e-16;
            tf_solution = solve_bvp(1.0, o);
        }
        const ParticularSolution y0 = particular_solution(1.0);
        std::vector<double> w, s;
        const int n = 2000;
        const double x_lo = 0.05, x_hi = 0.98 * tf_solution.curve.t_last();
        for (int i = 0; i < n; ++i) {
            const double x = x_lo * std::pow(x_hi / x_lo, static_cast<double>(i) / (n - 1));
            const auto st = dense_eval(tf_solution.curve, x);
            const double x3 = x * x * x;
            w.push_back(st[0] * x3 / y0.k);
            s.push_back(x3 * (x * st[1] + 3.0 * st[0]) / y0.k);
        }
        const MajoranaReport mrep = majorana_consistency(1.0, w, s);
        const double origin = majorana_rhs(1.0, 0.0, 0.37);
        d << "max residual=" << detail::fmtg(mrep.max_residual) << " over " << mrep.n_used
          << " points, rhs(tau=0)=" << detail::fmtg(origin, 17);
        return mrep.max_residual < 1e-4 && origin == -8.0;
    });

    rec.run(12, "integrator order on the harmonic study", [&](std::ostringstream& d) {
        const double two_pi = 2.0 * std::numbers::pi;
        auto global_error = [&](int n_steps) {
            IVProblem p;
            p.rhs = [](double, std::span<const double> y, std::span<double> f) {
                f[0] = y[1];
                f[1] = -y[0];
            };
            p.t0 = 0.0;
            p.t_end = two_pi;
            p.state0 = {1.0, 0.0};
            p.fixed_step = true;
            p.max_step = two_pi / n_steps;
            const SolutionCurve c = integrate_ivp(p);
            return std::hypot(c.samples.back().state[0] - 1.0, c.samples.back().state[1]);
        };
        double prev = global_error(20);
        double min_order = 1e300;
        d << "orders:";
        for (int n : {40, 80, 160}) {
            const double cur = global_error(n);
            const double order = std::log2(prev / cur);
            min_order = std::min(min_order, order);
            d << " " << detail::fmtg(order, 4);
            prev = cur;
        }
        return min_order >= 4.7;
    });

    rec.run(13, "portrait artifacts at p=1", [&](std::ostringstream& d) {
        const AutonomousSystem sys = family_system(family_params(1.0));
        const Window w{};
        const auto seeds = default_seeds(sys, w);
        const PhasePortrait por = portrait(sys, seeds, 8.0, w);

        // CSV companion carries the trace table
        const std::string csv = fixed_point_table(por.points).str();
        bool pass = csv.find("7,-6,73,Saddle") != std::string::npos &&
                    csv.find("2,-3,16,Saddle") != std::string::npos &&
                    csv.find("-1,-6,25,Saddle") != std::string::npos &&
                    csv.find("2.5,1.5,0.25,UnstableNode") != std::string::npos;

        int saddles = 0, nodes = 0;
        for (const auto& fp : por.points) {
            saddles += fp.kind == PointKind::Saddle;
            nodes += fp.kind == PointKind::StableNode || fp.kind == PointKind::UnstableNode;
        }
        pass = pass && saddles == 3 && nodes == 1;

        // SVG structure: versioned header, one cross glyph per saddle, a node
        // disc, dashed nullclines, and the trajectory bundle
        const std::string svg = render_portrait_svg(por);
        auto count = [&](const std::string& needle) {
            int c = 0;
            for (std::size_t at = svg.find(needle); at != std::string::npos;
                 at = svg.find(needle, at + needle.size()))
                ++c;
            return c;
        };
        pass = pass && svg.find(kSvgGeneratorVersion) != std::string::npos;
        pass = pass && count("stroke=\"#b22222\"") == saddles;
        pass = pass && count("<circle") >= 1 && count("stroke-dasharray=\"6 4\"") == 4;
        pass = pass && count("<polyline") > static_cast<int>(seeds.size());

        // trajectories follow the computed eigendirections off the saddle
        const FixedPoint saddle = classify_at(sys, -4.0, -3.0);
        const auto [v_fast, v_slow] = saddle_flow_directions(saddle);
        const double eps = 1e-3;
        const std::vector<Vec2> probe{{-4.0 + eps * v_fast.x, -3.0 + eps * v_fast.y},
                                      {-4.0 + eps * v_slow.x, -3.0 + eps * v_slow.y}};
        const PhasePortrait por2 = portrait(sys, probe, 0.5, w);
        auto dist = [&](const SolutionCurve& c) {
            const auto st = dense_eval(c, 0.5);
            return std::hypot(st[0] + 4.0, st[1] + 3.0);
        };
        const double esc = dist(por2.trajectories[0].forward);
        const double con = dist(por2.trajectories[1].forward);
        pass = pass && esc > 10.0 * eps && con < eps;
        d << saddles << " saddles + " << nodes << " node in CSV/SVG; off-saddle probes: "
          << "unstable grows to " << detail::fmtg(esc) << ", stable contracts to "
          << detail::fmtg(con);
        return pass;
    });

    rep.elapsed_s = seconds_since(t_start);
    return rep;
}

} // namespace lamptf
