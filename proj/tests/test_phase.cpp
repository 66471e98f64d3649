#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "lamptf/family.hpp"
#include "lamptf/phase.hpp"
#include "lamptf/rational.hpp"

using namespace lamptf;
using Catch::Approx;

namespace {
const AutonomousSystem kTF{1.5, 2.0};
}

TEST_CASE("system right side") {
    auto [m0, n0] = system_rhs(kTF, 0.0, 0.0);
    CHECK(m0 == 0.0);
    CHECK(n0 == 0.0);
    auto [m1, n1] = system_rhs(kTF, -4.0, -3.0);
    CHECK(m1 == 0.0);
    CHECK(n1 == 0.0);
    auto [m2, n2] = system_rhs(kTF, 1.0, 1.0);
    CHECK(m2 == Approx(-1.0).margin(0));
    CHECK(n2 == Approx(3.5).margin(0));
}

TEST_CASE("fixed points of the TF system") {
    const FixedPointSet fps = fixed_points(kTF);
    REQUIRE(fps.points.size() == 4);
    CHECK_FALSE(fps.fourth_missing);
    CHECK(fps.points[0].x == 0.0);
    CHECK(fps.points[0].y == 0.0);
    CHECK(fps.points[1].x == -1.0);
    CHECK(fps.points[1].y == 0.0);
    CHECK(fps.points[2].x == 0.0);
    CHECK(fps.points[2].y == 3.0);
    CHECK(fps.points[3].x == -4.0);
    CHECK(fps.points[3].y == -3.0);

    // the vector field vanishes at every returned point
    for (const Vec2& pt : fps.points) {
        auto [m, n] = system_rhs(kTF, pt.x, pt.y);
        CHECK(std::abs(m) <= 1e-12);
        CHECK(std::abs(n) <= 1e-12);
    }
}

TEST_CASE("fourth fixed point follows the family parameter") {
    for (double p : {1.0, 2.0, 5.0, 1e9}) {
        const AutonomousSystem sys = family_system(family_params(p));
        const FixedPointSet fps = fixed_points(sys);
        REQUIRE(fps.points.size() == 4);
        CHECK(fps.points[3].x == Approx(-3.0 - 1.0 / p).epsilon(1e-9));
        CHECK(fps.points[3].y == Approx(-2.0 - 1.0 / p).epsilon(1e-9));
    }
    // the limit member parks it at (-3, -2)
    const AutonomousSystem lim = family_system(family_params(1e12));
    CHECK(fixed_points(lim).points[3].x == Approx(-3.0).margin(1e-9));
    CHECK(fixed_points(lim).points[3].y == Approx(-2.0).margin(1e-9));
}

TEST_CASE("n = 1 leaves only three fixed points, flagged") {
    const FixedPointSet fps = fixed_points(AutonomousSystem{1.0, 2.0});
    CHECK(fps.points.size() == 3);
    CHECK(fps.fourth_missing);
}

TEST_CASE("jacobian entries") {
    const Mat2<double> J = jacobian(kTF, -4.0, -3.0);
    CHECK(J.m11 == 4.0);
    CHECK(J.m12 == -4.0);
    CHECK(J.m21 == -4.5);
    CHECK(J.m22 == 3.0);

    const Mat2<double> J0 = jacobian(kTF, 0.0, 0.0);
    CHECK(J0.m11 == -1.0);
    CHECK(J0.m12 == 0.0);
    CHECK(J0.m21 == 0.0);
    CHECK(J0.m22 == 3.0);

    // at (0, lambda+1) the matrix is [[lambda, 0], [n(lambda+1), -(lambda+1)]]
    for (double n : {1.3, 2.5}) {
        for (double lam : {0.7, 2.0}) {
            const Mat2<double> Jt = jacobian(AutonomousSystem{n, lam}, 0.0, lam + 1.0);
            CHECK(Jt.m11 == Approx(lam).margin(1e-15));
            CHECK(Jt.m12 == 0.0);
            CHECK(Jt.m21 == Approx(n * (lam + 1.0)).margin(1e-15));
            CHECK(Jt.m22 == Approx(-(lam + 1.0)).margin(1e-15));
        }
    }
}

TEST_CASE("trace table of the four TF points is digit-exact") {
    const double expected[4][3] = {
        {2.0, -3.0, 16.0}, {2.5, 1.5, 0.25}, {-1.0, -6.0, 25.0}, {7.0, -6.0, 73.0}};
    const auto pts = classified_fixed_points(kTF);
    REQUIRE(pts.size() == 4);
    for (int i = 0; i < 4; ++i) {
        CHECK(pts[i].trace == expected[i][0]);
        CHECK(pts[i].det == expected[i][1]);
        CHECK(pts[i].discriminant == expected[i][2]);
    }
    CHECK(pts[0].kind == PointKind::Saddle);
    CHECK(pts[1].kind == PointKind::UnstableNode); // forward-t sign chart; see note
    CHECK_FALSE(pts[1].note.empty());
    CHECK(pts[2].kind == PointKind::Saddle);
    CHECK(pts[3].kind == PointKind::Saddle);
}

TEST_CASE("trace table reproduced in exact rational arithmetic") {
    const Rational n(3, 2), lam(2);
    const Rational X[4] = {Rational(0), Rational(-1), Rational(0), Rational(-4)};
    const Rational Y[4] = {Rational(0), Rational(0), Rational(3), Rational(-3)};
    const Rational expect[4][3] = {
        {Rational(2), Rational(-3), Rational(16)},
        {Rational(5, 2), Rational(3, 2), Rational(1, 4)},
        {Rational(-1), Rational(-6), Rational(25)},
        {Rational(7), Rational(-6), Rational(73)}};
    for (int i = 0; i < 4; ++i) {
        const Mat2<Rational> J = jacobian_entries<Rational>(n, lam, X[i], Y[i]);
        const Rational tr = J.m11 + J.m22;
        const Rational det = J.m11 * J.m22 - J.m12 * J.m21;
        const Rational disc = tr * tr - Rational(4) * det;
        CHECK(tr == expect[i][0]);
        CHECK(det == expect[i][1]);
        CHECK(disc == expect[i][2]);
    }
}

TEST_CASE("classification is consistent on random matrices") {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> entry(-5.0, 5.0);
    for (int i = 0; i < 1000; ++i) {
        const Mat2<double> J{entry(rng), entry(rng), entry(rng), entry(rng)};
        const FixedPoint fp = classify(J);
        // eigenvalue sum and product against trace and determinant
        CHECK(std::abs((fp.theta1 + fp.theta2).real() - fp.trace) <= 1e-12 * std::max(1.0, std::abs(fp.trace)));
        CHECK(std::abs((fp.theta1 * fp.theta2).real() - fp.det) <= 1e-10 * std::max(1.0, std::abs(fp.det)));
        CHECK(std::abs((fp.theta1 + fp.theta2).imag()) <= 1e-12);
        // sign chart
        if (fp.kind == PointKind::Saddle) CHECK(fp.det < 0.0);
        if (fp.kind == PointKind::StableNode) {
            CHECK(fp.det > 0.0);
            CHECK(fp.discriminant > 0.0);
            CHECK(fp.trace < 0.0);
        }
        if (fp.kind == PointKind::UnstableNode) {
            CHECK(fp.det > 0.0);
            CHECK(fp.discriminant > 0.0);
            CHECK(fp.trace > 0.0);
        }
        if (fp.kind == PointKind::StableFocus || fp.kind == PointKind::UnstableFocus)
            CHECK(fp.discriminant < 0.0);
        // eigenvectors satisfy J v = theta v when real and distinct
        if (fp.eigen_real && fp.kind != PointKind::Degenerate) {
            const auto check_vec = [&](const Vec2& v, double th) {
                const double rx = J.m11 * v.x + J.m12 * v.y - th * v.x;
                const double ry = J.m21 * v.x + J.m22 * v.y - th * v.y;
                CHECK(std::hypot(rx, ry) < 1e-9 * std::max(1.0, std::abs(th)));
            };
            check_vec(fp.v1, fp.theta1.real());
            check_vec(fp.v2, fp.theta2.real());
        }
    }
}

TEST_CASE("stable and degenerate classifications") {
    CHECK(classify(Mat2<double>{-1.0, 0.0, 0.0, -2.0}).kind == PointKind::StableNode);
    CHECK(classify(Mat2<double>{0.0, 1.0, -1.0, 0.0}).kind == PointKind::Center);
    CHECK(classify(Mat2<double>{-0.2, 1.0, -1.0, -0.2}).kind == PointKind::StableFocus);
    CHECK(classify(Mat2<double>{0.2, 1.0, -1.0, 0.2}).kind == PointKind::UnstableFocus);
    CHECK(classify(Mat2<double>{1.0, 0.0, 0.0, 0.0}).kind == PointKind::Degenerate);
    CHECK(classify(Mat2<double>{1.0, 0.0, 0.0, 1.0}).kind == PointKind::Degenerate); // repeated root
}

TEST_CASE("saddle eigenstructure at the TF oblique point") {
    const auto pts = classified_fixed_points(kTF);
    const FixedPoint& saddle = pts[3];
    const double root = std::sqrt(73.0);
    CHECK(saddle.theta1.real() == Approx(0.5 * (7.0 + root)).margin(1e-12));
    CHECK(saddle.theta2.real() == Approx(0.5 * (7.0 - root)).margin(1e-12));

    const auto [v1, v2] = saddle_flow_directions(saddle);
    // scaled to the first-row convention (unit X component), the fast direction
    // carries the published -0.943 slope
    CHECK(v1.y / v1.x == Approx(1.0 - saddle.theta1.real() / 4.0).epsilon(1e-12));
    CHECK(v1.y / v1.x == Approx(-0.943).epsilon(5e-4));
    // the slow direction is the genuine eigenvector (0.838..., 1)
    CHECK(v2.x / v2.y == Approx(2.0 * (3.0 - saddle.theta2.real()) / 9.0).epsilon(1e-12));

    // diagonal matrices split along the axes
    const FixedPoint diag = classify(Mat2<double>{2.0, 0.0, 0.0, -1.0});
    const auto [d1, d2] = saddle_flow_directions(diag);
    CHECK(std::abs(d1.x) == Approx(1.0).margin(1e-15));
    CHECK(std::abs(d1.y) == Approx(0.0).margin(1e-15));
    CHECK(std::abs(d2.y) == Approx(1.0).margin(1e-15));

    // complex pair has no real directions
    const FixedPoint spiral = classify(Mat2<double>{0.2, 1.0, -1.0, 0.2});
    CHECK_THROWS_AS(saddle_flow_directions(spiral), DomainError);
}

TEST_CASE("reported direction components match the published convention") {
    const auto [u1, u2] = tf_saddle_direction_report();
    CHECK(u1.x == 1.0);
    CHECK(u1.y == Approx(-0.943).epsilon(5e-4));
    CHECK(u2.y == 1.0);
    CHECK(u2.x == Approx(6.1716).epsilon(1e-4));
}

TEST_CASE("saddle eigenvalues split into decay power plus perturbation exponents") {
    for (double p : {1.0, 2.0, 5.0}) {
        const EigenPerturbationLink link = eigen_perturbation_link(p);
        const PerturbationExpansion pe = perturbation_expansion(p);
        CHECK(std::abs(link.theta0_1 - pe.exp_plus) <= 1e-12 * std::max(1.0, std::abs(pe.exp_plus)));
        CHECK(std::abs(link.theta0_2 - pe.exp_minus) <= 1e-12 * std::max(1.0, std::abs(pe.exp_minus)));
        CHECK(link.theta1 == Approx((1.0 + 2.0 / p) + pe.exp_plus).margin(1e-12));
    }
    // p = 1 closed forms
    const EigenPerturbationLink l1 = eigen_perturbation_link(1.0);
    const double root = std::sqrt(73.0);
    CHECK(l1.theta1 == Approx(0.5 * (7.0 + root)).margin(1e-12));
    CHECK(l1.theta0_1 == Approx(0.5 * (1.0 + root)).margin(1e-12));
}

TEST_CASE("saddle recovers the particular solution") {
    const SaddleRecovery r1 = saddle_recovers_y0(1.0);
    CHECK(r1.product == 12.0);
    CHECK(r1.amplitude == 144.0);
    CHECK(r1.exponent == 3.0);
    const ParticularSolution y0 = particular_solution(1.0);
    CHECK(r1.amplitude == y0.k);
    CHECK(r1.exponent == y0.exponent);

    for (double p : {2.0, 5.0}) {
        const SaddleRecovery r = saddle_recovers_y0(p);
        const ParticularSolution ps = particular_solution(p);
        CHECK(r.amplitude == Approx(ps.k).epsilon(1e-12));
        CHECK(r.exponent == Approx(ps.exponent).margin(1e-12));
    }
}

TEST_CASE("nullclines of the TF system") {
    const Window w{-6.0, 2.0, -5.0, 4.0};
    const NullclineSet nc = nullclines(kTF, w);
    REQUIRE(nc.m_zero.size() == 2);
    REQUIRE(nc.n_zero.size() == 2);
    // the oblique branches Y = 1 + X and Y = 3 + 1.5 X meet at the saddle
    // (-4, -3); both must pass through it
    auto passes_through = [](const Polyline& pl, double x, double y) {
        for (const Vec2& pt : pl.pts)
            if (std::abs(pt.x - x) < 0.26 && std::abs(pt.y - y) < 0.4) return true;
        return false;
    };
    CHECK(passes_through(nc.m_zero[1], -4.0, -3.0));
    CHECK(passes_through(nc.n_zero[1], -4.0, -3.0));

    // axis lines are always present when the window covers them
    CHECK(nc.m_zero[0].pts.front().x == 0.0);
    CHECK(nc.n_zero[0].pts.front().y == 0.0);

    // a window that excludes every fixed point still yields loci
    const Window far{0.5, 1.5, 0.5, 3.0};
    for (const Vec2& pt : fixed_points(kTF).points) CHECK_FALSE(far.contains(pt.x, pt.y));
    const NullclineSet nc2 = nullclines(kTF, far);
    CHECK(nc2.n_zero.size() + nc2.m_zero.size() >= 1);
    CHECK_THROWS_AS(nullclines(kTF, Window{1.0, 1.0, 0.0, 2.0}), ParameterError);
}

TEST_CASE("portrait integrates seed bundles deterministically") {
    const Window w{-6.0, 2.0, -5.0, 4.0};
    const std::vector<Vec2> seeds = default_seeds(kTF, w);
    CHECK(seeds.size() == 16 + 3 * 4); // boundary ring + 4 per saddle

    const PhasePortrait por = portrait(kTF, seeds, 6.0, w);
    CHECK(por.points.size() == 4);
    CHECK(por.trajectories.size() == seeds.size());
    for (const auto& tr : por.trajectories) {
        CHECK(!tr.forward.samples.empty());
        CHECK(!tr.backward.samples.empty());
    }

    // a seed exactly at a fixed point stays there
    const std::vector<Vec2> still{{-1.0, 0.0}};
    const PhasePortrait por2 = portrait(kTF, still, 5.0, w);
    for (const auto& s : por2.trajectories[0].forward.samples) {
        CHECK(s.state[0] == Approx(-1.0).margin(1e-9));
        CHECK(s.state[1] == Approx(0.0).margin(1e-9));
    }
}

TEST_CASE("LAMPTF_THREADS caps workers without changing the result") {
    const Window w{-6.0, 2.0, -5.0, 4.0};
    const std::vector<Vec2> seeds = default_seeds(kTF, w);

    setenv("LAMPTF_THREADS", "1", 1);
    const PhasePortrait serial = portrait(kTF, seeds, 4.0, w);
    setenv("LAMPTF_THREADS", "7", 1);
    const PhasePortrait threaded = portrait(kTF, seeds, 4.0, w);
    unsetenv("LAMPTF_THREADS");

    REQUIRE(serial.trajectories.size() == threaded.trajectories.size());
    for (std::size_t i = 0; i < serial.trajectories.size(); ++i) {
        const auto& a = serial.trajectories[i].forward.samples;
        const auto& b = threaded.trajectories[i].forward.samples;
        REQUIRE(a.size() == b.size());
        CHECK(a.back().t == b.back().t);
        CHECK(a.back().state[0] == b.back().state[0]);
        CHECK(a.back().state[1] == b.back().state[1]);
    }
}

TEST_CASE("node attracts along backward time, saddle ejects along the fast direction") {
    const Window w{-6.0, 2.0, -5.0, 4.0};
    const auto pts = classified_fixed_points(kTF);
    const FixedPoint& saddle = pts[3];
    const auto [v_fast, v_slow] = saddle_flow_directions(saddle);

    // seed just off the saddle along the unstable (positive-eigenvalue)
    // direction: forward flow escapes
    const double eps = 1e-3;
    const std::vector<Vec2> seeds{
        {saddle.coords.x + eps * v_fast.x, saddle.coords.y + eps * v_fast.y},
        {saddle.coords.x + eps * v_slow.x, saddle.coords.y + eps * v_slow.y}};
    const PhasePortrait por = portrait(kTF, seeds, 0.5, w);

    auto dist_at = [&](const SolutionCurve& c, double t) {
        const auto st = dense_eval(c, t);
        return std::hypot(st[0] - saddle.coords.x, st[1] - saddle.coords.y);
    };
    CHECK(dist_at(por.trajectories[0].forward, 0.5) > 10.0 * eps);   // e^{7.77 t} growth
    CHECK(dist_at(por.trajectories[1].forward, 0.5) < eps);          // contracting direction
}
