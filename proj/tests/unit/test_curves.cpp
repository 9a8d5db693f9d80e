#include <doctest.h>

#include <cmath>
#include <numbers>

#include "isosing/curves.hpp"
#include "isosing/error.hpp"

using namespace isosing;

namespace {

PeriodicCurve ellipse(double a, double b) { return PeriodicCurve({0.0, a}, {0.0, 0.0}, {0.0, 0.0}, {0.0, b}); }

// A strictly convex but not rotational curve.
PeriodicCurve egg() { return PeriodicCurve({0.1, 1.0, 0.08}, {0.0, 0.0, 0.03}, {-0.05, 0.0, 0.02}, {0.0, 0.8, 0.05}); }

}  // namespace

TEST_CASE("curves: plane curvature examples") {
    for (double r : {0.5, 1.0, 3.0}) {
        CHECK(plane_curvature(PeriodicCurve::circle(r), 0.7) == doctest::Approx(1 / r));
        CHECK(plane_curvature(PeriodicCurve::circle(r, true), 0.7) == doctest::Approx(-1 / r));
    }
    // a b / (a^2 sin^2 u + b^2 cos^2 u)^(3/2)
    CHECK(plane_curvature(ellipse(2, 1), 0.0) == doctest::Approx(2.0));
    const double u = 1.1;
    CHECK(plane_curvature(ellipse(2, 1), u) ==
          doctest::Approx(2.0 / std::pow(4 * std::sin(u) * std::sin(u) + std::cos(u) * std::cos(u), 1.5)));
    CHECK_THROWS_AS(plane_curvature(PeriodicCurve({1.0}, {}, {2.0}, {}), 0.0), InputError);
}

TEST_CASE("curves: convexity verdicts") {
    CHECK(convexity_check(PeriodicCurve::circle(1)).verdict == Convexity::strictly_convex_positive);
    CHECK(convexity_check(PeriodicCurve::circle(1, true)).verdict == Convexity::strictly_convex_negative);
    CHECK(convexity_check(egg()).verdict == Convexity::strictly_convex_positive);

    auto wavy = PeriodicCurve({0.0, 1.0}, {0.0, 0.0}, {0.0, 0.0}, {0.0, 1.0, 0.5});
    auto rep = convexity_check(wavy);
    CHECK(rep.verdict == Convexity::not_strictly_convex);
    CHECK(rep.sign_changes >= 2);
    CHECK_FALSE(rep.regular);  // cusp at u = pi

    auto dented = PeriodicCurve({0.0, 1.0}, {0.0, 0.0}, {0.0, 0.0}, {0.0, 1.0, 0.7});
    auto rep_d = convexity_check(dented);
    CHECK(rep_d.regular);
    CHECK(rep_d.verdict == Convexity::not_strictly_convex);
    CHECK(rep_d.sign_changes >= 2);

    // A figure eight has zero turning and a self crossing.
    auto eight = PeriodicCurve({0.0, 1.0}, {}, {0.0}, {0.0, 0.0, 0.5});
    auto rep8 = convexity_check(eight);
    CHECK(rep8.verdict == Convexity::not_strictly_convex);
    CHECK(rep8.self_intersections > 0);
    CHECK(std::abs(rep8.turning) < 1e-6);

    // Doubly traversed circle: turning 4 pi.
    auto twice = PeriodicCurve({0.0, 0.0, 1.0}, {}, {0.0}, {0.0, 0.0, 1.0});
    CHECK(convexity_check(twice).verdict == Convexity::not_strictly_convex);

    CHECK_THROWS_AS(convexity_check(PeriodicCurve({1.0}, {}, {0.5}, {})), InputError);
}

TEST_CASE("curves: orientation for construction") {
    auto ccw = PeriodicCurve::circle(1);
    auto oriented = orient_for_construction(ccw);
    CHECK(oriented.distance(PeriodicCurve::circle(1, true)) == 0.0);
    CHECK(orient_for_construction(oriented).distance(oriented) == 0.0);
    auto e = orient_for_construction(egg());
    CHECK(convexity_check(e).verdict == Convexity::strictly_convex_negative);
    CHECK(orient_for_construction(e).distance(e) == 0.0);
    CHECK_THROWS_AS(orient_for_construction(PeriodicCurve({0.0, 1.0}, {}, {0.0}, {0.0, 1.0, 0.5})), InputError);
}

TEST_CASE("curves: Fourier fit reproduces band-limited coefficients") {
    auto g = egg();
    std::vector<Vec2> pts(64);
    for (std::size_t j = 0; j < 64; ++j) pts[j] = g(2 * std::numbers::pi * j / 64.0);
    CHECK(PeriodicCurve::fit(pts, g.order()).distance(g) <= 1e-12);
    // shift agrees with pointwise evaluation
    CHECK(g.shifted(0.4)(1.0)[0] == doctest::Approx(g(1.4)[0]).epsilon(1e-14));
    CHECK(g.reversed()(0.3)[1] == doctest::Approx(g(-0.3)[1]).epsilon(1e-14));
}

TEST_CASE("curves: spherical lift") {
    const double s2 = 1 / std::sqrt(2.0);
    auto point = spherical_lift(PeriodicCurve({1.0}, {}, {0.0}, {}));
    auto w = point(0.3);
    CHECK(w[0] == doctest::Approx(-s2));
    CHECK(w[1] == doctest::Approx(0.0));
    CHECK(w[2] == doctest::Approx(s2));
    CHECK(spherical_lift(PeriodicCurve({0.0}, {}, {0.0}, {}))(1.0)[2] == 1.0);

    auto circ = spherical_lift(PeriodicCurve::circle(1));
    for (double u : {0.0, 1.0, 2.5}) {
        CHECK(circ(u)[2] == doctest::Approx(s2));
        CHECK(circ.geodesic_curvature(u) > 0.0);
    }
    CHECK(spherical_lift(PeriodicCurve::circle(1, true)).geodesic_curvature(0.2) < 0.0);

    Frame bad;
    bad.e2 = {0.0, 1.0, 1e-6};
    CHECK_THROWS_AS(spherical_lift(egg(), bad), InputError);
}

TEST_CASE("curves: lift derivatives agree with differences") {
    Frame f;
    const double t = 0.3;
    f.e1 = {std::cos(t), 0.0, -std::sin(t)};
    f.e3 = {std::sin(t), 0.0, std::cos(t)};
    auto sigma = spherical_lift(egg(), f);
    const double u = 0.9, h = 1e-4;
    auto j = sigma.jet(u);
    auto p = sigma(u + h), m = sigma(u - h);
    for (int i = 0; i < 3; ++i) {
        CHECK(j[1][i] == doctest::Approx((p[i] - m[i]) / (2 * h)).epsilon(1e-7));
        CHECK(j[2][i] == doctest::Approx((p[i] - 2 * j[0][i] + m[i]) / (h * h)).epsilon(1e-5));
    }
    CHECK(std::abs(dot(j[0], j[0]) - 1) <= 1e-12);
    CHECK(sigma.inverse_projection().distance(egg()) <= 1e-12);
}
