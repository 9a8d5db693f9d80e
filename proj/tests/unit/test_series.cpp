#include <doctest.h>

#include <cmath>

#include "isosing/series.hpp"

using isosing::Series;

namespace {

// a(v) = c0 + c1 v on a 3-point grid with distinct values per point.
Series linear(std::size_t order, double c0, double c1) {
    Series s(order, 3);
    for (std::size_t j = 0; j < 3; ++j) {
        s[0][j] = c0 + 0.1 * static_cast<double>(j);
        s[1][j] = c1;
    }
    return s;
}

double factorial(int k) { return std::tgamma(k + 1.0); }

}  // namespace

TEST_CASE("series: geometric reciprocal") {
    Series a = linear(10, 1.0, -1.0);  // 1 - v at j = 0
    Series inv = 1.0 / a;
    for (std::size_t k = 0; k <= 10; ++k) CHECK(inv[k][0] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("series: exp, sin, cos, sinh, cosh of an affine argument") {
    const double c0 = 0.3, c1 = 0.7;
    Series a = linear(12, c0, c1);
    Series e = exp(a), s = sin(a), c = cos(a), sh = sinh(a), ch = cosh(a);
    for (int k = 0; k <= 12; ++k) {
        const double scale = std::pow(c1, k) / factorial(k);
        // k-th derivative of sin at c0 is sin(c0 + k pi/2)
        const double shift = k * M_PI / 2;
        CHECK(e[k][0] == doctest::Approx(std::exp(c0) * scale).epsilon(1e-13));
        CHECK(s[k][0] == doctest::Approx(std::sin(c0 + shift) * scale).epsilon(1e-12));
        CHECK(c[k][0] == doctest::Approx(std::cos(c0 + shift) * scale).epsilon(1e-12));
        const double hs = k % 2 == 0 ? std::sinh(c0) : std::cosh(c0);
        const double hc = k % 2 == 0 ? std::cosh(c0) : std::sinh(c0);
        CHECK(sh[k][0] == doctest::Approx(hs * scale).epsilon(1e-13));
        CHECK(ch[k][0] == doctest::Approx(hc * scale).epsilon(1e-13));
    }
}

TEST_CASE("series: log, sqrt and pow follow the binomial series") {
    Series a = linear(9, 1.0, 0.5);  // 1 + v/2 at j = 0
    Series l = log(a), r = sqrt(a), p = pow(a, -1.5);
    double binom_half = 1.0, binom_p = 1.0;
    for (int k = 0; k <= 9; ++k) {
        const double h = std::pow(0.5, k);
        if (k > 0) {
            CHECK(l[k][0] == doctest::Approx((k % 2 == 1 ? 1.0 : -1.0) * h / k).epsilon(1e-13));
            binom_half *= (0.5 - (k - 1)) / k;
            binom_p *= (-1.5 - (k - 1)) / k;
        } else {
            CHECK(l[0][0] == doctest::Approx(0.0));
        }
        CHECK(r[k][0] == doctest::Approx(binom_half * h).epsilon(1e-13));
        CHECK(p[k][0] == doctest::Approx(binom_p * h).epsilon(1e-13));
    }
}

TEST_CASE("series: product and quotient are inverse") {
    Series a = linear(8, 2.0, 0.3);
    Series b = sin(linear(8, 0.4, 1.1)) + 3.0;
    Series back = (a * b) / b;
    for (std::size_t k = 0; k <= 8; ++k) {
        for (std::size_t j = 0; j < 3; ++j) CHECK(back[k][j] == doctest::Approx(a[k][j]).epsilon(1e-13));
    }
}

TEST_CASE("series: mixed orders truncate to the smaller one") {
    Series a = linear(5, 1.0, 1.0), b = linear(3, 1.0, 1.0);
    CHECK((a + b).order() == 3);
    CHECK((a * b).order() == 3);
    CHECK(isosing::min_leading(a) == doctest::Approx(1.0));
}
