#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "isosing/monge_ampere.hpp"
#include "oracles.hpp"

using namespace isosing;

namespace {

const WarpedModel kCartesian = make_space_form(0, Chart::cartesian);
const WarpedModel kHalfspace = make_space_form(-1, Chart::halfspace_h3);

Coefficients zero_coefficients() {
    Coefficients co{};
    for (auto& row : co.partial) row.fill(0.0);
    return co;
}

}  // namespace

TEST_CASE("residual: sphere cap, horosphere and affinity in r") {
    const double R = 1.7;
    Jet2 cap{{0, 0, 0, 0, 0}, -1 / R, 0, -1 / R};
    CurvatureField k = CurvatureField::parse("1/1.7^2");
    CHECK(std::abs(residual(cap, ma_coefficients(kCartesian, k, cap.state))) < 1e-15);

    CurvatureField one;
    Jet2 h = oracle::horosphere_jet(0.3, 0.0);
    Coefficients co = ma_coefficients(kHalfspace, one, h.state);
    CHECK(std::abs(residual(h, co)) <= 1e-10);

    Jet2 bumped = h;
    bumped.r += 0.1;
    CHECK(residual(bumped, co) == doctest::Approx(0.1 * (h.t + co.A)).epsilon(1e-10));
}

TEST_CASE("conformal metric") {
    Coefficients co = zero_coefficients();
    co.E = 4.0;
    co.D = 4.0;
    auto m = conformal_metric({{0, 0, 0, 0, 0}, 2, 0, 2}, co);
    CHECK(m.epsilon == 1);
    CHECK(m.g11 == 2.0);
    CHECK(m.g22 == 2.0);
    auto n = conformal_metric({{0, 0, 0, 0, 0}, -2, 0, -2}, co);
    CHECK(n.epsilon == -1);
    CHECK(n.g11 == 2.0);
    std::vector<ConformalMetric> both{m, n};
    CHECK_FALSE(consistent_sign(both));

    CHECK_THROWS_AS(conformal_metric({{0, 0, 0, 0, 0}, 2, 0, 1}, co), InputError);
    CHECK_THROWS_AS(conformal_metric({{0, 0, 0, 0, 0}, 2, 3, 1}, co, false), NumericalError);

    CurvatureField one;
    for (double x : {0.1, 0.3, 0.6}) {
        Jet2 h = oracle::horosphere_jet(x, 0.2);
        Coefficients hc = ma_coefficients(kHalfspace, one, h.state);
        CHECK(conformal_metric(h, hc).det() == doctest::Approx(hc.D).epsilon(1e-10));
    }
}

TEST_CASE("convexifiers") {
    Coefficients z = zero_coefficients();
    std::vector<Coefficients> zeros(3, z);
    auto cv = convexifiers(zeros);
    CHECK(cv.a == 1.0);
    CHECK(cv.c == 1.0);

    std::vector<Coefficients> bounded;
    for (double A : {-2.0, 2.0}) {
        for (double B : {-1.0, 1.0}) {
            for (double C : {-2.0, 2.0}) {
                Coefficients co = z;
                co.A = A;
                co.B = B;
                co.C = C;
                bounded.push_back(co);
            }
        }
    }
    auto cb = convexifiers(bounded);
    CHECK(cb.a == 4.0);
    CHECK(cb.c == 4.0);
    // worst case A = C = 2, |B| = 1: min(c - C, a - A, (c - C)(a - A) - B^2) = min(2, 2, 3)
    CHECK(convexifier_margin(cb, bounded) == 2.0);

    Coefficients single = z;
    single.A = 5.0;
    std::vector<Coefficients> one{single};
    CHECK(convexifiers(one).a == 6.0);

    // Random coefficient clouds always pass their own verification.
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(-10, 10);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Coefficients> cloud(20, z);
        for (auto& co : cloud) {
            co.A = d(rng);
            co.B = d(rng);
            co.C = d(rng);
        }
        CHECK(convexifier_margin(convexifiers(cloud), cloud) > 0.0);
    }
}

TEST_CASE("h coefficients") {
    CurvatureField one;
    State origin{0, 0, 0, 0, 0};
    auto h0 = h_coefficients(origin, ma_coefficients(kCartesian, one, origin));
    CHECK(h0.h1 == 0.0);
    CHECK(h0.h3 == 0.0);
    CHECK(h0.h4 == 0.0);
    CHECK(h0.ht1 == 0.0);

    State tilted{0, 0, 0, 1, 0};
    Coefficients co = ma_coefficients(kCartesian, one, tilted);
    CHECK(co.D == doctest::Approx(4.0));
    // independent difference of D in p
    const double step = 1e-6;
    auto D_at = [&](double p) { return ma_coefficients(kCartesian, one, {0, 0, 0, p, 0}).D; };
    const double Dp = (D_at(1 + step) - D_at(1 - step)) / (2 * step);
    CHECK(h_coefficients(tilted, co).h4 == doctest::Approx(-0.5 * Dp / 2.0).epsilon(1e-8));
    CHECK(h_coefficients(tilted, co).h4 == doctest::Approx(-2.0));

    std::mt19937_64 rng(5);
    CurvatureField k = CurvatureField::parse("exp(z)");
    for (auto [c, chart] : oracle::all_charts()) {
        WarpedModel m = make_space_form(c, chart);
        State s = oracle::random_state(m, rng);
        Coefficients cs = ma_coefficients(m, k, s);
        auto h = h_coefficients(s, cs);
        CHECK(h.h3 == cs.partial[kA][kP]);
        CHECK(h.ht1 == cs.partial[kC][kQ]);
    }

    Coefficients bad = zero_coefficients();
    bad.D = 0.0;
    CHECK_THROWS_AS(h_coefficients(origin, bad), NumericalError);
    CHECK_THROWS_AS(laplacian_rhs(origin, {}, {}, bad), NumericalError);
    CHECK_THROWS_AS(first_order_residual(origin, {}, {}, bad), NumericalError);
}

TEST_CASE("laplacian rhs: structural examples") {
    CurvatureField k = CurvatureField::parse("exp(z)*(1+0.2*x)");
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> d(-1, 1);
    for (auto [c, chart] : oracle::all_charts()) {
        WarpedModel m = make_space_form(c, chart);
        State s = oracle::random_state(m, rng);
        Coefficients co = ma_coefficients(m, k, s);
        Vec5 zero{};
        for (double v : laplacian_rhs(s, zero, zero, co)) CHECK(v == 0.0);

        Vec5 du, dv;
        for (auto& v : du) v = d(rng);
        for (auto& v : dv) v = d(rng);

        State flat = s;
        flat.p = flat.q = 0.0;
        Coefficients cf = ma_coefficients(m, k, flat);
        Vec5 lf = laplacian_rhs(flat, du, dv, cf);
        CHECK(lf[2] == doctest::Approx(du[3] * du[0] + dv[3] * dv[0] + du[4] * du[1] + dv[4] * dv[1]).epsilon(1e-13));

        // (x, y) components only see rotation-invariant combinations of du, dv.
        const double phi = 0.77;
        Vec5 ru, rv;
        for (int i = 0; i < 5; ++i) {
            ru[i] = std::cos(phi) * du[i] - std::sin(phi) * dv[i];
            rv[i] = std::sin(phi) * du[i] + std::cos(phi) * dv[i];
        }
        Vec5 a = laplacian_rhs(s, du, dv, co), b = laplacian_rhs(s, ru, rv, co);
        CHECK(a[0] == doctest::Approx(b[0]).epsilon(1e-12));
        CHECK(a[1] == doctest::Approx(b[1]).epsilon(1e-12));
    }
}

TEST_CASE("rotational oracle satisfies the first-order and Laplacian systems") {
    CurvatureField one;
    oracle::RotationalOracle orc(1.0);
    for (double v : {0.0, 0.05, 0.2, 0.4}) {
        for (double u : {0.0, 0.9, 2.3}) {
            auto smp = orc.sample(u, v);
            State s{smp.z[0], smp.z[1], smp.z[2], smp.z[3], smp.z[4]};
            Coefficients co = ma_coefficients(kCartesian, one, s);
            for (double d : first_order_residual(s, smp.zu, smp.zv, co)) CHECK(std::abs(d) <= 1e-8);
        }
    }

    // Five-point Laplacian of the oracle against the returned right-hand side.
    const double u = 0.6, v = 0.3;
    auto lap_err = [&](double h) {
        auto c = orc.sample(u, v), e = orc.sample(u + h, v), w = orc.sample(u - h, v), n = orc.sample(u, v + h),
             so = orc.sample(u, v - h);
        State s{c.z[0], c.z[1], c.z[2], c.z[3], c.z[4]};
        Vec5 rhs = laplacian_rhs(s, c.zu, c.zv, ma_coefficients(kCartesian, one, s));
        double err = 0.0;
        for (int i = 0; i < 5; ++i) {
            const double fd = (e.z[i] + w.z[i] + n.z[i] + so.z[i] - 4 * c.z[i]) / (h * h);
            err = std::max(err, std::abs(fd - rhs[i]));
        }
        return err;
    };
    const double e1 = lap_err(0.02), e2 = lap_err(0.01);
    CHECK(e1 < 1e-3);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("first-order residual is generically nonzero") {
    CurvatureField one;
    State s{0.1, 0.2, 0.0, 0.3, -0.1};
    Coefficients co = ma_coefficients(kCartesian, one, s);
    auto r = first_order_residual(s, {0.1, 0.4, 0.2, 0.5, -0.3}, {0.3, -0.2, 0.1, 0.7, 0.2}, co);
    for (double d : r) CHECK(std::abs(d) > 1e-3);
}

TEST_CASE("star condition") {
    CurvatureField k = CurvatureField::parse("exp(z)");
    std::mt19937_64 rng(21);
    for (auto [c, chart] : oracle::construction_charts()) {
        WarpedModel m = make_space_form(c, chart);
        std::vector<State> samples;
        for (int i = 0; i < 1000; ++i) samples.push_back(oracle::random_state(m, rng));
        const double dev = check_star(m, k, samples);
        if (chart == Chart::cartesian) CHECK(dev == 0.0);
        CHECK(dev <= 1e-10);
    }

    WarpedModel m = make_space_form(0, Chart::cartesian);
    std::vector<State> samples{{0.1, 0.1, 0.0, 0.8, 0.2}};
    auto adversarial = [&](const State& s) {
        Coefficients co = ma_coefficients(m, k, s);
        co.A = s.p * s.p * s.p;
        co.partial[kA][kP] = 3 * s.p * s.p;
        return co;
    };
    const double p = 0.8;
    CHECK(check_star(adversarial, samples) >= 3 * p * p - 1e-6);
}
