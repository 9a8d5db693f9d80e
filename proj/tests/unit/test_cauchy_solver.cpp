#include <doctest.h>

#include <cmath>
#include <numbers>

#include "isosing/cauchy_solver.hpp"
#include "oracles.hpp"

using namespace isosing;

namespace {

const WarpedModel kCartesian = make_space_form(0, Chart::cartesian);
const double kPi = std::numbers::pi;

StripSolution solve_circle(double rho, std::size_t M, std::size_t N, SolverOptions o = {}) {
    CurvatureField one;
    o.fourier_order = M;
    o.taylor_order = N;
    return solve(cauchy_data(PeriodicCurve::circle(rho, true), kCartesian, one, M), kCartesian, one, o);
}

}  // namespace

TEST_CASE("cauchy data: circle closed form and orientation") {
    CurvatureField one;
    const double rho = 0.7;
    auto data = cauchy_data(PeriodicCurve::circle(rho, true), kCartesian, one, 16);
    for (double u : {0.0, 1.3, 4.0}) {
        // D = (1 + rho^2)^2 and gamma' = rho (-sin u, -cos u)
        CHECK(evaluate(data.normal[0], u) == doctest::Approx(rho * std::cos(u) / (1 + rho * rho)));
        CHECK(evaluate(data.normal[1], u) == doctest::Approx(-rho * std::sin(u) / (1 + rho * rho)));
        CHECK(evaluate(data.normal[2], u) == doctest::Approx(rho * rho / (1 + rho * rho)));
        CHECK(std::abs(evaluate(data.normal[3], u)) < 1e-14);
        CHECK(std::abs(evaluate(data.normal[4], u)) < 1e-14);
        CHECK(evaluate(data.value[3], u) == doctest::Approx(rho * std::cos(u)));
    }
    CHECK_THROWS_AS(cauchy_data(PeriodicCurve::circle(rho), kCartesian, one, 16), InputError);
    CHECK_THROWS_AS(cauchy_data(PeriodicCurve({1.0}, {}, {2.0}, {}), kCartesian, one, 16), InputError);
    CHECK_THROWS_AS(cauchy_data(PeriodicCurve::circle(rho, true), kCartesian, one, 2), InputError);
    // curvature field vanishing on the data
    CHECK_THROWS_AS(cauchy_data(PeriodicCurve::circle(rho, true), kCartesian, CurvatureField::parse("x"), 16),
                    NumericalError);
}

TEST_CASE("solver: boundary reproduction and rotational oracle") {
    auto sol = solve_circle(1.0, 32, 16);
    const auto& d = sol.diagnostics();
    CHECK(d.growth_ratio > 0.0);
    CHECK(sol.height() == doctest::Approx(0.5 / d.growth_ratio));
    CHECK(d.level_norms.size() == 17);

    auto b = sol.row(0.0);
    oracle::RotationalOracle orc(1.0);
    for (double u : {0.0, 0.4, 2.5, 5.9}) {
        auto j = StripSolution::jet(b, u);
        CHECK(j.z[3] == doctest::Approx(std::cos(u)));
        CHECK(j.z[4] == doctest::Approx(-std::sin(u)));
        CHECK(std::abs(j.z[0]) < 1e-15);
        for (double v : {0.1, 0.3, sol.height()}) {
            auto s = sol.jet_at(u, v);
            auto r = orc.sample(u, v);
            for (int c = 0; c < 5; ++c) {
                CHECK(std::abs(s.z[c] - r.z[c]) < 1e-6);
                CHECK(std::abs(s.zv[c] - r.zv[c]) < 1e-5);
            }
        }
    }
}

TEST_CASE("solver: rotational symmetry is preserved") {
    auto sol = solve_circle(0.8, 32, 16);
    const double v = 0.5 * sol.height();
    auto a = sol.jet_at(0.3, v), b = sol.jet_at(1.9, v);
    CHECK(std::hypot(a.z[0], a.z[1]) == doctest::Approx(std::hypot(b.z[0], b.z[1])).epsilon(1e-12));
    CHECK(a.z[2] == doctest::Approx(b.z[2]).epsilon(1e-12));
    // only the modes of the data are excited
    for (std::size_t k = 0; k < sol.levels().size(); ++k) {
        for (std::size_t m = 2; m <= 32; ++m) CHECK(std::abs(sol.levels()[k][0][m]) < 1e-12);
    }
}

TEST_CASE("solver: shift equivariance and thread determinism") {
    CurvatureField k = CurvatureField::parse("exp(z)");
    auto gamma = oracle::egg_clockwise();
    SolverOptions o;
    o.fourier_order = 32;
    o.taylor_order = 12;
    o.threads = 1;
    auto base = solve(cauchy_data(gamma, kCartesian, k, 32), kCartesian, k, o);
    auto moved = solve(cauchy_data(gamma.shifted(kPi / 3), kCartesian, k, 32), kCartesian, k, o);
    CHECK(moved.distance(base.shifted(kPi / 3)) <= 1e-8);

    o.threads = 3;
    auto threaded = solve(cauchy_data(gamma, kCartesian, k, 32), kCartesian, k, o);
    CHECK(threaded.distance(base) == 0.0);
    CHECK(threaded.diagnostics().threads == 3);
}

TEST_CASE("solver: height policy") {
    SolverOptions o;
    o.height = 10.0;
    auto capped = solve_circle(1.0, 16, 8, o);
    CHECK(capped.diagnostics().capped);
    CHECK(capped.height() == doctest::Approx(capped.diagnostics().recommended_height));

    o.auto_cap = false;
    CHECK_THROWS_AS(solve_circle(1.0, 16, 8, o), NumericalError);

    o.height = 0.2;
    auto fixed = solve_circle(1.0, 16, 8, o);
    CHECK(fixed.height() == 0.2);
    CHECK_FALSE(fixed.diagnostics().capped);

    SolverOptions bad;
    bad.safety = 0.0;
    CHECK_THROWS_AS(solve_circle(1.0, 16, 8, bad), InputError);
}

TEST_CASE("solver: spectral convergence of collocation residual") {
    auto coarse = solve_circle(1.0, 32, 12), fine = solve_circle(1.0, 64, 24);
    const double R = std::min(coarse.height(), fine.height());
    const double rc = collocation_residuals(coarse, 64, 16, 0.0, R).laplacian;
    const double rf = collocation_residuals(fine, 64, 16, 0.0, R).laplacian;
    CHECK(rf * 10 <= rc);
}

TEST_CASE("mesh evaluation") {
    auto sol = solve_circle(1.0, 64, 24);
    const double R = sol.height();
    auto mesh = evaluate(sol, 12, 5, 0.0, R);
    CHECK(mesh.vertices.size() == 60);
    CHECK(mesh.at(0, 0).v == 0.0);
    CHECK(mesh.at(0, 4).v == doctest::Approx(R));
    CHECK(std::isnan(mesh.at(3, 0).k_computed));
    CHECK(std::isnan(mesh.at(3, 0).residual_eq1));
    for (std::size_t j = 1; j < 5; ++j) {
        for (std::size_t i = 0; i < 12; ++i) {
            CHECK(mesh.at(i, j).k_computed == doctest::Approx(1.0).epsilon(1e-6));
            CHECK(std::abs(mesh.at(i, j).residual_eq1) < 1e-6);
            CHECK(mesh.at(i, j).nu > 0.0);
        }
    }
    CHECK_THROWS_AS(evaluate(sol, 4, 4, 0.0, 2 * R), InputError);
    CHECK_THROWS_AS(evaluate(sol, 0, 4, 0.0, R), InputError);
}

TEST_CASE("thread count from environment") {
    setenv("ISOSING_THREADS", "4", 1);
    CHECK(thread_count_from_env() == 4);
    setenv("ISOSING_THREADS", "zero", 1);
    CHECK(thread_count_from_env() == 1);
    unsetenv("ISOSING_THREADS");
    CHECK(thread_count_from_env() == 1);
}
