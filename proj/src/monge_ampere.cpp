#include "isosing/monge_ampere.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace isosing {

namespace {

void require_elliptic(const Coefficients& co) {
    if (!(co.D > 0.0)) {
        std::ostringstream msg;
        msg << "ellipticity lost: D = " << co.D;
        throw NumericalError(msg.str());
    }
}

}  // namespace

double residual(const Jet2& j, const Coefficients& co) {
    return co.A * j.r + 2.0 * co.B * j.s + co.C * j.t + j.r * j.t - j.s * j.s - co.E;
}

double residual(const WarpedModel& model, const CurvatureField& field, const ExtendedJet& j) {
    const auto& st = j.state;
    model.require_contains(static_cast<double>(st.x), static_cast<double>(st.y), static_cast<double>(st.z));
    const CoefficientSet<Quad> co = ma_coefficients_unchecked(model, field, st);
    return static_cast<double>(co.A * j.r + 2 * co.B * j.s + co.C * j.t + j.r * j.t - j.s * j.s - co.E);
}

bool satisfies_equation(const Jet2& j, const Coefficients& co) {
    return std::abs(residual(j, co)) <= 1e-6 * (1.0 + std::abs(co.E));
}

ConformalMetric conformal_metric(const Jet2& j, const Coefficients& co, bool check) {
    if (check && !satisfies_equation(j, co)) {
        std::ostringstream msg;
        msg << "jet does not satisfy the Monge-Ampere equation (residual " << residual(j, co) << ")";
        throw InputError(msg.str());
    }
    const double a = j.r + co.C, b = j.s - co.B, c = j.t + co.A;
    ConformalMetric m;
    m.epsilon = a > 0.0 ? 1 : -1;
    m.g11 = m.epsilon * a;
    m.g12 = m.epsilon * b;
    m.g22 = m.epsilon * c;
    if (!(m.g11 > 0.0) || !(m.det() > 0.0)) {
        throw NumericalError("no sign makes the conformal metric positive definite");
    }
    return m;
}

bool consistent_sign(std::span<const ConformalMetric> metrics) {
    return std::all_of(metrics.begin(), metrics.end(),
                       [&](const ConformalMetric& m) { return m.epsilon == metrics.front().epsilon; });
}

double convexifier_margin(const Convexifier& cv, std::span<const Coefficients> samples) {
    double margin = INFINITY;
    for (const auto& co : samples) {
        const double cc = cv.c - co.C, aa = cv.a - co.A;
        margin = std::min({margin, cc, aa, cc * aa - co.B * co.B});
    }
    return margin;
}

Convexifier convexifiers(std::span<const Coefficients> samples) {
    double bound = 0.0;
    for (const auto& co : samples) {
        if (!std::isfinite(co.A) || !std::isfinite(co.B) || !std::isfinite(co.C)) {
            throw NumericalError("non-finite coefficient sample");
        }
        bound = std::max({bound, std::abs(co.A) + std::abs(co.B), std::abs(co.C) + std::abs(co.B)});
    }
    Convexifier cv{bound + 1.0, bound + 1.0};
    if (!samples.empty() && !(convexifier_margin(cv, samples) > 0.0)) {
        throw NumericalError("convexifier verification failed");
    }
    return cv;
}

double check_star(const CoefficientProvider& provider, std::span<const State> samples, double step) {
    auto combos = [&](const State& s) {
        const Coefficients co = provider(s);
        return std::array<double, 4>{co.partial[kA][kP], co.partial[kA][kQ] + 2.0 * co.partial[kB][kP],
                                     co.partial[kC][kP] + 2.0 * co.partial[kB][kQ], co.partial[kC][kQ]};
    };
    double worst = 0.0;
    for (const State& s : samples) {
        for (int var : {kP, kQ}) {
            State plus = s, minus = s;
            (var == kP ? plus.p : plus.q) += step;
            (var == kP ? minus.p : minus.q) -= step;
            const auto hi = combos(plus), lo = combos(minus);
            for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(hi[i] - lo[i]) / (2.0 * step));
        }
    }
    return worst;
}

double check_star(const WarpedModel& model, const CurvatureField& field, std::span<const State> samples) {
    return check_star([&](const State& s) { return ma_coefficients(model, field, s); }, samples);
}

HCoefficients h_coefficients(const State& s, const Coefficients& co) {
    require_elliptic(co);
    return h_coefficients_t(s, co, std::sqrt(co.D));
}

Vec5 laplacian_rhs(const State& s, const Vec5& du, const Vec5& dv, const Coefficients& co) {
    require_elliptic(co);
    return laplacian_rhs_t(s, du, dv, co, std::sqrt(co.D));
}

std::array<double, 4> first_order_residual(const State&, const Vec5& du, const Vec5& dv, const Coefficients& co) {
    require_elliptic(co);
    const double r = std::sqrt(co.D);
    const double xu = du[0], yu = du[1], xv = dv[0], yv = dv[1];
    return {du[3] - (r * yv + co.B * yu - co.C * xu), dv[3] - (-r * yu + co.B * yv - co.C * xv),
            du[4] - (-r * xv + co.B * xu - co.A * yu), dv[4] - (r * xu + co.B * xv - co.A * yv)};
}

}  // namespace isosing
