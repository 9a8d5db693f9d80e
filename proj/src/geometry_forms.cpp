#include "isosing/geometry_forms.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace isosing {

Chart parse_chart(std::string_view name) {
    if (name == "cartesian") return Chart::cartesian;
    if (name == "cylindrical_h3") return Chart::cylindrical_h3;
    if (name == "stereographic_s3") return Chart::stereographic_s3;
    if (name == "halfspace_h3") return Chart::halfspace_h3;
    throw InputError("unknown chart '" + std::string(name) + "'");
}

std::string to_string(Chart chart) {
    switch (chart) {
        case Chart::cartesian: return "cartesian";
        case Chart::cylindrical_h3: return "cylindrical_h3";
        case Chart::stereographic_s3: return "stereographic_s3";
        case Chart::halfspace_h3: return "halfspace_h3";
    }
    return "?";
}

namespace {

int required_constant(Chart chart) {
    switch (chart) {
        case Chart::cartesian: return 0;
        case Chart::stereographic_s3: return 1;
        default: return -1;
    }
}

}  // namespace

WarpedModel::WarpedModel(int curvature_constant, Chart chart, double margin)
    : c_(curvature_constant), chart_(chart), margin_(margin) {
    if (curvature_constant < -1 || curvature_constant > 1) {
        throw InputError("curvature constant must be -1, 0 or 1");
    }
    if (required_constant(chart) != curvature_constant) {
        throw InputError("chart " + to_string(chart) + " requires c = " +
                         std::to_string(required_constant(chart)));
    }
    if (!(margin >= 0.0)) throw InputError("domain margin must be nonnegative");
}

WarpedModel make_space_form(int curvature_constant, Chart chart) {
    return WarpedModel(curvature_constant, chart);
}

bool WarpedModel::contains(double x, double y, double z) const {
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) return false;
    switch (chart_) {
        case Chart::cylindrical_h3: return x * x + y * y < 4.0 - margin_;
        case Chart::stereographic_s3: return std::abs(z) < std::numbers::pi / 2 - margin_;
        default: return true;
    }
}

void WarpedModel::require_contains(double x, double y, double z) const {
    if (!contains(x, y, z)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "state (" << x << ", " << y << ", " << z << ") outside the " << to_string(chart_)
            << " domain";
        throw NumericalError(msg.str());
    }
}

std::array<double, 3> WarpedModel::ambient(double x, double y, double z) const {
    switch (chart_) {
        case Chart::cartesian:
            return {x, y, z};
        case Chart::halfspace_h3:
            return {x, y, std::exp(z)};
        case Chart::cylindrical_h3: {
            // (x,y)/2 is the Poincare-disk point of the totally geodesic H^2;
            // move along its normal geodesic by z in the hyperboloid model.
            const double a = 0.5 * x, b = 0.5 * y;
            const double d = 1.0 - a * a - b * b;
            const double P0 = (1.0 + a * a + b * b) / d, P1 = 2.0 * a / d, P2 = 2.0 * b / d;
            const double ch = std::cosh(z), sh = std::sinh(z);
            const double X0 = ch * P0, X1 = ch * P1, X2 = ch * P2, X3 = sh;
            return {X1 / (1.0 + X0), X2 / (1.0 + X0), X3 / (1.0 + X0)};
        }
        case Chart::stereographic_s3: {
            const double a = 0.5 * x, b = 0.5 * y;
            const double n = 1.0 + a * a + b * b;
            const double P0 = 2.0 * a / n, P1 = 2.0 * b / n, P2 = (1.0 - a * a - b * b) / n;
            const double cz = std::cos(z), sz = std::sin(z);
            const double W0 = cz * P0, W1 = cz * P1, W2 = cz * P2, W3 = sz;
            // Project from -W2 pole so that the chart origin (0,0,1,0) maps to 0.
            return {W0 / (1.0 + W2), W1 / (1.0 + W2), W3 / (1.0 + W2)};
        }
    }
    return {x, y, z};
}

CurvatureField::CurvatureField(Expression value)
    : value_(std::move(value)),
      dx_(value_.derivative(Variable::x)),
      dy_(value_.derivative(Variable::y)),
      dz_(value_.derivative(Variable::z)) {}

Coefficients ma_coefficients(const WarpedModel& model, const CurvatureField& field, const State& s) {
    model.require_contains(s.x, s.y, s.z);
    const double k = field(s.x, s.y, s.z);
    if (!(k > 0.0)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "prescribed curvature " << k << " is not positive at (" << s.x << ", " << s.y << ", "
            << s.z << ")";
        throw NumericalError(msg.str());
    }
    return ma_coefficients_unchecked(model, field, s);
}

NormalAngle unit_normal_angle(const WarpedModel& model, const State& s) {
    model.require_contains(s.x, s.y, s.z);
    const double phi = model.phi(s.x, s.y, s.z);
    const double g2 = s.p * s.p + s.q * s.q;
    const double scale = 1.0 / std::sqrt(phi * phi + phi * g2);
    return {{-s.p * scale, -s.q * scale, phi * scale}, std::sqrt(phi / (phi + g2))};
}

double warped_inner(const WarpedModel& model, const std::array<double, 3>& at,
                    const std::array<double, 3>& a, const std::array<double, 3>& b) {
    const double phi = model.phi(at[0], at[1], at[2]);
    return phi * (a[0] * b[0] + a[1] * b[1]) + a[2] * b[2];
}

namespace {

struct ChartMetric {
    std::array<double, 3> g;     // diagonal entries
    std::array<double, 3> dphi;  // d(phi)/d(x^k); only g_11 = g_22 = phi vary
};

ChartMetric chart_metric(const WarpedModel& model, const std::array<double, 3>& position) {
    const auto w = model.warp(position[2]);
    const auto c = model.conformal(position[0], position[1]);
    const double phi = w.f * c.lambda;
    return {{phi, phi, 1.0}, {w.f * c.lx, w.f * c.ly, w.df * c.lambda}};
}

SecondForm second_form_impl(const ChartMetric& m, const std::array<double, 3>& N, const std::array<double, 3>& d_a,
                            const std::array<double, 3>& d_b, const std::array<double, 3>& d_aa,
                            const std::array<double, 3>& d_ab, const std::array<double, 3>& d_bb) {
    // Lowered Christoffel symbols Gamma_{l,ij} = (d_i g_lj + d_j g_il - d_l g_ij)/2.
    auto dg = [&](int a, int b, int k) { return (a == b && a < 2) ? m.dphi[k] : 0.0; };
    auto gamma = [&](int l, int i, int j) { return 0.5 * (dg(l, j, i) + dg(i, l, j) - dg(i, j, l)); };
    auto second = [&](const std::array<double, 3>& dd, const std::array<double, 3>& a,
                      const std::array<double, 3>& b) {
        double acc = 0.0;
        for (int l = 0; l < 3; ++l) {
            double term = m.g[l] * dd[l];
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) term += gamma(l, i, j) * a[i] * b[j];
            }
            acc += N[l] * term;
        }
        return acc;
    };
    return {second(d_aa, d_a, d_a), second(d_ab, d_a, d_b), second(d_bb, d_b, d_b)};
}

}  // namespace

SecondForm second_form(const WarpedModel& model, const std::array<double, 3>& position,
                       const std::array<double, 3>& normal, const std::array<double, 3>& d_a,
                       const std::array<double, 3>& d_b, const std::array<double, 3>& d_aa,
                       const std::array<double, 3>& d_ab, const std::array<double, 3>& d_bb) {
    return second_form_impl(chart_metric(model, position), normal, d_a, d_b, d_aa, d_ab, d_bb);
}

LocalForms local_forms(const WarpedModel& model, const std::array<double, 3>& position,
                       const std::array<double, 3>& d_a, const std::array<double, 3>& d_b,
                       const std::array<double, 3>& d_aa, const std::array<double, 3>& d_ab,
                       const std::array<double, 3>& d_bb) {
    const ChartMetric m = chart_metric(model, position);
    const auto& g = m.g;

    // Covector annihilating both tangents, raised and normalized.
    const std::array<double, 3> n_low = {d_a[1] * d_b[2] - d_a[2] * d_b[1],
                                         d_a[2] * d_b[0] - d_a[0] * d_b[2],
                                         d_a[0] * d_b[1] - d_a[1] * d_b[0]};
    std::array<double, 3> N = {n_low[0] / g[0], n_low[1] / g[1], n_low[2] / g[2]};
    double norm2 = 0.0;
    for (int l = 0; l < 3; ++l) norm2 += g[l] * N[l] * N[l];
    if (!(norm2 > 0.0)) throw NumericalError("degenerate tangent plane");
    double scale = 1.0 / std::sqrt(norm2);
    if (N[2] < 0.0) scale = -scale;
    for (auto& v : N) v *= scale;

    const SecondForm II = second_form_impl(m, N, d_a, d_b, d_aa, d_ab, d_bb);
    LocalForms out;
    out.E = warped_inner(model, position, d_a, d_a);
    out.F = warped_inner(model, position, d_a, d_b);
    out.G = warped_inner(model, position, d_b, d_b);
    out.L = II.L;
    out.M = II.M;
    out.N = II.N;
    out.normal = N;
    return out;
}

LocalForms graph_forms(const WarpedModel& model, const Jet2& jet) {
    const State& s = jet.state;
    return local_forms(model, {s.x, s.y, s.z}, {1.0, 0.0, s.p}, {0.0, 1.0, s.q}, {0.0, 0.0, jet.r},
                       {0.0, 0.0, jet.s}, {0.0, 0.0, jet.t});
}

}  // namespace isosing
