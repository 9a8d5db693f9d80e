#pragma once

#include <array>
#include <cmath>
#include <string>
#include <string_view>

#include "isosing/error.hpp"
#include "isosing/expression.hpp"
#include "isosing/series.hpp"

namespace isosing {

enum class Chart { cartesian, cylindrical_h3, stereographic_s3, halfspace_h3 };

Chart parse_chart(std::string_view name);
std::string to_string(Chart chart);

template <class T>
struct WarpValues {
    T f, df, ddf;  // f(z), f'(z), f''(z)
};

template <class T>
struct ConformalValues {
    T lambda, lx, ly, lxx, lxy, lyy;  // lambda(x,y) and partials up to order two
};

// Warped-product chart of a space form,
//
//   g = f(z) lambda(x,y) (dx^2 + dy^2) + dz^2,
//
// normalized so that f(0) = lambda(0,0) = 1.
class WarpedModel {
public:
    WarpedModel(int curvature_constant, Chart chart, double margin = 1e-6);

    int curvature_constant() const noexcept { return c_; }
    Chart chart() const noexcept { return chart_; }
    double margin() const noexcept { return margin_; }

    template <class T>
    WarpValues<T> warp(const T& z) const;

    template <class T>
    ConformalValues<T> conformal(const T& x, const T& y) const;

    double phi(double x, double y, double z) const {
        return warp(z).f * conformal(x, y).lambda;
    }

    // Strict membership with the safety margin.
    bool contains(double x, double y, double z) const;
    void require_contains(double x, double y, double z) const;

    // Position in a model of the ambient space form: R^3 itself, the
    // Poincare ball (cylindrical_h3), the upper half space (halfspace_h3), or
    // the stereographic image of S^3 from the antipode of the chart origin.
    // The chart origin always maps to (0,0,0) except in the half space,
    // where it maps to (0,0,1).
    std::array<double, 3> ambient(double x, double y, double z) const;

private:
    int c_;
    Chart chart_;
    double margin_;
};

WarpedModel make_space_form(int curvature_constant, Chart chart);

template <class T>
struct CurvatureValues {
    T k, kx, ky, kz;
};

// Prescribed extrinsic curvature K(x,y,z) with symbolic partials.
class CurvatureField {
public:
    CurvatureField() : CurvatureField(Expression::constant(1.0)) {}
    explicit CurvatureField(Expression value);
    static CurvatureField parse(std::string_view text) { return CurvatureField(Expression::parse(text)); }

    const Expression& expression() const noexcept { return value_; }

    template <class T>
    CurvatureValues<T> evaluate(const T& x, const T& y, const T& z) const {
        return {value_.evaluate(x, y, z), dx_.evaluate(x, y, z), dy_.evaluate(x, y, z),
                dz_.evaluate(x, y, z)};
    }
    double operator()(double x, double y, double z) const { return value_.evaluate(x, y, z); }

private:
    Expression value_, dx_, dy_, dz_;
};

template <class T>
struct StateT {
    T x, y, z, p, q;
};
using State = StateT<double>;

struct Jet2 {
    State state;
    double r = 0.0, s = 0.0, t = 0.0;  // z_xx, z_xy, z_yy
};

// Indices into the coefficient partials table.
enum Coef { kA = 0, kB = 1, kC = 2, kE = 3, kD = 4 };
enum Var { kX = 0, kY = 1, kZ = 2, kP = 3, kQ = 4 };

template <class T>
struct CoefficientSet {
    T A, B, C, E, D;
    // partial[coef][var] = d(coef)/d(var)
    std::array<std::array<T, 5>, 5> partial;

    const T& value(int coef) const {
        switch (coef) {
            case kA: return A;
            case kB: return B;
            case kC: return C;
            case kE: return E;
            default: return D;
        }
    }
};
using Coefficients = CoefficientSet<double>;

// Monge-Ampere coefficients of the prescribed-curvature equation for graphs
// z = z(x,y) in the warped chart, with closed-form first partials. No domain
// or positivity checks; the double overload below adds them.
template <class T>
CoefficientSet<T> ma_coefficients_unchecked(const WarpedModel& model, const CurvatureField& field,
                                            const StateT<T>& s);

Coefficients ma_coefficients(const WarpedModel& model, const CurvatureField& field, const State& s);

struct NormalAngle {
    std::array<double, 3> normal;  // chart-frame components, unit in the warped metric
    double nu;                     // <N, d/dz>
};

NormalAngle unit_normal_angle(const WarpedModel& model, const State& s);

// Metric inner product at a chart position.
double warped_inner(const WarpedModel& model, const std::array<double, 3>& at,
                    const std::array<double, 3>& a, const std::array<double, 3>& b);

// First and second fundamental forms of a parametrized surface psi(a,b) in
// the warped metric, computed with the Levi-Civita connection of the chart.
struct LocalForms {
    double E, F, G;  // I
    double L, M, N;  // II with respect to the upward unit normal
    std::array<double, 3> normal;

    double det_first() const { return E * G - F * F; }
    double det_second() const { return L * N - M * M; }
    double extrinsic_curvature() const { return det_second() / det_first(); }
};

LocalForms local_forms(const WarpedModel& model, const std::array<double, 3>& position,
                       const std::array<double, 3>& d_a, const std::array<double, 3>& d_b,
                       const std::array<double, 3>& d_aa, const std::array<double, 3>& d_ab,
                       const std::array<double, 3>& d_bb);

struct SecondForm {
    double L, M, N;
};

// Second fundamental form with respect to a given unit normal.
SecondForm second_form(const WarpedModel& model, const std::array<double, 3>& position,
                       const std::array<double, 3>& normal, const std::array<double, 3>& d_a,
                       const std::array<double, 3>& d_b, const std::array<double, 3>& d_aa,
                       const std::array<double, 3>& d_ab, const std::array<double, 3>& d_bb);

// Forms of the graph z(x,y) from its 2-jet.
LocalForms graph_forms(const WarpedModel& model, const Jet2& jet);

// ------------------------------------------------------------ templates

template <class T>
WarpValues<T> WarpedModel::warp(const T& z) const {
    using isosing::cos;
    using isosing::cosh;
    using isosing::exp;
    using isosing::sin;
    using isosing::sinh;
    using std::cos;
    using std::cosh;
    using std::exp;
    using std::sin;
    using std::sinh;
    switch (chart_) {
        case Chart::cylindrical_h3: {
            T c = cosh(z), s = sinh(z);
            return {c * c, 2.0 * (s * c), 2.0 * (c * c + s * s)};
        }
        case Chart::stereographic_s3: {
            T c = cos(z), s = sin(z);
            return {c * c, -2.0 * (s * c), 2.0 * (s * s - c * c)};
        }
        case Chart::halfspace_h3: {
            T e = exp(-2.0 * z);
            return {e, -2.0 * e, 4.0 * e};
        }
        case Chart::cartesian:
            break;
    }
    return {constant_like(z, 1.0), constant_like(z, 0.0), constant_like(z, 0.0)};
}

template <class T>
ConformalValues<T> WarpedModel::conformal(const T& x, const T& y) const {
    if (chart_ == Chart::cylindrical_h3 || chart_ == Chart::stereographic_s3) {
        // lambda = w^-2 with w = 1 -/+ (x^2 + y^2)/4
        const double sign = chart_ == Chart::cylindrical_h3 ? -1.0 : 1.0;
        T w = 1.0 + (sign * 0.25) * (x * x + y * y);
        T i2 = 1.0 / (w * w);
        T i3 = i2 / w;
        T i4 = i3 / w;
        return {i2,
                (-sign) * (x * i3),
                (-sign) * (y * i3),
                (-sign) * i3 + 1.5 * ((x * x) * i4),
                1.5 * ((x * y) * i4),
                (-sign) * i3 + 1.5 * ((y * y) * i4)};
    }
    T zero = constant_like(x, 0.0);
    return {constant_like(x, 1.0), zero, zero, zero, zero, zero};
}

template <class T>
CoefficientSet<T> ma_coefficients_unchecked(const WarpedModel& model, const CurvatureField& field,
                                            const StateT<T>& s) {
    const WarpValues<T> w = model.warp(s.z);
    const ConformalValues<T> c = model.conformal(s.x, s.y);
    const CurvatureValues<T> k = field.evaluate(s.x, s.y, s.z);
    const T& p = s.p;
    const T& q = s.q;

    // lambda_x/(2 lambda), lambda_y/(2 lambda) and their partials
    const T inv2l = 0.5 / c.lambda;
    const T Lx = c.lx * inv2l;
    const T Ly = c.ly * inv2l;
    const T Lx_x = (c.lxx - 2.0 * (Lx * c.lx)) * inv2l;
    const T Lx_y = (c.lxy - 2.0 * (Lx * c.ly)) * inv2l;
    const T Ly_y = (c.lyy - 2.0 * (Ly * c.ly)) * inv2l;
    const T& Ly_x = Lx_y;

    // f'/f and (f'/2) lambda
    const T F = w.df / w.f;
    const T F_z = w.ddf / w.f - F * F;
    const T G = 0.5 * (w.df * c.lambda);
    const T G_x = 0.5 * (w.df * c.lx);
    const T G_y = 0.5 * (w.df * c.ly);
    const T G_z = 0.5 * (w.ddf * c.lambda);

    const T pp = p * p;
    const T qq = q * q;
    const T pq = p * q;

    CoefficientSet<T> out;
    out.A = p * Lx - q * Ly - qq * F - G;
    out.B = p * Ly + q * Lx + pq * F;
    out.C = q * Ly - p * Lx - pp * F - G;

    auto& dA = out.partial[kA];
    dA[kX] = p * Lx_x - q * Ly_x - G_x;
    dA[kY] = p * Lx_y - q * Ly_y - G_y;
    dA[kZ] = -(qq * F_z) - G_z;
    dA[kP] = Lx;
    dA[kQ] = -Ly - 2.0 * (q * F);

    auto& dB = out.partial[kB];
    dB[kX] = p * Ly_x + q * Lx_x;
    dB[kY] = p * Ly_y + q * Lx_y;
    dB[kZ] = pq * F_z;
    dB[kP] = Ly + q * F;
    dB[kQ] = Lx + p * F;

    auto& dC = out.partial[kC];
    dC[kX] = q * Ly_x - p * Lx_x - G_x;
    dC[kY] = q * Ly_y - p * Lx_y - G_y;
    dC[kZ] = -(pp * F_z) - G_z;
    dC[kP] = -Lx - 2.0 * (p * F);
    dC[kQ] = Ly;

    // D = K S^2 with S = f lambda + p^2 + q^2
    const T S = w.f * c.lambda + pp + qq;
    const T S2 = S * S;
    const T twoKS = 2.0 * (k.k * S);
    out.D = k.k * S2;
    auto& dD = out.partial[kD];
    dD[kX] = k.kx * S2 + twoKS * (w.f * c.lx);
    dD[kY] = k.ky * S2 + twoKS * (w.f * c.ly);
    dD[kZ] = k.kz * S2 + twoKS * (w.df * c.lambda);
    dD[kP] = (2.0 * twoKS) * p;
    dD[kQ] = (2.0 * twoKS) * q;

    out.E = out.D - out.A * out.C + out.B * out.B;
    auto& dE = out.partial[kE];
    for (int v = 0; v < 5; ++v) {
        dE[v] = dD[v] - dA[v] * out.C - out.A * dC[v] + 2.0 * (out.B * dB[v]);
    }
    return out;
}

}  // namespace isosing
