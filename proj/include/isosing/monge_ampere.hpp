#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "isosing/geometry_forms.hpp"

namespace isosing {

// Component order of z = (x, y, z, p, q) in all 5-vectors below.
template <class T>
using Vec5T = std::array<T, 5>;
using Vec5 = Vec5T<double>;

// A r + 2 B s + C t + r t - s^2 - E
double residual(const Jet2& j, const Coefficients& co);

// Graph 2-jet in quadruple precision. Near an isolated singularity the terms of
// the equation grow like |grad z|^4 and cancel; the residual of a double jet is
// then dominated by rounding of the jet itself.
struct ExtendedJet {
    StateT<Quad> state;
    Quad r = 0, s = 0, t = 0;
};
double residual(const WarpedModel& model, const CurvatureField& field, const ExtendedJet& j);

// |residual| <= 1e-6 (1 + |E|)
bool satisfies_equation(const Jet2& j, const Coefficients& co);

struct ConformalMetric {
    int epsilon = 1;
    double g11 = 0.0, g12 = 0.0, g22 = 0.0;
    double det() const { return g11 * g22 - g12 * g12; }
};

// epsilon (r + C, s - B, t + A) with the sign making g11 positive. Throws
// InputError when `check` is set and the jet misses the equation, and
// NumericalError when no sign gives a positive definite matrix.
ConformalMetric conformal_metric(const Jet2& j, const Coefficients& co, bool check = true);

// True when all metrics share one sign.
bool consistent_sign(std::span<const ConformalMetric> metrics);

struct Convexifier {
    double a = 1.0, c = 1.0;
};

// a = c = max(|A| + |B|, |C| + |B|) + 1 over the samples; verified on the
// samples before returning (NumericalError on failure).
Convexifier convexifiers(std::span<const Coefficients> samples);
// Smallest of c - C, a - A and (c - C)(a - A) - B^2 over the samples.
double convexifier_margin(const Convexifier& cv, std::span<const Coefficients> samples);

using CoefficientProvider = std::function<Coefficients(const State&)>;

// Max over samples of the central-difference p and q derivatives of
// A_p, A_q + 2 B_p, C_p + 2 B_q, C_q.
double check_star(const CoefficientProvider& provider, std::span<const State> samples, double step = 1e-3);
double check_star(const WarpedModel& model, const CurvatureField& field, std::span<const State> samples);

template <class T>
struct HCoefficientsT {
    T h1, h2, h3, h4;
    T ht1, ht2, ht3, ht4;
};
using HCoefficients = HCoefficientsT<double>;

HCoefficients h_coefficients(const State& s, const Coefficients& co);

// Laplacian of (x, y, z, p, q) in conformal coordinates given z, z_u, z_v.
Vec5 laplacian_rhs(const State& s, const Vec5& du, const Vec5& dv, const Coefficients& co);

// Defects of the first-order system in conformal coordinates.
std::array<double, 4> first_order_residual(const State& s, const Vec5& du, const Vec5& dv, const Coefficients& co);

// ------------------------------------------------------------ templates

template <class T>
HCoefficientsT<T> h_coefficients_t(const StateT<T>& s, const CoefficientSet<T>& co, const T& sqrt_d) {
    const auto& dA = co.partial[kA];
    const auto& dB = co.partial[kB];
    const auto& dC = co.partial[kC];
    const auto& dD = co.partial[kD];
    const T half_inv_d = 0.5 / co.D;
    const T inv_sqrt_d = 1.0 / sqrt_d;
    const T bracket1 = (dD[kX] + dD[kZ] * s.p - dD[kP] * co.C + dD[kQ] * co.B) * half_inv_d;
    const T bracket2 = (dD[kY] + dD[kZ] * s.q + dD[kP] * co.B - dD[kQ] * co.A) * half_inv_d;

    HCoefficientsT<T> h;
    h.h1 = dB[kQ] - bracket1;
    h.h2 = -dA[kQ] - dB[kP] - bracket2;
    h.h3 = dA[kP];
    h.h4 = (dA[kX] + dB[kY] + dA[kZ] * s.p + dB[kZ] * s.q - dA[kP] * co.C + (dA[kQ] + dB[kP]) * co.B -
            dB[kQ] * co.A - 0.5 * dD[kP]) *
           inv_sqrt_d;
    h.ht1 = dC[kQ];
    h.ht2 = -dB[kQ] - dC[kP] - bracket1;
    h.ht3 = dB[kP] - bracket2;
    h.ht4 = (dC[kY] + dB[kX] + dC[kZ] * s.q + dB[kZ] * s.p - dB[kP] * co.C + (dB[kQ] + dC[kP]) * co.B -
             dC[kQ] * co.A - 0.5 * dD[kQ]) *
            inv_sqrt_d;
    return h;
}

// Works for double and for Series; the caller supplies sqrt(D).
template <class T>
Vec5T<T> laplacian_rhs_t(const StateT<T>& s, const Vec5T<T>& du, const Vec5T<T>& dv, const CoefficientSet<T>& co,
                         const T& sqrt_d) {
    const HCoefficientsT<T> h = h_coefficients_t(s, co, sqrt_d);
    const T& xu = du[0];
    const T& yu = du[1];
    const T& xv = dv[0];
    const T& yv = dv[1];

    const T q1 = xu * xu + xv * xv;
    const T q2 = xu * yu + xv * yv;
    const T q3 = yu * yu + yv * yv;
    const T jac = xu * yv - xv * yu;
    const T lap_x = h.h1 * q1 + h.h2 * q2 + h.h3 * q3 + h.h4 * jac;
    const T lap_y = h.ht1 * q1 + h.ht2 * q2 + h.ht3 * q3 + h.ht4 * jac;

    // Chain rule along the solution.
    auto total = [&](int coef, const Vec5T<T>& d) {
        const auto& row = co.partial[coef];
        T acc = row[0] * d[0];
        for (int v = 1; v < 5; ++v) acc = acc + row[v] * d[v];
        return acc;
    };
    const T Au = total(kA, du), Av = total(kA, dv);
    const T Bu = total(kB, du), Bv = total(kB, dv);
    const T Cu = total(kC, du), Cv = total(kC, dv);
    const T half_inv_sqrt = 0.5 / sqrt_d;
    const T sDu = total(kD, du) * half_inv_sqrt;
    const T sDv = total(kD, dv) * half_inv_sqrt;

    const T lap_p = sDu * yv - sDv * yu + Bu * yu + Bv * yv + co.B * lap_y - co.C * lap_x - Cu * xu - Cv * xv;
    const T lap_q = sDv * xu - sDu * xv + Bu * xu + Bv * xv + co.B * lap_x - co.A * lap_y - Au * yu - Av * yv;
    const T lap_z = du[3] * xu + dv[3] * xv + du[4] * yu + dv[4] * yv + s.p * lap_x + s.q * lap_y;
    return {lap_x, lap_y, lap_z, lap_p, lap_q};
}

}  // namespace isosing
