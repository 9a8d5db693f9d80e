#include "isosing/curves.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "isosing/error.hpp"

namespace isosing {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double series_derivative(const std::vector<double>& a, const std::vector<double>& b, double u, int d) {
    double acc = d == 0 ? a[0] : 0.0;
    for (std::size_t m = 1; m < a.size(); ++m) {
        const double md = static_cast<double>(m);
        const double c = std::cos(md * u), s = std::sin(md * u);
        // d-th derivative of a cos + b sin cycles through (c, -s, -c, s)
        const double scale = std::pow(md, d);
        double term = 0.0;
        switch (d % 4) {
            case 0: term = a[m] * c + b[m] * s; break;
            case 1: term = -a[m] * s + b[m] * c; break;
            case 2: term = -a[m] * c - b[m] * s; break;
            default: term = a[m] * s - b[m] * c; break;
        }
        acc += scale * term;
    }
    return acc;
}

void to_real(const Spectrum& s, std::vector<double>& cos_part, std::vector<double>& sin_part) {
    cos_part.assign(s.size(), 0.0);
    sin_part.assign(s.size(), 0.0);
    if (s.empty()) return;
    cos_part[0] = s[0].real();
    for (std::size_t m = 1; m < s.size(); ++m) {
        cos_part[m] = 2.0 * s[m].real();
        sin_part[m] = -2.0 * s[m].imag();
    }
}

Spectrum to_complex(const std::vector<double>& a, const std::vector<double>& b) {
    Spectrum s(a.size());
    if (a.empty()) return s;
    s[0] = a[0];
    for (std::size_t m = 1; m < a.size(); ++m) s[m] = {0.5 * a[m], -0.5 * b[m]};
    return s;
}

bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
        return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
    };
    const double o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
    return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0;
}

}  // namespace

PeriodicCurve::PeriodicCurve(std::vector<double> alpha_cos, std::vector<double> alpha_sin,
                             std::vector<double> beta_cos, std::vector<double> beta_sin)
    : alpha_cos_(std::move(alpha_cos)),
      alpha_sin_(std::move(alpha_sin)),
      beta_cos_(std::move(beta_cos)),
      beta_sin_(std::move(beta_sin)) {
    const std::size_t n = std::max({alpha_cos_.size(), alpha_sin_.size(), beta_cos_.size(), beta_sin_.size(),
                                    std::size_t{1}});
    for (auto* v : {&alpha_cos_, &alpha_sin_, &beta_cos_, &beta_sin_}) v->resize(n, 0.0);
    alpha_sin_[0] = 0.0;
    beta_sin_[0] = 0.0;
    for (auto* v : {&alpha_cos_, &alpha_sin_, &beta_cos_, &beta_sin_}) {
        for (double x : *v) {
            if (!std::isfinite(x)) throw InputError("curve coefficients must be finite");
        }
    }
}

PeriodicCurve PeriodicCurve::from_spectra(const Spectrum& alpha, const Spectrum& beta) {
    std::vector<double> ac, as, bc, bs;
    to_real(alpha, ac, as);
    to_real(beta, bc, bs);
    return PeriodicCurve(ac, as, bc, bs);
}

PeriodicCurve PeriodicCurve::fit(const std::vector<Vec2>& samples, std::size_t order) {
    const std::size_t n = samples.size();
    if (n < 4 || n % 2 != 0 || 2 * order >= n) {
        throw InputError("curve fit needs an even sample count above twice the order");
    }
    FourierGrid grid(n);
    std::vector<double> a(n), b(n);
    for (std::size_t j = 0; j < n; ++j) {
        a[j] = samples[j][0];
        b[j] = samples[j][1];
    }
    return from_spectra(grid.analyze(a, order), grid.analyze(b, order));
}

PeriodicCurve PeriodicCurve::circle(double radius, bool clockwise, Vec2 center) {
    return PeriodicCurve({center[0], radius}, {0.0, 0.0}, {center[1], 0.0}, {0.0, clockwise ? -radius : radius});
}

Spectrum PeriodicCurve::alpha_spectrum() const { return to_complex(alpha_cos_, alpha_sin_); }
Spectrum PeriodicCurve::beta_spectrum() const { return to_complex(beta_cos_, beta_sin_); }

Vec2 PeriodicCurve::derivative(double u, int order) const {
    if (alpha_cos_.empty()) return {0.0, 0.0};
    return {series_derivative(alpha_cos_, alpha_sin_, u, order), series_derivative(beta_cos_, beta_sin_, u, order)};
}

PeriodicCurve PeriodicCurve::reversed() const {
    auto neg = [](std::vector<double> v) {
        for (double& x : v) x = -x;
        return v;
    };
    return PeriodicCurve(alpha_cos_, neg(alpha_sin_), beta_cos_, neg(beta_sin_));
}

PeriodicCurve PeriodicCurve::shifted(double delta) const {
    return from_spectra(shift(alpha_spectrum(), delta), shift(beta_spectrum(), delta));
}

double PeriodicCurve::distance(const PeriodicCurve& other) const {
    const std::size_t n = std::max(alpha_cos_.size(), other.alpha_cos_.size());
    auto at = [](const std::vector<double>& v, std::size_t m) { return m < v.size() ? v[m] : 0.0; };
    double d = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        d = std::max({d, std::abs(at(alpha_cos_, m) - at(other.alpha_cos_, m)),
                      std::abs(at(alpha_sin_, m) - at(other.alpha_sin_, m)),
                      std::abs(at(beta_cos_, m) - at(other.beta_cos_, m)),
                      std::abs(at(beta_sin_, m) - at(other.beta_sin_, m))});
    }
    return d;
}

double PeriodicCurve::rms_speed() const {
    double acc = 0.0;
    for (std::size_t m = 1; m < alpha_cos_.size(); ++m) {
        const double md = static_cast<double>(m);
        acc += 0.5 * md * md *
               (alpha_cos_[m] * alpha_cos_[m] + alpha_sin_[m] * alpha_sin_[m] + beta_cos_[m] * beta_cos_[m] +
                beta_sin_[m] * beta_sin_[m]);
    }
    return std::sqrt(acc);
}

double plane_curvature(const PeriodicCurve& gamma, double u) {
    const Vec2 d1 = gamma.derivative(u, 1), d2 = gamma.derivative(u, 2);
    const double speed = std::hypot(d1[0], d1[1]);
    if (!(speed > kRegularityRatio * gamma.rms_speed()) || speed == 0.0) {
        throw InputError("curve is not regular at u = " + std::to_string(u));
    }
    return (d1[0] * d2[1] - d1[1] * d2[0]) / (speed * speed * speed);
}

std::string to_string(Convexity c) {
    switch (c) {
        case Convexity::strictly_convex_positive: return "strictly_convex_positive";
        case Convexity::strictly_convex_negative: return "strictly_convex_negative";
        case Convexity::not_strictly_convex: return "not_strictly_convex";
    }
    return "?";
}

ConvexityReport convexity_check(const PeriodicCurve& gamma, std::size_t samples) {
    ConvexityReport rep;
    std::vector<double> kappa(samples), angle(samples);
    rep.min_speed = INFINITY;
    for (std::size_t j = 0; j < samples; ++j) {
        const double u = kTwoPi * static_cast<double>(j) / static_cast<double>(samples);
        const Vec2 d1 = gamma.derivative(u, 1), d2 = gamma.derivative(u, 2);
        const double speed = std::hypot(d1[0], d1[1]);
        rep.min_speed = std::min(rep.min_speed, speed);
        rep.max_speed = std::max(rep.max_speed, speed);
        kappa[j] = speed > 0.0 ? (d1[0] * d2[1] - d1[1] * d2[0]) / (speed * speed * speed) : 0.0;
        angle[j] = std::atan2(d1[1], d1[0]);
    }
    if (!(rep.max_speed > 0.0)) throw InputError("curve is constant");
    rep.regular = rep.min_speed >= kRegularityRatio * rep.max_speed;

    rep.min_curvature = *std::min_element(kappa.begin(), kappa.end());
    rep.max_curvature = *std::max_element(kappa.begin(), kappa.end());
    rep.max_abs_curvature = std::max(std::abs(rep.min_curvature), std::abs(rep.max_curvature));
    const double threshold = kConvexityRatio * rep.max_abs_curvature;
    for (std::size_t j = 0; j < samples; ++j) {
        if (std::abs(kappa[j]) < threshold) ++rep.near_zero_curvature;
        if ((kappa[j] > 0) != (kappa[(j + 1) % samples] > 0)) ++rep.sign_changes;
    }

    double turning = 0.0;
    for (std::size_t j = 0; j < samples; ++j) {
        double step = angle[(j + 1) % samples] - angle[j];
        step = std::remainder(step, kTwoPi);
        turning += step;
    }
    rep.turning = turning;

    std::vector<Vec2> pts(kScanSamples);
    for (std::size_t j = 0; j < kScanSamples; ++j) pts[j] = gamma(kTwoPi * static_cast<double>(j) / kScanSamples);
    for (std::size_t i = 0; i < kScanSamples; ++i) {
        for (std::size_t j = i + 2; j < kScanSamples; ++j) {
            if (i == 0 && j == kScanSamples - 1) continue;
            if (segments_cross(pts[i], pts[i + 1], pts[j], pts[(j + 1) % kScanSamples])) ++rep.self_intersections;
        }
    }

    const bool one_turn = std::abs(std::abs(turning) - kTwoPi) < 1e-6;
    const bool strict = rep.near_zero_curvature == 0 && rep.sign_changes == 0 && rep.max_abs_curvature > 0.0;
    if (rep.regular && one_turn && strict && rep.self_intersections == 0) {
        rep.verdict = rep.min_curvature > 0 ? Convexity::strictly_convex_positive : Convexity::strictly_convex_negative;
    }
    return rep;
}

PeriodicCurve orient_for_construction(const PeriodicCurve& gamma) {
    const ConvexityReport rep = convexity_check(gamma);
    switch (rep.verdict) {
        case Convexity::strictly_convex_negative: return gamma;
        case Convexity::strictly_convex_positive: return gamma.reversed();
        default: break;
    }
    if (!rep.regular) throw InputError("curve is not regular (min |gamma'| / max |gamma'| below 1e-6)");
    throw InputError("curve is not strictly convex (" + std::to_string(rep.sign_changes) + " curvature sign changes, " +
                     std::to_string(rep.near_zero_curvature) + " near-zero samples)");
}

Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

std::array<Vec3, 3> SphericalCurve::jet(double u) const {
    const Vec2 g0 = plane_.derivative(u, 0), g1 = plane_.derivative(u, 1), g2 = plane_.derivative(u, 2);
    auto combine = [&](const Vec2& g, double c3) {
        Vec3 out;
        for (int i = 0; i < 3; ++i) out[i] = -g[0] * frame_.e1[i] - g[1] * frame_.e2[i] + c3 * frame_.e3[i];
        return out;
    };
    const Vec3 v = combine(g0, 1.0), v1 = combine(g1, 0.0), v2 = combine(g2, 0.0);
    const double n = std::sqrt(dot(v, v));
    Vec3 s, s1, s2;
    for (int i = 0; i < 3; ++i) s[i] = v[i] / n;
    const double n1 = dot(s, v1);
    for (int i = 0; i < 3; ++i) s1[i] = (v1[i] - s[i] * n1) / n;
    const double n2 = dot(s1, v1) + dot(s, v2);
    for (int i = 0; i < 3; ++i) s2[i] = (v2[i] - s1[i] * n1 - s[i] * n2) / n - s1[i] * n1 / n;
    return {s, s1, s2};
}

Vec3 SphericalCurve::operator()(double u) const { return jet(u)[0]; }

double SphericalCurve::geodesic_curvature(double u) const {
    const auto [s, s1, s2] = jet(u);
    const double speed = std::sqrt(dot(s1, s1));
    return dot(s2, cross(s, s1)) / (speed * speed * speed);
}

Vec2 SphericalCurve::project(const Vec3& w) const {
    const double h = dot(w, frame_.e3);
    if (!(h > 0.0)) throw InputError("point is not in the open hemisphere of the lift");
    return {-dot(w, frame_.e1) / h, -dot(w, frame_.e2) / h};
}

PeriodicCurve SphericalCurve::inverse_projection(std::size_t samples) const {
    const std::size_t order = plane_.order();
    if (samples == 0) samples = std::max<std::size_t>(64, 4 * (order + 1));
    std::vector<Vec2> pts(samples);
    for (std::size_t j = 0; j < samples; ++j) {
        pts[j] = project((*this)(kTwoPi * static_cast<double>(j) / static_cast<double>(samples)));
    }
    return PeriodicCurve::fit(pts, order);
}

SphericalCurve spherical_lift(const PeriodicCurve& gamma, const Frame& frame) {
    const std::array<const Vec3*, 3> e = {&frame.e1, &frame.e2, &frame.e3};
    double dev = 0.0;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) dev = std::max(dev, std::abs(dot(*e[i], *e[j]) - (i == j ? 1.0 : 0.0)));
    }
    if (dev > 1e-10) throw InputError("frame is not orthonormal");
    if (dot(cross(frame.e1, frame.e2), frame.e3) < 0.0) throw InputError("frame is not positively oriented");
    return SphericalCurve(gamma, frame);
}

}  // namespace isosing
