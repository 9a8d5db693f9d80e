#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "isosing/fourier.hpp"

namespace isosing {

using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;

// gamma(u) = (alpha(u), beta(u)), each a_0 + sum_m a_m cos(mu) + b_m sin(mu).
class PeriodicCurve {
public:
    PeriodicCurve() = default;
    // Cosine and sine coefficients of degrees 0..M; the degree-0 sine entry is ignored.
    PeriodicCurve(std::vector<double> alpha_cos, std::vector<double> alpha_sin, std::vector<double> beta_cos,
                  std::vector<double> beta_sin);

    static PeriodicCurve from_spectra(const Spectrum& alpha, const Spectrum& beta);
    // Least-squares (here: exact discrete) fit to samples at u_j = 2 pi j / n.
    static PeriodicCurve fit(const std::vector<Vec2>& samples, std::size_t order);
    static PeriodicCurve circle(double radius, bool clockwise = false, Vec2 center = {0.0, 0.0});

    std::size_t order() const noexcept { return alpha_cos_.empty() ? 0 : alpha_cos_.size() - 1; }
    const std::vector<double>& alpha_cos() const noexcept { return alpha_cos_; }
    const std::vector<double>& alpha_sin() const noexcept { return alpha_sin_; }
    const std::vector<double>& beta_cos() const noexcept { return beta_cos_; }
    const std::vector<double>& beta_sin() const noexcept { return beta_sin_; }

    Spectrum alpha_spectrum() const;
    Spectrum beta_spectrum() const;

    Vec2 operator()(double u) const { return derivative(u, 0); }
    Vec2 derivative(double u, int order) const;

    // Same curve traversed backwards, u -> -u.
    PeriodicCurve reversed() const;
    // u -> gamma(u + delta).
    PeriodicCurve shifted(double delta) const;
    // Coefficient-wise max difference (orders padded with zeros).
    double distance(const PeriodicCurve& other) const;

    // Root-mean-square speed, a cheap scale for regularity tests.
    double rms_speed() const;

private:
    std::vector<double> alpha_cos_, alpha_sin_, beta_cos_, beta_sin_;
};

inline constexpr std::size_t kDenseSamples = 4096;
inline constexpr std::size_t kScanSamples = 1024;
inline constexpr double kRegularityRatio = 1e-6;
inline constexpr double kConvexityRatio = 1e-8;

// Signed curvature; throws InputError where gamma is not regular.
double plane_curvature(const PeriodicCurve& gamma, double u);

enum class Convexity { strictly_convex_positive, strictly_convex_negative, not_strictly_convex };
std::string to_string(Convexity c);

struct ConvexityReport {
    Convexity verdict = Convexity::not_strictly_convex;
    bool regular = false;  // min |gamma'| >= 1e-6 max |gamma'|; irregular curves are never strictly convex
    double min_speed = 0.0, max_speed = 0.0;
    double min_curvature = 0.0, max_curvature = 0.0;  // signed extremes
    double max_abs_curvature = 0.0;
    double turning = 0.0;                 // total tangent turning, radians
    std::size_t near_zero_curvature = 0;  // dense samples with |kappa| below the threshold
    std::size_t sign_changes = 0;
    std::size_t self_intersections = 0;
};

// Throws InputError only for a constant curve.
ConvexityReport convexity_check(const PeriodicCurve& gamma, std::size_t samples = kDenseSamples);

// Reverses the parameter when needed so that kappa < 0; throws InputError if
// gamma is not strictly convex.
PeriodicCurve orient_for_construction(const PeriodicCurve& gamma);

struct Frame {
    Vec3 e1{1.0, 0.0, 0.0}, e2{0.0, 1.0, 0.0}, e3{0.0, 0.0, 1.0};
};

// sigma(u) = (-alpha e1 - beta e2 + e3) / sqrt(1 + alpha^2 + beta^2).
class SphericalCurve {
public:
    SphericalCurve(PeriodicCurve plane, Frame frame) : plane_(std::move(plane)), frame_(frame) {}

    const PeriodicCurve& plane() const noexcept { return plane_; }
    const Frame& frame() const noexcept { return frame_; }

    Vec3 operator()(double u) const;
    // sigma, sigma', sigma''
    std::array<Vec3, 3> jet(double u) const;

    double geodesic_curvature(double u) const;
    // Planar point whose lift is the given unit vector (requires <w, e3> > 0).
    Vec2 project(const Vec3& w) const;
    // Sample, project back and refit.
    PeriodicCurve inverse_projection(std::size_t samples = 0) const;

private:
    PeriodicCurve plane_;
    Frame frame_;
};

// Throws InputError when the frame's Gram matrix deviates from the identity
// by more than 1e-10 or the frame is negatively oriented.
SphericalCurve spherical_lift(const PeriodicCurve& gamma, const Frame& frame = {});

Vec3 cross(const Vec3& a, const Vec3& b);
double dot(const Vec3& a, const Vec3& b);

}  // namespace isosing
