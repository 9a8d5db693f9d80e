#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "isosing/cauchy_solver.hpp"
#include "isosing/curves.hpp"
#include "isosing/geometry_forms.hpp"
#include "isosing/monge_ampere.hpp"

namespace isosing {

using Complex = std::complex<double>;

// Uniform grid on the strip: u_i = 2 pi i / n_u, v_j = v_min + (v_max - v_min) j / (n_v - 1).
struct StripGrid {
    std::size_t n_u = 64, n_v = 33;
    double v_min = 0.0, v_max = 0.0;

    double u(std::size_t i) const;
    double v(std::size_t j) const;
};

struct FormsSample {
    double u = 0.0, v = 0.0;
    Complex Q;          // <psi_w, psi_w>
    double mu = 0.0;    // <psi_w, psi_wbar>
    double rho = 0.0;   // II = 2 rho |dw|^2
    double omega = 0.0;
    Complex U, V;
    double K = 0.0;            // det II / det I; NaN where I degenerates
    double K_prescribed = 0.0;  // field value on the surface
    double det_first = 0.0;     // E G - F^2 = 4 (mu^2 - |Q|^2)
};

struct FormsReport {
    StripGrid grid;
    std::vector<FormsSample> samples;  // index j * n_u + i
    int orientation = 1;               // sign applied to II so that rho > 0
    int epsilon = 1;                   // sign of the conformal metric
    double max_roca_deviation = 0.0;   // |rho^2 - K (mu^2 - |Q|^2)| / rho^2 where omega >= 1e-6
    double max_boundary_omega = 0.0;   // sup |omega(u, 0)| when the grid starts at v = 0
    double min_omega_interior = 0.0;   // inf omega over rows with v > 0

    const FormsSample& at(std::size_t i, std::size_t j) const { return samples[j * grid.n_u + i]; }
};

// Q, mu, rho, omega and U, V on the grid. omega is taken as
// asinh(sqrt(mu^2 - |Q|^2) / |Q|) with mu^2 - |Q|^2 = det I / 4, which equals
// arccosh(mu / |Q|) but keeps full precision as omega -> 0. Throws
// NumericalError where |Q| vanishes or mu < |Q| beyond rounding.
FormsReport fundamental_forms(const StripSolution& sol, const StripGrid& grid);

struct SinhGordonReport {
    double sup = 0.0, l2 = 0.0;          // with (K + c)
    double sup_alt = 0.0, l2_alt = 0.0;  // with (K + epsilon)
    int c = 0, epsilon = 1;
    std::size_t rows = 0;                // rows with v > 0
};

// omega_{w wbar} + U_wbar - V_w + (K + c) |Q| sinh omega at every grid point
// with v > 0. Derivatives are exact for the truncated series: psi is
// differentiated spectrally in u and termwise in v, and omega, U, V are
// carried as second-order jets. Grid differences would not do here, since
// omega is close to singular wherever |Q| nearly vanishes.
SinhGordonReport sinh_gordon_residual(const StripSolution& sol, const StripGrid& grid, int c);

// One-sided second-order estimate of omega_v(u, 0) with step h.
double omega_slope(const StripSolution& sol, double u, double h = 0.0);
// -2 <eta'', eta x eta'> / <eta', eta'> for eta the lift of gamma.
double omega_slope_closed_form(const PeriodicCurve& gamma, double u);

struct CurvatureReport {
    std::vector<double> K;           // NaN where I degenerates
    double max_relative_deviation = 0.0;  // against the prescribed field
};

CurvatureReport extrinsic_curvature(const SurfaceMesh& mesh);
double extrinsic_curvature(const WarpedModel& model, const Jet2& jet);

// ------------------------------------------------------------ graph samples

struct GraphSample {
    double x = 0.0, y = 0.0, z = 0.0, p = 0.0, q = 0.0;
    bool has_second = false;
    double r = 0.0, s = 0.0, t = 0.0;

    State state() const { return {x, y, z, p, q}; }
    Jet2 jet() const { return {state(), r, s, t}; }
};

struct Annulus {
    double radius = 0.0;
    std::vector<GraphSample> samples;
};

// Samples of a graph around an isolated singularity at the origin, grouped by
// annulus from the outside in. All annuli carry the same number of samples,
// and sample i of every annulus lies on the same ray.
class GraphSamples {
public:
    GraphSamples(WarpedModel model, std::vector<Annulus> annuli);

    // Rings of radius r0, r0/2, ... with n_angle samples each.
    static GraphSamples from_function(const WarpedModel& model, const std::function<Jet2(double, double)>& jet,
                                      double r0, std::size_t rings, std::size_t n_angle);
    // Rows v of a constructed solution, n_u samples each (the annulus radius is
    // the mean distance to the origin).
    static GraphSamples from_solution(const StripSolution& sol, std::span<const double> heights, std::size_t n_u);

    const WarpedModel& model() const noexcept { return model_; }
    const std::vector<Annulus>& annuli() const noexcept { return annuli_; }
    std::size_t samples_per_annulus() const { return annuli_.front().samples.size(); }

private:
    WarpedModel model_;
    std::vector<Annulus> annuli_;
};

struct LimitGradientReport {
    std::vector<std::vector<Vec2>> loci;  // (p, q) per annulus
    std::vector<Vec2> limit;              // linear extrapolation to radius 0
    std::vector<double> max_gradient, diameters;
    bool bounded = true;
    bool contracts = false;  // the limit locus is a single point
    double diameter = 0.0;   // of the extrapolated locus
    Vec2 center{0.0, 0.0};
    bool fitted = false;     // curve and convexity are set when bounded and not contracting
    PeriodicCurve curve;
    ConvexityReport convexity;
};

struct ClassifierOptions {
    double nu_threshold = 1e-3;
    double height_growth = 0.2;  // per radius halving
    std::size_t growth_steps = 3;
    double contraction = 1e-2;   // diameter relative to 1 + mean gradient norm
};

LimitGradientReport limit_gradient(const GraphSamples& g, const ClassifierOptions& options = {});

enum class Singularity { C1_extension, bounded_nonvertical, height_diverges, inconclusive };
std::string to_string(Singularity s);

struct ClassificationReport {
    Singularity verdict = Singularity::inconclusive;
    std::vector<double> radii, inf_nu, median_height, max_gradient;
    double inf_nu_inner = 0.0;  // over the two innermost annuli
    int height_direction = 0;   // sign of z where the height diverges
    LimitGradientReport limit;
    std::string diagnostics;
};

// Needs at least five annuli; checks K > 0 on samples carrying second-order data.
ClassificationReport classify_singularity(const GraphSamples& g, const ClassifierOptions& options = {});

// ------------------------------------------------------------ Legendre transform

// Transform of the convexified graph z* = z + eps (c x^2 + a y^2) / 2:
// (p*, q*, x p* + y q* - z*).
Vec3 legendre_point(const State& s, const Convexifier& cv = {0.0, 0.0}, int epsilon = 1);
// Upward unit normal of the transformed surface at the image of (x, y).
Vec3 legendre_normal(double x, double y);

struct LevelCurve {
    double level = 0.0;
    std::vector<Vec2> points;  // on uniform parameter values
    PeriodicCurve curve;
    ConvexityReport convexity;
    double hausdorff = 0.0;    // to the reference curve
};

struct LegendreReport {
    std::vector<LevelCurve> levels;
    bool monotone = true;  // Hausdorff distance shrinks with the level
};

// Level curves {L_3 = level} of the transformed constructed surface; the
// reference is the boundary curve L(u, 0) = gamma(u).
LegendreReport legendre(const StripSolution& sol, const Convexifier& cv, std::span<const double> levels,
                        std::size_t n_u = 128, int epsilon = 1);
// Transformed points of every sample, annulus by annulus.
std::vector<std::vector<Vec3>> legendre(const GraphSamples& g, const Convexifier& cv, int epsilon = 1);

// Symmetric Hausdorff distance between two sampled closed curves.
double hausdorff_distance(std::span<const Vec2> a, std::span<const Vec2> b);

}  // namespace isosing
