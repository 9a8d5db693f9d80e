#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "isosing/curves.hpp"
#include "isosing/fourier.hpp"
#include "isosing/geometry_forms.hpp"
#include "isosing/monge_ampere.hpp"

namespace isosing {

// Five Fourier series, one per component of (x, y, z, p, q).
using Field5 = std::array<Spectrum, 5>;

struct CauchyData {
    std::size_t order = 0;  // M
    Field5 value;           // z(u, 0)
    Field5 normal;          // z_v(u, 0)
};

// Boundary values and normal derivatives on v = 0. Throws InputError for a
// curve that is not strictly convex with negative curvature, NumericalError
// when the data circle leaves the domain or meets nonpositive curvature.
CauchyData cauchy_data(const PeriodicCurve& gamma, const WarpedModel& model, const CurvatureField& field,
                       std::size_t order);

struct SolverOptions {
    std::size_t fourier_order = 64;  // M
    std::size_t taylor_order = 24;   // N
    double height = 0.0;             // requested R; <= 0 selects safety / g
    double safety = 0.5;
    bool auto_cap = true;  // cap R at safety / g instead of failing
    bool filter = false;   // exponential filter per Taylor level
    // Fourier coefficients below noise_floor times the largest data coefficient
    // are zeroed on every level; round-off in high modes otherwise grows like
    // m^k / k!. Zero disables.
    double noise_floor = 1e-13;
    std::size_t threads = 0;  // 0: ISOSING_THREADS or 1
    std::size_t check_u = 64, check_v = 16;  // collocation grid for diagnostics
};

struct ResidualSummary {
    double first_order = 0.0;   // sup of the first-order defects
    double equation = 0.0;      // sup of |eq residual| / (1 + |E|)
    double laplacian = 0.0;     // sup of |Delta z - h|
    double min_d = 0.0;         // smallest D seen
};

struct SolverDiagnostics {
    double growth_ratio = 0.0;        // g = max_k sqrt(|c_{k+2}| / |c_k|)
    double adjacent_ratio = 0.0;      // max_k |c_{k+1}| / |c_k|, reported only
    double recommended_height = 0.0;  // safety / g
    double requested_height = 0.0;
    bool capped = false;
    std::vector<double> level_norms;
    ResidualSummary residuals;
    std::size_t threads = 1;
};

// Values and derivatives of the five components at one point.
struct FieldJet {
    Vec5 z, zu, zv, zuu, zuv, zvv;
};

class StripSolution {
public:
    StripSolution(WarpedModel model, CurvatureField field, std::size_t fourier_order, double height,
                  std::vector<Field5> levels);

    const WarpedModel& model() const noexcept { return model_; }
    const CurvatureField& field() const noexcept { return field_; }
    std::size_t fourier_order() const noexcept { return fourier_order_; }
    std::size_t taylor_order() const noexcept { return levels_.size() - 1; }
    double height() const noexcept { return height_; }
    const std::vector<Field5>& levels() const noexcept { return levels_; }

    SolverDiagnostics& diagnostics() noexcept { return diagnostics_; }
    const SolverDiagnostics& diagnostics() const noexcept { return diagnostics_; }

    // Spectra of d^k z / dv^k at height v, k = 0, 1, 2.
    struct Row {
        std::array<Field5, 3> dv;
    };
    Row row(double v) const;
    static FieldJet jet(const Row& row, double u);
    FieldJet jet_at(double u, double v) const { return jet(row(v), u); }

    // Solution for data shifted by delta in u.
    StripSolution shifted(double delta) const;
    // Coefficient-wise max difference.
    double distance(const StripSolution& other) const;

private:
    WarpedModel model_;
    CurvatureField field_;
    std::size_t fourier_order_;
    double height_;
    std::vector<Field5> levels_;
    SolverDiagnostics diagnostics_;
};

// Cauchy-Kovalevskaya march of Delta z = h(z, z_u, z_v) from the data.
StripSolution solve(const CauchyData& data, const WarpedModel& model, const CurvatureField& field,
                    const SolverOptions& options = {});

// Residuals on an n_u x n_v collocation grid over v in (0, v_max].
ResidualSummary collocation_residuals(const StripSolution& sol, std::size_t n_u, std::size_t n_v, double v_min,
                                      double v_max);

// Graph 2-jet (r, s, t) recovered from a field jet; throws NumericalError
// where the map (u, v) -> (x, y) is degenerate.
Jet2 graph_jet(const FieldJet& j);

struct MeshVertex {
    double u = 0.0, v = 0.0;
    State state;
    Vec3 ambient{};
    Vec3 normal{};
    double nu = 1.0;
    double k_prescribed = 0.0;
    double k_computed = 0.0;    // NaN where the chart map is degenerate
    double residual_eq1 = 0.0;  // NaN where the chart map is degenerate
};

struct SurfaceMesh {
    std::size_t n_u = 0, n_v = 0;
    std::vector<MeshVertex> vertices;  // row-major in v: index = j * n_u + i
    const MeshVertex& at(std::size_t i, std::size_t j) const { return vertices[j * n_u + i]; }
};

SurfaceMesh evaluate(const StripSolution& sol, std::size_t n_u, std::size_t n_v, double v_min, double v_max);

std::size_t thread_count_from_env();

}  // namespace isosing
