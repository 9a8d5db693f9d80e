#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "isosing/analysis.hpp"
#include "isosing/cauchy_solver.hpp"
#include "isosing/error.hpp"

namespace isosing {

// Run configuration. Text format, one `key = value` per line under
// `[section]` headers; `#` starts a comment. Sections and keys:
//
//   [space_form]  c (-1, 0, 1), chart (cartesian | cylindrical_h3 | stereographic_s3 | halfspace_h3)
//   [curvature]   expression (in x, y, z), gradient_dependence (reserved, must be false)
//   [curve]       alpha_cos, alpha_sin, beta_cos, beta_sin (space separated coefficients of
//                 degrees 0, 1, ...), or circle_radius with clockwise
//   [solver]      M, N, R (0 picks safety / g), safety, filter (on | off), auto_cap, noise_floor
//   [analysis]    grid_u, grid_v, tol_curvature, tol_residual, tol_equation, samples (path),
//                 solution (path), expect (verdict for classify)
//   [output]      dir, formats (any of obj csv json), mesh_u, mesh_v
struct RunConfig {
    int c = 0;
    Chart chart = Chart::cartesian;
    std::string curvature = "1";
    bool gradient_dependence = false;

    std::vector<double> alpha_cos{0.0, 1.0}, alpha_sin{0.0, 0.0}, beta_cos{0.0, 0.0}, beta_sin{0.0, -1.0};

    std::size_t M = 64, N = 24;
    double R = 0.0;
    double safety = 0.5;
    bool filter = false;
    bool auto_cap = true;
    double noise_floor = 1e-13;

    std::size_t grid_u = 64, grid_v = 33;
    double tol_curvature = 1e-4;
    double tol_residual = 1e-6;
    double tol_equation = 1e-8;
    std::string samples;
    std::string solution;
    std::string expect;

    std::string out_dir = "out";
    std::vector<std::string> formats{"obj", "csv", "json"};
    std::size_t mesh_u = 64, mesh_v = 17;

    bool operator==(const RunConfig&) const = default;

    PeriodicCurve curve() const;
    WarpedModel model() const;
    CurvatureField field() const;
    SolverOptions solver_options() const;
};

struct ConfigIssue {
    std::size_t line = 0, column = 0;  // 1-based; 0 when not tied to a position
    std::string message;
};

class ConfigError : public InputError {
public:
    explicit ConfigError(std::vector<ConfigIssue> issues);
    const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

private:
    std::vector<ConfigIssue> issues_;
};

// Throws ConfigError listing every problem found.
RunConfig parse_config(std::string_view text);
// Normalized text; parse_config(serialize(cfg)) == cfg.
std::string serialize(const RunConfig& cfg);

std::uint64_t fnv1a(std::string_view bytes);
std::string hex(std::uint64_t value);
// Shortest decimal that reads back to the same double.
std::string format_double(double value);

// ------------------------------------------------------------ files

// Positions and unit normals in the ambient model; faces are quads of the
// grid, closed across the seam in u when n_u > 2.
void write_obj(std::ostream& os, const SurfaceMesh& mesh, const WarpedModel& model, const std::string& run_id);
// Columns: u,v,x,y,z,p,q,nu,K_prescribed,K_computed,residual_eq1
void write_csv(std::ostream& os, const SurfaceMesh& mesh);

struct CsvRow {
    double u, v, x, y, z, p, q, nu, K_prescribed, K_computed, residual_eq1;
};
std::vector<CsvRow> read_csv(std::istream& is);

// Graph samples: one line per sample, `ring x y z p q [r s t]`, rings numbered
// from the outside in. Values are decimal and read in quadruple precision so
// that files can carry more digits than a double holds.
struct SampleFile {
    GraphSamples samples;
    std::vector<ExtendedJet> jets;  // per sample when second-order data is present
    std::vector<std::size_t> ring_of;
};
SampleFile read_samples(std::istream& is, const WarpedModel& model);

std::string solution_to_json(const StripSolution& sol, const std::string& curvature_text);
StripSolution solution_from_json(const std::string& text);

// ------------------------------------------------------------ pipelines

enum class Command { construct, verify, classify, export_mesh };
Command parse_command(std::string_view name);
std::string to_string(Command c);

struct RunOptions {
    std::filesystem::path out_dir;  // overrides the config when set
    bool seed_check = false;
};

struct RunResult {
    int exit_code = 0;  // 0 ok, 1 tolerance, 2 input, 3 numerical
    std::string run_id;
    std::vector<std::filesystem::path> artifacts;
    std::string message;
};

int exit_code(ErrorKind kind);

// Executes one command and writes artifacts plus manifest.json under the
// output directory. Module errors become an error record in the manifest.
RunResult run(Command command, const RunConfig& cfg, const std::string& config_text, const RunOptions& options);

}  // namespace isosing
