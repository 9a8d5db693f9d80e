#include "isosing/cauchy_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "isosing/series.hpp"

namespace isosing {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t grid_points(std::size_t order) { return std::max<std::size_t>(16, next_pow2(4 * order)); }

Spectrum resized(const Spectrum& s, std::size_t order) {
    Spectrum out(order + 1, {0.0, 0.0});
    std::copy_n(s.begin(), std::min(s.size(), out.size()), out.begin());
    return out;
}

double field_norm(const Field5& f) {
    double acc = 0.0;
    for (const auto& s : f) acc += std::pow(l2_norm(s), 2);
    return std::sqrt(acc);
}

// Run body(begin, end) over [0, n) split into contiguous chunks. Every point is
// processed independently, so results do not depend on the split.
template <class Body>
void parallel_chunks(std::size_t n, std::size_t threads, Body body) {
    threads = std::clamp<std::size_t>(threads, 1, n);
    if (threads == 1) {
        body(0, n);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    const std::size_t chunk = (n + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
        const std::size_t b = t * chunk, e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&, t, b, e] {
            try {
                body(b, e);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& err : errors) {
        if (err) std::rethrow_exception(err);
    }
}

}  // namespace

std::size_t thread_count_from_env() {
    if (const char* env = std::getenv("ISOSING_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && n >= 1 && n <= 1024) return static_cast<std::size_t>(n);
    }
    return 1;
}

CauchyData cauchy_data(const PeriodicCurve& gamma, const WarpedModel& model, const CurvatureField& field,
                       std::size_t order) {
    if (order < 4) throw InputError("Fourier order must be at least 4");
    const ConvexityReport rep = convexity_check(gamma);
    if (!rep.regular) throw InputError("limit gradient curve is not regular");
    if (rep.verdict == Convexity::strictly_convex_positive) {
        throw InputError("limit gradient curve has positive curvature; reverse its orientation");
    }
    if (rep.verdict != Convexity::strictly_convex_negative) {
        throw InputError("limit gradient curve is not strictly convex");
    }

    const std::size_t P = grid_points(order);
    FourierGrid grid(P);
    std::array<std::vector<double>, 5> normal;
    for (auto& v : normal) v.resize(P);
    std::vector<double> alpha(P), beta(P);
    for (std::size_t j = 0; j < P; ++j) {
        const double u = grid.node(j);
        const Vec2 g = gamma(u), dg = gamma.derivative(u, 1);
        const Coefficients co = ma_coefficients(model, field, {0.0, 0.0, 0.0, g[0], g[1]});
        const double sd = std::sqrt(co.D);
        const double xv = -dg[1] / sd, yv = dg[0] / sd;
        alpha[j] = g[0];
        beta[j] = g[1];
        normal[0][j] = xv;
        normal[1][j] = yv;
        normal[2][j] = g[0] * xv + g[1] * yv;
        normal[3][j] = -co.C * xv + co.B * yv;
        normal[4][j] = co.B * xv - co.A * yv;
    }

    CauchyData data;
    data.order = order;
    for (int c = 0; c < 3; ++c) data.value[c] = Spectrum(order + 1, {0.0, 0.0});
    data.value[3] = resized(gamma.alpha_spectrum(), order);
    data.value[4] = resized(gamma.beta_spectrum(), order);
    for (int c = 0; c < 5; ++c) data.normal[c] = grid.analyze(normal[c], order);
    return data;
}

StripSolution::StripSolution(WarpedModel model, CurvatureField field, std::size_t fourier_order, double height,
                             std::vector<Field5> levels)
    : model_(model), field_(std::move(field)), fourier_order_(fourier_order), height_(height), levels_(std::move(levels)) {
    if (levels_.empty()) throw InputError("strip solution needs at least one Taylor level");
}

StripSolution::Row StripSolution::row(double v) const {
    Row out;
    const std::size_t N = levels_.size() - 1;
    for (int d = 0; d < 3; ++d) {
        for (int c = 0; c < 5; ++c) {
            Spectrum acc(fourier_order_ + 1, {0.0, 0.0});
            // Horner in v over the d-times differentiated Taylor polynomial.
            for (std::size_t k = N + 1; k-- > static_cast<std::size_t>(d);) {
                double falling = 1.0;
                for (int i = 0; i < d; ++i) falling *= static_cast<double>(k - i);
                const Spectrum& ck = levels_[k][c];
                for (std::size_t m = 0; m <= fourier_order_; ++m) acc[m] = acc[m] * v + falling * ck[m];
            }
            out.dv[d][c] = std::move(acc);
        }
    }
    return out;
}

FieldJet StripSolution::jet(const Row& row, double u) {
    FieldJet j;
    for (int c = 0; c < 5; ++c) {
        j.z[c] = evaluate(row.dv[0][c], u);
        j.zu[c] = evaluate_derivative(row.dv[0][c], u, 1);
        j.zuu[c] = evaluate_derivative(row.dv[0][c], u, 2);
        j.zv[c] = evaluate(row.dv[1][c], u);
        j.zuv[c] = evaluate_derivative(row.dv[1][c], u, 1);
        j.zvv[c] = evaluate(row.dv[2][c], u);
    }
    return j;
}

StripSolution StripSolution::shifted(double delta) const {
    std::vector<Field5> levels = levels_;
    for (auto& lvl : levels) {
        for (auto& s : lvl) s = shift(s, delta);
    }
    StripSolution out(model_, field_, fourier_order_, height_, std::move(levels));
    out.diagnostics_ = diagnostics_;
    return out;
}

double StripSolution::distance(const StripSolution& other) const {
    double d = 0.0;
    const std::size_t n = std::min(levels_.size(), other.levels_.size());
    for (std::size_t k = 0; k < n; ++k) {
        for (int c = 0; c < 5; ++c) {
            const auto& a = levels_[k][c];
            const auto& b = other.levels_[k][c];
            for (std::size_t m = 0; m < std::min(a.size(), b.size()); ++m) d = std::max(d, std::abs(a[m] - b[m]));
        }
    }
    return d;
}

StripSolution solve(const CauchyData& data, const WarpedModel& model, const CurvatureField& field,
                    const SolverOptions& options) {
    const std::size_t M = options.fourier_order, N = options.taylor_order;
    if (M < 4 || N < 4) throw InputError("Fourier and Taylor orders must be at least 4");
    if (!(options.safety > 0.0 && options.safety <= 1.0)) throw InputError("safety factor must lie in (0, 1]");
    if (!(options.noise_floor >= 0.0 && options.noise_floor < 1e-3)) throw InputError("noise floor must lie in [0, 1e-3)");
    const std::size_t P = grid_points(M);
    const std::size_t threads = options.threads ? options.threads : thread_count_from_env();
    FourierGrid grid(P);

    std::vector<Field5> levels(N + 1);
    for (int c = 0; c < 5; ++c) {
        levels[0][c] = resized(data.value[c], M);
        levels[1][c] = resized(data.normal[c], M);
    }
    double data_scale = 0.0;
    for (int l = 0; l < 2; ++l) {
        for (const auto& sp : levels[l]) {
            for (const auto& c : sp) data_scale = std::max(data_scale, std::abs(c));
        }
    }
    const double cutoff = options.noise_floor * data_scale;
    auto clean = [cutoff](Spectrum& sp) {
        for (auto& c : sp) {
            if (std::abs(c) < cutoff) c = 0.0;
        }
    };
    for (int l = 0; l < 2; ++l) {
        for (auto& sp : levels[l]) clean(sp);
    }
    // Grid values of each level and of its u-derivative.
    std::vector<std::array<std::vector<double>, 5>> phys(N + 1), phys_u(N + 1);
    auto synth = [&](std::size_t k) {
        for (int c = 0; c < 5; ++c) {
            phys[k][c] = grid.synthesize(levels[k][c]);
            phys_u[k][c] = grid.synthesize(differentiate(levels[k][c]));
        }
    };
    synth(0);
    synth(1);

    std::array<std::vector<double>, 5> h_phys;
    for (auto& v : h_phys) v.resize(P);

    for (std::size_t k = 0; k + 2 <= N; ++k) {
        parallel_chunks(P, threads, [&](std::size_t b, std::size_t e) {
            const std::size_t n = e - b;
            std::array<Series, 5> z, zu, zv;
            for (int c = 0; c < 5; ++c) {
                z[c] = Series(k, n);
                zu[c] = Series(k, n);
                zv[c] = Series(k, n);
                for (std::size_t i = 0; i <= k; ++i) {
                    const double scale = static_cast<double>(i + 1);
                    for (std::size_t j = 0; j < n; ++j) {
                        z[c][i][j] = phys[i][c][b + j];
                        zu[c][i][j] = phys_u[i][c][b + j];
                        zv[c][i][j] = scale * phys[i + 1][c][b + j];
                    }
                }
            }
            const StateT<Series> s{z[0], z[1], z[2], z[3], z[4]};
            const CoefficientSet<Series> co = ma_coefficients_unchecked(model, field, s);
            if (!(min_leading(co.D) > 0.0)) throw NumericalError("ellipticity lost on the boundary row");
            const Series sqrt_d = sqrt(co.D);
            const Vec5T<Series> du{zu[0], zu[1], zu[2], zu[3], zu[4]};
            const Vec5T<Series> dv{zv[0], zv[1], zv[2], zv[3], zv[4]};
            const Vec5T<Series> h = laplacian_rhs_t(s, du, dv, co, sqrt_d);
            for (int c = 0; c < 5; ++c) {
                for (std::size_t j = 0; j < n; ++j) h_phys[c][b + j] = h[c][k][j];
            }
        });

        const double denom = static_cast<double>((k + 1) * (k + 2));
        for (int c = 0; c < 5; ++c) {
            const Spectrum hk = grid.analyze(h_phys[c], M);
            Spectrum next(M + 1);
            for (std::size_t m = 0; m <= M; ++m) {
                const double m2 = static_cast<double>(m * m);
                // c_{k+2} = (h_k - c_k'') / ((k+1)(k+2)) with c_k'' = -m^2 c_k
                next[m] = (hk[m] + m2 * levels[k][c][m]) / denom;
            }
            next[0].imag(0.0);
            if (options.filter) apply_exponential_filter(next);
            clean(next);
            levels[k + 2][c] = std::move(next);
        }
        synth(k + 2);
    }

    SolverDiagnostics diag;
    diag.threads = threads;
    diag.level_norms.resize(N + 1);
    double top = 0.0;
    for (std::size_t k = 0; k <= N; ++k) {
        diag.level_norms[k] = field_norm(levels[k]);
        top = std::max(top, diag.level_norms[k]);
    }
    const double floor = 1e-13 * top;
    // The recursion couples level k to level k + 2, so the norms of even and odd
    // levels decay at different rates; compare two steps apart.
    double g = 0.0, adjacent = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
        const double a = diag.level_norms[k], b = diag.level_norms[k + 1];
        if (a > floor && b > floor) adjacent = std::max(adjacent, b / a);
        if (k + 2 <= N && a > floor && diag.level_norms[k + 2] > floor) {
            g = std::max(g, std::sqrt(diag.level_norms[k + 2] / a));
        }
    }
    if (!(g > 0.0) || !std::isfinite(g)) throw NumericalError("degenerate Taylor coefficients");
    diag.adjacent_ratio = adjacent;
    diag.growth_ratio = g;
    diag.recommended_height = options.safety / g;
    diag.requested_height = options.height;

    double R = options.height;
    if (!(R > 0.0)) {
        R = diag.recommended_height;
    } else if (g * R > options.safety) {
        if (options.auto_cap) {
            R = diag.recommended_height;
            diag.capped = true;
        } else if (g * R > 1.0) {
            std::ostringstream msg;
            msg << "coefficient blow-up: growth ratio " << g << " times strip height " << R << " exceeds 1";
            throw NumericalError(msg.str());
        }
    }

    StripSolution sol(model, field, M, R, std::move(levels));
    diag.residuals = collocation_residuals(sol, options.check_u, options.check_v, 0.0, R);
    sol.diagnostics() = diag;
    return sol;
}

Jet2 graph_jet(const FieldJet& j) {
    const double xu = j.zu[0], xv = j.zv[0], yu = j.zu[1], yv = j.zv[1];
    const double det = xu * yv - xv * yu;
    const double scale = std::abs(xu) + std::abs(xv) + std::abs(yu) + std::abs(yv);
    if (!(std::abs(det) > 1e-14 * scale * scale)) throw NumericalError("degenerate chart map");
    const double pu = j.zu[3], pv = j.zv[3], qu = j.zu[4], qv = j.zv[4];
    const double r = (pu * yv - pv * yu) / det;
    const double s12 = (pv * xu - pu * xv) / det;
    const double s21 = (qu * yv - qv * yu) / det;
    const double t = (qv * xu - qu * xv) / det;
    return {{j.z[0], j.z[1], j.z[2], j.z[3], j.z[4]}, r, 0.5 * (s12 + s21), t};
}

ResidualSummary collocation_residuals(const StripSolution& sol, std::size_t n_u, std::size_t n_v, double v_min,
                                      double v_max) {
    ResidualSummary out;
    out.min_d = INFINITY;
    const WarpedModel& model = sol.model();
    for (std::size_t jv = 0; jv < n_v; ++jv) {
        const double v = v_min + (v_max - v_min) * static_cast<double>(jv + 1) / static_cast<double>(n_v);
        const auto row = sol.row(v);
        for (std::size_t iu = 0; iu < n_u; ++iu) {
            const double u = kTwoPi * static_cast<double>(iu) / static_cast<double>(n_u);
            const FieldJet j = StripSolution::jet(row, u);
            const State s{j.z[0], j.z[1], j.z[2], j.z[3], j.z[4]};
            const Coefficients co = ma_coefficients(model, sol.field(), s);
            if (!(co.D > 0.0)) throw NumericalError("ellipticity lost inside the strip");
            out.min_d = std::min(out.min_d, co.D);
            for (double d : first_order_residual(s, j.zu, j.zv, co)) out.first_order = std::max(out.first_order, std::abs(d));
            const Vec5 h = laplacian_rhs(s, j.zu, j.zv, co);
            for (int c = 0; c < 5; ++c) out.laplacian = std::max(out.laplacian, std::abs(j.zuu[c] + j.zvv[c] - h[c]));
            const Jet2 g = graph_jet(j);
            out.equation = std::max(out.equation, std::abs(residual(g, co)) / (1.0 + std::abs(co.E)));
        }
    }
    return out;
}

SurfaceMesh evaluate(const StripSolution& sol, std::size_t n_u, std::size_t n_v, double v_min, double v_max) {
    if (n_u == 0 || n_v == 0) throw InputError("mesh grid must be nonempty");
    const double R = sol.height();
    if (!(v_min >= 0.0) || !(v_max >= v_min) || v_max > R * (1.0 + 1e-12)) {
        throw InputError("evaluation range must satisfy 0 <= v_min <= v_max <= R");
    }
    const WarpedModel& model = sol.model();
    SurfaceMesh mesh;
    mesh.n_u = n_u;
    mesh.n_v = n_v;
    mesh.vertices.resize(n_u * n_v);
    for (std::size_t jv = 0; jv < n_v; ++jv) {
        const double v = n_v == 1 ? v_min : v_min + (v_max - v_min) * static_cast<double>(jv) / static_cast<double>(n_v - 1);
        const auto row = sol.row(v);
        for (std::size_t iu = 0; iu < n_u; ++iu) {
            const double u = kTwoPi * static_cast<double>(iu) / static_cast<double>(n_u);
            const FieldJet j = StripSolution::jet(row, u);
            MeshVertex& mv = mesh.vertices[jv * n_u + iu];
            mv.u = u;
            mv.v = v;
            mv.state = {j.z[0], j.z[1], j.z[2], j.z[3], j.z[4]};
            const auto na = unit_normal_angle(model, mv.state);
            mv.normal = na.normal;
            mv.nu = na.nu;
            mv.ambient = model.ambient(j.z[0], j.z[1], j.z[2]);
            mv.k_prescribed = sol.field()(j.z[0], j.z[1], j.z[2]);
            mv.k_computed = kNaN;
            mv.residual_eq1 = kNaN;
            if (v > 0.0) {
                try {
                    const Jet2 g = graph_jet(j);
                    mv.residual_eq1 = residual(g, ma_coefficients(model, sol.field(), mv.state));
                    const LocalForms lf =
                        local_forms(model, {j.z[0], j.z[1], j.z[2]}, {j.zu[0], j.zu[1], j.zu[2]},
                                    {j.zv[0], j.zv[1], j.zv[2]}, {j.zuu[0], j.zuu[1], j.zuu[2]},
                                    {j.zuv[0], j.zuv[1], j.zuv[2]}, {j.zvv[0], j.zvv[1], j.zvv[2]});
                    mv.k_computed = lf.extrinsic_curvature();
                } catch (const NumericalError&) {
                    // degenerate chart map: leave NaN
                }
            }
        }
    }
    return mesh;
}

}  // namespace isosing
