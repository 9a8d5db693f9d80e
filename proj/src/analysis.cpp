#include "isosing/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/tools/roots.hpp>

namespace isosing {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const Complex kI{0.0, 1.0};

Vec3 head(const Vec5& v) { return {v[0], v[1], v[2]}; }

struct PointForms {
    FormsSample sample;
    double rho_raw = 0.0;  // (L + N) / 4 with the upward normal
};

PointForms point_forms(const StripSolution& sol, const FieldJet& j, double u, double v) {
    const WarpedModel& model = sol.model();
    const State st{j.z[0], j.z[1], j.z[2], j.z[3], j.z[4]};
    const Vec3 pos = head(j.z), pu = head(j.zu), pv = head(j.zv);
    const double E = warped_inner(model, pos, pu, pu);
    const double F = warped_inner(model, pos, pu, pv);
    const double G = warped_inner(model, pos, pv, pv);
    const NormalAngle na = unit_normal_angle(model, st);
    const SecondForm II = second_form(model, pos, na.normal, pu, pv, head(j.zuu), head(j.zuv), head(j.zvv));

    PointForms out;
    FormsSample& s = out.sample;
    s.u = u;
    s.v = v;
    s.Q = Complex(0.25 * (E - G), -0.5 * F);
    s.mu = 0.25 * (E + G);
    s.det_first = E * G - F * F;
    const double absQ = std::abs(s.Q);
    const double scale = E + G;
    if (!(absQ > 1e-12 * scale)) {
        std::ostringstream msg;
        msg << "Q vanishes at (u, v) = (" << u << ", " << v << "); the strip height is too large";
        throw NumericalError(msg.str());
    }
    if (s.det_first < -1e-10 * scale * scale) {
        std::ostringstream msg;
        msg << "mu < |Q| at (u, v) = (" << u << ", " << v << ")";
        throw NumericalError(msg.str());
    }
    const double gap = std::sqrt(std::max(s.det_first, 0.0)) / 2.0;  // sqrt(mu^2 - |Q|^2)
    s.omega = std::asinh(gap / absQ);
    out.rho_raw = 0.25 * (II.L + II.N);
    s.K = s.det_first > 1e-24 * scale * scale ? (II.L * II.N - II.M * II.M) / s.det_first : kNaN;

    const auto k = sol.field().evaluate(pos[0], pos[1], pos[2]);
    s.K_prescribed = k.k;
    const double Ku = k.kx * pu[0] + k.ky * pu[1] + k.kz * pu[2];
    const double Kv = k.kx * pv[0] + k.ky * pv[1] + k.kz * pv[2];
    const Complex Kw = 0.5 * (Ku - kI * Kv), Kwb = 0.5 * (Ku + kI * Kv);
    const double sh = std::sinh(s.omega) / (4.0 * k.k * absQ);
    s.U = -Kwb * s.Q * sh;
    s.V = Kw * std::conj(s.Q) * sh;
    return out;
}

// Second-order jet in (u, v): value and partials up to order two.
struct Jet {
    double f = 0.0, fu = 0.0, fv = 0.0, fuu = 0.0, fuv = 0.0, fvv = 0.0;
};

Jet operator+(const Jet& a, const Jet& b) {
    return {a.f + b.f, a.fu + b.fu, a.fv + b.fv, a.fuu + b.fuu, a.fuv + b.fuv, a.fvv + b.fvv};
}
Jet operator-(const Jet& a) { return {-a.f, -a.fu, -a.fv, -a.fuu, -a.fuv, -a.fvv}; }
Jet operator-(const Jet& a, const Jet& b) { return a + (-b); }
Jet operator*(double s, const Jet& a) { return {s * a.f, s * a.fu, s * a.fv, s * a.fuu, s * a.fuv, s * a.fvv}; }
Jet operator*(const Jet& a, double s) { return s * a; }
Jet operator+(const Jet& a, double s) { return {a.f + s, a.fu, a.fv, a.fuu, a.fuv, a.fvv}; }
Jet operator+(double s, const Jet& a) { return a + s; }
Jet operator-(const Jet& a, double s) { return a + (-s); }
Jet operator-(double s, const Jet& a) { return (-a) + s; }
Jet operator*(const Jet& a, const Jet& b) {
    return {a.f * b.f,
            a.fu * b.f + a.f * b.fu,
            a.fv * b.f + a.f * b.fv,
            a.fuu * b.f + 2.0 * a.fu * b.fu + a.f * b.fuu,
            a.fuv * b.f + a.fu * b.fv + a.fv * b.fu + a.f * b.fuv,
            a.fvv * b.f + 2.0 * a.fv * b.fv + a.f * b.fvv};
}
// g(a) from g, g', g'' at a.f
Jet chain(const Jet& a, double g0, double g1, double g2) {
    return {g0,
            g1 * a.fu,
            g1 * a.fv,
            g2 * a.fu * a.fu + g1 * a.fuu,
            g2 * a.fu * a.fv + g1 * a.fuv,
            g2 * a.fv * a.fv + g1 * a.fvv};
}
Jet operator/(double s, const Jet& a) {
    const double r = 1.0 / a.f;
    return s * chain(a, r, -r * r, 2.0 * r * r * r);
}
Jet operator/(const Jet& a, const Jet& b) { return a * (1.0 / b); }
Jet operator/(const Jet& a, double s) { return (1.0 / s) * a; }
Jet exp(const Jet& a) {
    const double e = std::exp(a.f);
    return chain(a, e, e, e);
}
Jet log(const Jet& a) { return chain(a, std::log(a.f), 1.0 / a.f, -1.0 / (a.f * a.f)); }
Jet sin(const Jet& a) { return chain(a, std::sin(a.f), std::cos(a.f), -std::sin(a.f)); }
Jet cos(const Jet& a) { return chain(a, std::cos(a.f), -std::sin(a.f), -std::cos(a.f)); }
Jet sinh(const Jet& a) { return chain(a, std::sinh(a.f), std::cosh(a.f), std::sinh(a.f)); }
Jet cosh(const Jet& a) { return chain(a, std::cosh(a.f), std::sinh(a.f), std::cosh(a.f)); }
Jet sqrt(const Jet& a) {
    const double r = std::sqrt(a.f);
    return chain(a, r, 0.5 / r, -0.25 / (r * a.f));
}
Jet pow(const Jet& a, double e) {
    return chain(a, std::pow(a.f, e), e * std::pow(a.f, e - 1.0), e * (e - 1.0) * std::pow(a.f, e - 2.0));
}
Jet asinh(const Jet& a) {
    const double s = 1.0 + a.f * a.f;
    return chain(a, std::asinh(a.f), 1.0 / std::sqrt(s), -a.f / (s * std::sqrt(s)));
}
Jet constant_like(const Jet&, double value) { return {value}; }
double min_leading(const Jet& a) { return a.f; }
bool any_zero_leading(const Jet& a) { return a.f == 0.0; }

// Spectra of d^b psi / dv^b at height v for b = 0..3, components x, y, z.
std::array<std::array<Spectrum, 3>, 4> v_derivative_spectra(const StripSolution& sol, double v) {
    std::array<std::array<Spectrum, 3>, 4> out;
    const auto& levels = sol.levels();
    const std::size_t M = sol.fourier_order();
    for (std::size_t b = 0; b < 4; ++b) {
        for (int c = 0; c < 3; ++c) {
            Spectrum acc(M + 1, {0.0, 0.0});
            for (std::size_t k = levels.size(); k-- > b;) {
                double falling = 1.0;
                for (std::size_t i = 0; i < b; ++i) falling *= static_cast<double>(k - i);
                for (std::size_t m = 0; m <= M; ++m) acc[m] = acc[m] * v + falling * levels[k][c][m];
            }
            out[b][c] = std::move(acc);
        }
    }
    return out;
}

double per_halving(double outer, double inner, double r_outer, double r_inner) {
    return std::pow(inner / outer, std::log(2.0) / std::log(r_outer / r_inner)) - 1.0;
}

// True when some run of `steps` consecutive annulus steps grows by at least
// `growth` per radius halving.
bool sustained_growth(const std::vector<double>& values, const std::vector<double>& radii, double growth,
                      std::size_t steps) {
    std::size_t run = 0;
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
        const bool grows = values[k] > 0.0 && values[k + 1] > values[k] &&
                           per_halving(values[k], values[k + 1], radii[k], radii[k + 1]) >= growth;
        run = grows ? run + 1 : 0;
        if (run >= steps) return true;
    }
    return false;
}

double diameter(std::span<const Vec2> pts) {
    double d = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            d = std::max(d, std::hypot(pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]));
        }
    }
    return d;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

double StripGrid::u(std::size_t i) const { return kTwoPi * static_cast<double>(i) / static_cast<double>(n_u); }

double StripGrid::v(std::size_t j) const {
    return v_min + (v_max - v_min) * static_cast<double>(j) / static_cast<double>(n_v - 1);
}

FormsReport fundamental_forms(const StripSolution& sol, const StripGrid& grid) {
    if (grid.n_u < 8 || grid.n_v < 2) throw InputError("forms grid needs n_u >= 8 and n_v >= 2");
    if (!(grid.v_min >= 0.0) || !(grid.v_max > grid.v_min) || grid.v_max > sol.height() * (1.0 + 1e-12)) {
        throw InputError("forms grid must satisfy 0 <= v_min < v_max <= R");
    }
    FormsReport rep;
    rep.grid = grid;
    rep.samples.resize(grid.n_u * grid.n_v);
    std::vector<double> rho_raw(rep.samples.size());
    double orient = 0.0;
    for (std::size_t j = 0; j < grid.n_v; ++j) {
        const double v = grid.v(j);
        const auto row = sol.row(v);
        for (std::size_t i = 0; i < grid.n_u; ++i) {
            const PointForms pf = point_forms(sol, StripSolution::jet(row, grid.u(i)), grid.u(i), v);
            rep.samples[j * grid.n_u + i] = pf.sample;
            rho_raw[j * grid.n_u + i] = pf.rho_raw;
            orient += pf.rho_raw;
        }
    }
    rep.orientation = orient < 0.0 ? -1 : 1;
    rep.min_omega_interior = INFINITY;
    for (std::size_t n = 0; n < rep.samples.size(); ++n) {
        FormsSample& s = rep.samples[n];
        s.rho = rep.orientation * rho_raw[n];
        if (s.v == 0.0) {
            rep.max_boundary_omega = std::max(rep.max_boundary_omega, std::abs(s.omega));
        } else {
            rep.min_omega_interior = std::min(rep.min_omega_interior, s.omega);
        }
        if (s.omega >= 1e-6) {
            const double rhs = s.K_prescribed * 0.25 * s.det_first;
            rep.max_roca_deviation = std::max(rep.max_roca_deviation, std::abs(s.rho * s.rho - rhs) / (s.rho * s.rho));
        }
    }

    const FieldJet mid = sol.jet_at(0.0, grid.v(grid.n_v / 2) > 0.0 ? grid.v(grid.n_v / 2) : grid.v_max);
    const State st{mid.z[0], mid.z[1], mid.z[2], mid.z[3], mid.z[4]};
    rep.epsilon = conformal_metric(graph_jet(mid), ma_coefficients(sol.model(), sol.field(), st), false).epsilon;
    return rep;
}

SinhGordonReport sinh_gordon_residual(const StripSolution& sol, const StripGrid& grid, int c) {
    if (grid.n_u < 8 || grid.n_v < 2) throw InputError("sinh-Gordon grid needs n_u >= 8 and n_v >= 2");
    if (!(grid.v_min >= 0.0) || !(grid.v_max > grid.v_min) || grid.v_max > sol.height() * (1.0 + 1e-12)) {
        throw InputError("sinh-Gordon grid must satisfy 0 <= v_min < v_max <= R");
    }
    SinhGordonReport out;
    out.c = c;
    {
        const FieldJet mid = sol.jet_at(0.0, 0.5 * grid.v_max);
        const State st{mid.z[0], mid.z[1], mid.z[2], mid.z[3], mid.z[4]};
        out.epsilon = conformal_metric(graph_jet(mid), ma_coefficients(sol.model(), sol.field(), st), false).epsilon;
    }
    const WarpedModel& model = sol.model();
    double acc = 0.0, acc_alt = 0.0;
    std::size_t count = 0;
    for (std::size_t j = 0; j < grid.n_v; ++j) {
        const double v = grid.v(j);
        if (v <= 0.0) continue;  // omega vanishes there and sqrt(det I) is not differentiable
        const auto dv = v_derivative_spectra(sol, v);
        for (std::size_t i = 0; i < grid.n_u; ++i) {
            const double u = grid.u(i);
            // d^{a+b} psi / du^a dv^b for the three position components
            auto d = [&](int comp, int a, int b) { return evaluate_derivative(dv[b][comp], u, a); };
            std::array<Jet, 3> pos, pu, pv;
            for (int k = 0; k < 3; ++k) {
                pos[k] = {d(k, 0, 0), d(k, 1, 0), d(k, 0, 1), d(k, 2, 0), d(k, 1, 1), d(k, 0, 2)};
                pu[k] = {d(k, 1, 0), d(k, 2, 0), d(k, 1, 1), d(k, 3, 0), d(k, 2, 1), d(k, 1, 2)};
                pv[k] = {d(k, 0, 1), d(k, 1, 1), d(k, 0, 2), d(k, 2, 1), d(k, 1, 2), d(k, 0, 3)};
            }
            const Jet phi = model.warp(pos[2]).f * model.conformal(pos[0], pos[1]).lambda;
            const Jet E = phi * (pu[0] * pu[0] + pu[1] * pu[1]) + pu[2] * pu[2];
            const Jet F = phi * (pu[0] * pv[0] + pu[1] * pv[1]) + pu[2] * pv[2];
            const Jet G = phi * (pv[0] * pv[0] + pv[1] * pv[1]) + pv[2] * pv[2];
            const Jet Qr = 0.25 * (E - G), Qi = -0.5 * F;
            const Jet absQ = sqrt(Qr * Qr + Qi * Qi);
            const Jet det = E * G - F * F;
            if (!(det.f > 0.0) || !(absQ.f > 0.0)) {
                throw NumericalError("first fundamental form degenerates inside the strip");
            }
            const Jet omega = asinh(sqrt(det) / (2.0 * absQ));
            const Jet K = sol.field().expression().evaluate(pos[0], pos[1], pos[2]);
            const Jet sh = sinh(omega);
            const Jet scale = sh / (4.0 * K * absQ);
            // U = -K_wbar A, V = K_w conj(A) with A = Q sinh(omega) / (4 K |Q|)
            const Jet Ar = Qr * scale, Ai = Qi * scale;
            const Complex A{Ar.f, Ai.f};
            const Complex A_wb{0.5 * (Ar.fu - Ai.fv), 0.5 * (Ai.fu + Ar.fv)};
            const Complex Kw{0.5 * K.fu, -0.5 * K.fv}, Kwb{0.5 * K.fu, 0.5 * K.fv};
            const Complex Kww{0.25 * (K.fuu - K.fvv), -0.5 * K.fuv}, Kwbwb{0.25 * (K.fuu - K.fvv), 0.5 * K.fuv};
            const Complex U_wb = -(Kwbwb * A + Kwb * A_wb);
            // (conj A)_w = conj(A_wbar)
            const Complex V_w = Kww * std::conj(A) + Kw * std::conj(A_wb);
            const Complex base = 0.25 * (omega.fuu + omega.fvv) + U_wb - V_w;
            const double tail = absQ.f * sh.f;
            const double r = std::abs(base + (K.f + c) * tail);
            const double r_alt = std::abs(base + (K.f + out.epsilon) * tail);
            out.sup = std::max(out.sup, r);
            out.sup_alt = std::max(out.sup_alt, r_alt);
            acc += r * r;
            acc_alt += r_alt * r_alt;
            ++count;
        }
        ++out.rows;
    }
    if (count == 0) throw InputError("sinh-Gordon grid has no interior rows");
    out.l2 = std::sqrt(acc / static_cast<double>(count));
    out.l2_alt = std::sqrt(acc_alt / static_cast<double>(count));
    return out;
}

double omega_slope(const StripSolution& sol, double u, double h) {
    if (h <= 0.0) h = 1e-3 * sol.height();
    if (2.0 * h > sol.height()) throw InputError("slope step exceeds the strip");
    auto omega = [&](double v) { return point_forms(sol, sol.jet_at(u, v), u, v).sample.omega; };
    return (4.0 * omega(h) - omega(2.0 * h)) / (2.0 * h);
}

double omega_slope_closed_form(const PeriodicCurve& gamma, double u) {
    const auto [eta, d1, d2] = spherical_lift(gamma).jet(u);
    return -2.0 * dot(d2, cross(eta, d1)) / dot(d1, d1);
}

CurvatureReport extrinsic_curvature(const SurfaceMesh& mesh) {
    CurvatureReport out;
    out.K.reserve(mesh.vertices.size());
    for (const auto& mv : mesh.vertices) {
        out.K.push_back(mv.k_computed);
        if (std::isfinite(mv.k_computed)) {
            out.max_relative_deviation =
                std::max(out.max_relative_deviation, std::abs(mv.k_computed - mv.k_prescribed) / std::abs(mv.k_prescribed));
        }
    }
    return out;
}

double extrinsic_curvature(const WarpedModel& model, const Jet2& jet) {
    const LocalForms lf = graph_forms(model, jet);
    if (!(lf.det_first() > 0.0)) throw NumericalError("degenerate first fundamental form");
    return lf.extrinsic_curvature();
}

GraphSamples::GraphSamples(WarpedModel model, std::vector<Annulus> annuli) : model_(model), annuli_(std::move(annuli)) {
    if (annuli_.empty() || annuli_.front().samples.size() < 3) throw InputError("graph samples need annuli of at least 3 points");
    for (std::size_t k = 0; k < annuli_.size(); ++k) {
        const Annulus& a = annuli_[k];
        if (a.samples.size() != annuli_.front().samples.size()) throw InputError("annuli must carry equal sample counts");
        if (!(a.radius > 0.0)) throw InputError("annulus radius must be positive");
        if (k > 0 && !(a.radius < annuli_[k - 1].radius)) throw InputError("annuli must shrink towards the puncture");
        for (const auto& s : a.samples) {
            if (s.x == 0.0 && s.y == 0.0) throw InputError("sample at the puncture");
        }
    }
}

GraphSamples GraphSamples::from_function(const WarpedModel& model, const std::function<Jet2(double, double)>& jet,
                                         double r0, std::size_t rings, std::size_t n_angle) {
    std::vector<Annulus> annuli(rings);
    double r = r0;
    for (auto& a : annuli) {
        a.radius = r;
        for (std::size_t i = 0; i < n_angle; ++i) {
            const double th = kTwoPi * static_cast<double>(i) / static_cast<double>(n_angle);
            const Jet2 j = jet(r * std::cos(th), r * std::sin(th));
            const State& s = j.state;
            a.samples.push_back({s.x, s.y, s.z, s.p, s.q, true, j.r, j.s, j.t});
        }
        r *= 0.5;
    }
    return GraphSamples(model, std::move(annuli));
}

GraphSamples GraphSamples::from_solution(const StripSolution& sol, std::span<const double> heights, std::size_t n_u) {
    std::vector<Annulus> annuli;
    for (double v : heights) {
        if (!(v > 0.0) || v > sol.height()) throw InputError("sampling heights must lie in (0, R]");
        const auto row = sol.row(v);
        Annulus a;
        double acc = 0.0;
        for (std::size_t i = 0; i < n_u; ++i) {
            const FieldJet j = StripSolution::jet(row, kTwoPi * static_cast<double>(i) / static_cast<double>(n_u));
            const Jet2 g = graph_jet(j);
            a.samples.push_back({j.z[0], j.z[1], j.z[2], j.z[3], j.z[4], true, g.r, g.s, g.t});
            acc += std::hypot(j.z[0], j.z[1]);
        }
        a.radius = acc / static_cast<double>(n_u);
        annuli.push_back(std::move(a));
    }
    return GraphSamples(sol.model(), std::move(annuli));
}

LimitGradientReport limit_gradient(const GraphSamples& g, const ClassifierOptions& options) {
    const auto& annuli = g.annuli();
    if (annuli.size() < 3) throw InputError("limit gradient needs at least three annuli");
    LimitGradientReport rep;
    std::vector<double> radii;
    for (const auto& a : annuli) {
        std::vector<Vec2> locus;
        double gmax = 0.0;
        for (const auto& s : a.samples) {
            locus.push_back({s.p, s.q});
            gmax = std::max(gmax, std::hypot(s.p, s.q));
        }
        rep.diameters.push_back(diameter(locus));
        rep.max_gradient.push_back(gmax);
        rep.loci.push_back(std::move(locus));
        radii.push_back(a.radius);
    }
    rep.bounded = !sustained_growth(rep.max_gradient, radii, options.height_growth, options.growth_steps);

    // Linear extrapolation in the radius from the two innermost annuli.
    const std::size_t n = annuli.size();
    const double r1 = radii[n - 2], r2 = radii[n - 1];
    const auto &P1 = rep.loci[n - 2], &P2 = rep.loci[n - 1];
    for (std::size_t i = 0; i < P1.size(); ++i) {
        rep.limit.push_back({(r1 * P2[i][0] - r2 * P1[i][0]) / (r1 - r2), (r1 * P2[i][1] - r2 * P1[i][1]) / (r1 - r2)});
        rep.center[0] += rep.limit.back()[0] / static_cast<double>(P1.size());
        rep.center[1] += rep.limit.back()[1] / static_cast<double>(P1.size());
    }
    rep.diameter = diameter(rep.limit);
    double mean_norm = 0.0;
    for (const auto& p : rep.loci.front()) mean_norm += std::hypot(p[0], p[1]) / static_cast<double>(P1.size());
    rep.contracts = rep.bounded && rep.diameter <= options.contraction * (1.0 + mean_norm);
    if (rep.bounded && !rep.contracts) {
        rep.curve = PeriodicCurve::fit(rep.limit, std::min<std::size_t>((rep.limit.size() - 1) / 2, 24));
        rep.convexity = convexity_check(rep.curve);
        rep.fitted = true;
    }
    return rep;
}

std::string to_string(Singularity s) {
    switch (s) {
        case Singularity::C1_extension: return "C1_extension";
        case Singularity::bounded_nonvertical: return "bounded_nonvertical";
        case Singularity::height_diverges: return "height_diverges";
        case Singularity::inconclusive: break;
    }
    return "inconclusive";
}

ClassificationReport classify_singularity(const GraphSamples& g, const ClassifierOptions& options) {
    const auto& annuli = g.annuli();
    if (annuli.size() < 5) throw InputError("classification needs at least five annuli");
    ClassificationReport rep;
    for (const auto& a : annuli) {
        double inf_nu = INFINITY, gmax = 0.0;
        std::vector<double> heights;
        for (const auto& s : a.samples) {
            if (s.has_second) {
                const double K = extrinsic_curvature(g.model(), s.jet());
                if (!(K > 0.0)) {
                    std::ostringstream msg;
                    msg << "nonpositive extrinsic curvature " << K << " at (" << s.x << ", " << s.y << ")";
                    throw InputError(msg.str());
                }
            }
            inf_nu = std::min(inf_nu, unit_normal_angle(g.model(), s.state()).nu);
            gmax = std::max(gmax, std::hypot(s.p, s.q));
            heights.push_back(s.z);
        }
        rep.radii.push_back(a.radius);
        rep.inf_nu.push_back(inf_nu);
        rep.max_gradient.push_back(gmax);
        rep.median_height.push_back(median(heights));
    }
    const std::size_t n = annuli.size();
    rep.inf_nu_inner = std::min(rep.inf_nu[n - 1], rep.inf_nu[n - 2]);
    rep.limit = limit_gradient(g, options);

    std::vector<double> abs_height;
    for (double z : rep.median_height) abs_height.push_back(std::abs(z));
    const bool monotone = std::is_sorted(abs_height.begin(), abs_height.end());
    std::ostringstream diag;
    if (monotone && sustained_growth(abs_height, rep.radii, options.height_growth, options.growth_steps)) {
        rep.verdict = Singularity::height_diverges;
        rep.height_direction = rep.median_height.back() < 0.0 ? -1 : 1;
        diag << "median |z| grows by at least " << options.height_growth << " per halving";
    } else if (rep.limit.contracts) {
        rep.verdict = Singularity::C1_extension;
        diag << "gradient locus contracts to (" << rep.limit.center[0] << ", " << rep.limit.center[1] << ")";
    } else if (rep.limit.bounded && rep.inf_nu_inner >= options.nu_threshold) {
        rep.verdict = Singularity::bounded_nonvertical;
        diag << "bounded gradient locus of diameter " << rep.limit.diameter << ", inf nu " << rep.inf_nu_inner;
    } else {
        rep.verdict = Singularity::inconclusive;
        diag << "no rule applies: bounded=" << rep.limit.bounded << " inf nu=" << rep.inf_nu_inner
             << " monotone height=" << monotone;
    }
    rep.diagnostics = diag.str();
    return rep;
}

Vec3 legendre_point(const State& s, const Convexifier& cv, int epsilon) {
    const double e = epsilon;
    const double ps = s.p + e * cv.c * s.x, qs = s.q + e * cv.a * s.y;
    const double zs = s.z + 0.5 * e * (cv.c * s.x * s.x + cv.a * s.y * s.y);
    return {ps, qs, s.x * ps + s.y * qs - zs};
}

Vec3 legendre_normal(double x, double y) {
    const double n = std::sqrt(1.0 + x * x + y * y);
    return {-x / n, -y / n, 1.0 / n};
}

double hausdorff_distance(std::span<const Vec2> a, std::span<const Vec2> b) {
    auto directed = [](std::span<const Vec2> from, std::span<const Vec2> to) {
        double worst = 0.0;
        for (const auto& p : from) {
            double best = INFINITY;
            for (const auto& q : to) best = std::min(best, std::hypot(p[0] - q[0], p[1] - q[1]));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

LegendreReport legendre(const StripSolution& sol, const Convexifier& cv, std::span<const double> levels,
                        std::size_t n_u, int epsilon) {
    if (n_u < 8) throw InputError("level curves need at least 8 samples");
    const auto& coeffs = sol.levels();
    const double R = sol.height();
    constexpr std::size_t kDense = 1024;

    // Taylor coefficients in v of the five components along each ray u_i.
    std::vector<std::vector<Vec5>> rays(n_u);
    for (std::size_t i = 0; i < n_u; ++i) {
        const double u = kTwoPi * static_cast<double>(i) / static_cast<double>(n_u);
        for (const auto& lvl : coeffs) {
            Vec5 c;
            for (int k = 0; k < 5; ++k) c[k] = evaluate(lvl[k], u);
            rays[i].push_back(c);
        }
    }
    auto state_at = [&](std::size_t i, double v) {
        Vec5 acc{};
        for (std::size_t k = coeffs.size(); k-- > 0;) {
            for (int c = 0; c < 5; ++c) acc[c] = acc[c] * v + rays[i][k][c];
        }
        return State{acc[0], acc[1], acc[2], acc[3], acc[4]};
    };

    std::vector<Vec2> reference;
    const auto boundary = sol.row(0.0);
    for (std::size_t i = 0; i < kDense; ++i) {
        const double u = kTwoPi * static_cast<double>(i) / kDense;
        reference.push_back({evaluate(boundary.dv[0][3], u), evaluate(boundary.dv[0][4], u)});
    }

    LegendreReport rep;
    for (double level : levels) {
        if (!(level > 0.0)) throw InputError("Legendre levels must be positive");
        LevelCurve lc;
        lc.level = level;
        for (std::size_t i = 0; i < n_u; ++i) {
            auto height = [&](double v) { return legendre_point(state_at(i, v), cv, epsilon)[2] - level; };
            constexpr int kScan = 256;
            double lo = 0.0, hi = 0.0;
            bool found = false;
            for (int s = 1; s <= kScan && !found; ++s) {
                hi = R * s / kScan;
                if (height(hi) >= 0.0) {
                    found = true;
                } else {
                    lo = hi;
                }
            }
            if (!found) throw NumericalError("Legendre level lies above the trusted strip");
            boost::uintmax_t iters = 200;
            const auto root = boost::math::tools::toms748_solve(height, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
            const Vec3 L = legendre_point(state_at(i, 0.5 * (root.first + root.second)), cv, epsilon);
            lc.points.push_back({L[0], L[1]});
        }
        lc.curve = PeriodicCurve::fit(lc.points, std::min<std::size_t>((n_u - 1) / 2, 32));
        lc.convexity = convexity_check(lc.curve);
        std::vector<Vec2> dense;
        for (std::size_t i = 0; i < kDense; ++i) dense.push_back(lc.curve(kTwoPi * static_cast<double>(i) / kDense));
        lc.hausdorff = hausdorff_distance(dense, reference);
        rep.levels.push_back(std::move(lc));
    }
    for (std::size_t a = 0; a < rep.levels.size(); ++a) {
        for (std::size_t b = 0; b < rep.levels.size(); ++b) {
            if (rep.levels[a].level < rep.levels[b].level && !(rep.levels[a].hausdorff < rep.levels[b].hausdorff)) {
                rep.monotone = false;
            }
        }
    }
    return rep;
}

std::vector<std::vector<Vec3>> legendre(const GraphSamples& g, const Convexifier& cv, int epsilon) {
    std::vector<std::vector<Vec3>> out;
    for (const auto& a : g.annuli()) {
        std::vector<Vec3> ring;
        for (const auto& s : a.samples) ring.push_back(legendre_point(s.state(), cv, epsilon));
        out.push_back(std::move(ring));
    }
    return out;
}

}  // namespace isosing
