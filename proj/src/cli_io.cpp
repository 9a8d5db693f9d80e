#include "isosing/cli_io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace isosing {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> words(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        const std::size_t b = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
        if (i > b) out.push_back(s.substr(b, i - b));
    }
    return out;
}

double parse_double(std::string_view s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw InputError("expected a number, got '" + std::string(s) + "'");
    if (!std::isfinite(v)) throw InputError("number must be finite");
    return v;
}

long parse_int(std::string_view s) {
    long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw InputError("expected an integer, got '" + std::string(s) + "'");
    return v;
}

std::size_t parse_size(std::string_view s) {
    const long v = parse_int(s);
    if (v < 0) throw InputError("expected a nonnegative integer");
    return static_cast<std::size_t>(v);
}

bool parse_bool(std::string_view s) {
    if (s == "true" || s == "on" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "off" || s == "no" || s == "0") return false;
    throw InputError("expected on/off or true/false, got '" + std::string(s) + "'");
}

std::vector<double> parse_list(std::string_view s) {
    std::vector<double> out;
    for (auto w : words(s)) out.push_back(parse_double(w));
    if (out.empty()) throw InputError("expected at least one number");
    return out;
}

std::string join(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + format_double(v[i]);
    return out;
}

const char* kCsvHeader = "u,v,x,y,z,p,q,nu,K_prescribed,K_computed,residual_eq1";

bool valid_verdict(std::string_view s) {
    return s == "C1_extension" || s == "bounded_nonvertical" || s == "height_diverges" || s == "inconclusive";
}

}  // namespace

// ------------------------------------------------------------ config

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : InputError([&] {
          std::ostringstream msg;
          msg << "invalid configuration";
          for (const auto& i : issues) {
              msg << "\n  ";
              if (i.line) msg << "line " << i.line << ", column " << i.column << ": ";
              msg << i.message;
          }
          return msg.str();
      }()),
      issues_(std::move(issues)) {}

PeriodicCurve RunConfig::curve() const { return PeriodicCurve(alpha_cos, alpha_sin, beta_cos, beta_sin); }
WarpedModel RunConfig::model() const { return make_space_form(c, chart); }
CurvatureField RunConfig::field() const { return CurvatureField::parse(curvature); }

SolverOptions RunConfig::solver_options() const {
    SolverOptions o;
    o.fourier_order = M;
    o.taylor_order = N;
    o.height = R;
    o.safety = safety;
    o.filter = filter;
    o.auto_cap = auto_cap;
    o.noise_floor = noise_floor;
    return o;
}

RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    std::vector<ConfigIssue> issues;
    std::string section;
    std::map<std::string, std::size_t> seen;
    std::optional<double> circle_radius;
    bool clockwise = true, explicit_curve = false;

    // Setter per section.key; `column` is where the value starts.
    using Setter = std::function<void(std::string_view, std::size_t line, std::size_t column)>;
    std::map<std::string, Setter> setters;
    auto plain = [](auto fn) -> Setter { return [fn](std::string_view v, std::size_t, std::size_t) { fn(v); }; };
    setters["space_form.c"] = plain([&](auto v) { cfg.c = static_cast<int>(parse_int(v)); });
    setters["space_form.chart"] = plain([&](auto v) { cfg.chart = parse_chart(v); });
    setters["curvature.expression"] = [&](std::string_view v, std::size_t line, std::size_t column) {
        try {
            Expression::parse(v);
            cfg.curvature = std::string(v);
        } catch (const ExpressionError& e) {
            issues.push_back({line, column + e.position(), e.what()});
        }
    };
    setters["curvature.gradient_dependence"] = plain([&](auto v) { cfg.gradient_dependence = parse_bool(v); });
    setters["curve.alpha_cos"] = plain([&](auto v) { cfg.alpha_cos = parse_list(v); explicit_curve = true; });
    setters["curve.alpha_sin"] = plain([&](auto v) { cfg.alpha_sin = parse_list(v); explicit_curve = true; });
    setters["curve.beta_cos"] = plain([&](auto v) { cfg.beta_cos = parse_list(v); explicit_curve = true; });
    setters["curve.beta_sin"] = plain([&](auto v) { cfg.beta_sin = parse_list(v); explicit_curve = true; });
    setters["curve.circle_radius"] = plain([&](auto v) { circle_radius = parse_double(v); });
    setters["curve.clockwise"] = plain([&](auto v) { clockwise = parse_bool(v); });
    setters["solver.M"] = plain([&](auto v) { cfg.M = parse_size(v); });
    setters["solver.N"] = plain([&](auto v) { cfg.N = parse_size(v); });
    setters["solver.R"] = plain([&](auto v) { cfg.R = parse_double(v); });
    setters["solver.safety"] = plain([&](auto v) { cfg.safety = parse_double(v); });
    setters["solver.filter"] = plain([&](auto v) { cfg.filter = parse_bool(v); });
    setters["solver.auto_cap"] = plain([&](auto v) { cfg.auto_cap = parse_bool(v); });
    setters["solver.noise_floor"] = plain([&](auto v) { cfg.noise_floor = parse_double(v); });
    setters["analysis.grid_u"] = plain([&](auto v) { cfg.grid_u = parse_size(v); });
    setters["analysis.grid_v"] = plain([&](auto v) { cfg.grid_v = parse_size(v); });
    setters["analysis.tol_curvature"] = plain([&](auto v) { cfg.tol_curvature = parse_double(v); });
    setters["analysis.tol_residual"] = plain([&](auto v) { cfg.tol_residual = parse_double(v); });
    setters["analysis.tol_equation"] = plain([&](auto v) { cfg.tol_equation = parse_double(v); });
    setters["analysis.samples"] = plain([&](auto v) { cfg.samples = std::string(v); });
    setters["analysis.solution"] = plain([&](auto v) { cfg.solution = std::string(v); });
    setters["analysis.expect"] = plain([&](auto v) {
        if (!valid_verdict(v)) throw InputError("unknown verdict '" + std::string(v) + "'");
        cfg.expect = std::string(v);
    });
    setters["output.dir"] = plain([&](auto v) { cfg.out_dir = std::string(v); });
    setters["output.formats"] = plain([&](auto v) {
        cfg.formats.clear();
        for (auto w : words(v)) {
            if (w != "obj" && w != "csv" && w != "json") throw InputError("unknown format '" + std::string(w) + "'");
            cfg.formats.emplace_back(w);
        }
    });
    setters["output.mesh_u"] = plain([&](auto v) { cfg.mesh_u = parse_size(v); });
    setters["output.mesh_v"] = plain([&](auto v) { cfg.mesh_v = parse_size(v); });

    std::size_t line_no = 0, pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string_view raw = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        const std::string_view line = trim(raw);
        if (line.empty()) {
            if (end == text.size()) break;
            continue;
        }
        const std::size_t indent = static_cast<std::size_t>(line.data() - raw.data());
        if (line.front() == '[') {
            if (line.back() != ']') {
                issues.push_back({line_no, indent + 1, "unterminated section header"});
            } else {
                section = std::string(trim(line.substr(1, line.size() - 2)));
                static const char* known[] = {"space_form", "curvature", "curve", "solver", "analysis", "output"};
                if (std::find(std::begin(known), std::end(known), section) == std::end(known)) {
                    issues.push_back({line_no, indent + 2, "unknown section '" + section + "'"});
                }
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            issues.push_back({line_no, indent + 1, "expected 'key = value'"});
            continue;
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view rest = line.substr(eq + 1);
        const std::string_view value = trim(rest);
        const std::size_t value_col =
            indent + eq + 1 + static_cast<std::size_t>(value.empty() ? 0 : value.data() - rest.data()) + 1;
        if (section.empty()) {
            issues.push_back({line_no, indent + 1, "key '" + key + "' outside any section"});
            continue;
        }
        const std::string full = section + "." + key;
        const auto it = setters.find(full);
        if (it == setters.end()) {
            issues.push_back({line_no, indent + 1, "unknown key '" + key + "' in [" + section + "]"});
            continue;
        }
        if (seen.count(full)) {
            issues.push_back({line_no, indent + 1, "duplicate key '" + key + "' (first on line " + std::to_string(seen[full]) + ")"});
            continue;
        }
        seen[full] = line_no;
        if (value.empty()) {
            issues.push_back({line_no, value_col, "missing value for '" + key + "'"});
            continue;
        }
        try {
            it->second(value, line_no, value_col);
        } catch (const InputError& e) {
            issues.push_back({line_no, value_col, e.what()});
        }
    }

    auto position_of = [&](const char* key) -> std::pair<std::size_t, std::size_t> {
        const auto it = seen.find(key);
        return it == seen.end() ? std::pair<std::size_t, std::size_t>{0, 0} : std::pair<std::size_t, std::size_t>{it->second, 1};
    };
    auto check = [&](bool ok, const char* key, const std::string& message) {
        if (!ok) {
            const auto [l, c] = position_of(key);
            issues.push_back({l, c, message});
        }
    };

    if (circle_radius) {
        check(!explicit_curve, "curve.circle_radius", "circle_radius conflicts with explicit coefficients");
        check(*circle_radius > 0.0, "curve.circle_radius", "circle_radius must be positive");
        const PeriodicCurve circle = PeriodicCurve::circle(*circle_radius, clockwise);
        cfg.alpha_cos = circle.alpha_cos();
        cfg.alpha_sin = circle.alpha_sin();
        cfg.beta_cos = circle.beta_cos();
        cfg.beta_sin = circle.beta_sin();
    } else {
        check(!seen.count("curve.clockwise"), "curve.clockwise", "clockwise only applies together with circle_radius");
    }
    try {
        make_space_form(cfg.c, cfg.chart);
    } catch (const InputError& e) {
        check(false, "space_form.chart", e.what());
    }
    check(!cfg.gradient_dependence, "curvature.gradient_dependence",
          "gradient-dependent curvature is reserved and not implemented");
    check(cfg.M >= 4, "solver.M", "M must be at least 4");
    check(cfg.N >= 4, "solver.N", "N must be at least 4");
    check(cfg.R >= 0.0, "solver.R", "R must be nonnegative");
    check(cfg.safety > 0.0 && cfg.safety <= 1.0, "solver.safety", "safety must lie in (0, 1]");
    check(cfg.noise_floor >= 0.0 && cfg.noise_floor < 1e-3, "solver.noise_floor", "noise_floor must lie in [0, 1e-3)");
    check(cfg.grid_u >= 8, "analysis.grid_u", "grid_u must be at least 8");
    check(cfg.grid_v >= 5, "analysis.grid_v", "grid_v must be at least 5");
    check(cfg.tol_curvature > 0.0, "analysis.tol_curvature", "tolerances must be positive");
    check(cfg.tol_residual > 0.0, "analysis.tol_residual", "tolerances must be positive");
    check(cfg.tol_equation > 0.0, "analysis.tol_equation", "tolerances must be positive");
    check(cfg.mesh_u >= 2 && cfg.mesh_v >= 2, "output.mesh_u", "mesh dimensions must be at least 2");
    check(!cfg.out_dir.empty(), "output.dir", "output directory must not be empty");

    if (!issues.empty()) throw ConfigError(std::move(issues));
    return cfg;
}

std::string serialize(const RunConfig& cfg) {
    std::ostringstream os;
    os << "[space_form]\nc = " << cfg.c << "\nchart = " << to_string(cfg.chart) << "\n\n";
    os << "[curvature]\nexpression = " << cfg.curvature << "\ngradient_dependence = "
       << (cfg.gradient_dependence ? "true" : "false") << "\n\n";
    os << "[curve]\nalpha_cos = " << join(cfg.alpha_cos) << "\nalpha_sin = " << join(cfg.alpha_sin)
       << "\nbeta_cos = " << join(cfg.beta_cos) << "\nbeta_sin = " << join(cfg.beta_sin) << "\n\n";
    os << "[solver]\nM = " << cfg.M << "\nN = " << cfg.N << "\nR = " << format_double(cfg.R)
       << "\nsafety = " << format_double(cfg.safety) << "\nfilter = " << (cfg.filter ? "on" : "off")
       << "\nauto_cap = " << (cfg.auto_cap ? "true" : "false") << "\nnoise_floor = " << format_double(cfg.noise_floor)
       << "\n\n";
    os << "[analysis]\ngrid_u = " << cfg.grid_u << "\ngrid_v = " << cfg.grid_v
       << "\ntol_curvature = " << format_double(cfg.tol_curvature) << "\ntol_residual = " << format_double(cfg.tol_residual)
       << "\ntol_equation = " << format_double(cfg.tol_equation) << "\n";
    if (!cfg.samples.empty()) os << "samples = " << cfg.samples << "\n";
    if (!cfg.solution.empty()) os << "solution = " << cfg.solution << "\n";
    if (!cfg.expect.empty()) os << "expect = " << cfg.expect << "\n";
    os << "\n[output]\ndir = " << cfg.out_dir << "\nformats =";
    for (const auto& f : cfg.formats) os << " " << f;
    os << "\nmesh_u = " << cfg.mesh_u << "\nmesh_v = " << cfg.mesh_v << "\n";
    return os.str();
}

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

// ------------------------------------------------------------ files

void write_obj(std::ostream& os, const SurfaceMesh& mesh, const WarpedModel& model, const std::string& run_id) {
    if (mesh.vertices.empty()) throw InputError("cannot export an empty mesh");
    os << "# isosing surface mesh\n# run " << run_id << "\n# grid " << mesh.n_u << " x " << mesh.n_v
       << " (u periodic, v rows)\n# positions and normals in the ambient model of " << to_string(model.chart()) << "\n";
    for (const auto& mv : mesh.vertices) {
        os << "v " << format_double(mv.ambient[0]) << ' ' << format_double(mv.ambient[1]) << ' '
           << format_double(mv.ambient[2]) << '\n';
    }
    for (const auto& mv : mesh.vertices) {
        // push the chart normal forward by the (conformal) chart-to-model map
        const auto& n = mv.normal;
        const double h = 1e-6;
        const auto& s = mv.state;
        const auto a = model.ambient(s.x + h * n[0], s.y + h * n[1], s.z + h * n[2]);
        const auto b = model.ambient(s.x - h * n[0], s.y - h * n[1], s.z - h * n[2]);
        const Vec3 d{a[0] - b[0], a[1] - b[1], a[2] - b[2]};
        const double len = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
        os << "vn " << format_double(d[0] / len) << ' ' << format_double(d[1] / len) << ' ' << format_double(d[2] / len)
           << '\n';
    }
    // Close the seam in u once there are enough columns to do so without
    // repeating a face.
    const std::size_t columns = mesh.n_u > 2 ? mesh.n_u : mesh.n_u - 1;
    auto id = [&](std::size_t i, std::size_t j) { return (j * mesh.n_u + i % mesh.n_u) + 1; };
    for (std::size_t j = 0; j + 1 < mesh.n_v; ++j) {
        for (std::size_t i = 0; i < columns; ++i) {
            const std::size_t a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
            os << "f " << a << "//" << a << ' ' << b << "//" << b << ' ' << c << "//" << c << ' ' << d << "//" << d
               << '\n';
        }
    }
}

void write_csv(std::ostream& os, const SurfaceMesh& mesh) {
    if (mesh.vertices.empty()) throw InputError("cannot export an empty mesh");
    os << kCsvHeader << '\n';
    for (const auto& mv : mesh.vertices) {
        const double vals[] = {mv.u,     mv.v,       mv.state.x,     mv.state.y,   mv.state.z,  mv.state.p,
                               mv.state.q, mv.nu, mv.k_prescribed, mv.k_computed, mv.residual_eq1};
        for (std::size_t k = 0; k < std::size(vals); ++k) os << (k ? "," : "") << format_double(vals[k]);
        os << '\n';
    }
}

std::vector<CsvRow> read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || trim(line) != kCsvHeader) throw InputError("CSV header mismatch");
    std::vector<CsvRow> rows;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        double vals[11];
        std::size_t k = 0, pos = 0;
        for (; k < 11; ++k) {
            const std::size_t comma = std::min(line.find(',', pos), line.size());
            const std::string_view cell = trim(std::string_view(line).substr(pos, comma - pos));
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), vals[k]);
            if (ec != std::errc() || ptr != cell.data() + cell.size()) {
                throw InputError("CSV line " + std::to_string(line_no) + ": bad number '" + std::string(cell) + "'");
            }
            pos = comma + 1;
            if (comma == line.size() && k < 10) throw InputError("CSV line " + std::to_string(line_no) + ": too few columns");
        }
        rows.push_back({vals[0], vals[1], vals[2], vals[3], vals[4], vals[5], vals[6], vals[7], vals[8], vals[9], vals[10]});
    }
    return rows;
}

SampleFile read_samples(std::istream& is, const WarpedModel& model) {
    std::vector<Annulus> annuli;
    std::vector<ExtendedJet> jets;
    std::vector<std::size_t> ring_of;
    std::string line;
    std::size_t line_no = 0, columns = 0;
    while (std::getline(is, line)) {
        ++line_no;
        std::string_view body = line;
        if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
        const auto w = words(body);
        if (w.empty()) continue;
        auto fail = [&](const std::string& msg) -> void {
            throw InputError("samples line " + std::to_string(line_no) + ": " + msg);
        };
        if (w.size() != 6 && w.size() != 9) fail("expected 'ring x y z p q [r s t]'");
        if (columns && w.size() != columns) fail("inconsistent column count");
        columns = w.size();
        long ring = 0;
        try {
            ring = parse_int(w[0]);
        } catch (const InputError& e) {
            fail(e.what());
        }
        if (ring < 0 || static_cast<std::size_t>(ring) + 1 < annuli.size() || static_cast<std::size_t>(ring) > annuli.size()) {
            fail("rings must be numbered 0, 1, ... in order");
        }
        if (static_cast<std::size_t>(ring) == annuli.size()) annuli.emplace_back();
        Quad q[9] = {};
        for (std::size_t k = 1; k < w.size(); ++k) {
            const std::string cell(w[k]);
            char* end = nullptr;
            q[k - 1] = strtoflt128(cell.c_str(), &end);
            if (end != cell.c_str() + cell.size() || !std::isfinite(static_cast<double>(q[k - 1]))) {
                fail("bad number '" + cell + "'");
            }
        }
        auto d = [](Quad v) { return static_cast<double>(v); };
        GraphSample s{d(q[0]), d(q[1]), d(q[2]), d(q[3]), d(q[4]), columns == 9, d(q[5]), d(q[6]), d(q[7])};
        annuli.back().samples.push_back(s);
        jets.push_back({{q[0], q[1], q[2], q[3], q[4]}, q[5], q[6], q[7]});
        ring_of.push_back(static_cast<std::size_t>(ring));
    }
    if (annuli.empty()) throw InputError("sample file holds no samples");
    for (auto& a : annuli) {
        double acc = 0.0;
        for (const auto& s : a.samples) acc += std::hypot(s.x, s.y);
        a.radius = acc / static_cast<double>(a.samples.size());
    }
    if (columns != 9) jets.clear();
    return {GraphSamples(model, std::move(annuli)), std::move(jets), std::move(ring_of)};
}

std::string solution_to_json(const StripSolution& sol, const std::string& curvature_text) {
    json j;
    j["format"] = "isosing-solution-1";
    j["space_form"] = {{"c", sol.model().curvature_constant()},
                       {"chart", to_string(sol.model().chart())},
                       {"margin", sol.model().margin()}};
    j["curvature"] = curvature_text;
    j["fourier_order"] = sol.fourier_order();
    j["taylor_order"] = sol.taylor_order();
    j["height"] = sol.height();
    json levels = json::array();
    for (const auto& lvl : sol.levels()) {
        json comps = json::array();
        for (const auto& s : lvl) {
            json flat = json::array();
            for (const auto& c : s) {
                flat.push_back(c.real());
                flat.push_back(c.imag());
            }
            comps.push_back(std::move(flat));
        }
        levels.push_back(std::move(comps));
    }
    j["levels"] = std::move(levels);
    const auto& d = sol.diagnostics();
    j["diagnostics"] = {{"growth_ratio", d.growth_ratio},
                        {"adjacent_ratio", d.adjacent_ratio},
                        {"recommended_height", d.recommended_height},
                        {"requested_height", d.requested_height},
                        {"capped", d.capped},
                        {"level_norms", d.level_norms},
                        {"residuals",
                         {{"first_order", d.residuals.first_order},
                          {"equation", d.residuals.equation},
                          {"laplacian", d.residuals.laplacian},
                          {"min_d", d.residuals.min_d}}}};
    return j.dump(1) + "\n";
}

StripSolution solution_from_json(const std::string& text) {
    try {
        const json j = json::parse(text);
        if (j.at("format") != "isosing-solution-1") throw InputError("unknown solution format");
        const auto& sf = j.at("space_form");
        WarpedModel model(sf.at("c").get<int>(), parse_chart(sf.at("chart").get<std::string>()), sf.at("margin").get<double>());
        const auto M = j.at("fourier_order").get<std::size_t>();
        std::vector<Field5> levels;
        for (const auto& lvl : j.at("levels")) {
            Field5 f;
            if (lvl.size() != 5) throw InputError("solution level must have five components");
            for (int c = 0; c < 5; ++c) {
                const auto& flat = lvl[c];
                if (flat.size() != 2 * (M + 1)) throw InputError("solution spectrum has the wrong length");
                f[c].resize(M + 1);
                for (std::size_t m = 0; m <= M; ++m) f[c][m] = {flat[2 * m].get<double>(), flat[2 * m + 1].get<double>()};
            }
            levels.push_back(std::move(f));
        }
        StripSolution sol(model, CurvatureField::parse(j.at("curvature").get<std::string>()), M,
                          j.at("height").get<double>(), std::move(levels));
        const auto& d = j.at("diagnostics");
        auto& out = sol.diagnostics();
        out.growth_ratio = d.at("growth_ratio").get<double>();
        out.adjacent_ratio = d.at("adjacent_ratio").get<double>();
        out.recommended_height = d.at("recommended_height").get<double>();
        out.requested_height = d.at("requested_height").get<double>();
        out.capped = d.at("capped").get<bool>();
        out.level_norms = d.at("level_norms").get<std::vector<double>>();
        const auto& r = d.at("residuals");
        out.residuals = {r.at("first_order").get<double>(), r.at("equation").get<double>(),
                         r.at("laplacian").get<double>(), r.at("min_d").get<double>()};
        return sol;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed solution file: ") + e.what());
    }
}

// ------------------------------------------------------------ pipelines

Command parse_command(std::string_view name) {
    if (name == "construct") return Command::construct;
    if (name == "verify") return Command::verify;
    if (name == "classify") return Command::classify;
    if (name == "export") return Command::export_mesh;
    throw InputError("unknown command '" + std::string(name) + "'");
}

std::string to_string(Command c) {
    switch (c) {
        case Command::construct: return "construct";
        case Command::verify: return "verify";
        case Command::classify: return "classify";
        case Command::export_mesh: break;
    }
    return "export";
}

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::tolerance: return 1;
        case ErrorKind::input: return 2;
        case ErrorKind::numerical: return 3;
    }
    return 2;
}

namespace {

// Everything a pipeline produces apart from the manifest. Files are kept in
// memory so that a seed check can compare reruns byte for byte.
struct Outcome {
    std::map<std::string, std::string> files;
    json summary = json::object();
    bool tolerances_met = true;
    std::string message;
};

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw InputError("cannot read '" + p.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json residual_json(const ResidualSummary& r) {
    return {{"first_order", r.first_order}, {"equation", r.equation}, {"laplacian", r.laplacian}, {"min_d", r.min_d}};
}

void add_mesh_files(Outcome& out, const SurfaceMesh& mesh, const WarpedModel& model, const RunConfig& cfg,
                    const std::string& run_id) {
    for (const auto& f : cfg.formats) {
        if (f == "obj") {
            std::ostringstream os;
            write_obj(os, mesh, model, run_id);
            out.files["mesh.obj"] = os.str();
        } else if (f == "csv") {
            std::ostringstream os;
            write_csv(os, mesh);
            out.files["mesh.csv"] = os.str();
        }
    }
}

bool wants(const RunConfig& cfg, const char* format) {
    return std::find(cfg.formats.begin(), cfg.formats.end(), format) != cfg.formats.end();
}

// Curvature deviation and first-order residual on the middle band v in [R/4, R/2].
json band_check(const StripSolution& sol, const RunConfig& cfg, Outcome& out) {
    const double R = sol.height();
    const CurvatureReport kr = extrinsic_curvature(evaluate(sol, cfg.grid_u, 9, 0.25 * R, 0.5 * R));
    const ResidualSummary band = collocation_residuals(sol, cfg.grid_u, 8, 0.25 * R, 0.5 * R);
    const bool ok_k = kr.max_relative_deviation <= cfg.tol_curvature;
    const bool ok_r = band.first_order <= cfg.tol_residual;
    out.tolerances_met = out.tolerances_met && ok_k && ok_r;
    if (!ok_k) out.message += "curvature deviation above tolerance; ";
    if (!ok_r) out.message += "first-order residual above tolerance; ";
    return {{"curvature_deviation", kr.max_relative_deviation},
            {"residuals", residual_json(band)},
            {"v_range", {0.25 * R, 0.5 * R}}};
}

Outcome do_construct(const RunConfig& cfg, const std::string& run_id) {
    Outcome out;
    const WarpedModel model = cfg.model();
    const CurvatureField field = cfg.field();
    const PeriodicCurve gamma = cfg.curve();
    const StripSolution sol = solve(cauchy_data(gamma, model, field, cfg.M), model, field, cfg.solver_options());
    const double R = sol.height();
    const SurfaceMesh mesh = evaluate(sol, cfg.mesh_u, cfg.mesh_v, 0.0, R);
    add_mesh_files(out, mesh, model, cfg, run_id);

    const FormsReport forms = fundamental_forms(sol, {cfg.grid_u, cfg.grid_v, 0.0, R});
    const SinhGordonReport sg = sinh_gordon_residual(sol, {cfg.grid_u, cfg.grid_v, 0.0, R}, model.curvature_constant());
    double slope_dev = 0.0;
    for (std::size_t i = 0; i < 16; ++i) {
        const double u = 2.0 * std::numbers::pi * static_cast<double>(i) / 16.0;
        slope_dev = std::max(slope_dev, std::abs(omega_slope(sol, u) - omega_slope_closed_form(gamma, u)));
    }
    json forms_json = {{"max_boundary_omega", forms.max_boundary_omega},
                       {"min_interior_omega", forms.min_omega_interior},
                       {"max_roca_deviation", forms.max_roca_deviation},
                       {"epsilon", forms.epsilon},
                       {"omega_slope_deviation", slope_dev},
                       {"sinh_gordon", {{"sup", sg.sup}, {"l2", sg.l2}, {"sup_K_plus_epsilon", sg.sup_alt},
                                        {"l2_K_plus_epsilon", sg.l2_alt}}}};

    out.summary["height"] = R;
    out.summary["diagnostics"] = {{"growth_ratio", sol.diagnostics().growth_ratio},
                                  {"adjacent_ratio", sol.diagnostics().adjacent_ratio},
                                  {"recommended_height", sol.diagnostics().recommended_height},
                                  {"capped", sol.diagnostics().capped},
                                  {"threads", sol.diagnostics().threads}};
    out.summary["residuals"] = residual_json(sol.diagnostics().residuals);
    out.summary["band"] = band_check(sol, cfg, out);
    out.summary["forms"] = forms_json;
    out.summary["curvature_deviation_mesh"] = extrinsic_curvature(mesh).max_relative_deviation;

    if (wants(cfg, "json")) {
        out.files["solution.json"] = solution_to_json(sol, cfg.curvature);
        out.files["forms.json"] = forms_json.dump(1) + "\n";
    }
    return out;
}

std::filesystem::path solution_path(const RunConfig& cfg, const std::filesystem::path& out_dir) {
    return cfg.solution.empty() ? out_dir / "solution.json" : std::filesystem::path(cfg.solution);
}

Outcome do_verify(const RunConfig& cfg, const std::filesystem::path& out_dir) {
    Outcome out;
    json report;
    if (!cfg.samples.empty()) {
        const WarpedModel model = cfg.model();
        const CurvatureField field = cfg.field();
        std::istringstream in(read_file(cfg.samples));
        const SampleFile file = read_samples(in, model);
        if (file.jets.empty()) throw InputError("verification needs second-order data (r s t) in the sample file");
        double worst = 0.0, k_dev = 0.0;
        for (const auto& j : file.jets) {
            worst = std::max(worst, std::abs(residual(model, field, j)));
            auto d = [](Quad v) { return static_cast<double>(v); };
            const Jet2 jd{{d(j.state.x), d(j.state.y), d(j.state.z), d(j.state.p), d(j.state.q)}, d(j.r), d(j.s), d(j.t)};
            const double k = field(jd.state.x, jd.state.y, jd.state.z);
            k_dev = std::max(k_dev, std::abs(extrinsic_curvature(model, jd) - k) / std::abs(k));
        }
        report = {{"source", "samples"},
                  {"samples", file.jets.size()},
                  {"max_abs_residual", worst},
                  {"curvature_deviation", k_dev},
                  {"tolerance", cfg.tol_equation}};
        out.tolerances_met = worst <= cfg.tol_equation;
        if (!out.tolerances_met) out.message = "equation residual above tolerance";
    } else {
        const StripSolution sol = solution_from_json(read_file(solution_path(cfg, out_dir)));
        const ResidualSummary full = collocation_residuals(sol, cfg.grid_u, cfg.grid_v, 0.0, sol.height());
        report = {{"source", "solution"}, {"height", sol.height()}, {"residuals", residual_json(full)},
                  {"band", band_check(sol, cfg, out)}};
    }
    out.summary = report;
    out.files["verify.json"] = report.dump(1) + "\n";
    return out;
}

Outcome do_classify(const RunConfig& cfg) {
    Outcome out;
    if (cfg.samples.empty()) throw InputError("classify needs [analysis] samples");
    std::istringstream in(read_file(cfg.samples));
    const SampleFile file = read_samples(in, cfg.model());
    const ClassificationReport rep = classify_singularity(file.samples);
    json j = {{"verdict", to_string(rep.verdict)},
              {"radii", rep.radii},
              {"inf_nu", rep.inf_nu},
              {"inf_nu_inner", rep.inf_nu_inner},
              {"median_height", rep.median_height},
              {"max_gradient", rep.max_gradient},
              {"height_direction", rep.height_direction},
              {"gradient_bounded", rep.limit.bounded},
              {"gradient_contracts", rep.limit.contracts},
              {"limit_diameter", rep.limit.diameter},
              {"diagnostics", rep.diagnostics}};
    if (rep.limit.fitted) j["limit_convexity"] = to_string(rep.limit.convexity.verdict);
    out.summary = j;
    out.files["classification.json"] = j.dump(1) + "\n";
    if (rep.verdict == Singularity::inconclusive) {
        out.tolerances_met = false;
        out.message = "classification inconclusive";
    } else if (!cfg.expect.empty() && cfg.expect != to_string(rep.verdict)) {
        out.tolerances_met = false;
        out.message = "expected " + cfg.expect + ", got " + to_string(rep.verdict);
    }
    return out;
}

Outcome do_export(const RunConfig& cfg, const std::filesystem::path& out_dir, const std::string& run_id) {
    Outcome out;
    const StripSolution sol = solution_from_json(read_file(solution_path(cfg, out_dir)));
    const SurfaceMesh mesh = evaluate(sol, cfg.mesh_u, cfg.mesh_v, 0.0, sol.height());
    add_mesh_files(out, mesh, sol.model(), cfg, run_id);
    if (out.files.empty()) throw InputError("export needs obj or csv among the output formats");
    out.summary = {{"vertices", mesh.vertices.size()}, {"height", sol.height()}};
    return out;
}

Outcome dispatch(Command command, const RunConfig& cfg, const std::filesystem::path& out_dir, const std::string& run_id) {
    switch (command) {
        case Command::construct: return do_construct(cfg, run_id);
        case Command::verify: return do_verify(cfg, out_dir);
        case Command::classify: return do_classify(cfg);
        case Command::export_mesh: break;
    }
    return do_export(cfg, out_dir, run_id);
}

void write_file(const std::filesystem::path& p, const std::string& bytes) {
    std::ofstream os(p, std::ios::binary);
    os << bytes;
    if (!os) throw InputError("cannot write '" + p.string() + "'");
}

}  // namespace

RunResult run(Command command, const RunConfig& cfg, const std::string& config_text, const RunOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    const std::string normalized = serialize(cfg);
    const std::uint64_t hash = fnv1a(normalized);
    RunResult result;
    result.run_id = to_string(command) + "-" + hex(hash).substr(0, 12);
    const std::filesystem::path out_dir = options.out_dir.empty() ? std::filesystem::path(cfg.out_dir) : options.out_dir;

    json manifest = {{"run_id", result.run_id},
                     {"command", to_string(command)},
                     {"config_hash", hex(hash)},
                     {"source_config_hash", hex(fnv1a(config_text))},
                     {"config", normalized},
                     {"orders", {{"M", cfg.M}, {"N", cfg.N}}},
                     {"tolerances",
                      {{"curvature", cfg.tol_curvature}, {"residual", cfg.tol_residual}, {"equation", cfg.tol_equation}}},
                     {"threads", thread_count_from_env()}};
    try {
        std::filesystem::create_directories(out_dir);
        Outcome outcome = dispatch(command, cfg, out_dir, result.run_id);
        if (options.seed_check) {
            const Outcome again = dispatch(command, cfg, out_dir, result.run_id);
            const bool same = again.files == outcome.files;
            manifest["seed_check"] = {{"performed", true}, {"identical", same}};
            if (!same) {
                outcome.tolerances_met = false;
                outcome.message += "rerun produced different artifacts; ";
            }
        }
        json hashes = json::object();
        for (const auto& [name, bytes] : outcome.files) {
            write_file(out_dir / name, bytes);
            result.artifacts.push_back(out_dir / name);
            hashes[name] = hex(fnv1a(bytes));
        }
        manifest["artifacts"] = hashes;
        manifest["result"] = outcome.summary;
        if (outcome.summary.contains("diagnostics") && outcome.summary["diagnostics"].is_object()) {
            manifest["growth_ratio"] = outcome.summary["diagnostics"]["growth_ratio"];
        }
        if (outcome.summary.contains("residuals") && outcome.summary["residuals"].is_object()) manifest["residual_summary"] = outcome.summary["residuals"];
        result.exit_code = outcome.tolerances_met ? 0 : 1;
        result.message = outcome.message;
        manifest["status"] = outcome.tolerances_met ? "ok" : "tolerance";
        if (!outcome.message.empty()) manifest["message"] = outcome.message;
    } catch (const Error& e) {
        result.exit_code = exit_code(e.kind());
        result.message = e.what();
        manifest["status"] = "error";
        manifest["error"] = {{"kind", e.kind() == ErrorKind::input ? "input" : e.kind() == ErrorKind::numerical ? "numerical" : "tolerance"},
                             {"message", e.what()}};
    } catch (const std::exception& e) {
        result.exit_code = 2;
        result.message = e.what();
        manifest["status"] = "error";
        manifest["error"] = {{"kind", "input"}, {"message", e.what()}};
    }
    manifest["exit_code"] = result.exit_code;
    manifest["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    try {
        std::filesystem::create_directories(out_dir);
        write_file(out_dir / "manifest.json", manifest.dump(1) + "\n");
        result.artifacts.push_back(out_dir / "manifest.json");
    } catch (const std::exception& e) {
        if (result.exit_code == 0) result.exit_code = 2;
        result.message += std::string(" (manifest not written: ") + e.what() + ")";
    }
    return result;
}

}  // namespace isosing
