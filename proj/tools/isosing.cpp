#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "isosing/cli_io.hpp"

namespace {

int report_error(const std::string& kind, const std::string& message, const nlohmann::json& extra = {}) {
    nlohmann::json rec = {{"status", "error"}, {"kind", kind}, {"message", message}};
    if (!extra.is_null()) rec["issues"] = extra;
    std::cerr << rec.dump() << '\n';
    return isosing::exit_code(kind == "numerical" ? isosing::ErrorKind::numerical : isosing::ErrorKind::input);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Isolated singularities of prescribed curvature graphs: construct, verify, classify, export"};
    app.require_subcommand(1, 1);
    std::string config_path, out_dir;
    bool seed_check = false;
    for (const char* name : {"construct", "verify", "classify", "export"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "run configuration file")->required();
        sub->add_option("--out", out_dir, "output directory (overrides [output] dir)");
        sub->add_flag("--seed-check", seed_check, "rerun and compare artifacts byte for byte");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const isosing::Command command = isosing::parse_command(app.get_subcommands().front()->get_name());
        std::ifstream in(config_path, std::ios::binary);
        if (!in) return report_error("input", "cannot read config '" + config_path + "'");
        std::ostringstream text;
        text << in.rdbuf();
        const isosing::RunConfig cfg = isosing::parse_config(text.str());

        const isosing::RunResult res = isosing::run(command, cfg, text.str(), {out_dir, seed_check});
        std::cout << res.run_id << ": exit " << res.exit_code;
        if (!res.message.empty()) std::cout << " (" << res.message << ")";
        std::cout << '\n';
        for (const auto& a : res.artifacts) std::cout << "  " << a.string() << '\n';
        return res.exit_code;
    } catch (const isosing::ConfigError& e) {
        nlohmann::json issues = nlohmann::json::array();
        for (const auto& i : e.issues()) issues.push_back({{"line", i.line}, {"column", i.column}, {"message", i.message}});
        return report_error("input", "invalid configuration", issues);
    } catch (const isosing::Error& e) {
        return report_error(e.kind() == isosing::ErrorKind::numerical ? "numerical" : "input", e.what());
    } catch (const std::exception& e) {
        return report_error("input", e.what());
    }
}
