// Command-line front end: parses flags and an optional config file, runs the
// requested verification passes, and writes report.json plus CSV artifacts.
//
// Exit codes: 0 all checks pass, 1 a verification failed, 2 usage or config error.
#pragma once

#include "gcmoment/verify.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <ctime>
#include <iomanip>
#include <iostream>

namespace gcmoment {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

inline Json config_json(const RunConfig& c) {
    Json j;
    j["example"] = c.example;
    j["resolution"] = c.resolution;
    j["step"] = num_json(c.step);
    j["tol_structure"] = num_json(c.tol_structure);
    j["tol_residual"] = num_json(c.tol_residual);
    j["tol_fixed"] = num_json(c.tol_fixed);
    j["tol_identity"] = num_json(c.tol_identity);
    j["tol_deficiency"] = num_json(c.tol_deficiency);
    j["tol_hull"] = num_json(c.tol_hull);
    j["grid"] = c.grid;
    j["level_grid"] = c.level_grid;
    j["seed"] = c.seed;
    return j;
}

/// Runs the named passes and writes report.json; returns the exit code.
inline int execute(const std::string& command, const RunConfig& cfg, std::ostream& out) {
    const Example ex = load(cfg.example, cfg.resolution);
    Report rep;
    const bool all = command == "all";
    if (all || command == "check-structure") check_structure(ex, cfg, rep);
    if (all || command == "check-hamiltonian") check_hamiltonian(ex, cfg, rep);
    if (all || command == "morse") check_morse(ex, cfg, rep);
    if (all || command == "convexity") check_convexity(ex, cfg, rep);
    if (all || command == "levels") check_levels(ex, cfg, rep);

    Json j;
    j["schema"] = 1;
    j["tool"] = "gcm";
    j["command"] = command;
    j["timestamp"] = utc_timestamp();
    j["config"] = config_json(cfg);
    Json e;
    e["name"] = ex.name;
    e["description"] = ex.description;
    e["instantiates"] = ex.instantiates;
    e["manifold"] = ex.manifold->name();
    e["samples"] = ex.manifold->size();
    e["dimension"] = ex.manifold->dim();
    e["torus_rank"] = ex.action.rank;
    e["h_geom"] = num_json(ex.manifold->h_geom());
    j["example"] = e;
    Json checks = Json::array();
    Json failed = Json::array();
    for (const auto& c : rep.checks) {
        checks.push_back(c.to_json());
        if (c.status == Status::fail) failed.push_back(c.name);
    }
    j["checks"] = checks;
    j["artifacts"] = rep.artifacts;
    j["passed"] = rep.passed();
    j["failed_checks"] = failed;

    std::filesystem::create_directories(cfg.out);
    const auto path = std::filesystem::path(cfg.out) / "report.json";
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path.string());
    os << j.dump(2) << '\n';

    for (const auto& c : rep.checks) {
        out << std::left << std::setw(44) << c.name << ' ' << std::setw(8) << status_name(c.status);
        if (c.status == Status::pass || c.status == Status::fail)
            out << " value=" << sig12(c.value) << " tol=" << sig12(c.tolerance);
        if (c.worst_sample >= 0) out << " worst_sample=" << c.worst_sample;
        out << '\n';
    }
    out << (rep.passed() ? "PASS" : "FAIL") << "  report: " << path.string() << '\n';
    return rep.passed() ? kExitOk : kExitFailed;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Verify generalized moment maps on sampled manifolds"};
    app.set_config("--config", "", "Config file (TOML or INI) with the same keys as the flags; flags take precedence");
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig cfg;
    cfg.jobs = default_jobs();
    app.add_option("--resolution", cfg.resolution, "Sampling resolution n (>= 16)")->capture_default_str();
    app.add_option("--step", cfg.step, "Finite-difference step")->capture_default_str();
    app.add_option("--tol-structure", cfg.tol_structure, "Tolerance for the fiberwise structure axioms")
        ->capture_default_str();
    app.add_option("--tol-residual", cfg.tol_residual, "Tolerance for integrability and Hamiltonian residuals")
        ->capture_default_str();
    app.add_option("--tol-fixed", cfg.tol_fixed, "Relative threshold for fixed and critical points")
        ->capture_default_str();
    app.add_option("--tol-identity", cfg.tol_identity, "Tolerance for the induced-field identities")
        ->capture_default_str();
    app.add_option("--tol-deficiency", cfg.tol_deficiency, "Tolerance for the convexity deficiency")
        ->capture_default_str();
    app.add_option("--tol-hull", cfg.tol_hull, "Hull tolerance in moment units (0 = from sampling scale)")
        ->capture_default_str();
    app.add_option("--grid", cfg.grid, "Raster size for the convexity deficiency")->capture_default_str();
    app.add_option("--level-grid", cfg.level_grid, "Interior levels per moment coordinate")->capture_default_str();
    app.add_option("--jobs", cfg.jobs, "Worker threads (results do not depend on it)")->capture_default_str();
    app.add_option("--seed", cfg.seed, "Seed for randomized probes")->capture_default_str();
    app.add_option("--out", cfg.out, "Output directory")->capture_default_str();

    app.add_subcommand("list", "List the built-in examples");
    const std::vector<std::pair<std::string, std::string>> commands{
        {"check-structure", "Structure axioms, type and integrability"},
        {"check-hamiltonian", "Moment and twist conditions, equivariance, effectiveness"},
        {"morse", "Critical sets, Hessian indices and the induced-field identities"},
        {"convexity", "Moment image, convex hull and fixed-point images"},
        {"levels", "Connectedness of level sets"},
        {"all", "Every check"}};
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("example", cfg.example, "Catalog example name")->required();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    if (command == "list") {
        for (const auto& e : list_catalog())
            out << std::left << std::setw(24) << e.name << e.description << "\n" << std::setw(24) << ""
                << "instantiates: " << e.instantiates << '\n';
        return kExitOk;
    }
    const auto& names = catalog_names();
    if (std::find(names.begin(), names.end(), cfg.example) == names.end()) {
        err << "unknown example '" << cfg.example << "'; run 'list' for the catalog\n";
        return kExitUsage;
    }
    try {
        validate(cfg);
    } catch (const Error& e) {
        err << "invalid configuration: " << e.what() << '\n';
        return kExitUsage;
    }
    try {
        return execute(command, cfg, out);
    } catch (const std::exception& e) {
        err << "verification aborted: " << e.what() << '\n';
        return kExitFailed;
    }
}

}  // namespace gcmoment
