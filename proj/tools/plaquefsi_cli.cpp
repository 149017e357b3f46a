// Command-line driver: run, study, check-config, export-mesh.

#include "plaquefsi/scenario.hpp"
#include "plaquefsi/studies.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace plaquefsi;

namespace {

fs::path output_dir(const RunConfig& cfg, const std::string& override_dir)
{
    return override_dir.empty() ? resolve_output_directory(cfg.output.directory)
                                : resolve_output_directory(override_dir);
}

std::ofstream open_csv(const fs::path& dir, const std::string& name)
{
    fs::create_directories(dir);
    const fs::path f = dir / name;
    std::ofstream os(f);
    if (!os) {
        throw Error(fmt::format("cannot write '{}'", f.string()));
    }
    std::cout << "writing " << f.string() << '\n';
    return os;
}

int run_study(const std::string& kind, const RunConfig& cfg, const fs::path& dir)
{
    if (kind == "space-convergence") {
        std::vector<ConvergenceStudy> s;
        s.push_back(fluid_space_convergence({16, 32, 64}, cfg.physics.rho_f, cfg.physics.nu_f));
        s.push_back(solid_space_convergence({16, 32, 64}, cfg.physics.mu));
        s.push_back(piola_convergence({8, 16, 32, 64}));
        auto os = open_csv(dir, "study_space-convergence.csv");
        write_convergence_csv(os, s);
        for (const auto& c : s) {
            std::cout << fmt::format("{}: mean EOC {:.3f}\n", c.name, c.mean_eoc());
        }
        return 0;
    }
    if (kind == "time-convergence") {
        std::vector<ConvergenceStudy> s;
        s.push_back(fluid_time_convergence(32, {0.1, 0.05, 0.025, 0.0125}, 0.4, cfg.physics.rho_f, cfg.physics.nu_f));
        auto os = open_csv(dir, "study_time-convergence.csv");
        write_convergence_csv(os, s);
        std::cout << fmt::format("{}: mean EOC {:.3f}\n", s[0].name, s[0].mean_eoc());
        const GrowthOdeStudy g =
            growth_ode_study(cfg.model_params().cells, 10.0, cfg.initial.g0, 1.0, {1e-3, 5e-4, 2.5e-4});
        auto og = open_csv(dir, "study_growth-ode.csv");
        write_growth_csv(og, g);
        std::cout << fmt::format("growth ODE: Richardson error {:.3e}\n", g.richardson_error);
        return 0;
    }
    if (kind == "T-sweep") {
        const auto rows = t_sweep(cfg, {0.01, 0.02, 0.04, 0.08}, &std::cout);
        auto os = open_csv(dir, "study_T-sweep.csv");
        write_sweep_csv(os, "T", rows);
        std::vector<double> q;
        for (const auto& r : rows) {
            q.push_back(r.max_q);
        }
        std::cout << fmt::format("max q column nondecreasing: {}\n", nondecreasing(q) ? "yes" : "no");
        return 0;
    }
    if (kind == "kappa-sweep") {
        const auto rows = kappa_sweep(cfg, {1.0, 5.0, 25.0}, &std::cout);
        auto os = open_csv(dir, "study_kappa-sweep.csv");
        write_sweep_csv(os, "scale", rows);
        std::vector<double> q;
        for (const auto& r : rows) {
            q.push_back(r.q1);
        }
        std::cout << fmt::format("q1 column nondecreasing: {}\n", nondecreasing(q) ? "yes" : "no");
        return 0;
    }
    if (kind == "eigen") {
        const auto rows = eigen_study(cfg.geometry.n, {cfg.physics.mu, 2.0 * cfg.physics.mu}, cfg.geometry.L,
                                      cfg.geometry.H_s);
        auto os = open_csv(dir, "study_eigen.csv");
        write_eigen_csv(os, rows);
        std::cout << fmt::format("omega_max = {:.10g} ({})\n", rows[0].omega_max,
                                 rows[0].omega_max < 0.0 ? "< 0" : "NOT negative");
        return 0;
    }
    throw ConfigError(fmt::format(
        "unrecognized study kind '{}' (expected space-convergence, time-convergence, T-sweep, kappa-sweep, eigen)",
        kind));
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Fluid-structure interaction with plaque growth: simulation driver"};
    app.require_subcommand(1);

    std::string config;
    std::string out;

    auto* run = app.add_subcommand("run", "Run a scenario and write its artifacts");
    run->add_option("config", config, "Configuration file")->required()->check(CLI::ExistingFile);
    run->add_option("-o,--output", out, "Output directory (overrides output.directory)");

    std::string kind;
    auto* study = app.add_subcommand("study", "Run an experiment family and write one CSV per study");
    study->add_option("kind", kind, "space-convergence | time-convergence | T-sweep | kappa-sweep | eigen")
        ->required();
    study->add_option("config", config, "Configuration file")->required()->check(CLI::ExistingFile);
    study->add_option("-o,--output", out, "Output directory (overrides output.directory)");

    auto* check = app.add_subcommand("check-config", "Validate a configuration and print it in full");
    check->add_option("config", config, "Configuration file")->required()->check(CLI::ExistingFile);

    auto* mesh = app.add_subcommand("export-mesh", "Write the mesh of a configuration");
    mesh->add_option("config", config, "Configuration file")->required()->check(CLI::ExistingFile);
    mesh->add_option("-o,--output", out, "Mesh file (default <output.directory>/mesh.txt)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInvariantAbort;
    }

    try {
        const RunConfig cfg = load_config(config);
        if (*run) {
            const RunOutcome r = run_scenario(cfg, output_dir(cfg, out), &std::cerr);
            for (const auto& [k, v] : r.summary) {
                std::cout << k << '=' << v << '\n';
            }
            return r.exit_code;
        }
        if (*study) {
            return run_study(kind, cfg, output_dir(cfg, out));
        }
        if (*check) {
            std::cout << "# configuration is valid\n" << cfg.to_ini();
            return 0;
        }
        if (*mesh) {
            const fs::path file = out.empty() ? resolve_output_directory(cfg.output.directory) / "mesh.txt"
                                              : resolve_output_directory(out);
            export_mesh(cfg, file);
            std::cout << "wrote " << file.string() << '\n';
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvariantAbort;
    }
    return kExitInvariantAbort;
}
