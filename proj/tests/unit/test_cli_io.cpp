#include "plaquefsi/scenario.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

using namespace plaquefsi;
namespace fs = std::filesystem;

namespace {

std::string replace_line(std::string text, const std::string& key, const std::string& line)
{
    return std::regex_replace(text, std::regex("(^|\n)" + key + " = [^\n]*"), "$1" + line);
}

RunConfig small_config()
{
    RunConfig c = baseline_config();
    c.geometry.n = 4;
    c.time.T = 0.004;
    c.time.dt = 0.002;
    c.output.cadence = 1;
    return c;
}

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("plaquefsi_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Config, RoundTripsThroughIni)
{
    RunConfig c = baseline_config();
    c.physics.zeta = 0.25;
    c.initial.c0 = ConcentrationPreset::Uniform;
    c.output.directory = "out/x";
    const RunConfig d = parse_config_string(c.to_ini());
    EXPECT_EQ(d.to_ini(), c.to_ini());
    EXPECT_EQ(d.physics.zeta, 0.25);
    EXPECT_EQ(d.initial.c0, ConcentrationPreset::Uniform);
}

TEST(Config, ShippedBaselineParses)
{
    const RunConfig c = load_config(fs::path(PLAQUEFSI_SOURCE_DIR) / "configs" / "baseline.ini");
    EXPECT_EQ(c.geometry.n, 32);
    EXPECT_EQ(c.steps_per_window(), 20);
}

TEST(Config, NamesUnknownAndMissingKeys)
{
    const std::string base = baseline_config().to_ini();
    try {
        (void)parse_config_string(replace_line(base, "cadence", "cadence = 5\nbogus = 1"));
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("output.bogus"), std::string::npos) << e.what();
    }
    try {
        (void)parse_config_string(replace_line(base, "zeta", ""));
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("physics.zeta"), std::string::npos) << e.what();
    }
}

TEST(Config, RejectsInvalidValues)
{
    const std::string base = baseline_config().to_ini();
    auto expect_error = [&](const std::string& key, const std::string& line, const std::string& fragment) {
        try {
            (void)parse_config_string(replace_line(base, key, line));
            FAIL() << line;
        } catch (const ConfigError& e) {
            EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
        }
    };
    expect_error("zeta", "zeta = -1", "physics.zeta");
    expect_error("n", "n = 5", "geometry.n");
    expect_error("dt", "dt = 0.003", "time");
    expect_error("g0", "g0 = 0.4", "initial.g0");
    expect_error("c0", "c0 = lumpy", "lumpy");
    expect_error("mu", "mu = abc", "physics.mu");
}

TEST(Config, OutputRootRelocatesRelativeDirectories)
{
    ::setenv(kOutputRootEnv, "/tmp/root", 1);
    EXPECT_EQ(resolve_output_directory("out/a"), fs::path("/tmp/root/out/a"));
    EXPECT_EQ(resolve_output_directory("/abs/b"), fs::path("/abs/b"));
    ::unsetenv(kOutputRootEnv);
    EXPECT_EQ(resolve_output_directory("out/a"), fs::path("out/a"));
}

TEST(Scenario, SmallRunWritesArtifactsDeterministically)
{
    const RunConfig cfg = small_config();
    const fs::path a = scratch("run_a");
    const fs::path b = scratch("run_b");
    const RunOutcome ra = run_scenario(cfg, a);
    const RunOutcome rb = run_scenario(cfg, b);
    ASSERT_EQ(ra.exit_code, kExitConverged);
    for (const char* f : {"config.ini", "mesh.txt", "diagnostics.csv", "picard.csv", "summary.txt",
                          "fields_00000.csv", "fields_00001.csv", "fields_00002.csv"}) {
        ASSERT_TRUE(fs::exists(a / f)) << f;
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    }
    EXPECT_EQ(parse_config_string(slurp(a / "config.ini")).to_ini(), cfg.to_ini());
    const std::string diag = slurp(a / "diagnostics.csv");
    EXPECT_EQ(diag.rfind("# plaquefsi diagnostics v" + std::to_string(kCsvVersion), 0), 0u) << diag.substr(0, 40);
    EXPECT_EQ(ra.summary.at("status"), "converged");
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Scenario, ExhaustedIterationsExitWithTwo)
{
    RunConfig cfg = small_config();
    cfg.picard.max_iter = 1;
    const fs::path dir = scratch("run_maxit");
    const RunOutcome r = run_scenario(cfg, dir);
    EXPECT_EQ(r.exit_code, kExitNoContraction);
    EXPECT_TRUE(fs::exists(dir / "summary.txt"));
    fs::remove_all(dir);
    EXPECT_EQ(exit_code_for(PicardStatus::Converged), kExitConverged);
    EXPECT_EQ(exit_code_for(PicardStatus::MaxIterations), kExitNoContraction);
    EXPECT_EQ(exit_code_for(PicardStatus::NoContraction), kExitNoContraction);
}

TEST(Scenario, MeshExportMatchesTheMesh)
{
    const fs::path dir = scratch("mesh");
    export_mesh(small_config(), dir / "mesh.txt");
    std::ostringstream os;
    build_strip_mesh(1.0, 0.5, 0.5, 4).write(os);
    EXPECT_EQ(slurp(dir / "mesh.txt"), os.str());
    fs::remove_all(dir);
}

#ifdef PLAQUEFSI_CLI
namespace {

int cli(const std::string& args)
{
    const std::string cmd = std::string(PLAQUEFSI_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Cli, ExitCodes)
{
    const fs::path dir = scratch("cli");
    fs::create_directories(dir);
    const std::string good = (dir / "good.ini").string();
    const std::string bad = (dir / "bad.ini").string();
    RunConfig cfg = small_config();
    cfg.output.directory = (dir / "out").string();
    std::ofstream(good) << cfg.to_ini();
    std::ofstream(bad) << replace_line(cfg.to_ini(), "zeta", "zeta = -1");
    EXPECT_EQ(cli("check-config " + good), 0);
    EXPECT_EQ(cli("check-config " + bad), 1);
    EXPECT_EQ(cli("export-mesh " + good), 0);
    EXPECT_TRUE(fs::exists(dir / "out" / "mesh.txt"));
    EXPECT_EQ(cli("run " + good), 0);
    EXPECT_TRUE(fs::exists(dir / "out" / "summary.txt"));
    EXPECT_EQ(cli("study no-such-kind " + good), 1);
    EXPECT_EQ(cli("frobnicate"), 1);
    cfg.picard.max_iter = 1;
    std::ofstream(good) << cfg.to_ini();
    EXPECT_EQ(cli("run " + good), 2);
    fs::remove_all(dir);
}
#endif
