#pragma once

#include "plaquefsi/coupling.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace plaquefsi {

/// Named initial-data presets.
enum class ConcentrationPreset : std::uint8_t {
    Zero,     // c0 = 0
    Bump,     // smooth cos^2 bump in the fluid
    Uniform,  // c0 = amplitude on both sides
};

ConcentrationPreset parse_concentration_preset(const std::string& name);
const char* to_string(ConcentrationPreset p);

/// Scenario description read from an INI file with sections
/// [geometry] [physics] [time] [picard] [initial] [output] and a top-level
/// `seed`. Every key is required; unknown keys are rejected.
struct RunConfig {
    struct Geometry {
        double L = 1.0;
        double H_f = 0.5;
        double H_s = 0.5;
        int n = 32;
    } geometry;

    struct Physics {
        double rho_f = 1.0;
        double nu_f = 1.0;
        double rho_s = 1.0;
        double mu = 1.0;
        double D_f = 1.0;
        double D_s = 0.5;
        double beta = 0.1;
        double gamma = 0.1;
        double zeta = 1.0;
    } physics;

    struct Time {
        double T = 0.02;
        double dt = 1e-3;
        int windows = 1;
    } time;

    struct Picard {
        double tol = 1e-8;
        int max_iter = 50;
        double q = 6.0;
    } picard;

    struct Initial {
        ConcentrationPreset c0 = ConcentrationPreset::Bump;
        double c0_amplitude = 1.0;
        double c0_center_x = 0.5;
        double c0_center_y = -0.3;
        double c0_radius = 0.15;
        double cstar0 = 0.0;
        double g0 = 1.0;
        /// Interface fluid pressure guess pi_f0 = traction cos(2 pi x / L).
        double traction = 0.01;
        double kappa = 1.0;
    } initial;

    struct Output {
        std::string directory = "out";
        int cadence = 5;  // snapshot every `cadence` steps (final step always written)
    } output;

    std::uint64_t seed = 1;

    /// Throws ConfigError listing every violated constraint.
    void validate() const;

    [[nodiscard]] ModelParams model_params() const;
    [[nodiscard]] int steps_per_window() const;

    /// Full INI text; parse_config_string(to_ini()) reproduces the config.
    [[nodiscard]] std::string to_ini() const;
};

/// Defaults of the baseline scenario.
RunConfig baseline_config();

/// Parse and validate. Throws ConfigError naming unknown and missing keys.
RunConfig parse_config_string(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Environment variable that relocates relative output directories.
inline constexpr const char* kOutputRootEnv = "PLAQUEFSI_OUTPUT_ROOT";

/// Output directory of a config, prefixed by $PLAQUEFSI_OUTPUT_ROOT when the
/// configured path is relative and the variable is set.
std::filesystem::path resolve_output_directory(const std::string& configured);

/// Mesh and spaces of a config.
Discretization make_discretization(const RunConfig& cfg);

/// Initial data of a config (before the solid equilibrium is solved).
RawInitialData make_raw_initial(const RunConfig& cfg, const Discretization& disc);

}  // namespace plaquefsi
