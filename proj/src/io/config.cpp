#include "plaquefsi/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <vector>

namespace plaquefsi {

namespace pt = boost::property_tree;

ConcentrationPreset parse_concentration_preset(const std::string& name)
{
    if (name == "zero") {
        return ConcentrationPreset::Zero;
    }
    if (name == "bump") {
        return ConcentrationPreset::Bump;
    }
    if (name == "uniform") {
        return ConcentrationPreset::Uniform;
    }
    throw ConfigError(fmt::format("unknown concentration preset '{}' (expected zero, bump, uniform)", name));
}

const char* to_string(ConcentrationPreset p)
{
    switch (p) {
    case ConcentrationPreset::Zero:
        return "zero";
    case ConcentrationPreset::Bump:
        return "bump";
    case ConcentrationPreset::Uniform:
        return "uniform";
    }
    return "?";
}

namespace {

// One schema entry: dotted key, reader and writer bound to a RunConfig.
struct Key {
    std::string path;
    std::function<void(RunConfig&, const std::string&)> read;
    std::function<std::string(const RunConfig&)> write;
};

double to_double(const std::string& key, const std::string& text)
{
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != text.size()) {
        throw ConfigError(fmt::format("{}: '{}' is not a number", key, text));
    }
    return v;
}

long long to_integer(const std::string& key, const std::string& text)
{
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(text, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != text.size()) {
        throw ConfigError(fmt::format("{}: '{}' is not an integer", key, text));
    }
    return v;
}

std::string fmt_double(double v) { return fmt::format("{}", v); }

template <class Get>
Key real_key(std::string path, Get get)
{
    return {path,
            [path, get](RunConfig& c, const std::string& s) { *get(c) = to_double(path, s); },
            [get](const RunConfig& c) { return fmt_double(*get(c)); }};
}

template <class Get>
Key int_key(std::string path, Get get)
{
    return {path,
            [path, get](RunConfig& c, const std::string& s) { *get(c) = static_cast<int>(to_integer(path, s)); },
            [get](const RunConfig& c) { return fmt::format("{}", *get(c)); }};
}

const std::vector<Key>& schema()
{
    static const std::vector<Key> keys = [] {
        std::vector<Key> k;
        k.push_back({"seed",
                     [](RunConfig& c, const std::string& s) {
                         const long long v = to_integer("seed", s);
                         if (v < 0) {
                             throw ConfigError("seed: must be >= 0");
                         }
                         c.seed = static_cast<std::uint64_t>(v);
                     },
                     [](const RunConfig& c) { return fmt::format("{}", c.seed); }});
        k.push_back(real_key("geometry.L", [](auto& c) { return &c.geometry.L; }));
        k.push_back(real_key("geometry.H_f", [](auto& c) { return &c.geometry.H_f; }));
        k.push_back(real_key("geometry.H_s", [](auto& c) { return &c.geometry.H_s; }));
        k.push_back(int_key("geometry.n", [](auto& c) { return &c.geometry.n; }));
        k.push_back(real_key("physics.rho_f", [](auto& c) { return &c.physics.rho_f; }));
        k.push_back(real_key("physics.nu_f", [](auto& c) { return &c.physics.nu_f; }));
        k.push_back(real_key("physics.rho_s", [](auto& c) { return &c.physics.rho_s; }));
        k.push_back(real_key("physics.mu", [](auto& c) { return &c.physics.mu; }));
        k.push_back(real_key("physics.D_f", [](auto& c) { return &c.physics.D_f; }));
        k.push_back(real_key("physics.D_s", [](auto& c) { return &c.physics.D_s; }));
        k.push_back(real_key("physics.beta", [](auto& c) { return &c.physics.beta; }));
        k.push_back(real_key("physics.gamma", [](auto& c) { return &c.physics.gamma; }));
        k.push_back(real_key("physics.zeta", [](auto& c) { return &c.physics.zeta; }));
        k.push_back(real_key("time.T", [](auto& c) { return &c.time.T; }));
        k.push_back(real_key("time.dt", [](auto& c) { return &c.time.dt; }));
        k.push_back(int_key("time.windows", [](auto& c) { return &c.time.windows; }));
        k.push_back(real_key("picard.tol", [](auto& c) { return &c.picard.tol; }));
        k.push_back(int_key("picard.max_iter", [](auto& c) { return &c.picard.max_iter; }));
        k.push_back(real_key("picard.q", [](auto& c) { return &c.picard.q; }));
        k.push_back({"initial.c0",
                     [](RunConfig& c, const std::string& s) { c.initial.c0 = parse_concentration_preset(s); },
                     [](const RunConfig& c) { return std::string(to_string(c.initial.c0)); }});
        k.push_back(real_key("initial.c0_amplitude", [](auto& c) { return &c.initial.c0_amplitude; }));
        k.push_back(real_key("initial.c0_center_x", [](auto& c) { return &c.initial.c0_center_x; }));
        k.push_back(real_key("initial.c0_center_y", [](auto& c) { return &c.initial.c0_center_y; }));
        k.push_back(real_key("initial.c0_radius", [](auto& c) { return &c.initial.c0_radius; }));
        k.push_back(real_key("initial.cstar0", [](auto& c) { return &c.initial.cstar0; }));
        k.push_back(real_key("initial.g0", [](auto& c) { return &c.initial.g0; }));
        k.push_back(real_key("initial.traction", [](auto& c) { return &c.initial.traction; }));
        k.push_back(real_key("initial.kappa", [](auto& c) { return &c.initial.kappa; }));
        k.push_back({"output.directory",
                     [](RunConfig& c, const std::string& s) {
                         if (s.empty()) {
                             throw ConfigError("output.directory: must not be empty");
                         }
                         c.output.directory = s;
                     },
                     [](const RunConfig& c) { return c.output.directory; }});
        k.push_back(int_key("output.cadence", [](auto& c) { return &c.output.cadence; }));
        return k;
    }();
    return keys;
}

void collect_paths(const pt::ptree& tree, const std::string& prefix, std::vector<std::string>& out)
{
    for (const auto& [name, child] : tree) {
        const std::string path = prefix.empty() ? name : prefix + "." + name;
        if (child.empty()) {
            out.push_back(path);
        } else {
            collect_paths(child, path, out);
        }
    }
}

}  // namespace

void RunConfig::validate() const
{
    std::vector<std::string> errors;
    auto positive = [&](const char* name, double v) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            errors.push_back(fmt::format("{} must be > 0 (got {})", name, v));
        }
    };
    auto nonnegative = [&](const char* name, double v) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            errors.push_back(fmt::format("{} must be >= 0 (got {})", name, v));
        }
    };
    positive("geometry.L", geometry.L);
    positive("geometry.H_f", geometry.H_f);
    positive("geometry.H_s", geometry.H_s);
    if (geometry.n < 4 || geometry.n % 2 != 0) {
        errors.push_back(fmt::format("geometry.n must be even and >= 4 (got {})", geometry.n));
    }
    positive("physics.rho_f", physics.rho_f);
    positive("physics.nu_f", physics.nu_f);
    positive("physics.rho_s", physics.rho_s);
    positive("physics.mu", physics.mu);
    positive("physics.D_f", physics.D_f);
    positive("physics.D_s", physics.D_s);
    nonnegative("physics.beta", physics.beta);
    positive("physics.gamma", physics.gamma);
    nonnegative("physics.zeta", physics.zeta);
    positive("time.T", time.T);
    positive("time.dt", time.dt);
    if (time.dt > time.T) {
        errors.push_back(fmt::format("time.dt = {} exceeds time.T = {}", time.dt, time.T));
    }
    if (time.windows < 1) {
        errors.push_back(fmt::format("time.windows must be >= 1 (got {})", time.windows));
    }
    if (errors.empty()) {
        const double steps = time.T / (time.windows * time.dt);
        if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps) || std::round(steps) < 1.0) {
            errors.push_back(fmt::format("time.T / (time.windows * time.dt) = {} is not a positive integer", steps));
        }
    }
    positive("picard.tol", picard.tol);
    if (picard.max_iter < 1) {
        errors.push_back(fmt::format("picard.max_iter must be >= 1 (got {})", picard.max_iter));
    }
    if (!(picard.q > 3.0)) {
        errors.push_back(fmt::format("picard.q must be > 3 (got {})", picard.q));
    }
    nonnegative("initial.c0_amplitude", initial.c0_amplitude);
    positive("initial.c0_radius", initial.c0_radius);
    nonnegative("initial.cstar0", initial.cstar0);
    if (!(initial.g0 >= 0.5)) {
        errors.push_back(fmt::format("initial.g0 must be >= 0.5 (got {})", initial.g0));
    }
    if (!std::isfinite(initial.traction)) {
        errors.push_back("initial.traction must be finite");
    }
    positive("initial.kappa", initial.kappa);
    if (output.cadence < 1) {
        errors.push_back(fmt::format("output.cadence must be >= 1 (got {})", output.cadence));
    }
    if (!errors.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& e : errors) {
            msg += "\n  " + e;
        }
        throw ConfigError(msg);
    }
}

ModelParams RunConfig::model_params() const
{
    ModelParams p;
    p.rho_f = physics.rho_f;
    p.nu_f = physics.nu_f;
    p.mu = physics.mu;
    p.cells.Df = physics.D_f;
    p.cells.Ds = physics.D_s;
    p.cells.zeta = physics.zeta;
    p.cells.beta = physics.beta;
    p.cells.gamma = physics.gamma;
    p.cells.rho_s = physics.rho_s;
    p.cells.dim = 2;
    return p;
}

int RunConfig::steps_per_window() const
{
    return static_cast<int>(std::lround(time.T / (time.windows * time.dt)));
}

std::string RunConfig::to_ini() const
{
    std::string out;
    std::string section;
    for (const Key& k : schema()) {
        const auto dot = k.path.find('.');
        const std::string sec = dot == std::string::npos ? "" : k.path.substr(0, dot);
        const std::string name = dot == std::string::npos ? k.path : k.path.substr(dot + 1);
        if (sec != section) {
            out += fmt::format("\n[{}]\n", sec);
            section = sec;
        }
        out += fmt::format("{} = {}\n", name, k.write(*this));
    }
    return out;
}

RunConfig baseline_config() { return RunConfig{}; }

RunConfig parse_config_string(const std::string& text)
{
    pt::ptree tree;
    std::istringstream is(text);
    try {
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(fmt::format("malformed configuration: {}", e.message()));
    }
    std::vector<std::string> present;
    collect_paths(tree, "", present);
    std::set<std::string> known;
    for (const Key& k : schema()) {
        known.insert(k.path);
    }
    std::vector<std::string> unknown;
    for (const auto& p : present) {
        if (known.count(p) == 0) {
            unknown.push_back(p);
        }
    }
    std::vector<std::string> missing;
    RunConfig cfg;
    for (const Key& k : schema()) {
        const auto v = tree.get_optional<std::string>(pt::ptree::path_type(k.path, '.'));
        if (!v) {
            missing.push_back(k.path);
            continue;
        }
        k.read(cfg, *v);
    }
    if (!unknown.empty() || !missing.empty()) {
        std::string msg = "configuration schema violation:";
        if (!unknown.empty()) {
            msg += "\n  unknown keys: " + fmt::format("{}", fmt::join(unknown, ", "));
        }
        if (!missing.empty()) {
            msg += "\n  missing keys: " + fmt::format("{}", fmt::join(missing, ", "));
        }
        throw ConfigError(msg);
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is) {
        throw ConfigError(fmt::format("cannot read configuration file '{}'", path.string()));
    }
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config_string(ss.str());
}

std::filesystem::path resolve_output_directory(const std::string& configured)
{
    std::filesystem::path p(configured);
    if (p.is_relative()) {
        if (const char* root = std::getenv(kOutputRootEnv); root != nullptr && *root != '\0') {
            return std::filesystem::path(root) / p;
        }
    }
    return p;
}

Discretization make_discretization(const RunConfig& cfg)
{
    return Discretization::build(cfg.geometry.L, cfg.geometry.H_f, cfg.geometry.H_s, cfg.geometry.n);
}

RawInitialData make_raw_initial(const RunConfig& cfg, const Discretization& disc)
{
    RawInitialData raw = zero_initial(disc);
    const auto& in = cfg.initial;
    switch (in.c0) {
    case ConcentrationPreset::Zero:
        break;
    case ConcentrationPreset::Bump: {
        const Vec2 centre(in.c0_center_x, in.c0_center_y);
        raw.c0.fluid = interpolate_scalar(disc.pf, [&](const Vec2& x) {
            const double r = (x - centre).norm();
            if (r >= in.c0_radius) {
                return 0.0;
            }
            const double c = std::cos(std::numbers::pi * r / (2.0 * in.c0_radius));
            return in.c0_amplitude * c * c;
        });
        break;
    }
    case ConcentrationPreset::Uniform:
        raw.c0.fluid.values.setConstant(in.c0_amplitude);
        raw.c0.solid.values.setConstant(in.c0_amplitude);
        break;
    }
    raw.cstar0.values.setConstant(in.cstar0);
    raw.g0.values.setConstant(in.g0);
    raw.pf0 = interpolate_scalar(disc.pf, [&](const Vec2& x) {
        return in.traction * std::cos(2.0 * std::numbers::pi * x.x() / cfg.geometry.L);
    });
    raw.kappa = in.kappa;
    return raw;
}

}  // namespace plaquefsi
