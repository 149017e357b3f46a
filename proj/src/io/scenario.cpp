#include "plaquefsi/scenario.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <fstream>
#include <limits>

namespace plaquefsi {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& file)
{
    std::ofstream os(file);
    if (!os) {
        throw Error(fmt::format("cannot write '{}'", file.string()));
    }
    return os;
}

void close_output(std::ofstream& os, const fs::path& file)
{
    os.close();
    if (!os) {
        throw Error(fmt::format("write to '{}' failed", file.string()));
    }
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

void write_field(std::ostream& os, const char* name, const Field& f)
{
    for (int i = 0; i < f.num_dofs(); ++i) {
        const Vec2& x = f.space->dof_point(i);
        os << name << ',' << i << ',' << num(x.x()) << ',' << num(x.y()) << ',' << num(f.at(i, 0)) << ','
           << (f.components > 1 ? num(f.at(i, 1)) : std::string("0")) << '\n';
    }
}

void write_snapshot(const fs::path& file, const StateW& w, int k)
{
    std::ofstream os = open_output(file);
    os << fmt::format("# plaquefsi fields v{} step={} t={:.17g}\n", kCsvVersion, k, w.times()[static_cast<std::size_t>(k)]);
    os << "# field: vf (fluid velocity, P2), us (solid displacement, P2), pf / ps (fluid / solid pressure, P1),\n"
          "#        c_f / c_s (concentration, P1), cstar (foam cells, P1), g (growth metric, P1)\n";
    os << "# value1 is the second vector component (0 for scalars)\n";
    os << "field,dof,x,y,value0,value1\n";
    const auto ks = static_cast<std::size_t>(k);
    write_field(os, "vf", w.vf.snapshots[ks]);
    write_field(os, "us", w.us.snapshots[ks]);
    write_field(os, "pf", w.pf.snapshots[ks]);
    write_field(os, "ps", w.ps.snapshots[ks]);
    write_field(os, "c_f", w.c.snapshots[ks].fluid);
    write_field(os, "c_s", w.c.snapshots[ks].solid);
    write_field(os, "cstar", w.cstar.snapshots[ks]);
    write_field(os, "g", w.g.snapshots[ks]);
    close_output(os, file);
}

void write_iterates(const fs::path& file, const PicardResult& r)
{
    std::ofstream os = open_output(file);
    os << fmt::format("# plaquefsi picard v{}\n", kCsvVersion);
    os << "# window: time window index; k: iterate index; norm: max over components of the difference\n"
          "# between consecutive iterates in the anisotropic trajectory norm; q: norm / previous norm\n"
          "# (0 for the first iterate of a window); remaining columns: per-component differences\n";
    os << "window,k,norm,q";
    for (const auto& name : component_names()) {
        os << ',' << name;
    }
    os << '\n';
    for (const auto& it : r.iterates) {
        os << it.window << ',' << it.k << ',' << num(it.norm) << ',' << num(it.q);
        for (const auto& name : component_names()) {
            const auto f = it.diff.find(name);
            os << ',' << num(f == it.diff.end() ? 0.0 : f->second);
        }
        os << '\n';
    }
    close_output(os, file);
}

void write_summary(const fs::path& file, const std::map<std::string, std::string>& summary)
{
    std::ofstream os = open_output(file);
    for (const auto& [k, v] : summary) {
        os << k << '=' << v << '\n';
    }
    close_output(os, file);
}

}  // namespace

int exit_code_for(PicardStatus status)
{
    return status == PicardStatus::Converged ? kExitConverged : kExitNoContraction;
}

void write_diagnostics_csv(std::ostream& os, const std::vector<StepDiagnostics>& diag)
{
    os << fmt::format("# plaquefsi diagnostics v{}\n", kCsvVersion);
    os << "# t: time node\n"
          "# piola_residual: L2 norm of the divergence of the P1-projected cofactor J F^-T of the solid\n"
          "# min_g: minimum growth metric; min_c: minimum concentration over both subdomains\n"
          "# min_cstar: minimum foam-cell concentration\n"
          "# max_F_minus_I: maximum spectral norm of F - I over fluid and solid quadrature points\n"
          "# div_residual_f / div_residual_s: lumped L2 norm of the discrete incompressibility defect\n"
          "# mass: total concentration mass (lumped) over both subdomains\n";
    os << "t,piola_residual,min_g,min_c,min_cstar,max_F_minus_I,div_residual_f,div_residual_s,mass\n";
    for (const auto& d : diag) {
        os << num(d.t) << ',' << num(d.piola_residual) << ',' << num(d.min_g) << ',' << num(d.min_c) << ','
           << num(d.min_cstar) << ',' << num(d.max_F_minus_I) << ',' << num(d.div_residual_f) << ','
           << num(d.div_residual_s) << ',' << num(d.mass) << '\n';
    }
}

void export_mesh(const RunConfig& cfg, const fs::path& file)
{
    const Mesh mesh = build_strip_mesh(cfg.geometry.L, cfg.geometry.H_f, cfg.geometry.H_s, cfg.geometry.n);
    if (file.has_parent_path()) {
        fs::create_directories(file.parent_path());
    }
    std::ofstream os = open_output(file);
    mesh.write(os);
    close_output(os, file);
}

RunOutcome run_scenario(const RunConfig& cfg, const fs::path& directory, std::ostream* log)
{
    cfg.validate();
    auto say = [&](const std::string& s) {
        if (log != nullptr) {
            *log << s << '\n';
            log->flush();
        }
    };
    std::error_code ec;
    fs::create_directories(directory, ec);
    if (ec) {
        throw Error(fmt::format("cannot create output directory '{}': {}", directory.string(), ec.message()));
    }
    RunOutcome out;
    out.directory = directory;
    {
        const fs::path f = directory / "config.ini";
        std::ofstream os = open_output(f);
        os << "# effective configuration\n" << cfg.to_ini();
        close_output(os, f);
    }
    export_mesh(cfg, directory / "mesh.txt");

    auto& s = out.summary;
    s["exit_code"] = std::to_string(kExitInvariantAbort);
    s["status"] = "invariant_abort";
    s["steps"] = std::to_string(cfg.steps_per_window() * cfg.time.windows);
    try {
        const Discretization disc = make_discretization(cfg);
        const ModelParams params = cfg.model_params();
        say(fmt::format("mesh n={} ({} cells); preparing initial equilibrium", cfg.geometry.n, disc.mesh->num_cells()));
        PrepareOptions prep;
        prep.q = cfg.picard.q;
        out.initial = prepare_initial(disc, params, make_raw_initial(cfg, disc), prep);
        const InitialData& w0 = *out.initial;
        s["smallness"] = num(w0.smallness);
        s["kappa"] = num(w0.kappa);
        s["newton_iterations"] = std::to_string(w0.newton_iterations);
        s["warnings"] = std::to_string(w0.warnings.size());
        for (std::size_t i = 0; i < w0.warnings.size(); ++i) {
            s[fmt::format("warning_{}", i)] = w0.warnings[i];
            say("warning: " + w0.warnings[i]);
        }

        const CoupledProblem problem(disc, params, cfg.time.dt);
        PicardOptions opts;
        opts.final_time = cfg.time.T;
        opts.windows = cfg.time.windows;
        opts.tol = cfg.picard.tol;
        opts.max_iter = cfg.picard.max_iter;
        opts.q = cfg.picard.q;
        say(fmt::format("picard: T={} dt={} windows={}", cfg.time.T, cfg.time.dt, cfg.time.windows));
        out.result = picard_solve(problem, w0, opts);
        const PicardResult& r = *out.result;
        for (const auto& it : r.iterates) {
            say(fmt::format("  window {} k={} norm={:.3e} q={:.4f}", it.window, it.k, it.norm, it.q));
        }
        write_iterates(directory / "picard.csv", r);
        s["status"] = to_string(r.status);
        s["message"] = r.message;
        s["iterations"] = std::to_string(r.iterates.size());
        s["max_q"] = num(r.max_q);
        s["final_norm"] = num(r.final_norm);
        out.exit_code = exit_code_for(r.status);

        const StateW& w = r.state;
        const int last = static_cast<int>(w.times().size()) - 1;
        for (int k = 0; k <= last; ++k) {
            if (k % cfg.output.cadence == 0 || k == last) {
                write_snapshot(directory / fmt::format("fields_{:05d}.csv", k), w, k);
            }
        }
        const auto diag = step_diagnostics(problem, w, w0);
        {
            const fs::path f = directory / "diagnostics.csv";
            std::ofstream os = open_output(f);
            write_diagnostics_csv(os, diag);
            close_output(os, f);
        }
        double min_c = std::numeric_limits<double>::infinity();
        double min_cs = min_c;
        double min_g = min_c;
        double max_fi = 0.0;
        double max_piola = 0.0;
        for (const auto& d : diag) {
            min_c = std::min(min_c, d.min_c);
            min_cs = std::min(min_cs, d.min_cstar);
            min_g = std::min(min_g, d.min_g);
            max_fi = std::max(max_fi, d.max_F_minus_I);
            max_piola = std::max(max_piola, d.piola_residual);
        }
        s["min_c"] = num(min_c);
        s["min_cstar"] = num(min_cs);
        s["min_g"] = num(min_g);
        s["max_F_minus_I"] = num(max_fi);
        s["max_piola_residual"] = num(max_piola);
        s["mass_initial"] = num(diag.front().mass);
        s["mass_final"] = num(diag.back().mass);
        if (r.status == PicardStatus::Converged) {
            const ResidualReport res = converged_residuals(problem, w, w0);
            for (const auto& [k, v] : res.values) {
                s["residual_" + k] = num(v);
            }
            s["residual_max"] = num(res.max_value());
        }
    } catch (const InvariantViolation& e) {
        out.exit_code = kExitInvariantAbort;
        s["status"] = "invariant_abort";
        s["message"] = e.what();
        say(fmt::format("invariant violated: {}", e.what()));
    } catch (const SolverError& e) {
        out.exit_code = kExitInvariantAbort;
        s["status"] = "solver_failure";
        s["message"] = e.what();
        say(fmt::format("solver failure: {}", e.what()));
    }
    s["exit_code"] = std::to_string(out.exit_code);
    write_summary(directory / "summary.txt", s);
    say(fmt::format("status {} (exit {})", s["status"], out.exit_code));
    return out;
}

}  // namespace plaquefsi
