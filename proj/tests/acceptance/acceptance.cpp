// Acceptance checks. `acceptance <n>` runs criterion n (1..10) and prints one
// PASS/FAIL line; `acceptance` without arguments runs all of them.

#include "plaquefsi/kinematics.hpp"
#include "plaquefsi/scenario.hpp"
#include "plaquefsi/studies.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

using namespace plaquefsi;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

class Stopwatch {
public:
    [[nodiscard]] double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::vector<double> eocs(const ConvergenceStudy& s)
{
    std::vector<double> v;
    for (std::size_t i = 1; i < s.rows.size(); ++i) {
        v.push_back(s.rows[i].eoc);
    }
    return v;
}

std::string fmt_list(const std::vector<double>& v) { return fmt::format("{:.4g}", fmt::join(v, ", ")); }

// Material assumptions of the default energy.
Outcome criterion1()
{
    const Stopwatch sw;
    const double mu = 1.0;
    const EnergyDensity<2> W(mu);
    const AssumptionReport r = check_assumptions(W, 1000, 0.5, 1);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> nd;
    double lh = std::numeric_limits<double>::infinity();
    for (int s = 0; s < 100; ++s) {
        const Vec2 a(nd(rng), nd(rng));
        const Vec2 b(nd(rng), nd(rng));
        const Mat2 ab = a * b.transpose();
        lh = std::min(lh, (W.d2w_identity(ab).array() * ab.array()).sum() / (a.squaredNorm() * b.squaredNorm()));
    }
    const double t = sw.seconds();
    const bool pass = r.frame_indifference_violation <= 1e-12 && r.dw_identity_norm <= 1e-14 &&
                      std::abs(r.c1 - 2.0 * mu) <= 1e-10 && lh > 0.0 && t < 5.0;
    return {pass, fmt::format("frame {:.2e} <= 1e-12, |DW(I)| {:.2e} <= 1e-14, C1 - 2mu {:.2e} (tol 1e-10), "
                              "Legendre-Hadamard min {:.4g} > 0, {:.2f} s < 5 s",
                              r.frame_indifference_violation, r.dw_identity_norm, r.c1 - 2.0 * mu, lh, t)};
}

// Second-order Taylor decomposition of DW about the identity.
Outcome criterion2()
{
    const Stopwatch sw;
    const EnergyDensity<2> W(1.0);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud(0.0, 0.5);
    double worst = 0.0;
    for (int s = 0; s < 200; ++s) {
        Mat2 A;
        A << nd(rng), nd(rng), nd(rng), nd(rng);
        const Mat2 F = Mat2::Identity() + ud(rng) * A / A.norm();
        worst = std::max(worst, (W.dw(F) - W.d2w_identity(F - Mat2::Identity()) - W.remainder_R(F)).norm());
    }
    const double t = sw.seconds();
    return {worst <= 1e-10 && t < 5.0,
            fmt::format("max defect {:.2e} <= 1e-10 over 200 samples, {:.2f} s < 5 s", worst, t)};
}

Outcome criterion3()
{
    const Stopwatch sw;
    const ConvergenceStudy s = piola_convergence({8, 16, 32, 64});
    const double t = sw.seconds();
    return {s.min_eoc() >= 1.0 && t < 60.0,
            fmt::format("EOCs [{}] >= 1.0, {:.1f} s < 60 s", fmt_list(eocs(s)), t)};
}

Outcome criterion4()
{
    const Stopwatch sw;
    const ConvergenceStudy space = fluid_space_convergence({16, 32, 64});
    const ConvergenceStudy time = fluid_time_convergence(32, {0.1, 0.05, 0.025, 0.0125}, 0.4);
    const double t = sw.seconds();
    return {space.min_eoc() >= 1.8 && time.min_eoc() >= 0.9 && t < 300.0,
            fmt::format("spatial EOCs [{}] >= 1.8, temporal EOCs [{}] >= 0.9, {:.1f} s < 300 s",
                        fmt_list(eocs(space)), fmt_list(eocs(time)), t)};
}

Outcome criterion5()
{
    const Stopwatch sw;
    const double mu = 1.0;
    const Discretization disc = Discretization::build(1.0, 0.5, 0.5, 16);
    const EnergyDensity<2> W(mu);
    const ElasticSolver solver(disc.us, disc.ps, W);
    const ElasticSolution zero = solver.solve({});
    const double zero_max =
        std::max(zero.displacement.values.cwiseAbs().maxCoeff(), zero.pressure.values.cwiseAbs().maxCoeff());

    const ConvergenceStudy mms = solid_space_convergence({16, 32, 64}, mu);

    QpData<Vec2> f = qp_points(*disc.us);
    for (auto& x : f.data) {
        x = Vec2(std::sin(2.0 * M_PI * x.x()), x.y());
    }
    const ElasticSolution res = solve_resolvent(disc.us, disc.ps, W, 0.0, f);
    ElasticStepData d;
    d.body_force = f;
    const auto rr = solver.residual(res.displacement, res.pressure, d);
    const bool resolvent_ok = res.displacement.values.allFinite() && rr.equilibrium <= 1e-9 && rr.constraint <= 1e-9;

    const auto eig = eigen_study(32, {mu, 2.0 * mu});
    const double ratio_defect = std::abs(eig[1].omega_max / eig[0].omega_max - 2.0) / 2.0;
    const double t = sw.seconds();
    const bool pass = zero_max == 0.0 && mms.min_eoc() >= 1.8 && resolvent_ok && eig[0].omega_max < 0.0 &&
                      ratio_defect <= 1e-6 && t < 300.0;
    return {pass, fmt::format("zero data -> max |u|,|pi| = {:.1e}; EOCs [{}] >= 1.8; resolvent at lambda = 0 "
                              "residuals {:.1e}/{:.1e}; omega_max = {:.10g} < 0, omega(2mu)/omega(mu) off by "
                              "{:.1e} <= 1e-6; {:.1f} s < 300 s",
                              zero_max, fmt_list(eocs(mms)), rr.equilibrium, rr.constraint, eig[0].omega_max,
                              ratio_defect, t)};
}

Outcome criterion6()
{
    const Stopwatch sw;
    const RunConfig cfg = baseline_config();
    const GrowthOdeStudy g = growth_ode_study(cfg.model_params().cells, 10.0, 1.0, 1.0, {1e-3, 5e-4, 2.5e-4});
    const double t = sw.seconds();
    return {g.richardson_error <= 1e-8 && t < 10.0,
            fmt::format("raw errors [{}], Richardson error {:.2e} <= 1e-8, {:.2f} s < 10 s", fmt_list(g.errors),
                        g.richardson_error, t)};
}

struct BaselineRun {
    RunConfig cfg;
    std::unique_ptr<CoupledProblem> problem;
    InitialData w0;
    PicardResult result;
    double seconds = 0.0;
};

BaselineRun run_baseline(const RunConfig& cfg)
{
    const Stopwatch sw;
    BaselineRun b;
    b.cfg = cfg;
    const Discretization disc = make_discretization(cfg);
    b.problem = std::make_unique<CoupledProblem>(disc, cfg.model_params(), cfg.time.dt);
    PrepareOptions prep;
    prep.q = cfg.picard.q;
    b.w0 = prepare_initial(disc, cfg.model_params(), make_raw_initial(cfg, disc), prep);
    PicardOptions opts;
    opts.final_time = cfg.time.T;
    opts.windows = cfg.time.windows;
    opts.tol = cfg.picard.tol;
    opts.max_iter = cfg.picard.max_iter;
    opts.q = cfg.picard.q;
    b.result = picard_solve(*b.problem, b.w0, opts);
    b.seconds = sw.seconds();
    return b;
}

Outcome criterion7()
{
    const BaselineRun b = run_baseline(baseline_config());
    const Stopwatch sw;
    const PicardResult& r = b.result;
    double max_qk = 0.0;
    for (std::size_t k = 1; k < r.iterates.size(); ++k) {
        max_qk = std::max(max_qk, r.iterates[k].q);
    }
    const ResidualReport rep = converged_residuals(*b.problem, r.state, b.w0);
    double original = 0.0;
    for (const auto& [name, v] : rep.values) {
        if (name != "interface_velocity") {
            original = std::max(original, v);
        }
    }
    const double iv = rep.values.at("interface_velocity");
    const double t = b.seconds + sw.seconds();
    const bool pass = r.status == PicardStatus::Converged && max_qk < 1.0 && r.final_norm < 1e-8 &&
                      original <= 1e-7 && iv <= 5.0 * b.cfg.time.dt && t < 600.0;
    return {pass, fmt::format("status {} after {} iterates; max q_k {:.4f} < 1; final norm {:.2e} < 1e-8; "
                              "system residuals {:.2e} <= 1e-7; interface velocity {:.2e} <= {:.1e}; {:.1f} s < 600 s",
                              to_string(r.status), r.iterates.size(), max_qk, r.final_norm, original, iv,
                              5.0 * b.cfg.time.dt, t)};
}

Outcome criterion8()
{
    const BaselineRun b = run_baseline(baseline_config());
    const StateW& w = b.result.state;
    const PositivityReport pc = positivity_report(w.c);
    const PositivityReport ps = positivity_report(w.cstar);
    double min_g = std::numeric_limits<double>::infinity();
    for (const auto& g : w.g.snapshots) {
        min_g = std::min(min_g, g.values.minCoeff());
    }
    const double min_c0 = std::min(b.w0.c0.fluid.values.minCoeff(), b.w0.c0.solid.values.minCoeff());
    const bool data_ok = min_c0 >= 0.0 && b.w0.cstar0.values.minCoeff() >= 0.0 &&
                         b.w0.g0.values.minCoeff() == 1.0 && b.w0.g0.values.maxCoeff() == 1.0;
    const bool pass = b.result.status == PicardStatus::Converged && data_ok && pc.min_value >= -1e-10 &&
                      ps.min_value >= -1e-12 && min_g >= 0.5;
    return {pass, fmt::format("min c {:.3e} >= -1e-10 (step {}), min c* {:.3e} >= -1e-12, min g {:.6f} >= 0.5",
                              pc.min_value, pc.step, ps.min_value, min_g)};
}

Outcome criterion9()
{
    const Stopwatch sw;
    const RunConfig base = baseline_config();
    const auto t_rows = t_sweep(base, {0.01, 0.02, 0.04, 0.08}, &std::cerr);
    const auto k_rows = kappa_sweep(base, {1.0, 5.0, 25.0}, &std::cerr);
    std::vector<double> max_q;
    std::vector<double> q1;
    for (const auto& r : t_rows) {
        max_q.push_back(r.max_q);
    }
    for (const auto& r : k_rows) {
        q1.push_back(r.q1);
    }
    const double t = sw.seconds();
    const bool pass = nondecreasing(max_q) && nondecreasing(q1) && t < 1800.0;
    return {pass, fmt::format("T-sweep max q_k [{}] nondecreasing: {}; kappa-sweep q1 [{}] nondecreasing: {}; "
                              "{:.0f} s < 1800 s",
                              fmt_list(max_q), nondecreasing(max_q) ? "yes" : "no", fmt_list(q1),
                              nondecreasing(q1) ? "yes" : "no", t)};
}

Outcome criterion10()
{
    // Coupled run without reaction.
    RunConfig cfg = baseline_config();
    cfg.physics.beta = 0.0;
    const BaselineRun b = run_baseline(cfg);
    const auto diag = step_diagnostics(*b.problem, b.result.state, b.w0);
    double drift = 0.0;
    for (std::size_t k = 1; k < diag.size(); ++k) {
        drift = std::max(drift, std::abs(diag[k].mass - diag[k - 1].mass));
    }

    // Insulated interface: each side keeps its own mass.
    const Discretization disc = make_discretization(baseline_config());
    CellsParams p = baseline_config().model_params().cells;
    p.zeta = 0.0;
    const TransmissionSolver solver(disc.pf, disc.ps, p, 1e-3, true);
    TwoSidedField c = make_raw_initial(baseline_config(), disc).c0;
    c.solid = interpolate_scalar(disc.ps, [](const Vec2& x) { return 1.0 + std::cos(2.0 * M_PI * x.x()) * x.y(); });
    const double mf0 = solver.fluid_mass().dot(c.fluid.values);
    const double ms0 = solver.solid_mass().dot(c.solid.values);
    double side = 0.0;
    for (int k = 0; k < 20; ++k) {
        c = solver.step(c, {});
        side = std::max({side, std::abs(solver.fluid_mass().dot(c.fluid.values) - mf0),
                         std::abs(solver.solid_mass().dot(c.solid.values) - ms0)});
    }
    const bool pass = b.result.status == PicardStatus::Converged && drift <= 1e-9 && side <= 1e-10;
    return {pass, fmt::format("beta = 0 coupled run ({}): max mass drift per step {:.2e} <= 1e-9; zeta = 0 "
                              "per-side drift {:.2e} <= 1e-10",
                              to_string(b.result.status), drift, side)};
}

}  // namespace

int main(int argc, char** argv)
{
    const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                         criterion5, criterion6, criterion7, criterion8,
                                                         criterion9, criterion10};
    std::vector<int> which;
    if (argc > 1) {
        for (int i = 1; i < argc; ++i) {
            const int n = std::atoi(argv[i]);
            if (n < 1 || n > static_cast<int>(criteria.size())) {
                std::cerr << "usage: acceptance [criterion 1..10 ...]\n";
                return 2;
            }
            which.push_back(n);
        }
    } else {
        for (int n = 1; n <= static_cast<int>(criteria.size()); ++n) {
            which.push_back(n);
        }
    }
    bool all = true;
    for (int n : which) {
        Outcome o;
        try {
            o = criteria[static_cast<std::size_t>(n - 1)]();
        } catch (const std::exception& e) {
            o = {false, fmt::format("exception: {}", e.what())};
        }
        std::cout << fmt::format("criterion {}: {}: {}", n, o.pass ? "PASS" : "FAIL", o.detail) << std::endl;
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
