#include "plaquefsi/studies.hpp"

#include "plaquefsi/kinematics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>

namespace plaquefsi {

namespace {

constexpr double kPi = std::numbers::pi;

std::string num(double v) { return fmt::format("{:.17g}", v); }

// Divergence-free field from the stream function a sin(kx) Y^2 with
// Y = y + shift: u = (2 a sin(kx) Y, -a k cos(kx) Y^2), pressure
// a cos(kx) (y + 1). Used for both the fluid and the solid problems.
struct StreamSolution {
    double k = 2.0 * kPi;
    double shift = 0.0;

    [[nodiscard]] Vec2 u(const Vec2& x, double a) const
    {
        const double Y = x.y() + shift;
        return {2.0 * a * std::sin(k * x.x()) * Y, -a * k * std::cos(k * x.x()) * Y * Y};
    }
    [[nodiscard]] double p(const Vec2& x, double a) const { return a * std::cos(k * x.x()) * (x.y() + 1.0); }
    [[nodiscard]] Vec2 laplacian(const Vec2& x, double a) const
    {
        const double Y = x.y() + shift;
        const double s = std::sin(k * x.x());
        const double c = std::cos(k * x.x());
        return {-2.0 * a * k * k * s * Y, a * k * k * k * c * Y * Y - 2.0 * a * k * c};
    }
    [[nodiscard]] Vec2 grad_p(const Vec2& x, double a) const
    {
        return {-a * k * std::sin(k * x.x()) * (x.y() + 1.0), a * std::cos(k * x.x())};
    }
    /// (-p I + m (grad u + grad u^T)) (0, 1).
    [[nodiscard]] Vec2 traction_up(const Vec2& x, double a, double m) const
    {
        const double Y = x.y() + shift;
        const double s = std::sin(k * x.x());
        const double c = std::cos(k * x.x());
        const double sxy = m * (a * k * k * s * Y * Y + 2.0 * a * s);
        const double syy = -p(x, a) + 2.0 * m * (-2.0 * a * k * c * Y);
        return {sxy, syy};
    }
};

double log2_ratio(double a, double b) { return std::log2(a / b); }

}  // namespace

void compute_eoc(std::vector<ConvergenceRow>& rows)
{
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].eoc = i == 0 ? 0.0 : log2_ratio(rows[i - 1].error, rows[i].error);
    }
}

double ConvergenceStudy::mean_eoc() const
{
    if (rows.size() < 2) {
        return 0.0;
    }
    double s = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        s += rows[i].eoc;
    }
    return s / static_cast<double>(rows.size() - 1);
}

double ConvergenceStudy::min_eoc() const
{
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < rows.size(); ++i) {
        m = std::min(m, rows[i].eoc);
    }
    return rows.size() < 2 ? 0.0 : m;
}

namespace {

double fluid_mms_error(int n, double dt, double final_time, bool exponential, double rho, double nu)
{
    const double Hf = 0.5;
    auto mesh = std::make_shared<const Mesh>(build_strip_mesh(1.0, Hf, 0.5, n));
    auto vs = std::make_shared<const Space>(mesh, 2, Subdomain::Fluid);
    auto ps = std::make_shared<const Space>(mesh, 1, Subdomain::Fluid);
    const StreamSolution ex{2.0 * kPi, Hf};
    auto amp = [&](double t) { return exponential ? std::exp(t) : 1.0 + t; };
    auto damp = [&](double t) { return exponential ? std::exp(t) : 1.0; };

    const StokesSolver solver(vs, ps, rho, nu, dt);
    const int steps = static_cast<int>(std::lround(final_time / dt));
    const auto times = uniform_time_grid(final_time, steps);
    const QpData<Vec2> xq = qp_points(*vs);
    const FacetQpData<Vec2> xf = facet_points(*vs, FacetTag::Interface);
    const Field u0 = interpolate_vector(vs, [&](const Vec2& x) { return ex.u(x, amp(0.0)); });
    const StokesSolution sol = solve_stokes(solver, u0, times, [&](int, double t) {
        StokesStepData d;
        d.body_force = xq;
        for (auto& x : d.body_force.data) {
            const Vec2 p = x;
            x = rho * ex.u(p, damp(t)) + ex.grad_p(p, amp(t)) - nu * ex.laplacian(p, amp(t));
        }
        d.traction = xf;
        for (auto& x : d.traction.data) {
            x = ex.traction_up(x, amp(t), nu);
        }
        return d;
    });
    const double T = times.back();
    return l2_error(sol.velocity.snapshots.back(), [&](const Vec2& x) {
        const Vec2 v = ex.u(x, amp(T));
        return Eigen::VectorXd(v);
    });
}

}  // namespace

ConvergenceStudy fluid_space_convergence(const std::vector<int>& ns, double rho, double nu)
{
    ConvergenceStudy s{"fluid_velocity_space", {}};
    for (int n : ns) {
        s.rows.push_back({n, 0.05, fluid_mms_error(n, 0.05, 0.1, false, rho, nu), 0.0});
    }
    compute_eoc(s.rows);
    return s;
}

ConvergenceStudy fluid_time_convergence(int n, const std::vector<double>& dts, double final_time, double rho,
                                        double nu)
{
    ConvergenceStudy s{"fluid_velocity_time", {}};
    for (double dt : dts) {
        s.rows.push_back({n, dt, fluid_mms_error(n, dt, final_time, true, rho, nu), 0.0});
    }
    compute_eoc(s.rows);
    return s;
}

ConvergenceStudy solid_space_convergence(const std::vector<int>& ns, double mu)
{
    ConvergenceStudy s{"solid_displacement_space", {}};
    const double Hs = 0.5;
    const StreamSolution ex{2.0 * kPi, 1.0};
    const EnergyDensity<2> energy(mu);
    for (int n : ns) {
        auto mesh = std::make_shared<const Mesh>(build_strip_mesh(1.0, 0.5, Hs, n));
        auto us = std::make_shared<const Space>(mesh, 2, Subdomain::Solid);
        auto ps = std::make_shared<const Space>(mesh, 1, Subdomain::Solid);
        const ElasticSolver solver(us, ps, energy, 0.0);
        ElasticStepData d;
        d.body_force = qp_points(*us);
        for (auto& x : d.body_force.data) {
            const Vec2 p = x;
            x = ex.grad_p(p, 1.0) - mu * ex.laplacian(p, 1.0);
        }
        d.outer_traction = facet_points(*us, FacetTag::Outer);
        for (auto& x : d.outer_traction.data) {
            x = ex.traction_up(x, 1.0, mu);
        }
        d.boundary_displacement = interpolate_vector(us, [&](const Vec2& x) { return ex.u(x, 1.0); });
        const ElasticSolution sol = solve_quasistationary(solver, d);
        const double err = l2_error(sol.displacement, [&](const Vec2& x) {
            const Vec2 v = ex.u(x, 1.0);
            return Eigen::VectorXd(v);
        });
        s.rows.push_back({n, 0.0, err, 0.0});
    }
    compute_eoc(s.rows);
    return s;
}

ConvergenceStudy piola_convergence(const std::vector<int>& ns)
{
    ConvergenceStudy s{"piola_identity", {}};
    for (int n : ns) {
        auto mesh = std::make_shared<const Mesh>(build_strip_mesh(1.0, 0.5, 0.5, n));
        auto us = std::make_shared<const Space>(mesh, 2, Subdomain::Solid);
        const Field u = interpolate_vector(us, [](const Vec2& x) {
            return Vec2(0.05 * std::sin(2.0 * kPi * x.x()) * std::cos(kPi * x.y()),
                        0.05 * std::cos(2.0 * kPi * x.x()) * std::sin(kPi * x.y()));
        });
        s.rows.push_back({n, 0.0, piola_identity_residual(u, 2.0), 0.0});
    }
    compute_eoc(s.rows);
    return s;
}

GrowthOdeStudy growth_ode_study(const CellsParams& params, double c_bar, double g0, double final_time,
                                const std::vector<double>& dts)
{
    params.validate();
    if (dts.size() != 3 || !(dts[1] * 2.0 == dts[0]) || !(dts[2] * 2.0 == dts[1])) {
        throw InvalidArgument("growth_ode_study: expects three time steps halving exactly");
    }
    auto mesh = std::make_shared<const Mesh>(build_strip_mesh(1.0, 0.5, 0.5, 4));
    auto ps = std::make_shared<const Space>(mesh, 1, Subdomain::Solid);
    GrowthOdeStudy s;
    s.dts = dts;
    s.exact = g0 * std::exp(params.gamma * params.beta * c_bar * final_time / (params.dim * params.rho_s));
    Field c(ps, 1);
    c.values.setConstant(c_bar);
    for (double dt : dts) {
        OdeState st{Field(ps, 1), Field(ps, 1)};
        st.growth.values.setConstant(g0);
        const int steps = static_cast<int>(std::lround(final_time / dt));
        for (int k = 0; k < steps; ++k) {
            st = step_odes(st, c, params, dt);
        }
        const double g = st.growth.values.mean();
        s.values.push_back(g);
        s.errors.push_back(std::abs(g - s.exact));
    }
    // Implicit Euler error expands in powers of dt.
    const double r1 = 2.0 * s.values[1] - s.values[0];
    const double r2 = 2.0 * s.values[2] - s.values[1];
    s.richardson = (4.0 * r2 - r1) / 3.0;
    s.richardson_error = std::abs(s.richardson - s.exact);
    return s;
}

std::vector<EigenRow> eigen_study(int n, const std::vector<double>& mus, double L, double Hs)
{
    auto mesh = std::make_shared<const Mesh>(build_strip_mesh(L, 0.5, Hs, n));
    auto us = std::make_shared<const Space>(mesh, 2, Subdomain::Solid);
    auto ps = std::make_shared<const Space>(mesh, 1, Subdomain::Solid);
    std::vector<EigenRow> rows;
    for (double mu : mus) {
        const SpectralEstimate e = estimate_spectral_bound(us, ps, EnergyDensity<2>(mu));
        rows.push_back({mu, e.omega_max, e.rayleigh_quotient, e.iterations});
    }
    return rows;
}

namespace {

SweepRow sweep_point(const CoupledProblem& problem, const InitialData& w0, const RunConfig& cfg, double parameter,
                     std::ostream* log)
{
    PicardOptions o;
    o.final_time = cfg.time.T;
    o.windows = cfg.time.windows;
    o.tol = cfg.picard.tol;
    o.max_iter = cfg.picard.max_iter;
    o.q = cfg.picard.q;
    const PicardResult r = picard_solve(problem, w0, o);
    SweepRow row;
    row.parameter = parameter;
    row.status = r.status;
    row.iterations = static_cast<int>(r.iterates.size());
    row.max_q = r.max_q;
    row.q1 = r.iterates.size() > 1 ? r.iterates[1].q : 0.0;
    row.final_norm = r.final_norm;
    row.smallness = w0.smallness;
    if (log != nullptr) {
        *log << fmt::format("  parameter {:g}: {} after {} iterations, max q {:.4f}, q1 {:.4f}\n", parameter,
                            to_string(r.status), row.iterations, row.max_q, row.q1);
    }
    return row;
}

}  // namespace

std::vector<SweepRow> t_sweep(const RunConfig& base, const std::vector<double>& final_times, std::ostream* log)
{
    base.validate();
    const Discretization disc = make_discretization(base);
    const ModelParams params = base.model_params();
    PrepareOptions prep;
    prep.q = base.picard.q;
    const InitialData w0 = prepare_initial(disc, params, make_raw_initial(base, disc), prep);
    const CoupledProblem problem(disc, params, base.time.dt);
    std::vector<SweepRow> rows;
    for (double T : final_times) {
        RunConfig cfg = base;
        cfg.time.T = T;
        cfg.validate();
        rows.push_back(sweep_point(problem, w0, cfg, T, log));
    }
    return rows;
}

std::vector<SweepRow> kappa_sweep(const RunConfig& base, const std::vector<double>& scales, std::ostream* log)
{
    base.validate();
    const Discretization disc = make_discretization(base);
    const ModelParams params = base.model_params();
    const CoupledProblem problem(disc, params, base.time.dt);
    PrepareOptions prep;
    prep.q = base.picard.q;
    std::vector<SweepRow> rows;
    for (double s : scales) {
        RunConfig cfg = base;
        cfg.initial.traction = base.initial.traction * s;
        const InitialData w0 = prepare_initial(disc, params, make_raw_initial(cfg, disc), prep);
        rows.push_back(sweep_point(problem, w0, cfg, s, log));
    }
    return rows;
}

bool nondecreasing(const std::vector<double>& v)
{
    return std::is_sorted(v.begin(), v.end());
}

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceStudy>& studies)
{
    os << "# plaquefsi convergence v1\n"
          "# study: experiment name; n: cells per unit length; dt: time step (0 for stationary problems)\n"
          "# error: discrete L2 error (Piola: L2 norm of the identity defect); eoc: log2 of the error ratio to\n"
          "# the previous row (0 on the first row); mean_eoc: mean eoc of the study\n";
    os << "study,n,dt,error,eoc,mean_eoc\n";
    for (const auto& s : studies) {
        for (const auto& r : s.rows) {
            os << s.name << ',' << r.n << ',' << num(r.dt) << ',' << num(r.error) << ',' << num(r.eoc) << ','
               << num(s.mean_eoc()) << '\n';
        }
    }
}

void write_growth_csv(std::ostream& os, const GrowthOdeStudy& s)
{
    os << "# plaquefsi growth-ode v1\n"
          "# dt: time step; g: implicit Euler growth metric at the final time; error: |g - exact|\n"
          "# the last row (dt = 0) holds the Richardson extrapolation and its error\n";
    os << "dt,g,error\n";
    for (std::size_t i = 0; i < s.dts.size(); ++i) {
        os << num(s.dts[i]) << ',' << num(s.values[i]) << ',' << num(s.errors[i]) << '\n';
    }
    os << "0," << num(s.richardson) << ',' << num(s.richardson_error) << '\n';
}

void write_eigen_csv(std::ostream& os, const std::vector<EigenRow>& rows)
{
    os << "# plaquefsi eigen v1\n"
          "# mu: shear modulus; omega_max: largest eigenvalue of the clamped, divergence-free solid operator\n"
          "# (mass weighted); rayleigh: Rayleigh quotient of the eigenvector; iterations: inverse iterations\n";
    os << "mu,omega_max,rayleigh,iterations\n";
    for (const auto& r : rows) {
        os << num(r.mu) << ',' << num(r.omega_max) << ',' << num(r.rayleigh_quotient) << ',' << r.iterations
           << '\n';
    }
}

void write_sweep_csv(std::ostream& os, const char* parameter, const std::vector<SweepRow>& rows)
{
    os << "# plaquefsi sweep v1\n"
       << "# " << parameter
       << ": swept parameter; status: Picard outcome; iterations: Picard iterates\n"
          "# max_q: largest contraction ratio; q1: first contraction ratio; final_norm: last difference norm\n"
          "# smallness: measured initial solid strain/pressure size\n";
    os << parameter << ",status,iterations,max_q,q1,final_norm,smallness\n";
    for (const auto& r : rows) {
        os << num(r.parameter) << ',' << to_string(r.status) << ',' << r.iterations << ',' << num(r.max_q) << ','
           << num(r.q1) << ',' << num(r.final_norm) << ',' << num(r.smallness) << '\n';
    }
}

}  // namespace plaquefsi
