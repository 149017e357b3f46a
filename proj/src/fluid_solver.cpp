#include "plaquefsi/fluid_solver.hpp"

#include <fmt/format.h>

#include <cmath>

namespace plaquefsi {

StokesSolver::StokesSolver(std::shared_ptr<const Space> velocity, std::shared_ptr<const Space> pressure, double rho,
                           double nu, double dt)
    : rho_(rho), nu_(nu), dt_(dt)
{
    if (!(rho > 0.0) || !(nu > 0.0) || !(dt > 0.0)) {
        throw InvalidArgument(fmt::format("StokesSolver: need rho, nu, dt > 0 (got {}, {}, {})", rho, nu, dt));
    }
    const Tensor4 C = symmetric_gradient_tensor(nu);
    auto wall = velocity->boundary_dofs(FacetTag::Wall);
    system_ = std::make_shared<SaddlePointSystem>(
        velocity, pressure, rho / dt, [&](int, int) { return C; }, std::move(wall));
    pressure_lumped_mass_ = lumped_mass(*pressure);
}

Eigen::VectorXd StokesSolver::load(const Field& prev, const StokesStepData& data, bool with_traction) const
{
    const auto& sys = *system_;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(sys.size());
    Eigen::VectorXd ru = (rho_ / dt_) * (sys.velocity_mass() * prev.values);
    const Space& vs = *sys.velocity_space();
    add_vector_load(vs, data.body_force, 1.0, ru);
    add_flux_load(vs, data.flux, -1.0, ru);
    if (with_traction && !data.traction.empty()) {
        add_facet_vector_load(vs, data.traction, 1.0, ru);
    }
    if (data.load.size() > 0) {
        ru += data.load;
    }
    rhs.head(sys.velocity_size()) = ru;
    Eigen::VectorXd rp = Eigen::VectorXd::Zero(sys.pressure_size());
    add_scalar_load(*sys.pressure_space(), data.divergence, -1.0, rp);
    rhs.segment(sys.velocity_size(), sys.pressure_size()) = rp;
    return rhs;
}

StokesStep StokesSolver::solve_step(const Field& prev, const StokesStepData& data) const
{
    const Eigen::VectorXd x = system_->solve(load(prev, data));
    return {system_->velocity(x), system_->pressure(x)};
}

Field StokesSolver::traction_trace(const Field& prev, const StokesStep& step, const StokesStepData& data) const
{
    const auto& sys = *system_;
    const Eigen::VectorXd x = sys.pack(step.velocity, step.pressure);
    const Eigen::VectorXd r = sys.matrix() * x - load(prev, data, false);
    return lift_facet_dual(sys.velocity_space(), 2, FacetTag::Interface, r.head(sys.velocity_size()));
}

double StokesSolver::divergence_residual(const Field& velocity, const StokesStepData& data) const
{
    const auto& sys = *system_;
    const Eigen::VectorXd x = sys.pack(velocity, Field(sys.pressure_space(), 1));
    Eigen::VectorXd r = (sys.matrix() * x).segment(sys.velocity_size(), sys.pressure_size());
    // r = -int psi div u; add int psi g.
    add_scalar_load(*sys.pressure_space(), data.divergence, 1.0, r);
    return std::sqrt((r.array().square() / pressure_lumped_mass_.array()).sum());
}

double StokesSolver::momentum_residual(const Field& prev, const StokesStep& step, const StokesStepData& data) const
{
    const auto& sys = *system_;
    const Eigen::VectorXd r = sys.matrix() * sys.pack(step.velocity, step.pressure) - load(prev, data);
    double acc = 0.0;
    for (int i : sys.free_indices()) {
        if (i < sys.velocity_size()) {
            acc += r[i] * r[i];
        }
    }
    return std::sqrt(acc);
}

StokesSolution solve_stokes(const StokesSolver& solver, const Field& initial, const std::vector<double>& times,
                            const std::function<StokesStepData(int, double)>& data)
{
    if (times.size() < 2) {
        throw InvalidArgument("solve_stokes: need at least one time step");
    }
    StokesSolution sol;
    sol.velocity.times = times;
    sol.pressure.times = times;
    sol.velocity.snapshots.push_back(initial);
    sol.pressure.snapshots.emplace_back(solver.pressure_space(), 1);
    sol.divergence_residual.push_back(0.0);
    for (std::size_t k = 1; k < times.size(); ++k) {
        const StokesStepData d = data(static_cast<int>(k), times[k]);
        StokesStep s = solver.solve_step(sol.velocity.snapshots.back(), d);
        sol.divergence_residual.push_back(solver.divergence_residual(s.velocity, d));
        sol.velocity.snapshots.push_back(std::move(s.velocity));
        sol.pressure.snapshots.push_back(std::move(s.pressure));
    }
    return sol;
}

}  // namespace plaquefsi
