#include "plaquefsi/solid_solver.hpp"

#include <fmt/format.h>

#include <cmath>

namespace plaquefsi {

ElasticSolver::ElasticSolver(std::shared_ptr<const Space> displacement, std::shared_ptr<const Space> pressure,
                             const EnergyDensity<2>& energy, double lambda)
    : lambda_(lambda)
{
    if (!(lambda >= 0.0)) {
        throw InvalidArgument(fmt::format("ElasticSolver: lambda must be >= 0, got {}", lambda));
    }
    const Tensor4 C = energy.d2w_identity_matrix();
    auto clamped = displacement->boundary_dofs(FacetTag::Interface);
    if (clamped.empty()) {
        throw InvalidArgument("ElasticSolver: the interface Dirichlet portion is empty");
    }
    system_ = std::make_shared<SaddlePointSystem>(
        displacement, pressure, lambda, [&](int, int) { return C; }, std::move(clamped));
    pressure_lumped_mass_ = lumped_mass(*pressure);
}

Eigen::VectorXd ElasticSolver::load(const ElasticStepData& data) const
{
    const auto& sys = *system_;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(sys.size());
    Eigen::VectorXd ru = Eigen::VectorXd::Zero(sys.velocity_size());
    const Space& vs = *sys.velocity_space();
    add_vector_load(vs, data.body_force, 1.0, ru);
    add_flux_load(vs, data.flux, -1.0, ru);
    if (!data.outer_traction.empty()) {
        add_facet_vector_load(vs, data.outer_traction, 1.0, ru);
    }
    rhs.head(sys.velocity_size()) = ru;
    Eigen::VectorXd rp = Eigen::VectorXd::Zero(sys.pressure_size());
    add_scalar_load(*sys.pressure_space(), data.divergence, -1.0, rp);
    if (!data.growth_integral.empty() && data.growth_coefficient != 0.0) {
        add_scalar_load(*sys.pressure_space(), data.growth_integral, -data.growth_coefficient, rp);
    }
    rhs.segment(sys.velocity_size(), sys.pressure_size()) = rp;
    return rhs;
}

ElasticSolution ElasticSolver::solve(const ElasticStepData& data) const
{
    const auto& sys = *system_;
    const Eigen::VectorXd rhs = load(data);
    const Eigen::VectorXd x = sys.solve(rhs, data.boundary_displacement ? &*data.boundary_displacement : nullptr);
    ElasticSolution sol{sys.velocity(x), sys.pressure(x), Field()};
    // int_Gamma (sigma n_Gamma) . phi = loads - int sigma : grad(phi); n_Gamma is
    // the inward normal of the solid.
    const Eigen::VectorXd r = rhs - sys.matrix() * x;
    sol.interface_traction = lift_facet_dual(sys.velocity_space(), 2, FacetTag::Interface, r.head(sys.velocity_size()));
    return sol;
}

ElasticSolver::Residual ElasticSolver::residual(const Field& u, const Field& p, const ElasticStepData& data) const
{
    const auto& sys = *system_;
    const Eigen::VectorXd r = sys.matrix() * sys.pack(u, p) - load(data);
    Residual out;
    double acc = 0.0;
    for (int i : sys.free_indices()) {
        if (i < sys.velocity_size()) {
            acc += r[i] * r[i];
        }
    }
    out.equilibrium = std::sqrt(acc);
    const Eigen::VectorXd rp = r.segment(sys.velocity_size(), sys.pressure_size());
    out.constraint = std::sqrt((rp.array().square() / pressure_lumped_mass_.array()).sum());
    return out;
}

ElasticSolution solve_quasistationary(const ElasticSolver& solver, const ElasticStepData& data)
{
    if (solver.lambda() != 0.0) {
        throw InvalidArgument("solve_quasistationary: solver carries a resolvent shift");
    }
    return solver.solve(data);
}

ElasticSolution solve_resolvent(std::shared_ptr<const Space> displacement, std::shared_ptr<const Space> pressure,
                                const EnergyDensity<2>& energy, double lambda, const QpData<Vec2>& f)
{
    const ElasticSolver solver(std::move(displacement), std::move(pressure), energy, lambda);
    ElasticStepData data;
    data.body_force = f;
    return solver.solve(data);
}

SpectralEstimate estimate_spectral_bound(std::shared_ptr<const Space> displacement,
                                         std::shared_ptr<const Space> pressure, const EnergyDensity<2>& energy,
                                         double tol, int max_iter)
{
    const ElasticSolver solver(displacement, std::move(pressure), energy, 0.0);
    const auto& sys = solver.system();
    const int nu = sys.velocity_size();
    const SparseMatrix A = sys.matrix().topLeftCorner(nu, nu);
    const SparseMatrix& M = sys.velocity_mass();

    // Deterministic start vector, zero on the clamped interface.
    Eigen::VectorXd x(nu);
    for (int i = 0; i < nu; ++i) {
        x[i] = 1.0 + 0.5 * std::sin(0.7 * i + 0.3);
    }
    for (int d : sys.dirichlet_nodes()) {
        x[2 * d] = 0.0;
        x[2 * d + 1] = 0.0;
    }
    SpectralEstimate est;
    double lambda_old = 0.0;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(sys.size());
    for (int it = 1; it <= max_iter; ++it) {
        rhs.head(nu) = M * x;
        const Eigen::VectorXd y = sys.solve(rhs).head(nu);
        const double norm = std::sqrt(y.dot(M * y));
        x = y / norm;
        const double lambda = x.dot(A * x);
        est.iterations = it;
        if (it > 1 && std::abs(lambda - lambda_old) <= tol * std::abs(lambda)) {
            lambda_old = lambda;
            break;
        }
        lambda_old = lambda;
        if (it == max_iter) {
            throw SolverError(fmt::format("estimate_spectral_bound: no convergence after {} iterations", max_iter));
        }
    }
    est.omega_max = -lambda_old;
    est.eigenvector = Field(std::move(displacement), 2);
    est.eigenvector.values = x;
    est.rayleigh_quotient = x.dot(A * x) / x.dot(M * x);
    return est;
}

}  // namespace plaquefsi
