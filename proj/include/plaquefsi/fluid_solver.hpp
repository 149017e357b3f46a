#pragma once

#include "plaquefsi/norms.hpp"
#include "plaquefsi/saddle_point.hpp"

#include <functional>
#include <memory>

namespace plaquefsi {

/// Data of one implicit-Euler Stokes step at t_{k+1}. Empty members are zero.
struct StokesStepData {
    QpData<Vec2> body_force;    // f
    QpData<Mat2> flux;          // divergence-form force div(K): adds -int K : grad(phi)
    QpData<double> divergence;  // g in div u = g
    FacetQpData<Vec2> traction; // h on the interface
    Eigen::VectorXd load;       // extra dual vector on the velocity dofs
};

struct StokesStep {
    Field velocity;
    Field pressure;
};

/// Nonstationary Stokes problem on the fluid subdomain:
///   rho d_t u - div(-pi I + nu (grad u + grad u^T)) = f,  div u = g,
/// no-slip on WALL, traction h on the interface, implicit Euler in time.
class StokesSolver {
public:
    StokesSolver(std::shared_ptr<const Space> velocity, std::shared_ptr<const Space> pressure, double rho, double nu,
                 double dt);

    [[nodiscard]] double rho() const { return rho_; }
    [[nodiscard]] double nu() const { return nu_; }
    [[nodiscard]] double dt() const { return dt_; }
    [[nodiscard]] const SaddlePointSystem& system() const { return *system_; }
    [[nodiscard]] const std::shared_ptr<const Space>& velocity_space() const { return system_->velocity_space(); }
    [[nodiscard]] const std::shared_ptr<const Space>& pressure_space() const { return system_->pressure_space(); }

    [[nodiscard]] StokesStep solve_step(const Field& prev, const StokesStepData& data) const;

    /// Right-hand side of the step (velocity, pressure blocks).
    [[nodiscard]] Eigen::VectorXd load(const Field& prev, const StokesStepData& data, bool with_traction = true) const;

    /// Weak interface traction (-pi I + nu (grad u + grad u^T)) n by residual
    /// lifting: the momentum residual without the traction data, restricted to
    /// interface dofs and solved against the interface mass matrix.
    [[nodiscard]] Field traction_trace(const Field& prev, const StokesStep& step, const StokesStepData& data) const;

    /// Discrete L2 norm of the lumped P1 projection of div u - g.
    [[nodiscard]] double divergence_residual(const Field& velocity, const StokesStepData& data) const;

    /// Euclidean norm of the momentum residual on the non-constrained dofs.
    [[nodiscard]] double momentum_residual(const Field& prev, const StokesStep& step, const StokesStepData& data) const;

private:
    double rho_;
    double nu_;
    double dt_;
    std::shared_ptr<SaddlePointSystem> system_;
    Eigen::VectorXd pressure_lumped_mass_;
};

struct StokesSolution {
    Trajectory<Field> velocity;
    Trajectory<Field> pressure;  // snapshot 0 is zero (not determined by the scheme)
    std::vector<double> divergence_residual;
};

/// Run all steps of a time grid; `data(k, t)` supplies the data at t_k, k >= 1.
StokesSolution solve_stokes(const StokesSolver& solver, const Field& initial, const std::vector<double>& times,
                            const std::function<StokesStepData(int, double)>& data);

}  // namespace plaquefsi
