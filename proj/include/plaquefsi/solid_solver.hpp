#pragma once

#include "plaquefsi/materials.hpp"
#include "plaquefsi/saddle_point.hpp"

#include <memory>
#include <optional>

namespace plaquefsi {

/// Data of the quasi-stationary elastic problem at one time. Empty members
/// are zero.
struct ElasticStepData {
    QpData<Vec2> body_force;          // f
    QpData<Mat2> flux;                // divergence-form force div(K): adds -int K : grad(phi)
    QpData<double> divergence;        // g
    QpData<double> growth_integral;   // int_0^t c d tau at the quadrature points
    double growth_coefficient = 0.0;  // gamma beta / rho_s
    std::optional<Field> boundary_displacement;  // h1 on the interface (interface dofs read)
    FacetQpData<Vec2> outer_traction;            // h2 on the outer boundary
};

struct ElasticSolution {
    Field displacement;
    Field pressure;
    /// Weak traction of the total flux (D^2W(I) grad u - pi I + K) n on the
    /// interface, n pointing from fluid into solid.
    Field interface_traction;
};

/// Stokes-type elasticity on the solid subdomain,
///   lambda u - div(D^2W(I) grad u) + grad pi = f,
///   div u - c_g int_0^t c = g,
/// with u = h1 on the interface and (D^2W(I) grad u - pi I) n = h2 on the
/// outer boundary. lambda = 0 is the quasi-stationary problem.
class ElasticSolver {
public:
    ElasticSolver(std::shared_ptr<const Space> displacement, std::shared_ptr<const Space> pressure,
                  const EnergyDensity<2>& energy, double lambda = 0.0);

    [[nodiscard]] const SaddlePointSystem& system() const { return *system_; }
    [[nodiscard]] double lambda() const { return lambda_; }
    [[nodiscard]] const std::shared_ptr<const Space>& displacement_space() const { return system_->velocity_space(); }
    [[nodiscard]] const std::shared_ptr<const Space>& pressure_space() const { return system_->pressure_space(); }

    [[nodiscard]] ElasticSolution solve(const ElasticStepData& data) const;
    [[nodiscard]] Eigen::VectorXd load(const ElasticStepData& data) const;

    /// Euclidean norm of the equilibrium residual on non-constrained dofs and
    /// lumped L2 norm of the constraint residual.
    struct Residual {
        double equilibrium = 0.0;
        double constraint = 0.0;
    };
    [[nodiscard]] Residual residual(const Field& u, const Field& p, const ElasticStepData& data) const;

private:
    double lambda_;
    std::shared_ptr<SaddlePointSystem> system_;
    Eigen::VectorXd pressure_lumped_mass_;
};

/// Quasi-stationary solve at one time.
ElasticSolution solve_quasistationary(const ElasticSolver& solver, const ElasticStepData& data);

/// Resolvent problem with u = 0 on the interface and a traction-free outer
/// boundary. Requires lambda >= 0.
ElasticSolution solve_resolvent(std::shared_ptr<const Space> displacement, std::shared_ptr<const Space> pressure,
                                const EnergyDensity<2>& energy, double lambda, const QpData<Vec2>& f);

struct SpectralEstimate {
    double omega_max = 0.0;          // largest eigenvalue of -A on the constrained space
    double rayleigh_quotient = 0.0;  // recomputed from the eigenvector
    Field eigenvector;
    int iterations = 0;
};

/// Inverse iteration for the smallest eigenvalue of the interface-clamped,
/// divergence-free elastic operator (mass-weighted); returns its negative.
SpectralEstimate estimate_spectral_bound(std::shared_ptr<const Space> displacement,
                                         std::shared_ptr<const Space> pressure, const EnergyDensity<2>& energy,
                                         double tol = 1e-13, int max_iter = 2000);

}  // namespace plaquefsi
