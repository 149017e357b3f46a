#pragma once

#include "plaquefsi/assembly.hpp"
#include "plaquefsi/norms.hpp"

#include <Eigen/SparseLU>

#include <memory>
#include <optional>

namespace plaquefsi {

struct CellsParams {
    double Df = 1.0;     // fluid diffusivity
    double Ds = 0.5;     // solid diffusivity
    double zeta = 1.0;   // interface permeability
    double beta = 0.1;   // reaction rate
    double gamma = 0.1;  // growth coupling
    double rho_s = 1.0;  // solid density
    int dim = 2;         // spatial dimension in the growth divisor

    void validate() const;
};

/// Right-hand side data of one concentration step. Empty members are zero.
struct ConcentrationStepData {
    QpData<Vec2> flux_f;       // divergence-form source div(F~_f): adds -int F~ . grad(psi)
    QpData<Vec2> flux_s;
    QpData<double> source_f;   // plain volume sources
    QpData<double> source_s;
    /// Lagged interface exchange zeta [[c]] at the interface nodes, ordered as
    /// `TransmissionSolver::interface_nodes()`. Used only when the solver
    /// treats the jump explicitly.
    Eigen::VectorXd interface_flux;
    FacetQpData<double> outer_flux;  // D_s grad c_s . n on the outer boundary
};

/// Two-domain diffusion with the permeability transmission condition,
///   d_t c_f - D_f lap c_f = F_f,  d_t c_s - D_s lap c_s = F_s,
///   D grad c . n = zeta (c_s - c_f) on the interface (n fluid -> solid),
/// no flux on WALL. P1 elements with lumped mass and implicit Euler; the
/// interface node values are duplicated. With `implicit_jump` the exchange
/// term is part of the matrix, otherwise it is read from the step data.
class TransmissionSolver {
public:
    TransmissionSolver(std::shared_ptr<const Space> fluid, std::shared_ptr<const Space> solid, const CellsParams& params,
                       double dt, bool implicit_jump);

    [[nodiscard]] TwoSidedField step(const TwoSidedField& prev, const ConcentrationStepData& data) const;

    /// Interface node pairs (fluid dof, solid dof) with lumped facet weights.
    struct InterfaceNode {
        int fluid = -1;
        int solid = -1;
        double weight = 0.0;
    };
    [[nodiscard]] const std::vector<InterfaceNode>& interface_nodes() const { return nodes_; }

    /// zeta (c_s - c_f) at the interface nodes.
    [[nodiscard]] Eigen::VectorXd interface_exchange(const TwoSidedField& c) const;

    /// Lumped mass of each side (total mass = sum of mass times nodal values).
    [[nodiscard]] const Eigen::VectorXd& fluid_mass() const { return mass_f_; }
    [[nodiscard]] const Eigen::VectorXd& solid_mass() const { return mass_s_; }

    [[nodiscard]] const std::shared_ptr<const Space>& fluid_space() const { return fluid_; }
    [[nodiscard]] const std::shared_ptr<const Space>& solid_space() const { return solid_; }
    [[nodiscard]] const CellsParams& params() const { return params_; }
    [[nodiscard]] double dt() const { return dt_; }
    [[nodiscard]] bool implicit_jump() const { return implicit_jump_; }

    /// Load vector of a step (fluid block followed by solid block).
    [[nodiscard]] Eigen::VectorXd load(const TwoSidedField& prev, const ConcentrationStepData& data) const;
    /// System matrix (fluid block followed by solid block).
    [[nodiscard]] const SparseMatrix& matrix() const { return matrix_; }

private:
    std::shared_ptr<const Space> fluid_;
    std::shared_ptr<const Space> solid_;
    CellsParams params_;
    double dt_;
    bool implicit_jump_;
    Eigen::VectorXd mass_f_;
    Eigen::VectorXd mass_s_;
    std::vector<InterfaceNode> nodes_;
    SparseMatrix matrix_;
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_;
};

/// Total mass of a two-sided field under the lumped mass.
double total_mass(const TransmissionSolver& solver, const TwoSidedField& c);

/// Foam cells c* and growth metric g at the solid P1 nodes.
struct OdeState {
    Field foam;
    Field growth;
};

/// Pointwise implicit Euler for
///   d_t c* = beta c_s (1 - gamma c* / rho_s),  d_t g = gamma beta c_s g / (d rho_s),
/// with c_s taken at t_{k+1}. Closed form per node:
///   c*_{k+1} = (c*_k + dt beta c) / (1 + dt beta gamma c / rho_s),
///   g_{k+1}  = g_k / (1 - dt gamma beta c / (d rho_s)).
/// Throws InvariantViolation when g would fall below 1/2 or the update is singular.
OdeState step_odes(const OdeState& prev, const Field& c_solid, const CellsParams& params, double dt);

/// The linearized ODE data about (c*^0, g^0):
///   F4 = -(gamma beta / rho_s) c (c* - c*^0),  F5 = (gamma beta / (d rho_s)) c (g - g^0).
/// With these, d_t c* + beta (gamma c*^0 / rho_s - 1) c = F4 and
/// d_t g - (gamma beta g^0 / (d rho_s)) c = F5 reproduce the full ODEs.
struct OdeLinearization {
    Field F4;
    Field F5;
};
OdeLinearization ode_linearization(const OdeState& state, const OdeState& initial, const Field& c_solid,
                                   const CellsParams& params);

struct PositivityReport {
    double min_value = 0.0;
    int dof = -1;
    Vec2 location = Vec2::Zero();
    double time = 0.0;
    int step = -1;
    Subdomain side = Subdomain::Fluid;
};

PositivityReport positivity_report(const Trajectory<Field>& traj);
PositivityReport positivity_report(const Trajectory<TwoSidedField>& traj);

}  // namespace plaquefsi
