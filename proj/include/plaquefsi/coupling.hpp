#pragma once

#include "plaquefsi/cells_solver.hpp"
#include "plaquefsi/fluid_solver.hpp"
#include "plaquefsi/materials.hpp"
#include "plaquefsi/solid_solver.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace plaquefsi {

/// Mesh and the six finite element spaces of the coupled problem.
struct Discretization {
    double L = 1.0;
    double Hf = 0.5;
    double Hs = 0.5;
    int n = 32;
    std::shared_ptr<const Mesh> mesh;
    std::shared_ptr<const Space> vf;  // P2 fluid velocity (and fluid displacement)
    std::shared_ptr<const Space> pf;  // P1 fluid pressure and concentration
    std::shared_ptr<const Space> us;  // P2 solid displacement
    std::shared_ptr<const Space> ps;  // P1 solid pressure, concentration, foam cells, growth

    static Discretization build(double L, double Hf, double Hs, int n);
};

struct ModelParams {
    double rho_f = 1.0;
    double nu_f = 1.0;
    double mu = 1.0;
    EnergyKind energy = EnergyKind::SquaredGreenStrain;
    CellsParams cells;  // carries rho_s and the growth dimension

    void validate() const;
};

/// Linear solvers for one time step size, factorized once.
class CoupledProblem {
public:
    CoupledProblem(Discretization disc, const ModelParams& params, double dt);

    [[nodiscard]] const Discretization& disc() const { return disc_; }
    [[nodiscard]] const ModelParams& params() const { return params_; }
    [[nodiscard]] const EnergyDensity<2>& energy() const { return energy_; }
    [[nodiscard]] double dt() const { return dt_; }
    [[nodiscard]] const StokesSolver& fluid() const { return fluid_; }
    [[nodiscard]] const ElasticSolver& solid() const { return solid_; }
    [[nodiscard]] const TransmissionSolver& cells() const { return cells_; }

    /// Pairs (fluid P2 dof, solid P2 dof) of the interface nodes.
    [[nodiscard]] const std::vector<std::pair<int, int>>& interface_pairs() const { return interface_pairs_; }

private:
    Discretization disc_;
    ModelParams params_;
    EnergyDensity<2> energy_;
    double dt_;
    StokesSolver fluid_;
    ElasticSolver solid_;
    TransmissionSolver cells_;
    std::vector<std::pair<int, int>> interface_pairs_;
};

/// Trajectories of all unknowns on one shared time grid.
struct StateW {
    Trajectory<Field> vf;
    Trajectory<Field> us;
    Trajectory<Field> pf;
    Trajectory<Field> ps;
    Trajectory<TwoSidedField> c;
    Trajectory<Field> cstar;
    Trajectory<Field> g;

    [[nodiscard]] const std::vector<double>& times() const { return vf.times; }
};

/// User-supplied initial data before the initial solid equilibrium is solved.
struct RawInitialData {
    Field vf0;             // on disc.vf
    TwoSidedField c0;      // on disc.pf / disc.ps
    Field cstar0;          // on disc.ps
    Field g0;              // on disc.ps
    Field pf0;             // on disc.pf; only the interface trace is read
    double kappa = 1.0;    // smallness threshold
};

struct InitialData {
    Field vf0;
    TwoSidedField c0;
    Field cstar0;
    Field g0;
    Field us0;
    Field ps0;
    Field pf0;  // interface trace extended constant in y
    double smallness = 0.0;
    double kappa = 1.0;
    int newton_iterations = 0;
    std::vector<std::string> warnings;
};

struct PrepareOptions {
    double compatibility_tol = 1e-6;
    double newton_tol = 1e-12;
    int newton_max_iter = 30;
    double q = 6.0;
};

/// Checks the compatibility conditions of the initial data and solves the
/// nonlinear pure-traction solid problem
///   -div(DW(I + grad u)) + grad pi = 0, div u = 0,
///   (DW - pi I) n = (-pi_f I + nu (grad v + grad v^T)) n on the interface,
/// traction-free on the outer boundary, by Newton's method with the mean
/// displacement fixed.
InitialData prepare_initial(const Discretization& disc, const ModelParams& params, const RawInitialData& raw,
                            const PrepareOptions& opts = {});

/// Zero state and zero data with unit growth metric.
RawInitialData zero_initial(const Discretization& disc);

/// Nonlinear right-hand side terms at one time node.
struct RhsTerms {
    QpData<Mat2> Kf;            // fluid flux correction (disc.vf quadrature)
    QpData<double> Gf;          // fluid divergence data
    Eigen::VectorXd Hf;         // interface load on fluid velocity dofs: -int Phi_s : grad(phi_ext)
    QpData<Mat2> Ks;            // solid flux correction (disc.us quadrature)
    QpData<double> Gs;          // solid divergence data
    QpData<double> growth;      // int_0^t c_s at the solid quadrature points
    Field Hs1;                  // interface displacement int_0^t v_f (interface dofs of disc.us)
    QpData<Vec2> Ftf;           // diffusion flux corrections
    QpData<Vec2> Fts;
    QpData<double> F1s;         // solid concentration source
    Eigen::VectorXd F2;         // zeta [[c]] at the interface nodes
    Field F4;
    Field F5;
};

struct RhsBundle {
    std::vector<double> times;
    std::vector<RhsTerms> terms;  // one per time node
};

/// Evaluate every nonlinear term at all time nodes of `w`.
RhsBundle assemble_rhs(const CoupledProblem& problem, const StateW& w, const InitialData& w0);

/// Largest absolute entry over all terms of a bundle.
double max_abs(const RhsBundle& bundle);

struct PicardOptions {
    double final_time = 0.02;
    int windows = 1;
    double tol = 1e-8;
    int max_iter = 50;
    double q = 6.0;
};

enum class PicardStatus { Converged, NoContraction, MaxIterations };
const char* to_string(PicardStatus s);

struct IterateRecord {
    int window = 0;
    int k = 0;
    std::map<std::string, double> diff;  // per component
    double norm = 0.0;                   // max over components
    double q = 0.0;                      // ratio to the previous norm (0 for the first)
};

struct PicardResult {
    StateW state;
    std::vector<IterateRecord> iterates;
    PicardStatus status = PicardStatus::Converged;
    double max_q = 0.0;
    double final_norm = 0.0;
    std::string message;
};

/// Component names in the order used by the stopping test.
const std::vector<std::string>& component_names();

/// Difference norms ||a - b|| per component (anisotropic, spatial order 1,
/// temporal order 1/2 - 1/(2q)).
std::map<std::string, double> state_difference(const StateW& a, const StateW& b, double q);

/// Constant-in-time trajectory of the initial data.
StateW constant_state(const CoupledProblem& problem, const InitialData& w0, const std::vector<double>& times);

/// One application of the iteration map w -> L^{-1} N(w, w0).
StateW picard_map(const CoupledProblem& problem, const StateW& w, const InitialData& w0);

/// Global-in-time fixed-point iteration, optionally over sequential windows.
PicardResult picard_solve(const CoupledProblem& problem, const InitialData& w0, const PicardOptions& opts);

/// Residuals of the original nonlinear system at a state (maximum over steps).
struct ResidualReport {
    std::map<std::string, double> values;
    [[nodiscard]] double max_value() const;
};
ResidualReport converged_residuals(const CoupledProblem& problem, const StateW& w, const InitialData& w0);

/// Per-step diagnostics of a run.
struct StepDiagnostics {
    double t = 0.0;
    double piola_residual = 0.0;
    double min_g = 0.0;
    double min_c = 0.0;
    double min_cstar = 0.0;
    double max_F_minus_I = 0.0;
    double div_residual_f = 0.0;
    double div_residual_s = 0.0;
    double mass = 0.0;
};
std::vector<StepDiagnostics> step_diagnostics(const CoupledProblem& problem, const StateW& w, const InitialData& w0);

}  // namespace plaquefsi
