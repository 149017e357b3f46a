#include "plaquefsi/cells_solver.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace plaquefsi {

void CellsParams::validate() const
{
    if (!(Df > 0.0) || !(Ds > 0.0)) {
        throw InvalidArgument(fmt::format("CellsParams: diffusivities must be positive (Df={}, Ds={})", Df, Ds));
    }
    if (!(zeta >= 0.0) || !(beta >= 0.0)) {
        throw InvalidArgument(fmt::format("CellsParams: zeta and beta must be >= 0 (zeta={}, beta={})", zeta, beta));
    }
    if (!(gamma > 0.0) || !(rho_s > 0.0)) {
        throw InvalidArgument(fmt::format("CellsParams: gamma and rho_s must be positive (gamma={}, rho_s={})", gamma,
                                          rho_s));
    }
    if (dim < 2 || dim > 3) {
        throw InvalidArgument(fmt::format("CellsParams: dim must be 2 or 3, got {}", dim));
    }
}

TransmissionSolver::TransmissionSolver(std::shared_ptr<const Space> fluid, std::shared_ptr<const Space> solid,
                                       const CellsParams& params, double dt, bool implicit_jump)
    : fluid_(std::move(fluid)), solid_(std::move(solid)), params_(params), dt_(dt), implicit_jump_(implicit_jump)
{
    params_.validate();
    if (fluid_->degree() != 1 || solid_->degree() != 1) {
        throw InvalidArgument("TransmissionSolver: concentrations use degree-1 spaces");
    }
    if (!(dt > 0.0)) {
        throw InvalidArgument(fmt::format("TransmissionSolver: dt must be positive, got {}", dt));
    }
    mass_f_ = lumped_mass(*fluid_);
    mass_s_ = lumped_mass(*solid_);
    const Eigen::VectorXd wf = lumped_facet_mass(*fluid_, FacetTag::Interface);
    for (int d : fluid_->boundary_dofs(FacetTag::Interface)) {
        const int s = solid_->dof_of_key(fluid_->node_key(d));
        if (s < 0) {
            throw InvalidArgument("TransmissionSolver: interface node missing on the solid side");
        }
        nodes_.push_back({d, s, wf[d]});
    }

    const int nf = fluid_->num_dofs();
    const int n = nf + solid_->num_dofs();
    std::vector<Eigen::Triplet<double>> trip;
    auto add_block = [&](const Space& sp, const Eigen::VectorXd& mass, double D, int offset) {
        const SparseMatrix K = stiffness_matrix(sp);
        for (int c = 0; c < K.outerSize(); ++c) {
            for (SparseMatrix::InnerIterator it(K, c); it; ++it) {
                trip.emplace_back(offset + static_cast<int>(it.row()), offset + static_cast<int>(it.col()),
                                  D * it.value());
            }
        }
        for (int i = 0; i < sp.num_dofs(); ++i) {
            trip.emplace_back(offset + i, offset + i, mass[i] / dt_);
        }
    };
    add_block(*fluid_, mass_f_, params_.Df, 0);
    add_block(*solid_, mass_s_, params_.Ds, nf);
    if (implicit_jump_) {
        for (const auto& nd : nodes_) {
            const double z = params_.zeta * nd.weight;
            const int f = nd.fluid;
            const int s = nf + nd.solid;
            trip.emplace_back(f, f, z);
            trip.emplace_back(f, s, -z);
            trip.emplace_back(s, s, z);
            trip.emplace_back(s, f, -z);
        }
    }
    matrix_.resize(n, n);
    matrix_.setFromTriplets(trip.begin(), trip.end());
    matrix_.makeCompressed();
    lu_.compute(matrix_);
    if (lu_.info() != Eigen::Success) {
        throw SolverError("TransmissionSolver: factorization failed");
    }
}

Eigen::VectorXd TransmissionSolver::interface_exchange(const TwoSidedField& c) const
{
    Eigen::VectorXd j(static_cast<Eigen::Index>(nodes_.size()));
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        j[static_cast<Eigen::Index>(i)] = params_.zeta * (c.solid.at(nodes_[i].solid) - c.fluid.at(nodes_[i].fluid));
    }
    return j;
}

Eigen::VectorXd TransmissionSolver::load(const TwoSidedField& prev, const ConcentrationStepData& data) const
{
    const int nf = fluid_->num_dofs();
    const int ns = solid_->num_dofs();
    Eigen::VectorXd bf = mass_f_.cwiseProduct(prev.fluid.values) / dt_;
    Eigen::VectorXd bs = mass_s_.cwiseProduct(prev.solid.values) / dt_;
    add_scalar_flux_load(*fluid_, data.flux_f, -1.0, bf);
    add_scalar_flux_load(*solid_, data.flux_s, -1.0, bs);
    add_scalar_load(*fluid_, data.source_f, 1.0, bf);
    add_scalar_load(*solid_, data.source_s, 1.0, bs);
    if (!data.outer_flux.empty()) {
        add_facet_scalar_load(*solid_, data.outer_flux, 1.0, bs);
    }
    if (!implicit_jump_ && data.interface_flux.size() > 0) {
        if (data.interface_flux.size() != static_cast<Eigen::Index>(nodes_.size())) {
            throw InvalidArgument("TransmissionSolver: interface flux has the wrong length");
        }
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            const double q = nodes_[i].weight * data.interface_flux[static_cast<Eigen::Index>(i)];
            bf[nodes_[i].fluid] += q;
            bs[nodes_[i].solid] -= q;
        }
    }
    Eigen::VectorXd b(nf + ns);
    b << bf, bs;
    return b;
}

TwoSidedField TransmissionSolver::step(const TwoSidedField& prev, const ConcentrationStepData& data) const
{
    const Eigen::VectorXd b = load(prev, data);
    if (!b.allFinite()) {
        throw InvalidArgument("TransmissionSolver: non-finite source data");
    }
    const Eigen::VectorXd x = lu_.solve(b);
    if (lu_.info() != Eigen::Success || !x.allFinite()) {
        throw SolverError("TransmissionSolver: solve failed");
    }
    TwoSidedField out{Field(fluid_, 1), Field(solid_, 1)};
    out.fluid.values = x.head(fluid_->num_dofs());
    out.solid.values = x.tail(solid_->num_dofs());
    return out;
}

double total_mass(const TransmissionSolver& solver, const TwoSidedField& c)
{
    return solver.fluid_mass().dot(c.fluid.values) + solver.solid_mass().dot(c.solid.values);
}

OdeState step_odes(const OdeState& prev, const Field& c_solid, const CellsParams& params, double dt)
{
    OdeState out = prev;
    const double a = params.gamma * params.beta / params.rho_s;
    const double b = params.gamma * params.beta / (params.dim * params.rho_s);
    for (int i = 0; i < c_solid.num_dofs(); ++i) {
        const double c = c_solid.at(i);
        out.foam.at(i) = (prev.foam.at(i) + dt * params.beta * c) / (1.0 + dt * a * c);
        const double denom = 1.0 - dt * b * c;
        if (!(denom > 0.0)) {
            throw InvariantViolation(fmt::format("growth update singular at node {} (c = {:.6g})", i, c));
        }
        out.growth.at(i) = prev.growth.at(i) / denom;
        if (!(out.growth.at(i) >= 0.5)) {
            const Vec2& x = c_solid.space->dof_point(i);
            throw InvariantViolation(fmt::format("growth metric g = {:.6g} < 1/2 at node {} ({:.4g}, {:.4g})",
                                                 out.growth.at(i), i, x.x(), x.y()));
        }
    }
    return out;
}

OdeLinearization ode_linearization(const OdeState& state, const OdeState& initial, const Field& c_solid,
                                   const CellsParams& params)
{
    OdeLinearization lin{Field(c_solid.space, 1), Field(c_solid.space, 1)};
    const double a = params.gamma * params.beta / params.rho_s;
    const double b = params.gamma * params.beta / (params.dim * params.rho_s);
    lin.F4.values = -a * c_solid.values.cwiseProduct(state.foam.values - initial.foam.values);
    lin.F5.values = b * c_solid.values.cwiseProduct(state.growth.values - initial.growth.values);
    return lin;
}

namespace {

void scan(const Field& f, double t, int step, Subdomain side, PositivityReport& rep)
{
    for (int i = 0; i < f.values.size(); ++i) {
        if (f.values[i] < rep.min_value) {
            rep.min_value = f.values[i];
            rep.dof = i / f.components;
            rep.location = f.space->dof_point(rep.dof);
            rep.time = t;
            rep.step = step;
            rep.side = side;
        }
    }
}

}  // namespace

PositivityReport positivity_report(const Trajectory<Field>& traj)
{
    PositivityReport rep;
    rep.min_value = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        const Field& f = traj.snapshots[k];
        scan(f, traj.times[k], static_cast<int>(k), f.space->subdomain(), rep);
    }
    return rep;
}

PositivityReport positivity_report(const Trajectory<TwoSidedField>& traj)
{
    PositivityReport rep;
    rep.min_value = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        scan(traj.snapshots[k].fluid, traj.times[k], static_cast<int>(k), Subdomain::Fluid, rep);
        scan(traj.snapshots[k].solid, traj.times[k], static_cast<int>(k), Subdomain::Solid, rep);
    }
    return rep;
}

}  // namespace plaquefsi
