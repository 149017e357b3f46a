#include "plaquefsi/cells_solver.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace plaquefsi;

namespace {

struct CellsSetup {
    std::shared_ptr<const Mesh> mesh;
    std::shared_ptr<const Space> f;
    std::shared_ptr<const Space> s;

    explicit CellsSetup(int n)
        : mesh(std::make_shared<const Mesh>(build_strip_mesh(1.0, 0.5, 0.5, n))),
          f(std::make_shared<const Space>(mesh, 1, Subdomain::Fluid)),
          s(std::make_shared<const Space>(mesh, 1, Subdomain::Solid))
    {
    }

    [[nodiscard]] TwoSidedField constant(double cf, double cs) const
    {
        TwoSidedField c{Field(f, 1), Field(s, 1)};
        c.fluid.values.setConstant(cf);
        c.solid.values.setConstant(cs);
        return c;
    }
};

double side_mass(const Eigen::VectorXd& m, const Field& c) { return m.dot(c.values); }

}  // namespace

TEST(Transmission, ConstantIsSteady)
{
    const CellsSetup cs(8);
    for (bool implicit : {true, false}) {
        const TransmissionSolver solver(cs.f, cs.s, CellsParams{}, 1e-2, implicit);
        TwoSidedField c = cs.constant(0.3, 0.3);
        for (int k = 0; k < 5; ++k) {
            ConcentrationStepData d;
            if (!implicit) {
                d.interface_flux = solver.interface_exchange(c);
            }
            c = solver.step(c, d);
        }
        EXPECT_LE((c.fluid.values.array() - 0.3).abs().maxCoeff(), 1e-12);
        EXPECT_LE((c.solid.values.array() - 0.3).abs().maxCoeff(), 1e-12);
    }
}

TEST(Transmission, FourierModeDecaysAtTheDiffusiveRate)
{
    // Insulated interface (zeta = 0): cos(2 pi x) on the solid side decays
    // like exp(-D_s (2 pi)^2 t).
    const CellsSetup cs(32);
    CellsParams p;
    p.zeta = 0.0;
    const double dt = 1e-4;
    const int steps = 500;
    const TransmissionSolver solver(cs.f, cs.s, p, dt, true);
    TwoSidedField c = cs.constant(0.0, 0.0);
    c.solid = interpolate_scalar(cs.s, [](const Vec2& x) { return std::cos(2.0 * M_PI * x.x()); });
    const Field mode = c.solid;
    for (int k = 0; k < steps; ++k) {
        c = solver.step(c, {});
    }
    const Eigen::VectorXd& m = solver.solid_mass();
    const double amplitude = m.dot(c.solid.values.cwiseProduct(mode.values)) / m.dot(mode.values.cwiseAbs2());
    const double exact = std::exp(-p.Ds * 4.0 * M_PI * M_PI * dt * steps);
    EXPECT_NEAR(amplitude / exact, 1.0, 0.02);
    EXPECT_LE(c.fluid.values.cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Transmission, InsulatedInterfaceConservesEachSide)
{
    const CellsSetup cs(8);
    CellsParams p;
    p.zeta = 0.0;
    const TransmissionSolver solver(cs.f, cs.s, p, 1e-2, true);
    TwoSidedField c{interpolate_scalar(cs.f, [](const Vec2& x) { return 1.0 + std::sin(2.0 * M_PI * x.x()) * x.y(); }),
                    interpolate_scalar(cs.s, [](const Vec2& x) { return 2.0 + x.y() * x.y(); })};
    const double mf = side_mass(solver.fluid_mass(), c.fluid);
    const double ms = side_mass(solver.solid_mass(), c.solid);
    for (int k = 0; k < 20; ++k) {
        c = solver.step(c, {});
    }
    EXPECT_NEAR(side_mass(solver.fluid_mass(), c.fluid), mf, 1e-10);
    EXPECT_NEAR(side_mass(solver.solid_mass(), c.solid), ms, 1e-10);
}

TEST(Transmission, ExchangeConservesTotalMass)
{
    const CellsSetup cs(8);
    for (bool implicit : {true, false}) {
        const TransmissionSolver solver(cs.f, cs.s, CellsParams{}, 1e-2, implicit);
        TwoSidedField c = cs.constant(1.0, 0.0);
        const double m0 = total_mass(solver, c);
        for (int k = 0; k < 20; ++k) {
            ConcentrationStepData d;
            if (!implicit) {
                d.interface_flux = solver.interface_exchange(c);
            }
            c = solver.step(c, d);
        }
        EXPECT_NEAR(total_mass(solver, c), m0, 1e-12);
        EXPECT_GT(c.solid.values.maxCoeff(), 0.0);
    }
}

TEST(Transmission, LargePermeabilityClosesTheJump)
{
    const CellsSetup cs(8);
    CellsParams p;
    p.zeta = 1e6;
    const TransmissionSolver solver(cs.f, cs.s, p, 1e-2, true);
    TwoSidedField c = cs.constant(1.0, 0.0);
    for (int k = 0; k < 5; ++k) {
        c = solver.step(c, {});
    }
    EXPECT_LE(solver.interface_exchange(c).cwiseAbs().maxCoeff() / p.zeta, 1e-4);
}

TEST(Transmission, RejectsWrongSpacesAndParameters)
{
    const CellsSetup cs(4);
    auto mesh = cs.mesh;
    auto p2 = std::make_shared<const Space>(mesh, 2, Subdomain::Solid);
    EXPECT_THROW(TransmissionSolver(cs.f, p2, CellsParams{}, 1e-2, true), InvalidArgument);
    CellsParams bad;
    bad.Df = 0.0;
    EXPECT_THROW(TransmissionSolver(cs.f, cs.s, bad, 1e-2, true), InvalidArgument);
    EXPECT_THROW(TransmissionSolver(cs.f, cs.s, CellsParams{}, 0.0, true), InvalidArgument);
}

TEST(GrowthOdes, FoamCellsSaturateMonotonically)
{
    const CellsSetup cs(4);
    CellsParams p;
    const double c_bar = 5.0;
    Field c = interpolate_scalar(cs.s, [&](const Vec2&) { return c_bar; });
    OdeState st{Field(cs.s, 1), Field(cs.s, 1)};
    st.growth.values.setOnes();
    double prev = 0.0;
    for (int k = 0; k < 2000; ++k) {
        st = step_odes(st, c, p, 0.5);
        const double v = st.foam.at(0);
        EXPECT_GE(v, prev);
        EXPECT_LE(v, p.rho_s / p.gamma * (1.0 + 1e-12));
        prev = v;
    }
    EXPECT_NEAR(prev, p.rho_s / p.gamma, 1e-6);
}

TEST(GrowthOdes, ClosedFormUpdate)
{
    const CellsSetup cs(4);
    CellsParams p;
    const double dt = 0.1;
    const double cv = 2.0;
    Field c = interpolate_scalar(cs.s, [&](const Vec2&) { return cv; });
    OdeState st{Field(cs.s, 1), Field(cs.s, 1)};
    st.foam.values.setConstant(0.4);
    st.growth.values.setConstant(1.2);
    const OdeState out = step_odes(st, c, p, dt);
    const double foam = (0.4 + dt * p.beta * cv) / (1.0 + dt * p.beta * p.gamma * cv / p.rho_s);
    const double g = 1.2 / (1.0 - dt * p.gamma * p.beta * cv / (p.dim * p.rho_s));
    EXPECT_NEAR(out.foam.at(3), foam, 1e-15);
    EXPECT_NEAR(out.growth.at(3), g, 1e-15);
    // The scheme is implicit: the update satisfies the discrete equations.
    EXPECT_NEAR((out.foam.at(3) - 0.4) / dt, p.beta * cv * (1.0 - p.gamma * out.foam.at(3) / p.rho_s), 1e-12);
    EXPECT_NEAR((out.growth.at(3) - 1.2) / dt, p.gamma * p.beta * cv * out.growth.at(3) / (p.dim * p.rho_s), 1e-12);
}

TEST(GrowthOdes, AbortsWhenGrowthLeavesTheAdmissibleRange)
{
    const CellsSetup cs(4);
    CellsParams p;
    OdeState st{Field(cs.s, 1), Field(cs.s, 1)};
    st.growth.values.setConstant(0.51);
    Field c = interpolate_scalar(cs.s, [](const Vec2&) { return -50.0; });
    EXPECT_THROW((void)step_odes(st, c, p, 1.0), InvariantViolation);
    st.growth.values.setOnes();
    c.values.setConstant(1e6);
    EXPECT_THROW((void)step_odes(st, c, p, 1.0), InvariantViolation);
}

TEST(GrowthOdes, LinearizationReproducesTheFullRightHandSide)
{
    const CellsSetup cs(4);
    CellsParams p;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    OdeState st{Field(cs.s, 1), Field(cs.s, 1)};
    OdeState init = st;
    Field c(cs.s, 1);
    for (int i = 0; i < c.num_dofs(); ++i) {
        st.foam.at(i) = u(rng);
        st.growth.at(i) = 0.5 + u(rng);
        init.foam.at(i) = u(rng);
        init.growth.at(i) = 0.5 + u(rng);
        c.at(i) = u(rng);
    }
    const OdeLinearization lin = ode_linearization(st, init, c, p);
    for (int i = 0; i < c.num_dofs(); ++i) {
        const double full4 = p.beta * c.at(i) * (1.0 - p.gamma * st.foam.at(i) / p.rho_s);
        const double lin4 = lin.F4.at(i) - p.beta * (p.gamma * init.foam.at(i) / p.rho_s - 1.0) * c.at(i);
        EXPECT_NEAR(full4, lin4, 1e-13);
        const double full5 = p.gamma * p.beta * c.at(i) * st.growth.at(i) / (p.dim * p.rho_s);
        const double lin5 = lin.F5.at(i) + p.gamma * p.beta * init.growth.at(i) / (p.dim * p.rho_s) * c.at(i);
        EXPECT_NEAR(full5, lin5, 1e-13);
    }
}

TEST(Positivity, ReportsTheInjectedMinimum)
{
    const CellsSetup cs(4);
    Trajectory<TwoSidedField> traj{uniform_time_grid(0.3, 3), {}};
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        traj.snapshots.push_back(cs.constant(0.5, 0.5));
    }
    auto rep = positivity_report(traj);
    EXPECT_EQ(rep.min_value, 0.5);
    traj.snapshots[2].solid.at(5) = -1e-3;
    rep = positivity_report(traj);
    EXPECT_EQ(rep.min_value, -1e-3);
    EXPECT_EQ(rep.step, 2);
    EXPECT_EQ(rep.dof, 5);
    EXPECT_EQ(rep.side, Subdomain::Solid);
    EXPECT_NEAR(rep.time, 0.2, 1e-15);
    EXPECT_EQ(rep.location, cs.s->dof_point(5));

    Trajectory<Field> single{uniform_time_grid(0.1, 1), {Field(cs.f, 1), Field(cs.f, 1)}};
    single.snapshots[1].at(2) = -2.0;
    const auto r1 = positivity_report(single);
    EXPECT_EQ(r1.min_value, -2.0);
    EXPECT_EQ(r1.side, Subdomain::Fluid);
}
