#include "plaquefsi/fluid_solver.hpp"
#include "plaquefsi/studies.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace plaquefsi;

namespace {

struct FluidSetup {
    std::shared_ptr<const Mesh> mesh;
    std::shared_ptr<const Space> v;
    std::shared_ptr<const Space> p;

    explicit FluidSetup(int n)
        : mesh(std::make_shared<const Mesh>(build_strip_mesh(1.0, 0.5, 0.5, n))),
          v(std::make_shared<const Space>(mesh, 2, Subdomain::Fluid)),
          p(std::make_shared<const Space>(mesh, 1, Subdomain::Fluid))
    {
    }
};

StokesStepData random_step_data(const FluidSetup& s, std::mt19937_64& rng)
{
    std::normal_distribution<double> nd;
    StokesStepData d;
    d.body_force = QpData<Vec2>(s.v->num_cells(), triangle_rule().size(), Vec2::Zero());
    for (auto& x : d.body_force.data) {
        x = Vec2(nd(rng), nd(rng));
    }
    d.divergence = QpData<double>(s.v->num_cells(), triangle_rule().size(), 0.0);
    for (auto& x : d.divergence.data) {
        x = nd(rng);
    }
    d.traction = facet_points(*s.v, FacetTag::Interface);
    for (auto& x : d.traction.data) {
        x = Vec2(nd(rng), nd(rng));
    }
    return d;
}

}  // namespace

TEST(Stokes, ZeroDataGivesZeroSolution)
{
    const FluidSetup s(8);
    const StokesSolver solver(s.v, s.p, 1.0, 1.0, 1e-3);
    const StokesStep st = solver.solve_step(Field(s.v, 2), {});
    EXPECT_EQ(st.velocity.values.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(st.pressure.values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Stokes, RejectsNonpositiveParameters)
{
    const FluidSetup s(4);
    EXPECT_THROW(StokesSolver(s.v, s.p, 0.0, 1.0, 1e-3), InvalidArgument);
    EXPECT_THROW(StokesSolver(s.v, s.p, 1.0, 1.0, 0.0), InvalidArgument);
}

TEST(Stokes, UniformNormalTractionGivesHydrostaticPressure)
{
    const FluidSetup s(8);
    const double pbar = 0.7;
    const StokesSolver solver(s.v, s.p, 1.0, 1.0, 1e-2);
    StokesStepData d;
    d.traction = facet_points(*s.v, FacetTag::Interface);
    for (auto& x : d.traction.data) {
        x = Vec2(0.0, -pbar);
    }
    const StokesStep st = solver.solve_step(Field(s.v, 2), d);
    EXPECT_LE(st.velocity.values.cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((st.pressure.values.array() - pbar).abs().maxCoeff(), 1e-10);
    EXPECT_LE(solver.divergence_residual(st.velocity, d), 1e-10);
}

TEST(Stokes, TractionOfPurePressure)
{
    const FluidSetup s(8);
    const StokesSolver solver(s.v, s.p, 1.0, 1.0, 1e-3);
    StokesStep st{Field(s.v, 2), Field(s.p, 1)};
    st.pressure.values.setConstant(2.5);
    const Field t = solver.traction_trace(Field(s.v, 2), st, {});
    for (int d : s.v->boundary_dofs(FacetTag::Interface)) {
        EXPECT_NEAR(t.at(d, 0), 0.0, 1e-10);
        EXPECT_NEAR(t.at(d, 1), -2.5, 1e-10);
    }
}

TEST(Stokes, TractionOfCouetteShear)
{
    const FluidSetup s(8);
    const StokesSolver solver(s.v, s.p, 1.0, 1.0, 1e-3);
    StokesStep st{interpolate_vector(s.v, [](const Vec2& x) { return Vec2(x.y(), 0.0); }), Field(s.p, 1)};
    const Field t = solver.traction_trace(st.velocity, st, {});
    for (int d : s.v->boundary_dofs(FacetTag::Interface)) {
        EXPECT_NEAR(t.at(d, 0), 1.0, 1e-10);
        EXPECT_NEAR(t.at(d, 1), 0.0, 1e-10);
    }
}

TEST(Stokes, ImplicitEulerIsDissipative)
{
    const FluidSetup s(8);
    const StokesSolver solver(s.v, s.p, 1.0, 0.5, 1e-2);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    Field u(s.v, 2);
    for (int i = 0; i < u.values.size(); ++i) {
        u.values[i] = nd(rng);
    }
    for (int d : s.v->boundary_dofs(FacetTag::Wall)) {
        u.at(d, 0) = u.at(d, 1) = 0.0;
    }
    double prev = lq_norm(u, 2.0);
    for (int k = 0; k < 10; ++k) {
        const StokesStep st = solver.solve_step(u, {});
        const double now = lq_norm(st.velocity, 2.0);
        EXPECT_LE(now, prev * (1.0 + 1e-12));
        EXPECT_LE(solver.divergence_residual(st.velocity, {}), 1e-9);
        prev = now;
        u = st.velocity;
    }
}

TEST(Stokes, SuperpositionOfRandomData)
{
    const FluidSetup s(8);
    const StokesSolver solver(s.v, s.p, 1.0, 1.0, 1e-2);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> nd;
    const StokesStepData d1 = random_step_data(s, rng);
    const StokesStepData d2 = random_step_data(s, rng);
    StokesStepData sum = d1;
    for (std::size_t i = 0; i < sum.body_force.data.size(); ++i) {
        sum.body_force.data[i] += d2.body_force.data[i];
        sum.divergence.data[i] += d2.divergence.data[i];
    }
    for (std::size_t i = 0; i < sum.traction.data.size(); ++i) {
        sum.traction.data[i] += d2.traction.data[i];
    }
    Field u1(s.v, 2);
    Field u2(s.v, 2);
    for (int i = 0; i < u1.values.size(); ++i) {
        u1.values[i] = nd(rng);
        u2.values[i] = nd(rng);
    }
    Field u12 = u1;
    u12.values += u2.values;
    const StokesStep a = solver.solve_step(u1, d1);
    const StokesStep b = solver.solve_step(u2, d2);
    const StokesStep c = solver.solve_step(u12, sum);
    const double scale = c.velocity.values.cwiseAbs().maxCoeff();
    EXPECT_LE((a.velocity.values + b.velocity.values - c.velocity.values).cwiseAbs().maxCoeff(), 1e-10 * scale);
    EXPECT_LE((a.pressure.values + b.pressure.values - c.pressure.values).cwiseAbs().maxCoeff(),
              1e-10 * c.pressure.values.cwiseAbs().maxCoeff());
    EXPECT_LE(solver.divergence_residual(c.velocity, sum), 1e-9);
}

TEST(Stokes, ManufacturedSolutionConvergesInSpace)
{
    const ConvergenceStudy s = fluid_space_convergence({8, 16, 32});
    EXPECT_GE(s.min_eoc(), 1.8);
}
