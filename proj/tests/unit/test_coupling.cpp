#include "plaquefsi/coupling.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace plaquefsi;

namespace {

ModelParams default_params()
{
    ModelParams p;
    p.validate();
    return p;
}

RawInitialData traction_initial(const Discretization& disc, double eps)
{
    RawInitialData raw = zero_initial(disc);
    raw.pf0 = interpolate_scalar(disc.pf, [&](const Vec2& x) { return eps * std::cos(2.0 * M_PI * x.x()); });
    return raw;
}

}  // namespace

TEST(Coupling, DiscretizationSharesInterfaceNodes)
{
    const Discretization disc = Discretization::build(1.0, 0.5, 0.5, 4);
    const CoupledProblem problem(disc, default_params(), 0.01);
    EXPECT_EQ(problem.interface_pairs().size(), disc.vf->boundary_dofs(FacetTag::Interface).size());
    for (const auto& [f, s] : problem.interface_pairs()) {
        EXPECT_EQ(disc.vf->dof_point(f), disc.us->dof_point(s));
    }
}

TEST(Coupling, NonlinearTermsVanishAtTheReferenceState)
{
    const Discretization disc = Discretization::build(1.0, 0.5, 0.5, 4);
    const CoupledProblem problem(disc, default_params(), 0.01);
    const InitialData w0 = prepare_initial(disc, problem.params(), zero_initial(disc));
    EXPECT_LE(w0.us0.values.cwiseAbs().maxCoeff(), 1e-14);
    const StateW w = constant_state(problem, w0, uniform_time_grid(0.03, 3));
    const RhsBundle b = assemble_rhs(problem, w, w0);
    EXPECT_EQ(b.terms.size(), 4u);
    EXPECT_LE(max_abs(b), 1e-14);
}

TEST(Coupling, ZeroDataConvergesImmediately)
{
    const Discretization disc = Discretization::build(1.0, 0.5, 0.5, 4);
    const CoupledProblem problem(disc, default_params(), 0.01);
    const InitialData w0 = prepare_initial(disc, problem.params(), zero_initial(disc));
    PicardOptions opts;
    opts.final_time = 0.02;
    const PicardResult r = picard_solve(problem, w0, opts);
    EXPECT_EQ(r.status, PicardStatus::Converged);
    ASSERT_EQ(r.iterates.size(), 1u);
    EXPECT_LE(r.final_norm, 1e-14);
    const ResidualReport rep = converged_residuals(problem, r.state, w0);
    EXPECT_LE(rep.max_value(), 1e-12);
    EXPECT_EQ(r.state.times().size(), 3u);
}

TEST(Coupling, ConvergedStateSolvesTheNonlinearSystem)
{
    const Discretization disc = Discretization::build(1.0, 0.5, 0.5, 4);
    ModelParams p = default_params();
    const CoupledProblem problem(disc, p, 0.01);
    RawInitialData raw = traction_initial(disc, 0.01);
    raw.c0.solid.values.setConstant(1.0);
    raw.c0.fluid.values.setConstant(1.0);
    const InitialData w0 = prepare_initial(disc, p, raw);
    PicardOptions opts;
    opts.final_time = 0.02;
    opts.tol = 1e-10;
    const PicardResult r = picard_solve(problem, w0, opts);
    ASSERT_EQ(r.status, PicardStatus::Converged) << r.message;
    EXPECT_LT(r.max_q, 1.0);
    const ResidualReport rep = converged_residuals(problem, r.state, w0);
    // The interface velocity matches the difference quotient of the
    // displacement only up to the time discretization error.
    for (const auto& [name, v] : rep.values) {
        EXPECT_LE(v, name == "interface_velocity" ? 5.0 * problem.dt() : 1e-7) << name;
    }
    for (const auto& name : component_names()) {
        EXPECT_TRUE(r.iterates.back().diff.count(name)) << name;
    }
}

TEST(Coupling, InitialEquilibriumIsLinearInSmallTractions)
{
    const Discretization disc = Discretization::build(1.0, 0.5, 0.5, 8);
    const ModelParams p = default_params();
    const double eps = 1e-4;
    const InitialData a = prepare_initial(disc, p, traction_initial(disc, eps));
    const InitialData b = prepare_initial(disc, p, traction_initial(disc, 2.0 * eps));
    const double na = lq_norm(a.us0, 2.0);
    const double nb = lq_norm(b.us0, 2.0);
    EXPECT_GT(na, 0.0);
    EXPECT_NEAR(nb / na, 2.0, 2e-3);
    EXPECT_NEAR(b.smallness / a.smallness, 2.0, 2e-3);
    EXPECT_TRUE(a.warnings.empty());
}

TEST(Coupling, IncompatibleInitialDataIsRejected)
{
    const Discretization disc = Discretization::build(1.0, 0.5, 0.5, 4);
    const ModelParams p = default_params();
    RawInitialData raw = zero_initial(disc);
    raw.vf0 = interpolate_vector(disc.vf, [](const Vec2& x) { return Vec2(std::cos(2.0 * M_PI * x.x()), 0.0); });
    try {
        (void)prepare_initial(disc, p, raw);
        FAIL() << "expected a compatibility error";
    } catch (const InvalidArgument& e) {
        EXPECT_NE(std::string(e.what()).find("compatibility condition violated"), std::string::npos);
    }
    raw = zero_initial(disc);
    raw.c0.fluid.values.setConstant(1.0);
    try {
        (void)prepare_initial(disc, p, raw);
        FAIL() << "expected a compatibility error";
    } catch (const InvalidArgument& e) {
        EXPECT_NE(std::string(e.what()).find("zeta [[c0]]"), std::string::npos) << e.what();
    }
    raw = zero_initial(disc);
    raw.g0.values.setConstant(0.4);
    EXPECT_THROW((void)prepare_initial(disc, p, raw), InvalidArgument);
}

TEST(Coupling, PicardOptionsAreValidated)
{
    const Discretization disc = Discretization::build(1.0, 0.5, 0.5, 4);
    const CoupledProblem problem(disc, default_params(), 0.01);
    const InitialData w0 = prepare_initial(disc, problem.params(), zero_initial(disc));
    PicardOptions opts;
    opts.final_time = 0.025;
    EXPECT_THROW((void)picard_solve(problem, w0, opts), InvalidArgument);
    opts.final_time = 0.02;
    opts.max_iter = 0;
    EXPECT_THROW((void)picard_solve(problem, w0, opts), InvalidArgument);
}

TEST(Coupling, StatusNames)
{
    EXPECT_STREQ(to_string(PicardStatus::Converged), "converged");
    EXPECT_STRNE(to_string(PicardStatus::NoContraction), to_string(PicardStatus::MaxIterations));
}
