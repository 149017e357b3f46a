#include "plaquefsi/norms.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace plaquefsi;

namespace {

struct CellSamples {
    std::vector<Vec2> centres;
    std::vector<double> areas;
};

CellSamples all_cells(const Mesh& m)
{
    CellSamples s;
    for (int c = 0; c < m.num_cells(); ++c) {
        s.centres.push_back(m.barycenter(c));
        s.areas.push_back(m.cell_area(c));
    }
    return s;
}

// Independent midpoint double sum over a uniform grid of squares on [0,1]^2.
double square_grid_seminorm(int m, double s, double q, const std::function<double(double)>& f)
{
    const double h = 1.0 / m;
    std::vector<Vec2> x;
    std::vector<double> v;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            x.emplace_back((i + 0.5) * h, (j + 0.5) * h);
            v.push_back(f(x.back().x()));
        }
    }
    double acc = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) {
        for (std::size_t b = 0; b < x.size(); ++b) {
            if (a == b) {
                continue;
            }
            acc += std::pow(std::abs(v[a] - v[b]), q) / std::pow((x[a] - x[b]).norm(), 2.0 + s * q) * h * h * h * h;
        }
    }
    return std::pow(acc, 1.0 / q);
}

std::shared_ptr<const Space> solid_p1(int n)
{
    auto mesh = std::make_shared<const Mesh>(build_strip_mesh(1.0, 0.5, 0.5, n));
    return std::make_shared<const Space>(mesh, 1, Subdomain::Solid);
}

}  // namespace

TEST(Slobodeckij, ConstantHasZeroSeminorm)
{
    const auto sp = solid_p1(8);
    const Field f = interpolate_scalar(sp, [](const Vec2&) { return 3.0; });
    EXPECT_EQ(slobodeckij_seminorm(f, 0.5, 2.0), 0.0);
}

TEST(Slobodeckij, LinearFunctionMatchesQuadratureOracle)
{
    // |x|_{W^{1/2,2}((0,1)^2)} by adaptive quadrature of the reduced integral
    // 4 int_{[0,1]^2} (1-a)(1-b) a^2 / (a^2+b^2)^{3/2}.
    const double oracle = 1.2192640399534833;
    const Mesh m = build_strip_mesh(1.0, 0.5, 0.5, 16);
    const CellSamples cs = all_cells(m);
    Eigen::MatrixXd vals(m.num_cells(), 1);
    for (int c = 0; c < m.num_cells(); ++c) {
        vals(c, 0) = cs.centres[static_cast<std::size_t>(c)].x();
    }
    const double v = slobodeckij_seminorm(cs.centres, cs.areas, vals, 0.5, 2.0);
    EXPECT_NEAR(v / oracle, 1.0, 0.10);
}

TEST(Slobodeckij, ResolvedStepMatchesDenseSumAtDoubleResolution)
{
    const int n = 8;
    const double h = 1.0 / n;
    auto step = [h](double x) { return std::clamp((x - 0.5) / (2.0 * h) + 0.5, 0.0, 1.0); };
    const Mesh m = build_strip_mesh(1.0, 0.5, 0.5, n);
    const CellSamples cs = all_cells(m);
    Eigen::MatrixXd vals(m.num_cells(), 1);
    for (int c = 0; c < m.num_cells(); ++c) {
        vals(c, 0) = step(cs.centres[static_cast<std::size_t>(c)].x());
    }
    const double v = slobodeckij_seminorm(cs.centres, cs.areas, vals, 0.5, 2.0);
    const double dense = square_grid_seminorm(4 * n, 0.5, 2.0, step);
    EXPECT_GT(v, 0.0);
    EXPECT_NEAR(v / dense, 1.0, 0.05);
}

TEST(Slobodeckij, AbsolutelyHomogeneous)
{
    const auto sp = solid_p1(8);
    const Field f = interpolate_scalar(sp, [](const Vec2& x) { return std::sin(3.0 * x.x()) + x.y() * x.y(); });
    Field g = f;
    g.values *= -2.5;
    EXPECT_NEAR(slobodeckij_seminorm(g, 0.4, 3.0), 2.5 * slobodeckij_seminorm(f, 0.4, 3.0),
                1e-12 * slobodeckij_seminorm(g, 0.4, 3.0));
}

TEST(TrajectoryNorm, ZeroTrajectory)
{
    const auto sp = solid_p1(4);
    Trajectory<Field> w{uniform_time_grid(1.0, 4), {}};
    for (std::size_t k = 0; k < w.times.size(); ++k) {
        w.snapshots.emplace_back(sp, 1);
    }
    for (auto kind : {NormKind::Lebesgue, NormKind::Sobolev, NormKind::SlobodeckijSeminorm, NormKind::Anisotropic}) {
        EXPECT_EQ(trajectory_norm(w, {1.0, 6.0, 0.25, kind}), 0.0);
    }
}

TEST(TrajectoryNorm, TimeConstantFieldIsSeparable)
{
    const auto sp = solid_p1(8);
    const Field c = interpolate_scalar(sp, [](const Vec2& x) { return 1.0 + x.x() * x.y(); });
    const double T = 0.3;
    const double q = 6.0;
    Trajectory<Field> w{uniform_time_grid(T, 6), std::vector<Field>(7, c)};
    EXPECT_NEAR(trajectory_norm(w, {0.0, q, 0.0, NormKind::Lebesgue}), std::pow(T, 1.0 / q) * lq_norm(c, q), 1e-12);
    EXPECT_EQ(trajectory_norm(w, {0.0, q, 0.3, NormKind::SlobodeckijSeminorm}), 0.0);
}

TEST(TrajectoryNorm, RampMatchesDirectDoubleSum)
{
    const auto sp = solid_p1(8);
    const Field f0 = interpolate_scalar(sp, [](const Vec2& x) { return std::cos(2.0 * M_PI * x.x()) + x.y(); });
    const double q = 6.0;
    const double r = 0.5 - 0.5 / q;
    Trajectory<Field> w{uniform_time_grid(0.02, 20), {}};
    for (double t : w.times) {
        Field f = f0;
        f.values *= t;
        w.snapshots.push_back(f);
    }
    const auto wt = trapezoid_weights(w.times);
    const double n0 = std::pow(lq_norm(f0, q), q);
    double acc = 0.0;
    for (std::size_t i = 0; i < w.times.size(); ++i) {
        for (std::size_t j = 0; j < w.times.size(); ++j) {
            if (i != j) {
                const double d = std::abs(w.times[i] - w.times[j]);
                acc += wt[i] * wt[j] * std::pow(d, q) * n0 / std::pow(d, 1.0 + r * q);
            }
        }
    }
    const double direct = std::pow(acc, 1.0 / q);
    EXPECT_NEAR(temporal_seminorm(w, r, q), direct, 1e-10 * direct);
}

TEST(TrajectoryNorm, TriangleInequalityOnRandomPairs)
{
    const auto sp = solid_p1(4);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 10; ++trial) {
        Trajectory<Field> a{uniform_time_grid(0.05, 5), {}};
        Trajectory<Field> b = a;
        for (std::size_t k = 0; k < a.times.size(); ++k) {
            Field fa(sp, 1);
            Field fb(sp, 1);
            for (int i = 0; i < sp->num_dofs(); ++i) {
                fa.at(i) = nd(rng);
                fb.at(i) = nd(rng);
            }
            a.snapshots.push_back(fa);
            b.snapshots.push_back(fb);
        }
        Trajectory<Field> s = a;
        for (std::size_t k = 0; k < s.snapshots.size(); ++k) {
            s.snapshots[k].values += b.snapshots[k].values;
        }
        for (auto kind : {NormKind::Lebesgue, NormKind::Sobolev, NormKind::SlobodeckijSeminorm,
                          NormKind::Anisotropic}) {
            const NormSpec spec{1.0, 6.0, 0.5 - 0.5 / 6.0, kind};
            const double ns = trajectory_norm(s, spec);
            EXPECT_LE(ns, trajectory_norm(a, spec) + trajectory_norm(b, spec) + 1e-12 * ns);
        }
    }
}

TEST(NormSpec, RejectsInvalidIndices)
{
    EXPECT_THROW((NormSpec{2.5, 2.0, 0.0, NormKind::Sobolev}.validate()), InvalidArgument);
    EXPECT_THROW((NormSpec{1.0, 1.0, 0.0, NormKind::Sobolev}.validate()), InvalidArgument);
    EXPECT_THROW((NormSpec{1.0, 2.0, 1.5, NormKind::Anisotropic}.validate()), InvalidArgument);
}

TEST(SobolevNorm, IntegerOrdersOfPolynomials)
{
    const auto sp = solid_p1(8);
    const Field one = interpolate_scalar(sp, [](const Vec2&) { return 1.0; });
    // Area of the solid part is 1/2.
    EXPECT_NEAR(sobolev_norm(one, 0.0, 2.0), std::sqrt(0.5), 1e-12);
    EXPECT_NEAR(sobolev_norm(one, 1.0, 2.0), std::sqrt(0.5), 1e-12);
    const Field y = interpolate_scalar(sp, [](const Vec2& x) { return x.y(); });
    // int_0^{1/2} y^2 = 1/24; |grad y|^2 integrates to 1/2.
    EXPECT_NEAR(sobolev_norm(y, 1.0, 2.0), std::sqrt(1.0 / 24.0 + 0.5), 1e-12);
}
