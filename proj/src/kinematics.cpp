#include "plaquefsi/kinematics.hpp"

#include <Eigen/SparseCholesky>

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace plaquefsi {

QpData<Mat2> deformation_gradient(const Field& u)
{
    QpData<Mat2> F = gradient_at_qp(u);
    for (auto& m : F.data) {
        m += Mat2::Identity();
    }
    return F;
}

Mat2 invert_checked(const Mat2& F, double bound, int cell)
{
    const double dev = spectral_norm<2>(F - Mat2::Identity());
    if (!(dev <= bound)) {
        throw InvariantViolation(
            fmt::format("deformation gradient lost validity in cell {}: |F - I| = {:.6g} > {}", cell, dev, bound));
    }
    return F.inverse();
}

InverseGradient invert_F(const Space& space, const QpData<Mat2>& F, double bound)
{
    if (!(bound > 0.0 && bound <= kInversionBound)) {
        throw InvalidArgument(fmt::format("invert_F: bound must lie in (0, 1/2], got {}", bound));
    }
    InverseGradient out;
    out.Finv = QpData<Mat2>(space.num_cells(), F.num_points, Mat2::Identity());
    for (int k = 0; k < space.num_cells(); ++k) {
        for (int q = 0; q < F.num_points; ++q) {
            const Mat2& Fq = F(k, q);
            const int cell = space.cells()[static_cast<std::size_t>(k)];
            const Mat2 inv = invert_checked(Fq, bound, cell);
            out.Finv(k, q) = inv;
            out.max_F_minus_I = std::max(out.max_F_minus_I, spectral_norm<2>(Fq - Mat2::Identity()));
            out.max_Finv_minus_I = std::max(out.max_Finv_minus_I, spectral_norm<2>(inv - Mat2::Identity()));
        }
    }
    return out;
}

QpData<double> determinant(const QpData<Mat2>& F)
{
    QpData<double> J;
    J.num_points = F.num_points;
    J.data.reserve(F.data.size());
    for (const auto& m : F.data) {
        J.data.push_back(m.determinant());
    }
    return J;
}

double piola_identity_residual(const Space& space, const QpData<Mat2>& F, const QpData<double>& J, double q)
{
    auto p1 = std::make_shared<const Space>(space.mesh_ptr(), 1, space.subdomain());
    if (p1->num_cells() != space.num_cells()) {
        throw InvalidArgument("piola_identity_residual: space mismatch");
    }
    // Consistent L2 projection of the four entries of J F^{-T}; it is
    // H1-stable, so the divergence of the projection error is O(h) up to
    // the boundary.
    Eigen::MatrixXd nodal = Eigen::MatrixXd::Zero(p1->num_dofs(), 4);
    CellValues cv(*p1, triangle_rule());
    for (int k = 0; k < p1->num_cells(); ++k) {
        cv.reinit(k);
        for (int qp = 0; qp < cv.num_points(); ++qp) {
            const Mat2 A = J(k, qp) * F(k, qp).inverse().transpose();
            for (int a = 0; a < cv.num_basis(); ++a) {
                const double w = cv.JxW(qp) * cv.shape(qp, a);
                const int d = cv.dofs()[static_cast<std::size_t>(a)];
                nodal(d, 0) += w * A(0, 0);
                nodal(d, 1) += w * A(0, 1);
                nodal(d, 2) += w * A(1, 0);
                nodal(d, 3) += w * A(1, 1);
            }
        }
    }
    const Eigen::SimplicialLDLT<SparseMatrix> mass(mass_matrix(*p1));
    if (mass.info() != Eigen::Success) {
        throw SolverError("piola_identity_residual: mass factorization failed");
    }
    nodal = mass.solve(nodal).eval();
    double acc = 0.0;
    for (int k = 0; k < p1->num_cells(); ++k) {
        cv.reinit(k);
        Vec2 div = Vec2::Zero();
        for (int a = 0; a < cv.num_basis(); ++a) {
            const int d = cv.dofs()[static_cast<std::size_t>(a)];
            const Vec2& g = cv.grad(0, a);
            // div_j = d_0 A_0j + d_1 A_1j
            div.x() += g.x() * nodal(d, 0) + g.y() * nodal(d, 2);
            div.y() += g.x() * nodal(d, 1) + g.y() * nodal(d, 3);
        }
        acc += cv.area() * std::pow(div.norm(), q);
    }
    return std::pow(acc, 1.0 / q);
}

double piola_identity_residual(const Field& u, double q)
{
    const QpData<Mat2> F = deformation_gradient(u);
    return piola_identity_residual(*u.space, F, determinant(F), q);
}

DeformationState growth_split(const Space& space, const QpData<Mat2>& F, const QpData<double>& g)
{
    DeformationState st;
    st.F = F;
    st.g = g;
    st.J = determinant(F);
    st.min_g = std::numeric_limits<double>::infinity();
    for (int k = 0; k < space.num_cells(); ++k) {
        for (int q = 0; q < F.num_points; ++q) {
            if (!(g(k, q) >= kMinGrowth)) {
                throw InvariantViolation(fmt::format("growth metric g = {:.6g} < 1/2 in cell {}", g(k, q),
                                                     space.cells()[static_cast<std::size_t>(k)]));
            }
            st.min_g = std::min(st.min_g, g(k, q));
        }
    }
    st.Finv = F;
    for (std::size_t i = 0; i < F.data.size(); ++i) {
        if (!(st.J.data[i] > 0.0)) {
            throw InvariantViolation(fmt::format("growth_split: det F = {:.6g} <= 0", st.J.data[i]));
        }
        st.Finv.data[i] = F.data[i].inverse();
        st.max_F_minus_I = std::max(st.max_F_minus_I, spectral_norm<2>(F.data[i] - Mat2::Identity()));
        st.max_Finv_minus_I = std::max(st.max_Finv_minus_I, spectral_norm<2>(st.Finv.data[i] - Mat2::Identity()));
    }
    st.Fe = F;
    st.Je = st.J;
    for (std::size_t i = 0; i < F.data.size(); ++i) {
        st.Fe.data[i] = F.data[i] / g.data[i];
        st.Je.data[i] = st.Fe.data[i].determinant();
        st.max_incompressibility_defect = std::max(st.max_incompressibility_defect, std::abs(st.Je.data[i] - 1.0));
    }
    return st;
}

}  // namespace plaquefsi
