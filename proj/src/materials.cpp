#include "plaquefsi/materials.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace plaquefsi {

EnergyKind parse_energy_kind(const std::string& name)
{
    if (name == "squared-green-strain") {
        return EnergyKind::SquaredGreenStrain;
    }
    throw InvalidArgument(fmt::format("unknown energy kind '{}' (known: squared-green-strain)", name));
}

const char* to_string(EnergyKind kind)
{
    switch (kind) {
    case EnergyKind::SquaredGreenStrain: return "squared-green-strain";
    }
    return "?";
}

const GaussLegendre& gauss_legendre_32()
{
    static const GaussLegendre rule = [] {
        constexpr int n = 32;
        // Jacobi matrix of the Legendre recurrence on [-1, 1].
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
        for (int k = 1; k < n; ++k) {
            const double b = k / std::sqrt(4.0 * k * k - 1.0);
            J(k, k - 1) = b;
            J(k - 1, k) = b;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
        GaussLegendre r;
        r.points = 0.5 * (es.eigenvalues().array() + 1.0);
        r.weights = es.eigenvectors().row(0).transpose().array().square();  // sums to 1 on [0, 1]
        return r;
    }();
    return rule;
}

template <int D>
EnergyDensity<D>::EnergyDensity(double mu, EnergyKind kind) : mu_(mu), kind_(kind)
{
    if (!(mu > 0.0)) {
        throw InvalidArgument(fmt::format("EnergyDensity: mu must be positive, got {}", mu));
    }
}

template <int D>
double EnergyDensity<D>::w(const Matrix& F) const
{
    const Matrix E = F.transpose() * F - Matrix::Identity();
    return 0.25 * mu_ * E.squaredNorm();
}

template <int D>
typename EnergyDensity<D>::Matrix EnergyDensity<D>::dw(const Matrix& F) const
{
    if (!(F.determinant() > 0.0)) {
        throw InvalidArgument(fmt::format("EnergyDensity::dw: det F = {} <= 0", F.determinant()));
    }
    return mu_ * F * (F.transpose() * F - Matrix::Identity());
}

template <int D>
typename EnergyDensity<D>::Matrix EnergyDensity<D>::d2w(const Matrix& F, const Matrix& A) const
{
    return mu_ * (A * (F.transpose() * F - Matrix::Identity()) + F * (A.transpose() * F + F.transpose() * A));
}

template <int D>
typename EnergyDensity<D>::Tangent EnergyDensity<D>::d2w_identity_matrix() const
{
    Tangent C;
    for (int k = 0; k < D; ++k) {
        for (int l = 0; l < D; ++l) {
            Matrix E = Matrix::Zero();
            E(k, l) = 1.0;
            const Matrix col = d2w_identity(E);
            for (int i = 0; i < D; ++i) {
                for (int j = 0; j < D; ++j) {
                    C(i * D + j, k * D + l) = col(i, j);
                }
            }
        }
    }
    return C;
}

template <int D>
typename EnergyDensity<D>::Matrix EnergyDensity<D>::d3w_contract(const Matrix& F, const Matrix& A,
                                                                 const Matrix& B) const
{
    return mu_ * (A * (B.transpose() * F + F.transpose() * B) + B * (A.transpose() * F + F.transpose() * A) +
                  F * (A.transpose() * B + B.transpose() * A));
}

template <int D>
typename EnergyDensity<D>::Matrix EnergyDensity<D>::remainder_R(const Matrix& F) const
{
    const Matrix I = Matrix::Identity();
    const Matrix H = F - I;
    const auto& gl = gauss_legendre_32();
    Matrix acc = Matrix::Zero();
    for (Eigen::Index k = 0; k < gl.points.size(); ++k) {
        const double s = gl.points[k];
        const Matrix Fs = I + s * H;
        if (!(Fs.determinant() > 0.0)) {
            throw InvalidArgument(
                fmt::format("remainder_R: segment from I to F leaves det > 0 (det = {} at s = {})", Fs.determinant(), s));
        }
        acc += gl.weights[k] * (1.0 - s) * d3w_contract(Fs, H, H);
    }
    return acc;
}

template <int D>
double dist2_to_rotations(const Mat<D>& F)
{
    Eigen::JacobiSVD<Mat<D>> svd(F);
    return (svd.singularValues().array() - 1.0).square().sum();
}

template <int D>
AssumptionReport check_assumptions(const EnergyDensity<D>& energy, int samples, double radius, std::uint64_t seed)
{
    using Matrix = Mat<D>;
    if (samples < 100) {
        throw InvalidArgument(fmt::format("check_assumptions: need at least 100 samples, got {}", samples));
    }
    if (!(radius > 0.0)) {
        throw InvalidArgument(fmt::format("check_assumptions: radius must be positive, got {}", radius));
    }
    AssumptionReport rep;
    rep.samples = samples;
    rep.dw_identity_norm = energy.dw(Matrix::Identity()).norm();

    const auto C = energy.d2w_identity_matrix();
    rep.major_symmetry_violation = (C - C.transpose()).cwiseAbs().maxCoeff();

    // Orthonormal basis of the symmetric subspace, flattened row-major.
    constexpr int nsym = D * (D + 1) / 2;
    Eigen::Matrix<double, D * D, nsym> basis = Eigen::Matrix<double, D * D, nsym>::Zero();
    int col = 0;
    for (int i = 0; i < D; ++i) {
        for (int j = i; j < D; ++j, ++col) {
            if (i == j) {
                basis(i * D + j, col) = 1.0;
            } else {
                basis(i * D + j, col) = std::sqrt(0.5);
                basis(j * D + i, col) = std::sqrt(0.5);
            }
        }
    }
    const Eigen::Matrix<double, nsym, nsym> Csym =
        basis.transpose() * (0.5 * (C + C.transpose())) * basis;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, nsym, nsym>> es(Csym);
    rep.c1 = es.eigenvalues().minCoeff();

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    auto random_matrix = [&] {
        Matrix A;
        for (int i = 0; i < D; ++i) {
            for (int j = 0; j < D; ++j) {
                A(i, j) = normal(rng);
            }
        }
        return A;
    };

    double c0 = std::numeric_limits<double>::infinity();
    double lh = std::numeric_limits<double>::infinity();
    for (int n = 0; n < samples; ++n) {
        const Matrix Q = random_rotation<D>(rng);
        Matrix A = random_matrix();
        A /= A.norm();
        const double tau = radius * uniform(rng);
        const Matrix F = random_rotation<D>(rng) * (Matrix::Identity() + tau * A);
        rep.frame_indifference_violation =
            std::max(rep.frame_indifference_violation, std::abs(energy.w(Q * F) - energy.w(F)));
        const double d2 = dist2_to_rotations<D>(F);
        if (F.determinant() <= 0.0 || d2 < 1e-14) {
            ++rep.excluded_samples;
        } else {
            c0 = std::min(c0, energy.w(F) / d2);
        }

        Eigen::Matrix<double, D, 1> a;
        Eigen::Matrix<double, D, 1> b;
        for (int i = 0; i < D; ++i) {
            a[i] = normal(rng);
            b[i] = normal(rng);
        }
        const Matrix ab = a * b.transpose();
        lh = std::min(lh, energy.d2w_identity(ab).cwiseProduct(ab).sum() / (a.squaredNorm() * b.squaredNorm()));
    }
    rep.c0 = std::isfinite(c0) ? c0 : 0.0;
    rep.legendre_hadamard_min = lh;
    return rep;
}

template class EnergyDensity<2>;
template class EnergyDensity<3>;
template double dist2_to_rotations<2>(const Mat<2>&);
template double dist2_to_rotations<3>(const Mat<3>&);
template AssumptionReport check_assumptions<2>(const EnergyDensity<2>&, int, double, std::uint64_t);
template AssumptionReport check_assumptions<3>(const EnergyDensity<3>&, int, double, std::uint64_t);

}  // namespace plaquefsi
