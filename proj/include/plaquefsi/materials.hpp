#pragma once

#include "plaquefsi/common.hpp"

#include <cstdint>
#include <string>

namespace plaquefsi {

enum class EnergyKind : std::uint8_t {
    /// W(F) = (mu / 4) |F^T F - I|^2, the squared Green strain.
    SquaredGreenStrain,
};

EnergyKind parse_energy_kind(const std::string& name);
const char* to_string(EnergyKind kind);

/// Hyperelastic strain-energy density and its derivatives up to third order.
/// Immutable; every evaluator is pure.
template <int D>
class EnergyDensity {
public:
    using Matrix = Mat<D>;
    using Tangent = Eigen::Matrix<double, D * D, D * D>;

    explicit EnergyDensity(double mu, EnergyKind kind = EnergyKind::SquaredGreenStrain);

    [[nodiscard]] double mu() const { return mu_; }
    [[nodiscard]] EnergyKind kind() const { return kind_; }

    [[nodiscard]] double w(const Matrix& F) const;
    /// First derivative. Throws InvalidArgument when det F <= 0.
    [[nodiscard]] Matrix dw(const Matrix& F) const;
    /// Second derivative applied to a direction: D^2W(F)[A].
    [[nodiscard]] Matrix d2w(const Matrix& F, const Matrix& A) const;
    [[nodiscard]] Matrix d2w_identity(const Matrix& A) const { return d2w(Matrix::Identity(), A); }
    /// D^2W(I) as a D^2 x D^2 matrix acting on row-major flattened matrices:
    /// entry (i*D + j, k*D + l) is the (i, j) entry of D^2W(I)[e_k (x) e_l].
    [[nodiscard]] Tangent d2w_identity_matrix() const;
    /// Third derivative contracted with two directions: D^3W(F)[A, B].
    [[nodiscard]] Matrix d3w_contract(const Matrix& F, const Matrix& A, const Matrix& B) const;

    /// Taylor remainder of DW about the identity,
    ///   R(F) = int_0^1 D^3W((1-s) I + s F)[F - I, F - I] (1 - s) ds,
    /// by 32-point Gauss-Legendre in s. Throws InvalidArgument if the segment
    /// from I to F leaves det > 0.
    [[nodiscard]] Matrix remainder_R(const Matrix& F) const;

private:
    double mu_;
    EnergyKind kind_;
};

/// Squared distance to SO(d) for det F > 0: sum_i (sigma_i - 1)^2.
template <int D>
double dist2_to_rotations(const Mat<D>& F);

/// Monte Carlo and eigen-analysis check of the energy assumptions.
struct AssumptionReport {
    double frame_indifference_violation = 0.0;  // max |W(QF) - W(F)|
    double dw_identity_norm = 0.0;              // |DW(I)|
    double c1 = 0.0;                            // min of D^2W(I)A:A / |A|^2 over symmetric A
    double c0 = 0.0;                            // min sampled W(F) / dist^2(F, SO(d))
    double legendre_hadamard_min = 0.0;         // min D^2W(I)(a (x) b):(a (x) b) / |a|^2 |b|^2
    double major_symmetry_violation = 0.0;      // max |C_ij^kl - C_kl^ij|
    int samples = 0;
    int excluded_samples = 0;                   // det F <= 0 or F on SO(d)
};

/// Samples F = R (I + tau A) with R a random proper rotation, A a random
/// matrix with |A| = 1 and tau uniform in [0, radius]. Requires samples >= 100.
template <int D>
AssumptionReport check_assumptions(const EnergyDensity<D>& energy, int samples, double radius,
                                   std::uint64_t seed = 1);

/// Haar-distributed proper rotation from a Gaussian QR factorization.
template <int D, class Rng>
Mat<D> random_rotation(Rng& rng);

/// 32-point Gauss-Legendre rule on [0, 1] (Golub-Welsch).
struct GaussLegendre {
    Eigen::VectorXd points;
    Eigen::VectorXd weights;
};
const GaussLegendre& gauss_legendre_32();

extern template class EnergyDensity<2>;
extern template class EnergyDensity<3>;

}  // namespace plaquefsi

#include "plaquefsi/detail/random_rotation.hpp"
