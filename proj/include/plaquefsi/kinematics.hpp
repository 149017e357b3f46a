#pragma once

#include "plaquefsi/assembly.hpp"

namespace plaquefsi {

/// Pointwise Neumann-series validity bound for inverting F.
inline constexpr double kInversionBound = 0.5;

/// F = I + grad u at the quadrature points of u's space (row convention).
QpData<Mat2> deformation_gradient(const Field& u);

/// Spectral norm of a small matrix.
template <int D>
double spectral_norm(const Mat<D>& A)
{
    Eigen::JacobiSVD<Mat<D>> svd(A);
    return svd.singularValues()[0];
}

struct InverseGradient {
    QpData<Mat2> Finv;
    double max_F_minus_I = 0.0;     // sup |F - I| (spectral norm)
    double max_Finv_minus_I = 0.0;  // sup |F^{-1} - I|
};

/// Pointwise inverse of F. Requires |F - I| <= bound (spectral norm) at every
/// point; otherwise throws InvariantViolation naming the first offending mesh
/// cell. `bound` may be lowered but not raised above 1/2.
InverseGradient invert_F(const Space& space, const QpData<Mat2>& F, double bound = kInversionBound);

/// Checked single-matrix inverse used by the pointwise routines.
Mat2 invert_checked(const Mat2& F, double bound, int cell);

/// Discrete Piola identity defect for the displacement u: the cofactor field
/// J F^{-T} is projected onto continuous P1 by L2 projection and the
/// L^q norm of the elementwise divergence div_j = sum_i d_i A_ij is returned.
/// Zero for affine u; decreases under refinement for smooth u.
double piola_identity_residual(const Field& u, double q = 2.0);

/// Same diagnostic from quadrature data on u's space.
double piola_identity_residual(const Space& space, const QpData<Mat2>& F, const QpData<double>& J, double q = 2.0);

/// Pointwise determinants.
QpData<double> determinant(const QpData<Mat2>& F);

/// Deformation quantities of the isotropic multiplicative growth split
/// F = Fe (g I), all at quadrature points.
struct DeformationState {
    QpData<Mat2> F;
    QpData<double> J;
    QpData<Mat2> Finv;
    QpData<double> g;
    QpData<Mat2> Fe;
    QpData<double> Je;
    double max_incompressibility_defect = 0.0;  // max |Je - 1|
    double min_g = 0.0;
    double max_F_minus_I = 0.0;
    double max_Finv_minus_I = 0.0;
};

/// Minimum admissible growth metric.
inline constexpr double kMinGrowth = 0.5;

/// Split F by the growth metric g (values at the same quadrature points).
/// Throws InvariantViolation when g < 1/2 anywhere, naming the mesh cell.
DeformationState growth_split(const Space& space, const QpData<Mat2>& F, const QpData<double>& g);

}  // namespace plaquefsi
