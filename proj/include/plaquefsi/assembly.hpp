#pragma once

#include "plaquefsi/fe.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <vector>

namespace plaquefsi {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Data at the line-rule points of every facet carrying one tag, ordered as
/// `Mesh::facets_with_tag`.
template <class T>
struct FacetQpData {
    std::vector<int> facets;
    int num_points = 0;
    std::vector<T> data;

    FacetQpData() = default;
    FacetQpData(std::vector<int> f, int points, const T& init)
        : facets(std::move(f)), num_points(points), data(facets.size() * static_cast<std::size_t>(points), init)
    {
    }
    [[nodiscard]] T& operator()(int i, int q) { return data[static_cast<std::size_t>(i * num_points + q)]; }
    [[nodiscard]] const T& operator()(int i, int q) const
    {
        return data[static_cast<std::size_t>(i * num_points + q)];
    }
    [[nodiscard]] bool empty() const { return data.empty(); }
    [[nodiscard]] int size() const { return static_cast<int>(facets.size()); }
};

// Quadrature-point evaluation. Results share the cell ordering of the
// field's space, so P1 and P2 spaces on one subdomain produce compatible data.
QpData<double> values_at_qp(const Field& f, int comp = 0);
QpData<Vec2> vector_at_qp(const Field& f);
/// Row convention: G(i, j) = d_i f_j.
QpData<Mat2> gradient_at_qp(const Field& f);
QpData<Vec2> scalar_gradient_at_qp(const Field& f);
/// Physical coordinates of the quadrature points of a space.
QpData<Vec2> qp_points(const Space& space);

/// Cell of `facet` on the side covered by `space` (solid side of INTERFACE
/// facets for SOLID spaces).
int facet_cell(const Space& space, int facet);

/// Basis values and gradients at one line-rule point of a facet.
struct FacetPoint {
    std::vector<int> dofs;
    std::vector<double> shape;
    std::vector<Vec2> grad;
    Vec2 x;
    double weight = 0.0;  // line weight times facet length
};
FacetPoint facet_point(const Space& space, int facet, int q);

FacetQpData<double> scalar_on_facets(const Field& f, FacetTag tag, int comp = 0);
FacetQpData<Vec2> vector_on_facets(const Field& f, FacetTag tag);
FacetQpData<Mat2> gradient_on_facets(const Field& f, FacetTag tag);
FacetQpData<Vec2> scalar_gradient_on_facets(const Field& f, FacetTag tag);
FacetQpData<Vec2> facet_points(const Space& space, FacetTag tag);

// Load assembly. Vector loads use the interleaved layout of Field::values.
/// rhs += scale * int flux : grad(phi).
void add_flux_load(const Space& space, const QpData<Mat2>& flux, double scale, Eigen::VectorXd& rhs);
/// rhs += scale * int f . phi.
void add_vector_load(const Space& space, const QpData<Vec2>& f, double scale, Eigen::VectorXd& rhs);
/// rhs += scale * int f psi.
void add_scalar_load(const Space& space, const QpData<double>& f, double scale, Eigen::VectorXd& rhs);
/// rhs += scale * int flux . grad(psi).
void add_scalar_flux_load(const Space& space, const QpData<Vec2>& flux, double scale, Eigen::VectorXd& rhs);
/// rhs += scale * int_facets t . phi.
void add_facet_vector_load(const Space& space, const FacetQpData<Vec2>& t, double scale, Eigen::VectorXd& rhs);
/// rhs += scale * int_facets t psi.
void add_facet_scalar_load(const Space& space, const FacetQpData<double>& t, double scale, Eigen::VectorXd& rhs);

/// Consistent scalar mass matrix over the cells of a space.
SparseMatrix mass_matrix(const Space& space);
/// Scalar Laplacian stiffness int grad(phi_i) . grad(phi_j).
SparseMatrix stiffness_matrix(const Space& space);
/// Consistent scalar mass over the facets with a tag.
SparseMatrix facet_mass_matrix(const Space& space, FacetTag tag);

/// L2(facets) distance between a field trace and a function.
double facet_l2_error(const Field& f, FacetTag tag, const std::function<Vec2(const Vec2&)>& exact);
double facet_l2_norm(const Field& f, FacetTag tag);

/// L2 distance between a field and a function on the field's subdomain.
double l2_error(const Field& f, const std::function<Eigen::VectorXd(const Vec2&)>& exact);

/// Lift a dual (residual) vector supported on the facets with `tag` to a
/// trace by solving with the facet mass matrix. Off-facet entries of the
/// result are zero.
Field lift_facet_dual(std::shared_ptr<const Space> space, int components, FacetTag tag,
                      const Eigen::VectorXd& dual);

}  // namespace plaquefsi
