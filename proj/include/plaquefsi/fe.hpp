#pragma once

#include "plaquefsi/common.hpp"
#include "plaquefsi/mesh.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

namespace plaquefsi {

/// Quadrature on the reference triangle in barycentric coordinates.
struct TriangleRule {
    std::vector<std::array<double, 3>> points;
    std::vector<double> weights;  // sum to 1 (fraction of the cell area)

    [[nodiscard]] int size() const { return static_cast<int>(weights.size()); }
};

/// Gauss rule on [0, 1].
struct LineRule {
    std::vector<double> points;
    std::vector<double> weights;  // sum to 1

    [[nodiscard]] int size() const { return static_cast<int>(weights.size()); }
};

/// 7-point rule, exact for degree 5.
const TriangleRule& triangle_rule();
/// 3-point Gauss-Legendre, exact for degree 5.
const LineRule& line_rule();
/// Single point at the barycentre (exact for degree 1).
const TriangleRule& midpoint_rule();

/// Lagrange basis of degree 1 or 2 on a triangle. Local ordering: vertices
/// 0, 1, 2, then edge midpoints (1,2), (2,0), (0,1).
int basis_size(int degree);
void basis_values(int degree, const std::array<double, 3>& lambda, std::span<double> out);
/// Derivatives with respect to the three barycentric coordinates.
void basis_lambda_derivatives(int degree, const std::array<double, 3>& lambda,
                              std::span<std::array<double, 3>> out);

/// Affine geometry of one cell.
struct CellGeometry {
    std::array<Vec2, 3> x;
    std::array<Vec2, 3> grad_lambda;
    double area = 0.0;

    CellGeometry(const Mesh& mesh, int cell);
    [[nodiscard]] Vec2 map(const std::array<double, 3>& lambda) const;
};

/// Continuous scalar Lagrange space on one subdomain with periodic
/// identification of the lateral boundary.
class Space {
public:
    Space(std::shared_ptr<const Mesh> mesh, int degree, Subdomain subdomain);

    [[nodiscard]] const Mesh& mesh() const { return *mesh_; }
    [[nodiscard]] const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
    [[nodiscard]] int degree() const { return degree_; }
    [[nodiscard]] Subdomain subdomain() const { return subdomain_; }
    [[nodiscard]] int num_dofs() const { return static_cast<int>(points_.size()); }
    [[nodiscard]] int dofs_per_cell() const { return basis_size(degree_); }

    /// Mesh cell indices covered by the space, in increasing order.
    [[nodiscard]] std::span<const int> cells() const { return cells_; }
    [[nodiscard]] int num_cells() const { return static_cast<int>(cells_.size()); }
    /// Local dofs of the k-th covered cell (k indexes `cells()`).
    [[nodiscard]] std::span<const int> cell_dofs(int k) const
    {
        return {cell_dofs_.data() + static_cast<std::size_t>(k * dofs_per_cell()),
                static_cast<std::size_t>(dofs_per_cell())};
    }
    /// Position of a mesh cell in `cells()`, or -1.
    [[nodiscard]] int local_cell(int mesh_cell) const
    {
        return local_cell_[static_cast<std::size_t>(mesh_cell)];
    }

    [[nodiscard]] const Vec2& dof_point(int dof) const { return points_[static_cast<std::size_t>(dof)]; }
    /// Mesh-wide node identifier; equal keys in two spaces of the same degree
    /// denote the same geometric node.
    [[nodiscard]] std::int64_t node_key(int dof) const { return keys_[static_cast<std::size_t>(dof)]; }
    [[nodiscard]] int dof_of_key(std::int64_t key) const;

    /// Dofs on a facet: the two vertices, then the midpoint for degree 2.
    [[nodiscard]] std::vector<int> facet_dofs(int facet) const;
    /// Sorted unique dofs lying on facets with the given tag.
    [[nodiscard]] std::vector<int> boundary_dofs(FacetTag tag) const;
    /// Barycentric coordinates (in `cell`) of the point at parameter s along
    /// facet `facet`, which must be a facet of `cell`.
    [[nodiscard]] std::array<double, 3> facet_lambda(int facet, int cell, double s) const;

private:
    std::shared_ptr<const Mesh> mesh_;
    int degree_;
    Subdomain subdomain_;
    std::vector<int> cells_;
    std::vector<int> local_cell_;
    std::vector<int> cell_dofs_;
    std::vector<Vec2> points_;
    std::vector<std::int64_t> keys_;
    std::unordered_map<std::int64_t, int> key_to_dof_;
};

/// Finite element field (scalar or vector) on a Space. Vector components are
/// interleaved: value of component c at dof i is values[i * components + c].
struct Field {
    std::shared_ptr<const Space> space;
    int components = 1;
    Eigen::VectorXd values;

    Field() = default;
    Field(std::shared_ptr<const Space> s, int comps);

    [[nodiscard]] int num_dofs() const { return space->num_dofs(); }
    [[nodiscard]] double& at(int dof, int comp = 0)
    {
        return values[static_cast<Eigen::Index>(dof * components + comp)];
    }
    [[nodiscard]] double at(int dof, int comp = 0) const
    {
        return values[static_cast<Eigen::Index>(dof * components + comp)];
    }
};

using ScalarField = Field;
using VectorField = Field;

/// Concentration-type field living on both subdomains with independent
/// (duplicated) interface values.
struct TwoSidedField {
    Field fluid;
    Field solid;
};

/// Per-cell basis data at the points of a triangle rule.
class CellValues {
public:
    CellValues(const Space& space, const TriangleRule& rule);

    void reinit(int local_cell);

    [[nodiscard]] int num_points() const { return rule_->size(); }
    [[nodiscard]] int num_basis() const { return nb_; }
    [[nodiscard]] double JxW(int q) const { return jxw_[static_cast<std::size_t>(q)]; }
    [[nodiscard]] double shape(int q, int a) const { return shape_[static_cast<std::size_t>(q * nb_ + a)]; }
    [[nodiscard]] const Vec2& grad(int q, int a) const { return grad_[static_cast<std::size_t>(q * nb_ + a)]; }
    [[nodiscard]] const Vec2& point(int q) const { return points_[static_cast<std::size_t>(q)]; }
    [[nodiscard]] std::span<const int> dofs() const { return dofs_; }
    [[nodiscard]] int mesh_cell() const { return mesh_cell_; }
    [[nodiscard]] double area() const { return area_; }

    [[nodiscard]] double value(const Field& f, int q, int comp = 0) const;
    /// Row-convention gradient of a vector field: G(i, j) = d_i f_j.
    [[nodiscard]] Mat2 vector_gradient(const Field& f, int q) const;
    [[nodiscard]] Vec2 vector_value(const Field& f, int q) const;
    [[nodiscard]] Vec2 scalar_gradient(const Field& f, int q) const;

private:
    const Space* space_;
    const TriangleRule* rule_;
    int nb_;
    int mesh_cell_ = -1;
    double area_ = 0.0;
    std::vector<int> dofs_;
    std::vector<double> ref_shape_;
    std::vector<std::array<double, 3>> ref_dlambda_;
    std::vector<double> shape_;
    std::vector<Vec2> grad_;
    std::vector<double> jxw_;
    std::vector<Vec2> points_;
};

/// Quadrature-point data over the cells of a Space: entry (k, q) for the
/// k-th covered cell and q-th point of the triangle rule.
template <class T>
struct QpData {
    int num_points = 0;
    std::vector<T> data;

    QpData() = default;
    QpData(int cells, int points, const T& init) : num_points(points), data(static_cast<std::size_t>(cells * points), init) {}

    [[nodiscard]] T& operator()(int k, int q) { return data[static_cast<std::size_t>(k * num_points + q)]; }
    [[nodiscard]] const T& operator()(int k, int q) const
    {
        return data[static_cast<std::size_t>(k * num_points + q)];
    }
    [[nodiscard]] bool empty() const { return data.empty(); }
};

/// Interpolate a callable at the dof points.
template <class Fn>
Field interpolate_scalar(std::shared_ptr<const Space> space, Fn&& fn)
{
    Field f(space, 1);
    for (int i = 0; i < space->num_dofs(); ++i) {
        f.at(i) = fn(space->dof_point(i));
    }
    return f;
}

template <class Fn>
Field interpolate_vector(std::shared_ptr<const Space> space, Fn&& fn)
{
    Field f(space, 2);
    for (int i = 0; i < space->num_dofs(); ++i) {
        const Vec2 v = fn(space->dof_point(i));
        f.at(i, 0) = v.x();
        f.at(i, 1) = v.y();
    }
    return f;
}

/// Lumped (row-sum) mass of a degree-1 space: integral of each hat function.
Eigen::VectorXd lumped_mass(const Space& p1_space);

/// Lumped facet measure per dof for facets with the given tag (degree 1).
Eigen::VectorXd lumped_facet_mass(const Space& p1_space, FacetTag tag);

}  // namespace plaquefsi
