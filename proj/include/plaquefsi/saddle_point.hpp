#pragma once

#include "plaquefsi/assembly.hpp"

#include <Eigen/SparseLU>

#include <functional>
#include <memory>

namespace plaquefsi {

/// Fourth-order tensor acting on row-major flattened 2x2 matrices.
using Tensor4 = Eigen::Matrix4d;

/// nu (A + A^T) as a Tensor4.
Tensor4 symmetric_gradient_tensor(double nu);

/// Taylor-Hood saddle-point operator
///
///   [ a M + A_C   -B^T  E ] [u]   [f]
///   [ -B           0    0 ] [p] = [g]
///   [ E^T          0    0 ] [l]   [0]
///
/// with A_C(u, phi) = int (C : grad u) : grad phi, B(u, psi) = int psi div u,
/// optional multipliers E fixing the mean of each velocity component (only
/// for a = 0 without Dirichlet nodes), and strongly imposed Dirichlet values
/// on a set of velocity nodes. The matrix
/// is factorized once; `solve` may be called repeatedly.
class SaddlePointSystem {
public:
    using TangentFn = std::function<Tensor4(int cell, int qp)>;

    SaddlePointSystem(std::shared_ptr<const Space> velocity, std::shared_ptr<const Space> pressure,
                      double mass_coefficient, const TangentFn& tangent, std::vector<int> dirichlet_nodes,
                      bool mean_multipliers = false);

    [[nodiscard]] int velocity_size() const { return 2 * velocity_->num_dofs(); }
    [[nodiscard]] int pressure_size() const { return pressure_->num_dofs(); }
    [[nodiscard]] int multiplier_size() const { return mean_multipliers_ ? 2 : 0; }
    [[nodiscard]] int size() const { return velocity_size() + pressure_size() + multiplier_size(); }

    [[nodiscard]] const std::shared_ptr<const Space>& velocity_space() const { return velocity_; }
    [[nodiscard]] const std::shared_ptr<const Space>& pressure_space() const { return pressure_; }
    [[nodiscard]] const std::vector<int>& dirichlet_nodes() const { return dirichlet_nodes_; }

    /// Full operator before Dirichlet elimination.
    [[nodiscard]] const SparseMatrix& matrix() const { return full_; }
    /// Vector mass matrix on the velocity block (without the coefficient).
    [[nodiscard]] const SparseMatrix& velocity_mass() const { return mass_; }

    /// Solve with right-hand side `rhs` (length size()) and Dirichlet values
    /// taken from `dirichlet` (velocity field; only constrained nodes are read).
    /// Returns the full solution vector.
    [[nodiscard]] Eigen::VectorXd solve(const Eigen::VectorXd& rhs, const Field* dirichlet = nullptr) const;

    /// Split a solution vector into velocity and pressure fields.
    [[nodiscard]] Field velocity(const Eigen::VectorXd& x) const;
    [[nodiscard]] Field pressure(const Eigen::VectorXd& x) const;
    /// Concatenate fields into a solution vector (multipliers zero).
    [[nodiscard]] Eigen::VectorXd pack(const Field& u, const Field& p) const;

    [[nodiscard]] const std::vector<int>& free_indices() const { return free_; }

private:
    std::shared_ptr<const Space> velocity_;
    std::shared_ptr<const Space> pressure_;
    std::vector<int> dirichlet_nodes_;
    bool mean_multipliers_;
    SparseMatrix full_;
    SparseMatrix mass_;
    SparseMatrix reduced_;
    SparseMatrix coupling_;  // free rows, constrained columns
    std::vector<int> free_;
    std::vector<int> fixed_;
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_;
    Eigen::VectorXd mean_weights_;  // int phi_a for each velocity dof
    double area_ = 0.0;

    [[nodiscard]] Eigen::VectorXd solve_mean(const Eigen::VectorXd& rhs) const;
};

}  // namespace plaquefsi
