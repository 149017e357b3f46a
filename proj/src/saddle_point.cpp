#include "plaquefsi/saddle_point.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace plaquefsi {

Tensor4 symmetric_gradient_tensor(double nu)
{
    Tensor4 C = Tensor4::Zero();
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            C(i * 2 + j, i * 2 + j) += nu;
            C(i * 2 + j, j * 2 + i) += nu;
        }
    }
    return C;
}

SaddlePointSystem::SaddlePointSystem(std::shared_ptr<const Space> velocity, std::shared_ptr<const Space> pressure,
                                     double mass_coefficient, const TangentFn& tangent,
                                     std::vector<int> dirichlet_nodes, bool mean_multipliers)
    : velocity_(std::move(velocity)),
      pressure_(std::move(pressure)),
      dirichlet_nodes_(std::move(dirichlet_nodes)),
      mean_multipliers_(mean_multipliers)
{
    if (velocity_->num_cells() != pressure_->num_cells() || velocity_->subdomain() != pressure_->subdomain()) {
        throw InvalidArgument("SaddlePointSystem: velocity and pressure spaces cover different cells");
    }
    if (mean_multipliers_ && (!dirichlet_nodes_.empty() || mass_coefficient != 0.0)) {
        throw InvalidArgument(
            "SaddlePointSystem: mean multipliers require zero mass coefficient and no Dirichlet nodes");
    }
    const int nu = velocity_size();
    const int np = pressure_size();
    const int n = size();
    std::vector<Eigen::Triplet<double>> trip;
    std::vector<Eigen::Triplet<double>> mtrip;
    CellValues cv(*velocity_, triangle_rule());
    CellValues pv(*pressure_, triangle_rule());
    std::vector<Eigen::Vector4d> G;
    for (int k = 0; k < velocity_->num_cells(); ++k) {
        cv.reinit(k);
        pv.reinit(k);
        const int nb = cv.num_basis();
        for (int q = 0; q < cv.num_points(); ++q) {
            const double w = cv.JxW(q);
            const Tensor4 C = tangent(k, q);
            // Flattened gradient of phi_a e_j, index 2a + j.
            G.assign(static_cast<std::size_t>(2 * nb), Eigen::Vector4d::Zero());
            for (int a = 0; a < nb; ++a) {
                const Vec2& g = cv.grad(q, a);
                for (int j = 0; j < 2; ++j) {
                    Eigen::Vector4d& v = G[static_cast<std::size_t>(2 * a + j)];
                    v[0 * 2 + j] = g.x();
                    v[1 * 2 + j] = g.y();
                }
            }
            for (int a = 0; a < nb; ++a) {
                const int da = cv.dofs()[static_cast<std::size_t>(a)];
                for (int b = 0; b < nb; ++b) {
                    const int db = cv.dofs()[static_cast<std::size_t>(b)];
                    const double m = w * cv.shape(q, a) * cv.shape(q, b);
                    for (int i = 0; i < 2; ++i) {
                        mtrip.emplace_back(2 * da + i, 2 * db + i, m);
                        for (int j = 0; j < 2; ++j) {
                            double v = w * G[static_cast<std::size_t>(2 * a + i)].dot(
                                               C * G[static_cast<std::size_t>(2 * b + j)]);
                            if (i == j) {
                                v += mass_coefficient * m;
                            }
                            if (v != 0.0) {
                                trip.emplace_back(2 * da + i, 2 * db + j, v);
                            }
                        }
                    }
                }
                for (int p = 0; p < pv.num_basis(); ++p) {
                    const int dp = nu + pv.dofs()[static_cast<std::size_t>(p)];
                    const double psi = pv.shape(q, p);
                    const Vec2& g = cv.grad(q, a);
                    for (int j = 0; j < 2; ++j) {
                        const double v = -w * psi * g[j];
                        trip.emplace_back(dp, 2 * da + j, v);
                        trip.emplace_back(2 * da + j, dp, v);
                    }
                }
                if (mean_multipliers_) {
                    for (int j = 0; j < 2; ++j) {
                        const double v = w * cv.shape(q, a);
                        trip.emplace_back(nu + np + j, 2 * da + j, v);
                        trip.emplace_back(2 * da + j, nu + np + j, v);
                    }
                }
            }
        }
    }
    full_.resize(n, n);
    full_.setFromTriplets(trip.begin(), trip.end());
    mass_.resize(nu, nu);
    mass_.setFromTriplets(mtrip.begin(), mtrip.end());

    // The dense multiplier rows ruin the sparse factorization, so the mean
    // constraint is handled in `solve` by pinning node 0 and correcting with
    // the translation kernel; the multiplier unknowns are left out here.
    std::vector<char> fixed(static_cast<std::size_t>(n), 0);
    for (int d : dirichlet_nodes_) {
        fixed[static_cast<std::size_t>(2 * d)] = 1;
        fixed[static_cast<std::size_t>(2 * d + 1)] = 1;
    }
    if (mean_multipliers_) {
        fixed[0] = 1;
        fixed[1] = 1;
        mean_weights_ = Eigen::VectorXd::Zero(nu);
        for (SparseMatrix::InnerIterator it(full_, nu + np); it; ++it) {
            if (it.row() < nu) {
                mean_weights_[it.row()] = it.value();
            }
        }
        for (SparseMatrix::InnerIterator it(full_, nu + np + 1); it; ++it) {
            if (it.row() < nu) {
                mean_weights_[it.row()] = it.value();
            }
        }
        area_ = mean_weights_.sum() / 2.0;
    }
    std::vector<int> local(static_cast<std::size_t>(n), -1);
    std::vector<int> flocal(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
        if (i >= nu + np) {
            continue;
        }
        if (fixed[static_cast<std::size_t>(i)]) {
            flocal[static_cast<std::size_t>(i)] = static_cast<int>(fixed_.size());
            fixed_.push_back(i);
        } else {
            local[static_cast<std::size_t>(i)] = static_cast<int>(free_.size());
            free_.push_back(i);
        }
    }
    std::vector<Eigen::Triplet<double>> rtrip;
    std::vector<Eigen::Triplet<double>> ctrip;
    for (int c = 0; c < full_.outerSize(); ++c) {
        if (c >= nu + np) {
            continue;  // multiplier columns are handled in solve_mean
        }
        for (SparseMatrix::InnerIterator it(full_, c); it; ++it) {
            const int r = local[static_cast<std::size_t>(it.row())];
            if (r < 0) {
                continue;
            }
            const int cf = local[static_cast<std::size_t>(it.col())];
            if (cf >= 0) {
                rtrip.emplace_back(r, cf, it.value());
            } else {
                ctrip.emplace_back(r, flocal[static_cast<std::size_t>(it.col())], it.value());
            }
        }
    }
    const auto nf = static_cast<Eigen::Index>(free_.size());
    reduced_.resize(nf, nf);
    reduced_.setFromTriplets(rtrip.begin(), rtrip.end());
    coupling_.resize(nf, static_cast<Eigen::Index>(fixed_.size()));
    coupling_.setFromTriplets(ctrip.begin(), ctrip.end());
    reduced_.makeCompressed();
    lu_.compute(reduced_);
    if (lu_.info() != Eigen::Success) {
        throw SolverError(fmt::format("SaddlePointSystem: factorization failed ({})", lu_.lastErrorMessage()));
    }
}

Eigen::VectorXd SaddlePointSystem::solve(const Eigen::VectorXd& rhs, const Field* dirichlet) const
{
    if (rhs.size() != size()) {
        throw InvalidArgument(fmt::format("SaddlePointSystem::solve: rhs has size {}, expected {}", rhs.size(), size()));
    }
    if (mean_multipliers_) {
        return solve_mean(rhs);
    }
    Eigen::VectorXd xd = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(fixed_.size()));
    if (dirichlet != nullptr) {
        for (std::size_t i = 0; i < fixed_.size(); ++i) {
            xd[static_cast<Eigen::Index>(i)] = dirichlet->values[fixed_[i]];
        }
    }
    Eigen::VectorXd b(static_cast<Eigen::Index>(free_.size()));
    for (std::size_t i = 0; i < free_.size(); ++i) {
        b[static_cast<Eigen::Index>(i)] = rhs[free_[i]];
    }
    if (!fixed_.empty()) {
        b -= coupling_ * xd;
    }
    const Eigen::VectorXd xf = lu_.solve(b);
    if (lu_.info() != Eigen::Success || !xf.allFinite()) {
        throw SolverError("SaddlePointSystem: solve failed");
    }
    Eigen::VectorXd x(size());
    for (std::size_t i = 0; i < free_.size(); ++i) {
        x[free_[i]] = xf[static_cast<Eigen::Index>(i)];
    }
    for (std::size_t i = 0; i < fixed_.size(); ++i) {
        x[fixed_[i]] = xd[static_cast<Eigen::Index>(i)];
    }
    return x;
}

Eigen::VectorXd SaddlePointSystem::solve_mean(const Eigen::VectorXd& rhs) const
{
    const int nu = velocity_size();
    const int np = pressure_size();
    // Multipliers from compatibility with the translations t_j:
    // t_j . (f - E_j l_j) = 0 with t_j . E_j = |Omega|.
    Eigen::VectorXd r = rhs;
    Eigen::Vector2d l;
    for (int j = 0; j < 2; ++j) {
        double s = 0.0;
        for (int a = j; a < nu; a += 2) {
            s += rhs[a];
        }
        l[j] = s / area_;
        for (int a = j; a < nu; a += 2) {
            r[a] -= mean_weights_[a] * l[j];
        }
    }
    Eigen::VectorXd b(static_cast<Eigen::Index>(free_.size()));
    for (std::size_t i = 0; i < free_.size(); ++i) {
        b[static_cast<Eigen::Index>(i)] = r[free_[i]];
    }
    const Eigen::VectorXd xf = lu_.solve(b);
    if (lu_.info() != Eigen::Success || !xf.allFinite()) {
        throw SolverError("SaddlePointSystem: solve failed");
    }
    Eigen::VectorXd x = Eigen::VectorXd::Zero(size());
    for (std::size_t i = 0; i < free_.size(); ++i) {
        x[free_[i]] = xf[static_cast<Eigen::Index>(i)];
    }
    // Shift by a translation to meet the prescribed means.
    for (int j = 0; j < 2; ++j) {
        double m = 0.0;
        for (int a = j; a < nu; a += 2) {
            m += mean_weights_[a] * x[a];
        }
        const double shift = (rhs[nu + np + j] - m) / area_;
        for (int a = j; a < nu; a += 2) {
            x[a] += shift;
        }
        x[nu + np + j] = l[j];
    }
    return x;
}

Field SaddlePointSystem::velocity(const Eigen::VectorXd& x) const
{
    Field u(velocity_, 2);
    u.values = x.head(velocity_size());
    return u;
}

Field SaddlePointSystem::pressure(const Eigen::VectorXd& x) const
{
    Field p(pressure_, 1);
    p.values = x.segment(velocity_size(), pressure_size());
    return p;
}

Eigen::VectorXd SaddlePointSystem::pack(const Field& u, const Field& p) const
{
    Eigen::VectorXd x = Eigen::VectorXd::Zero(size());
    x.head(velocity_size()) = u.values;
    x.segment(velocity_size(), pressure_size()) = p.values;
    return x;
}

}  // namespace plaquefsi
