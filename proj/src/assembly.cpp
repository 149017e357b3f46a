#include "plaquefsi/assembly.hpp"

#include <Eigen/SparseCholesky>
#include <fmt/format.h>

#include <cmath>

namespace plaquefsi {

namespace {

std::size_t idx(int i)
{
    return static_cast<std::size_t>(i);
}

template <class T, class Fn>
QpData<T> at_qp(const Field& f, const T& init, Fn&& eval)
{
    const Space& sp = *f.space;
    CellValues cv(sp, triangle_rule());
    QpData<T> out(sp.num_cells(), triangle_rule().size(), init);
    for (int k = 0; k < sp.num_cells(); ++k) {
        cv.reinit(k);
        for (int q = 0; q < cv.num_points(); ++q) {
            out(k, q) = eval(cv, q);
        }
    }
    return out;
}

template <class T, class Fn>
FacetQpData<T> on_facets(const Field& f, FacetTag tag, const T& init, Fn&& eval)
{
    const Space& sp = *f.space;
    const int nq = line_rule().size();
    FacetQpData<T> out(sp.mesh().facets_with_tag(tag), nq, init);
    for (int i = 0; i < out.size(); ++i) {
        for (int q = 0; q < nq; ++q) {
            out(i, q) = eval(facet_point(sp, out.facets[idx(i)], q));
        }
    }
    return out;
}

}  // namespace

QpData<double> values_at_qp(const Field& f, int comp)
{
    return at_qp<double>(f, 0.0, [&](const CellValues& cv, int q) { return cv.value(f, q, comp); });
}

QpData<Vec2> vector_at_qp(const Field& f)
{
    return at_qp<Vec2>(f, Vec2::Zero(), [&](const CellValues& cv, int q) { return cv.vector_value(f, q); });
}

QpData<Mat2> gradient_at_qp(const Field& f)
{
    return at_qp<Mat2>(f, Mat2::Zero(), [&](const CellValues& cv, int q) { return cv.vector_gradient(f, q); });
}

QpData<Vec2> scalar_gradient_at_qp(const Field& f)
{
    return at_qp<Vec2>(f, Vec2::Zero(), [&](const CellValues& cv, int q) { return cv.scalar_gradient(f, q); });
}

QpData<Vec2> qp_points(const Space& space)
{
    CellValues cv(space, triangle_rule());
    QpData<Vec2> out(space.num_cells(), triangle_rule().size(), Vec2::Zero());
    for (int k = 0; k < space.num_cells(); ++k) {
        cv.reinit(k);
        for (int q = 0; q < cv.num_points(); ++q) {
            out(k, q) = cv.point(q);
        }
    }
    return out;
}

int facet_cell(const Space& space, int facet)
{
    const auto& fc = space.mesh().facet(facet);
    if (space.local_cell(fc.cell) >= 0) {
        return fc.cell;
    }
    if (fc.other_cell >= 0 && space.local_cell(fc.other_cell) >= 0) {
        return fc.other_cell;
    }
    throw InvalidArgument(fmt::format("facet {} does not touch the {} space", facet, to_string(space.subdomain())));
}

FacetPoint facet_point(const Space& space, int facet, int q)
{
    const Mesh& mesh = space.mesh();
    const int cell = facet_cell(space, facet);
    const int k = space.local_cell(cell);
    const CellGeometry geo(mesh, cell);
    const auto& lr = line_rule();
    const auto lambda = space.facet_lambda(facet, cell, lr.points[idx(q)]);
    const int nb = space.dofs_per_cell();
    FacetPoint p;
    const auto dofs = space.cell_dofs(k);
    p.dofs.assign(dofs.begin(), dofs.end());
    p.shape.resize(idx(nb));
    basis_values(space.degree(), lambda, p.shape);
    std::vector<std::array<double, 3>> dl(idx(nb));
    basis_lambda_derivatives(space.degree(), lambda, dl);
    p.grad.resize(idx(nb));
    for (int a = 0; a < nb; ++a) {
        Vec2 g = Vec2::Zero();
        for (int i = 0; i < 3; ++i) {
            g += dl[idx(a)][idx(i)] * geo.grad_lambda[idx(i)];
        }
        p.grad[idx(a)] = g;
    }
    p.x = geo.map(lambda);
    p.weight = lr.weights[idx(q)] * mesh.facet(facet).length;
    return p;
}

FacetQpData<double> scalar_on_facets(const Field& f, FacetTag tag, int comp)
{
    return on_facets<double>(f, tag, 0.0, [&](const FacetPoint& p) {
        double v = 0.0;
        for (std::size_t a = 0; a < p.dofs.size(); ++a) {
            v += p.shape[a] * f.at(p.dofs[a], comp);
        }
        return v;
    });
}

FacetQpData<Vec2> vector_on_facets(const Field& f, FacetTag tag)
{
    return on_facets<Vec2>(f, tag, Vec2::Zero(), [&](const FacetPoint& p) {
        Vec2 v = Vec2::Zero();
        for (std::size_t a = 0; a < p.dofs.size(); ++a) {
            v += p.shape[a] * Vec2(f.at(p.dofs[a], 0), f.at(p.dofs[a], 1));
        }
        return v;
    });
}

FacetQpData<Mat2> gradient_on_facets(const Field& f, FacetTag tag)
{
    return on_facets<Mat2>(f, tag, Mat2::Zero(), [&](const FacetPoint& p) {
        Mat2 G = Mat2::Zero();
        for (std::size_t a = 0; a < p.dofs.size(); ++a) {
            G += p.grad[a] * Vec2(f.at(p.dofs[a], 0), f.at(p.dofs[a], 1)).transpose();
        }
        return G;
    });
}

FacetQpData<Vec2> scalar_gradient_on_facets(const Field& f, FacetTag tag)
{
    return on_facets<Vec2>(f, tag, Vec2::Zero(), [&](const FacetPoint& p) {
        Vec2 g = Vec2::Zero();
        for (std::size_t a = 0; a < p.dofs.size(); ++a) {
            g += p.grad[a] * f.at(p.dofs[a]);
        }
        return g;
    });
}

FacetQpData<Vec2> facet_points(const Space& space, FacetTag tag)
{
    const int nq = line_rule().size();
    FacetQpData<Vec2> out(space.mesh().facets_with_tag(tag), nq, Vec2::Zero());
    for (int i = 0; i < out.size(); ++i) {
        const auto& fc = space.mesh().facet(out.facets[idx(i)]);
        const Vec2& a = space.mesh().vertex(fc.vertices[0]);
        const Vec2& b = space.mesh().vertex(fc.vertices[1]);
        for (int q = 0; q < nq; ++q) {
            const double s = line_rule().points[idx(q)];
            out(i, q) = (1.0 - s) * a + s * b;
        }
    }
    return out;
}

void add_flux_load(const Space& space, const QpData<Mat2>& flux, double scale, Eigen::VectorXd& rhs)
{
    if (flux.empty()) {
        return;
    }
    CellValues cv(space, triangle_rule());
    for (int k = 0; k < space.num_cells(); ++k) {
        cv.reinit(k);
        for (int q = 0; q < cv.num_points(); ++q) {
            const Mat2 P = scale * cv.JxW(q) * flux(k, q);
            for (int a = 0; a < cv.num_basis(); ++a) {
                const Vec2 v = P.transpose() * cv.grad(q, a);
                const int d = cv.dofs()[idx(a)];
                rhs[2 * d] += v.x();
                rhs[2 * d + 1] += v.y();
            }
        }
    }
}

void add_vector_load(const Space& space, const QpData<Vec2>& f, double scale, Eigen::VectorXd& rhs)
{
    if (f.empty()) {
        return;
    }
    CellValues cv(space, triangle_rule());
    for (int k = 0; k < space.num_cells(); ++k) {
        cv.reinit(k);
        for (int q = 0; q < cv.num_points(); ++q) {
            const Vec2 v = scale * cv.JxW(q) * f(k, q);
            for (int a = 0; a < cv.num_basis(); ++a) {
                const int d = cv.dofs()[idx(a)];
                rhs[2 * d] += cv.shape(q, a) * v.x();
                rhs[2 * d + 1] += cv.shape(q, a) * v.y();
            }
        }
    }
}

void add_scalar_load(const Space& space, const QpData<double>& f, double scale, Eigen::VectorXd& rhs)
{
    if (f.empty()) {
        return;
    }
    CellValues cv(space, triangle_rule());
    for (int k = 0; k < space.num_cells(); ++k) {
        cv.reinit(k);
        for (int q = 0; q < cv.num_points(); ++q) {
            const double v = scale * cv.JxW(q) * f(k, q);
            for (int a = 0; a < cv.num_basis(); ++a) {
                rhs[cv.dofs()[idx(a)]] += cv.shape(q, a) * v;
            }
        }
    }
}

void add_scalar_flux_load(const Space& space, const QpData<Vec2>& flux, double scale, Eigen::VectorXd& rhs)
{
    if (flux.empty()) {
        return;
    }
    CellValues cv(space, triangle_rule());
    for (int k = 0; k < space.num_cells(); ++k) {
        cv.reinit(k);
        for (int q = 0; q < cv.num_points(); ++q) {
            const Vec2 v = scale * cv.JxW(q) * flux(k, q);
            for (int a = 0; a < cv.num_basis(); ++a) {
                rhs[cv.dofs()[idx(a)]] += cv.grad(q, a).dot(v);
            }
        }
    }
}

void add_facet_vector_load(const Space& space, const FacetQpData<Vec2>& t, double scale, Eigen::VectorXd& rhs)
{
    for (int i = 0; i < t.size(); ++i) {
        for (int q = 0; q < t.num_points; ++q) {
            const FacetPoint p = facet_point(space, t.facets[idx(i)], q);
            const Vec2 v = scale * p.weight * t(i, q);
            for (std::size_t a = 0; a < p.dofs.size(); ++a) {
                rhs[2 * p.dofs[a]] += p.shape[a] * v.x();
                rhs[2 * p.dofs[a] + 1] += p.shape[a] * v.y();
            }
        }
    }
}

void add_facet_scalar_load(const Space& space, const FacetQpData<double>& t, double scale, Eigen::VectorXd& rhs)
{
    for (int i = 0; i < t.size(); ++i) {
        for (int q = 0; q < t.num_points; ++q) {
            const FacetPoint p = facet_point(space, t.facets[idx(i)], q);
            const double v = scale * p.weight * t(i, q);
            for (std::size_t a = 0; a < p.dofs.size(); ++a) {
                rhs[p.dofs[a]] += p.shape[a] * v;
            }
        }
    }
}

SparseMatrix mass_matrix(const Space& space)
{
    std::vector<Eigen::Triplet<double>> trip;
    CellValues cv(space, triangle_rule());
    for (int k = 0; k < space.num_cells(); ++k) {
        cv.reinit(k);
        for (int q = 0; q < cv.num_points(); ++q) {
            for (int a = 0; a < cv.num_basis(); ++a) {
                for (int b = 0; b < cv.num_basis(); ++b) {
                    trip.emplace_back(cv.dofs()[idx(a)], cv.dofs()[idx(b)],
                                      cv.JxW(q) * cv.shape(q, a) * cv.shape(q, b));
                }
            }
        }
    }
    SparseMatrix M(space.num_dofs(), space.num_dofs());
    M.setFromTriplets(trip.begin(), trip.end());
    return M;
}

SparseMatrix stiffness_matrix(const Space& space)
{
    std::vector<Eigen::Triplet<double>> trip;
    CellValues cv(space, triangle_rule());
    for (int k = 0; k < space.num_cells(); ++k) {
        cv.reinit(k);
        for (int q = 0; q < cv.num_points(); ++q) {
            for (int a = 0; a < cv.num_basis(); ++a) {
                for (int b = 0; b < cv.num_basis(); ++b) {
                    trip.emplace_back(cv.dofs()[idx(a)], cv.dofs()[idx(b)],
                                      cv.JxW(q) * cv.grad(q, a).dot(cv.grad(q, b)));
                }
            }
        }
    }
    SparseMatrix K(space.num_dofs(), space.num_dofs());
    K.setFromTriplets(trip.begin(), trip.end());
    return K;
}

SparseMatrix facet_mass_matrix(const Space& space, FacetTag tag)
{
    std::vector<Eigen::Triplet<double>> trip;
    for (int f : space.mesh().facets_with_tag(tag)) {
        for (int q = 0; q < line_rule().size(); ++q) {
            const FacetPoint p = facet_point(space, f, q);
            for (std::size_t a = 0; a < p.dofs.size(); ++a) {
                for (std::size_t b = 0; b < p.dofs.size(); ++b) {
                    const double v = p.weight * p.shape[a] * p.shape[b];
                    if (v != 0.0) {
                        trip.emplace_back(p.dofs[a], p.dofs[b], v);
                    }
                }
            }
        }
    }
    SparseMatrix M(space.num_dofs(), space.num_dofs());
    M.setFromTriplets(trip.begin(), trip.end());
    return M;
}

double facet_l2_error(const Field& f, FacetTag tag, const std::function<Vec2(const Vec2&)>& exact)
{
    double acc = 0.0;
    for (int fc : f.space->mesh().facets_with_tag(tag)) {
        for (int q = 0; q < line_rule().size(); ++q) {
            const FacetPoint p = facet_point(*f.space, fc, q);
            Vec2 v = Vec2::Zero();
            for (std::size_t a = 0; a < p.dofs.size(); ++a) {
                for (int c = 0; c < f.components; ++c) {
                    v[c] += p.shape[a] * f.at(p.dofs[a], c);
                }
            }
            acc += p.weight * (v - exact(p.x)).squaredNorm();
        }
    }
    return std::sqrt(acc);
}

double facet_l2_norm(const Field& f, FacetTag tag)
{
    return facet_l2_error(f, tag, [](const Vec2&) { return Vec2::Zero(); });
}

double l2_error(const Field& f, const std::function<Eigen::VectorXd(const Vec2&)>& exact)
{
    const Space& sp = *f.space;
    CellValues cv(sp, triangle_rule());
    double acc = 0.0;
    for (int k = 0; k < sp.num_cells(); ++k) {
        cv.reinit(k);
        for (int q = 0; q < cv.num_points(); ++q) {
            const Eigen::VectorXd ex = exact(cv.point(q));
            for (int c = 0; c < f.components; ++c) {
                const double d = cv.value(f, q, c) - ex[c];
                acc += cv.JxW(q) * d * d;
            }
        }
    }
    return std::sqrt(acc);
}

Field lift_facet_dual(std::shared_ptr<const Space> space, int components, FacetTag tag, const Eigen::VectorXd& dual)
{
    const std::vector<int> dofs = space->boundary_dofs(tag);
    const SparseMatrix Mfull = facet_mass_matrix(*space, tag);
    std::vector<int> local(idx(space->num_dofs()), -1);
    for (std::size_t i = 0; i < dofs.size(); ++i) {
        local[idx(dofs[i])] = static_cast<int>(i);
    }
    std::vector<Eigen::Triplet<double>> trip;
    for (int k = 0; k < Mfull.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(Mfull, k); it; ++it) {
            const int r = local[idx(static_cast<int>(it.row()))];
            const int c = local[idx(static_cast<int>(it.col()))];
            if (r >= 0 && c >= 0) {
                trip.emplace_back(r, c, it.value());
            }
        }
    }
    const auto n = static_cast<Eigen::Index>(dofs.size());
    SparseMatrix M(n, n);
    M.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<SparseMatrix> solver(M);
    if (solver.info() != Eigen::Success) {
        throw SolverError("lift_facet_dual: facet mass matrix factorization failed");
    }
    Field out(space, components);
    out.values.setZero();
    for (int c = 0; c < components; ++c) {
        Eigen::VectorXd b(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            b[i] = dual[dofs[idx(static_cast<int>(i))] * components + c];
        }
        const Eigen::VectorXd x = solver.solve(b);
        for (Eigen::Index i = 0; i < n; ++i) {
            out.at(dofs[idx(static_cast<int>(i))], c) = x[i];
        }
    }
    return out;
}

}  // namespace plaquefsi
