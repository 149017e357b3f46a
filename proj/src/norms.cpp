#include "plaquefsi/norms.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>

namespace plaquefsi {

std::vector<double> uniform_time_grid(double final_time, int steps)
{
    if (!(final_time > 0.0) || steps < 1) {
        throw InvalidArgument(fmt::format("uniform_time_grid: need T > 0 and N >= 1 (T={}, N={})",
                                          final_time, steps));
    }
    std::vector<double> t(static_cast<std::size_t>(steps + 1));
    for (int k = 0; k <= steps; ++k) {
        t[static_cast<std::size_t>(k)] = final_time * k / steps;
    }
    return t;
}

void NormSpec::validate() const
{
    if (!(q > 1.0)) {
        throw InvalidArgument(fmt::format("NormSpec: q must exceed 1, got {}", q));
    }
    if (s < 0.0 || s > 2.0) {
        throw InvalidArgument(fmt::format("NormSpec: spatial index s must lie in [0, 2], got {}", s));
    }
    if (r < 0.0 || r > 1.0) {
        throw InvalidArgument(fmt::format("NormSpec: temporal index r must lie in [0, 1], got {}", r));
    }
    if ((kind == NormKind::SlobodeckijSeminorm || kind == NormKind::Anisotropic) && !(r > 0.0 && r < 1.0)) {
        throw InvalidArgument(fmt::format("NormSpec: Slobodeckij seminorm needs 0 < r < 1, got {}", r));
    }
}

std::vector<double> trapezoid_weights(std::span<const double> times)
{
    std::vector<double> w(times.size(), 0.0);
    for (std::size_t k = 1; k < times.size(); ++k) {
        const double h = times[k] - times[k - 1];
        w[k - 1] += 0.5 * h;
        w[k] += 0.5 * h;
    }
    return w;
}

namespace {

double lq_power(const Field& f, double q)
{
    const Space& sp = *f.space;
    CellValues cv(sp, triangle_rule());
    double acc = 0.0;
    for (int k = 0; k < sp.num_cells(); ++k) {
        cv.reinit(k);
        for (int qp = 0; qp < cv.num_points(); ++qp) {
            double m2 = 0.0;
            for (int c = 0; c < f.components; ++c) {
                const double v = cv.value(f, qp, c);
                m2 += v * v;
            }
            acc += std::pow(std::sqrt(m2), q) * cv.JxW(qp);
        }
    }
    return acc;
}

/// Broken gradient at quadrature points: sum over components of |grad f_c|^2.
double gradient_lq_power(const Field& f, double q)
{
    const Space& sp = *f.space;
    CellValues cv(sp, triangle_rule());
    double acc = 0.0;
    for (int k = 0; k < sp.num_cells(); ++k) {
        cv.reinit(k);
        for (int qp = 0; qp < cv.num_points(); ++qp) {
            double m2 = 0.0;
            for (int c = 0; c < f.components; ++c) {
                Vec2 g = Vec2::Zero();
                for (int a = 0; a < cv.num_basis(); ++a) {
                    g += cv.grad(qp, a) * f.at(cv.dofs()[static_cast<std::size_t>(a)], c);
                }
                m2 += g.squaredNorm();
            }
            acc += std::pow(std::sqrt(m2), q) * cv.JxW(qp);
        }
    }
    return acc;
}

/// Cellwise-constant Hessian of a degree-2 field (zero for degree 1).
double hessian_lq_power(const Field& f, double q)
{
    const Space& sp = *f.space;
    if (sp.degree() == 1) {
        return 0.0;
    }
    // Second barycentric derivatives of the P2 basis.
    constexpr std::array<std::array<std::array<double, 3>, 3>, 6> d2 = {{
        {{{4, 0, 0}, {0, 0, 0}, {0, 0, 0}}},
        {{{0, 0, 0}, {0, 4, 0}, {0, 0, 0}}},
        {{{0, 0, 0}, {0, 0, 0}, {0, 0, 4}}},
        {{{0, 0, 0}, {0, 0, 4}, {0, 4, 0}}},
        {{{0, 0, 4}, {0, 0, 0}, {4, 0, 0}}},
        {{{0, 4, 0}, {4, 0, 0}, {0, 0, 0}}},
    }};
    double acc = 0.0;
    for (int k = 0; k < sp.num_cells(); ++k) {
        const int cell = sp.cells()[static_cast<std::size_t>(k)];
        const CellGeometry geo(sp.mesh(), cell);
        const auto dofs = sp.cell_dofs(k);
        double m2 = 0.0;
        for (int c = 0; c < f.components; ++c) {
            Mat2 hess = Mat2::Zero();
            for (int a = 0; a < 6; ++a) {
                const double u = f.at(dofs[static_cast<std::size_t>(a)], c);
                for (int i = 0; i < 3; ++i) {
                    for (int j = 0; j < 3; ++j) {
                        const double v = d2[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                        if (v != 0.0) {
                            hess += u * v * geo.grad_lambda[static_cast<std::size_t>(i)] *
                                    geo.grad_lambda[static_cast<std::size_t>(j)].transpose();
                        }
                    }
                }
            }
            m2 += hess.squaredNorm();
        }
        acc += std::pow(std::sqrt(m2), q) * geo.area;
    }
    return acc;
}

/// Barycentre data of a field or of its gradient, one row per cell.
Eigen::MatrixXd barycentre_values(const Field& f, bool gradient)
{
    const Space& sp = *f.space;
    CellValues cv(sp, midpoint_rule());
    const int cols = gradient ? 2 * f.components : f.components;
    Eigen::MatrixXd vals(sp.num_cells(), cols);
    for (int k = 0; k < sp.num_cells(); ++k) {
        cv.reinit(k);
        for (int c = 0; c < f.components; ++c) {
            if (gradient) {
                Vec2 g = Vec2::Zero();
                for (int a = 0; a < cv.num_basis(); ++a) {
                    g += cv.grad(0, a) * f.at(cv.dofs()[static_cast<std::size_t>(a)], c);
                }
                vals(k, 2 * c) = g.x();
                vals(k, 2 * c + 1) = g.y();
            } else {
                vals(k, c) = cv.value(f, 0, c);
            }
        }
    }
    return vals;
}

double slobodeckij_power(const Field& f, double s, double q, bool gradient)
{
    const Space& sp = *f.space;
    std::vector<Vec2> bc(static_cast<std::size_t>(sp.num_cells()));
    std::vector<double> meas(static_cast<std::size_t>(sp.num_cells()));
    for (int k = 0; k < sp.num_cells(); ++k) {
        const int cell = sp.cells()[static_cast<std::size_t>(k)];
        bc[static_cast<std::size_t>(k)] = sp.mesh().barycenter(cell);
        meas[static_cast<std::size_t>(k)] = sp.mesh().cell_area(cell);
    }
    const double v = slobodeckij_seminorm(bc, meas, barycentre_values(f, gradient), s, q);
    return std::pow(v, q);
}

double sobolev_power(const Field& f, double s, double q)
{
    double acc = lq_power(f, q);
    if (s >= 1.0) {
        acc += gradient_lq_power(f, q);
    }
    if (s >= 2.0) {
        acc += hessian_lq_power(f, q);
    }
    const double frac = s - std::floor(s);
    if (frac > 0.0) {
        acc += slobodeckij_power(f, frac, q, s > 1.0);
    }
    return acc;
}

/// Values of a field at the quadrature points of its space, one row per
/// point, together with the quadrature weights.
struct QpSamples {
    Eigen::MatrixXd values;
    Eigen::VectorXd weights;
};

QpSamples sample(const Field& f)
{
    const Space& sp = *f.space;
    CellValues cv(sp, triangle_rule());
    const int nq = triangle_rule().size();
    QpSamples out;
    out.values.resize(static_cast<Eigen::Index>(sp.num_cells()) * nq, f.components);
    out.weights.resize(out.values.rows());
    Eigen::Index row = 0;
    for (int k = 0; k < sp.num_cells(); ++k) {
        cv.reinit(k);
        for (int qp = 0; qp < nq; ++qp, ++row) {
            for (int c = 0; c < f.components; ++c) {
                out.values(row, c) = cv.value(f, qp, c);
            }
            out.weights[row] = cv.JxW(qp);
        }
    }
    return out;
}

double diff_lq_power(const QpSamples& a, const QpSamples& b, double q)
{
    const Eigen::VectorXd norms = (a.values - b.values).rowwise().norm();
    return (norms.array().pow(q) * a.weights.array()).sum();
}

struct SnapshotOps {
    int count = 0;
    std::function<double(int)> spatial_power;   // ||f_k||^q in the spatial norm
    std::function<double(int, int)> diff_power;  // ||f_i - f_j||_{L^q}^q
};

double combine(std::span<const double> times, const SnapshotOps& ops, const NormSpec& spec)
{
    spec.validate();
    if (ops.count == 0) {
        throw InvalidArgument("trajectory_norm: empty trajectory");
    }
    if (static_cast<int>(times.size()) != ops.count) {
        throw InvalidArgument(fmt::format("trajectory_norm: {} times for {} snapshots", times.size(), ops.count));
    }
    const double q = spec.q;
    const auto w = trapezoid_weights(times);
    auto time_lq = [&] {
        if (ops.count == 1) {
            return std::pow(ops.spatial_power(0), 1.0 / q);
        }
        double acc = 0.0;
        for (int k = 0; k < ops.count; ++k) {
            acc += w[static_cast<std::size_t>(k)] * ops.spatial_power(k);
        }
        return std::pow(acc, 1.0 / q);
    };
    auto seminorm = [&] {
        double acc = 0.0;
        for (int i = 0; i < ops.count; ++i) {
            for (int j = i + 1; j < ops.count; ++j) {
                const double dt = std::abs(times[static_cast<std::size_t>(i)] - times[static_cast<std::size_t>(j)]);
                acc += 2.0 * w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(j)] * ops.diff_power(i, j) /
                       std::pow(dt, 1.0 + spec.r * q);
            }
        }
        return std::pow(acc, 1.0 / q);
    };
    switch (spec.kind) {
    case NormKind::Lebesgue:
    case NormKind::Sobolev:
        return time_lq();
    case NormKind::SlobodeckijSeminorm:
        return seminorm();
    case NormKind::Anisotropic:
        return std::max(time_lq(), seminorm());
    }
    return 0.0;
}

}  // namespace

double lq_norm(const Field& f, double q)
{
    return std::pow(lq_power(f, q), 1.0 / q);
}

double sobolev_norm(const Field& f, double s, double q)
{
    if (s < 0.0 || s > 2.0) {
        throw InvalidArgument(fmt::format("sobolev_norm: s must lie in [0, 2], got {}", s));
    }
    return std::pow(sobolev_power(f, s, q), 1.0 / q);
}

double slobodeckij_seminorm(std::span<const Vec2> barycenters, std::span<const double> measures,
                            const Eigen::MatrixXd& values, double s, double q)
{
    if (!(s > 0.0 && s < 1.0)) {
        throw InvalidArgument(fmt::format("slobodeckij_seminorm: s must lie in (0, 1), got {}", s));
    }
    if (!(q > 1.0)) {
        throw InvalidArgument(fmt::format("slobodeckij_seminorm: q must exceed 1, got {}", q));
    }
    const auto n = static_cast<Eigen::Index>(barycenters.size());
    const double exponent = 0.5 * (2.0 + s * q);  // |x - y|^{d + s q} via squared distance
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& xi = barycenters[static_cast<std::size_t>(i)];
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double diff = (values.row(i) - values.row(j)).norm();
            if (diff == 0.0) {
                continue;
            }
            const double r2 = (xi - barycenters[static_cast<std::size_t>(j)]).squaredNorm();
            acc += std::pow(diff, q) / std::pow(r2, exponent) * measures[static_cast<std::size_t>(i)] *
                   measures[static_cast<std::size_t>(j)];
        }
    }
    return std::pow(2.0 * acc, 1.0 / q);
}

double slobodeckij_seminorm(const Field& f, double s, double q)
{
    if (!(s > 0.0 && s < 1.0)) {
        throw InvalidArgument(fmt::format("slobodeckij_seminorm: s must lie in (0, 1), got {}", s));
    }
    return std::pow(slobodeckij_power(f, s, q, false), 1.0 / q);
}

double temporal_seminorm(const Trajectory<Field>& w, double r, double q, double spatial_s)
{
    NormSpec spec{spatial_s, q, r, NormKind::SlobodeckijSeminorm};
    return trajectory_norm(w, spec);
}

double trajectory_norm(const Trajectory<Field>& w, const NormSpec& spec)
{
    SnapshotOps ops;
    ops.count = static_cast<int>(w.snapshots.size());
    const bool sobolev = spec.kind == NormKind::Sobolev || spec.kind == NormKind::Anisotropic;
    std::vector<QpSamples> samples;
    if (spec.kind == NormKind::SlobodeckijSeminorm || spec.kind == NormKind::Anisotropic) {
        for (const auto& f : w.snapshots) {
            samples.push_back(sample(f));
        }
    }
    ops.spatial_power = [&](int k) {
        const Field& f = w.snapshots[static_cast<std::size_t>(k)];
        return sobolev ? sobolev_power(f, spec.s, spec.q) : lq_power(f, spec.q);
    };
    ops.diff_power = [&](int i, int j) {
        return diff_lq_power(samples[static_cast<std::size_t>(i)], samples[static_cast<std::size_t>(j)], spec.q);
    };
    return combine(w.times, ops, spec);
}

double trajectory_norm(const Trajectory<TwoSidedField>& w, const NormSpec& spec)
{
    SnapshotOps ops;
    ops.count = static_cast<int>(w.snapshots.size());
    const bool sobolev = spec.kind == NormKind::Sobolev || spec.kind == NormKind::Anisotropic;
    auto power = [&](const Field& f) { return sobolev ? sobolev_power(f, spec.s, spec.q) : lq_power(f, spec.q); };
    std::vector<std::pair<QpSamples, QpSamples>> samples;
    if (spec.kind == NormKind::SlobodeckijSeminorm || spec.kind == NormKind::Anisotropic) {
        for (const auto& f : w.snapshots) {
            samples.emplace_back(sample(f.fluid), sample(f.solid));
        }
    }
    ops.spatial_power = [&](int k) {
        const auto& f = w.snapshots[static_cast<std::size_t>(k)];
        return power(f.fluid) + power(f.solid);
    };
    ops.diff_power = [&](int i, int j) {
        const auto& a = samples[static_cast<std::size_t>(i)];
        const auto& b = samples[static_cast<std::size_t>(j)];
        return diff_lq_power(a.first, b.first, spec.q) + diff_lq_power(a.second, b.second, spec.q);
    };
    return combine(w.times, ops, spec);
}

}  // namespace plaquefsi
