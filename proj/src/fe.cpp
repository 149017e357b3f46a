#include "plaquefsi/fe.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace plaquefsi {

const TriangleRule& triangle_rule()
{
    static const TriangleRule rule = [] {
        TriangleRule r;
        const double s15 = std::sqrt(15.0);
        const double a = (6.0 - s15) / 21.0;
        const double b = (6.0 + s15) / 21.0;
        const double wa = (155.0 - s15) / 1200.0;
        const double wb = (155.0 + s15) / 1200.0;
        r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
        r.weights.push_back(9.0 / 40.0);
        r.points.push_back({a, a, 1.0 - 2.0 * a});
        r.points.push_back({a, 1.0 - 2.0 * a, a});
        r.points.push_back({1.0 - 2.0 * a, a, a});
        r.weights.insert(r.weights.end(), 3, wa);
        r.points.push_back({b, b, 1.0 - 2.0 * b});
        r.points.push_back({b, 1.0 - 2.0 * b, b});
        r.points.push_back({1.0 - 2.0 * b, b, b});
        r.weights.insert(r.weights.end(), 3, wb);
        return r;
    }();
    return rule;
}

const TriangleRule& midpoint_rule()
{
    static const TriangleRule rule{{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}}, {1.0}};
    return rule;
}

const LineRule& line_rule()
{
    static const LineRule rule = [] {
        const double d = 0.5 * std::sqrt(0.6);
        return LineRule{{0.5 - d, 0.5, 0.5 + d}, {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0}};
    }();
    return rule;
}

int basis_size(int degree)
{
    return degree == 1 ? 3 : 6;
}

void basis_values(int degree, const std::array<double, 3>& l, std::span<double> out)
{
    if (degree == 1) {
        out[0] = l[0];
        out[1] = l[1];
        out[2] = l[2];
        return;
    }
    out[0] = l[0] * (2.0 * l[0] - 1.0);
    out[1] = l[1] * (2.0 * l[1] - 1.0);
    out[2] = l[2] * (2.0 * l[2] - 1.0);
    out[3] = 4.0 * l[1] * l[2];
    out[4] = 4.0 * l[2] * l[0];
    out[5] = 4.0 * l[0] * l[1];
}

void basis_lambda_derivatives(int degree, const std::array<double, 3>& l,
                              std::span<std::array<double, 3>> out)
{
    if (degree == 1) {
        out[0] = {1.0, 0.0, 0.0};
        out[1] = {0.0, 1.0, 0.0};
        out[2] = {0.0, 0.0, 1.0};
        return;
    }
    out[0] = {4.0 * l[0] - 1.0, 0.0, 0.0};
    out[1] = {0.0, 4.0 * l[1] - 1.0, 0.0};
    out[2] = {0.0, 0.0, 4.0 * l[2] - 1.0};
    out[3] = {0.0, 4.0 * l[2], 4.0 * l[1]};
    out[4] = {4.0 * l[2], 0.0, 4.0 * l[0]};
    out[5] = {4.0 * l[1], 4.0 * l[0], 0.0};
}

CellGeometry::CellGeometry(const Mesh& mesh, int cell)
{
    const auto& t = mesh.cell(cell);
    for (int i = 0; i < 3; ++i) {
        x[static_cast<std::size_t>(i)] = mesh.vertex(t[static_cast<std::size_t>(i)]);
    }
    Mat2 jac;
    jac.col(0) = x[1] - x[0];
    jac.col(1) = x[2] - x[0];
    const double det = jac.determinant();
    area = 0.5 * std::abs(det);
    const Mat2 inv = jac.inverse();
    grad_lambda[1] = inv.row(0).transpose();
    grad_lambda[2] = inv.row(1).transpose();
    grad_lambda[0] = -grad_lambda[1] - grad_lambda[2];
}

Vec2 CellGeometry::map(const std::array<double, 3>& l) const
{
    return l[0] * x[0] + l[1] * x[1] + l[2] * x[2];
}

namespace {

std::int64_t vertex_key(const Mesh& mesh, int v)
{
    return mesh.canonical_vertex(v);
}

std::int64_t edge_key(const Mesh& mesh, int a, int b)
{
    const std::int64_t nv = mesh.num_vertices();
    std::int64_t ca = mesh.canonical_vertex(a);
    std::int64_t cb = mesh.canonical_vertex(b);
    if (ca > cb) {
        std::swap(ca, cb);
    }
    return nv + ca * nv + cb;
}

}  // namespace

Space::Space(std::shared_ptr<const Mesh> mesh, int degree, Subdomain subdomain)
    : mesh_(std::move(mesh)), degree_(degree), subdomain_(subdomain)
{
    if (degree != 1 && degree != 2) {
        throw InvalidArgument(fmt::format("Space: unsupported degree {}", degree));
    }
    const Mesh& m = *mesh_;
    local_cell_.assign(static_cast<std::size_t>(m.num_cells()), -1);
    const int nb = basis_size(degree);
    for (int c = 0; c < m.num_cells(); ++c) {
        if (m.cell_tag(c) != subdomain) {
            continue;
        }
        local_cell_[static_cast<std::size_t>(c)] = static_cast<int>(cells_.size());
        cells_.push_back(c);
        const auto& t = m.cell(c);
        std::array<std::int64_t, 6> keys{};
        std::array<Vec2, 6> pts{};
        for (int i = 0; i < 3; ++i) {
            keys[static_cast<std::size_t>(i)] = vertex_key(m, t[static_cast<std::size_t>(i)]);
            pts[static_cast<std::size_t>(i)] = m.vertex(t[static_cast<std::size_t>(i)]);
        }
        if (degree == 2) {
            constexpr std::array<std::array<int, 2>, 3> edges{{{1, 2}, {2, 0}, {0, 1}}};
            for (int e = 0; e < 3; ++e) {
                const int a = t[static_cast<std::size_t>(edges[static_cast<std::size_t>(e)][0])];
                const int b = t[static_cast<std::size_t>(edges[static_cast<std::size_t>(e)][1])];
                keys[static_cast<std::size_t>(3 + e)] = edge_key(m, a, b);
                pts[static_cast<std::size_t>(3 + e)] = 0.5 * (m.vertex(a) + m.vertex(b));
            }
        }
        for (int i = 0; i < nb; ++i) {
            const auto key = keys[static_cast<std::size_t>(i)];
            auto [it, inserted] = key_to_dof_.try_emplace(key, static_cast<int>(points_.size()));
            if (inserted) {
                points_.push_back(pts[static_cast<std::size_t>(i)]);
                keys_.push_back(key);
            }
            cell_dofs_.push_back(it->second);
        }
    }
}

int Space::dof_of_key(std::int64_t key) const
{
    const auto it = key_to_dof_.find(key);
    return it == key_to_dof_.end() ? -1 : it->second;
}

std::vector<int> Space::facet_dofs(int facet) const
{
    const Mesh& m = *mesh_;
    const auto& f = m.facet(facet);
    std::vector<int> out;
    out.push_back(dof_of_key(vertex_key(m, f.vertices[0])));
    out.push_back(dof_of_key(vertex_key(m, f.vertices[1])));
    if (degree_ == 2) {
        out.push_back(dof_of_key(edge_key(m, f.vertices[0], f.vertices[1])));
    }
    for (int d : out) {
        if (d < 0) {
            throw InvalidArgument(fmt::format("Space::facet_dofs: facet {} not in {} space", facet,
                                              to_string(subdomain_)));
        }
    }
    return out;
}

std::vector<int> Space::boundary_dofs(FacetTag tag) const
{
    std::vector<int> out;
    for (int f : mesh_->facets_with_tag(tag)) {
        const auto& fc = mesh_->facet(f);
        const int cell = (tag == FacetTag::Interface && subdomain_ == Subdomain::Solid) ? fc.other_cell : fc.cell;
        if (local_cell(cell) < 0) {
            continue;
        }
        auto d = facet_dofs(f);
        out.insert(out.end(), d.begin(), d.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::array<double, 3> Space::facet_lambda(int facet, int cell, double s) const
{
    const auto& f = mesh_->facet(facet);
    const auto& t = mesh_->cell(cell);
    std::array<double, 3> l{0.0, 0.0, 0.0};
    int found = 0;
    for (int i = 0; i < 3; ++i) {
        if (t[static_cast<std::size_t>(i)] == f.vertices[0]) {
            l[static_cast<std::size_t>(i)] = 1.0 - s;
            ++found;
        } else if (t[static_cast<std::size_t>(i)] == f.vertices[1]) {
            l[static_cast<std::size_t>(i)] = s;
            ++found;
        }
    }
    if (found != 2) {
        throw InvalidArgument(fmt::format("facet {} is not a facet of cell {}", facet, cell));
    }
    return l;
}

Field::Field(std::shared_ptr<const Space> s, int comps)
    : space(std::move(s)), components(comps), values(Eigen::VectorXd::Zero(space->num_dofs() * comps))
{
}

CellValues::CellValues(const Space& space, const TriangleRule& rule)
    : space_(&space), rule_(&rule), nb_(space.dofs_per_cell())
{
    const int nq = rule.size();
    ref_shape_.resize(static_cast<std::size_t>(nq * nb_));
    ref_dlambda_.resize(static_cast<std::size_t>(nq * nb_));
    for (int q = 0; q < nq; ++q) {
        const auto& l = rule.points[static_cast<std::size_t>(q)];
        basis_values(space.degree(), l,
                     std::span<double>(ref_shape_.data() + static_cast<std::size_t>(q * nb_), static_cast<std::size_t>(nb_)));
        basis_lambda_derivatives(space.degree(), l,
                                 std::span<std::array<double, 3>>(ref_dlambda_.data() + static_cast<std::size_t>(q * nb_),
                                                                  static_cast<std::size_t>(nb_)));
    }
    shape_ = ref_shape_;
    grad_.resize(ref_shape_.size());
    jxw_.resize(static_cast<std::size_t>(nq));
    points_.resize(static_cast<std::size_t>(nq));
    dofs_.resize(static_cast<std::size_t>(nb_));
}

void CellValues::reinit(int local_cell)
{
    mesh_cell_ = space_->cells()[static_cast<std::size_t>(local_cell)];
    const CellGeometry geo(space_->mesh(), mesh_cell_);
    area_ = geo.area;
    const auto d = space_->cell_dofs(local_cell);
    std::copy(d.begin(), d.end(), dofs_.begin());
    const int nq = rule_->size();
    for (int q = 0; q < nq; ++q) {
        jxw_[static_cast<std::size_t>(q)] = rule_->weights[static_cast<std::size_t>(q)] * geo.area;
        points_[static_cast<std::size_t>(q)] = geo.map(rule_->points[static_cast<std::size_t>(q)]);
        for (int a = 0; a < nb_; ++a) {
            const auto& dl = ref_dlambda_[static_cast<std::size_t>(q * nb_ + a)];
            grad_[static_cast<std::size_t>(q * nb_ + a)] =
                dl[0] * geo.grad_lambda[0] + dl[1] * geo.grad_lambda[1] + dl[2] * geo.grad_lambda[2];
        }
    }
}

double CellValues::value(const Field& f, int q, int comp) const
{
    double v = 0.0;
    for (int a = 0; a < nb_; ++a) {
        v += shape(q, a) * f.at(dofs_[static_cast<std::size_t>(a)], comp);
    }
    return v;
}

Vec2 CellValues::vector_value(const Field& f, int q) const
{
    return {value(f, q, 0), value(f, q, 1)};
}

Mat2 CellValues::vector_gradient(const Field& f, int q) const
{
    Mat2 g = Mat2::Zero();
    for (int a = 0; a < nb_; ++a) {
        const int dof = dofs_[static_cast<std::size_t>(a)];
        const Vec2& dn = grad(q, a);
        for (int j = 0; j < 2; ++j) {
            const double uj = f.at(dof, j);
            g(0, j) += dn.x() * uj;
            g(1, j) += dn.y() * uj;
        }
    }
    return g;
}

Vec2 CellValues::scalar_gradient(const Field& f, int q) const
{
    Vec2 g = Vec2::Zero();
    for (int a = 0; a < nb_; ++a) {
        g += grad(q, a) * f.at(dofs_[static_cast<std::size_t>(a)]);
    }
    return g;
}

Eigen::VectorXd lumped_mass(const Space& space)
{
    if (space.degree() != 1) {
        throw InvalidArgument("lumped_mass: degree-1 space required");
    }
    Eigen::VectorXd m = Eigen::VectorXd::Zero(space.num_dofs());
    for (int k = 0; k < space.num_cells(); ++k) {
        const double a = space.mesh().cell_area(space.cells()[static_cast<std::size_t>(k)]);
        for (int d : space.cell_dofs(k)) {
            m[d] += a / 3.0;
        }
    }
    return m;
}

Eigen::VectorXd lumped_facet_mass(const Space& space, FacetTag tag)
{
    if (space.degree() != 1) {
        throw InvalidArgument("lumped_facet_mass: degree-1 space required");
    }
    Eigen::VectorXd m = Eigen::VectorXd::Zero(space.num_dofs());
    for (int f : space.mesh().facets_with_tag(tag)) {
        const auto& fc = space.mesh().facet(f);
        const int cell = (tag == FacetTag::Interface && space.subdomain() == Subdomain::Solid) ? fc.other_cell : fc.cell;
        if (space.local_cell(cell) < 0) {
            continue;
        }
        for (int d : space.facet_dofs(f)) {
            m[d] += 0.5 * fc.length;
        }
    }
    return m;
}

}  // namespace plaquefsi
