#include "plaquefsi/mesh.hpp"

#include <fmt/format.h>

#include <cmath>
#include <ostream>

namespace plaquefsi {

const char* to_string(Subdomain s)
{
    return s == Subdomain::Fluid ? "FLUID" : "SOLID";
}

const char* to_string(FacetTag t)
{
    switch (t) {
    case FacetTag::Interface: return "INTERFACE";
    case FacetTag::Outer: return "OUTER";
    case FacetTag::Wall: return "WALL";
    case FacetTag::Periodic: return "PERIODIC";
    }
    return "?";
}

Mesh::Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> cells,
           std::vector<Subdomain> cell_tags, std::vector<Facet> facets,
           std::vector<int> periodic_partner, double length, double fluid_height,
           double solid_height, int cells_per_unit)
    : vertices_(std::move(vertices)),
      cells_(std::move(cells)),
      cell_tags_(std::move(cell_tags)),
      facets_(std::move(facets)),
      periodic_partner_(std::move(periodic_partner)),
      length_(length),
      fluid_height_(fluid_height),
      solid_height_(solid_height),
      cells_per_unit_(cells_per_unit)
{
}

int Mesh::canonical_vertex(int v) const
{
    const int p = periodic_partner(v);
    if (p >= 0 && vertex(v).x() > vertex(p).x()) {
        return p;
    }
    return v;
}

std::vector<int> Mesh::facets_with_tag(FacetTag tag) const
{
    std::vector<int> out;
    for (int f = 0; f < num_facets(); ++f) {
        if (facet(f).tag == tag) {
            out.push_back(f);
        }
    }
    return out;
}

std::vector<int> Mesh::cells_in(Subdomain s) const
{
    std::vector<int> out;
    for (int c = 0; c < num_cells(); ++c) {
        if (cell_tag(c) == s) {
            out.push_back(c);
        }
    }
    return out;
}

double Mesh::cell_area(int c) const
{
    const auto& t = cell(c);
    const Vec2 e1 = vertex(t[1]) - vertex(t[0]);
    const Vec2 e2 = vertex(t[2]) - vertex(t[0]);
    return 0.5 * std::abs(e1.x() * e2.y() - e1.y() * e2.x());
}

Vec2 Mesh::barycenter(int c) const
{
    const auto& t = cell(c);
    return (vertex(t[0]) + vertex(t[1]) + vertex(t[2])) / 3.0;
}

void Mesh::write(std::ostream& os) const
{
    os << "# plaquefsi mesh v1\n";
    os << fmt::format("# geometry L={} H_f={} H_s={} n={}\n", length_, fluid_height_, solid_height_,
                      cells_per_unit_);
    os << "# vertex <index> <x> <y> <periodic_partner>\n";
    os << "# cell <index> <v0> <v1> <v2> <FLUID|SOLID>\n";
    os << "# facet <index> <v0> <v1> <tag> <cell> <other_cell> <nx> <ny>\n";
    for (int v = 0; v < num_vertices(); ++v) {
        os << fmt::format("vertex {} {:.17g} {:.17g} {}\n", v, vertex(v).x(), vertex(v).y(),
                          periodic_partner(v));
    }
    for (int c = 0; c < num_cells(); ++c) {
        const auto& t = cell(c);
        os << fmt::format("cell {} {} {} {} {}\n", c, t[0], t[1], t[2], to_string(cell_tag(c)));
    }
    for (int f = 0; f < num_facets(); ++f) {
        const auto& fc = facet(f);
        os << fmt::format("facet {} {} {} {} {} {} {:.17g} {:.17g}\n", f, fc.vertices[0],
                          fc.vertices[1], to_string(fc.tag), fc.cell, fc.other_cell, fc.normal.x(),
                          fc.normal.y());
    }
}

namespace {

int cells_along(double extent, int n, const char* what)
{
    const double count = extent * n;
    const double rounded = std::round(count);
    if (std::abs(count - rounded) > 1e-9 || rounded < 1) {
        throw InvalidArgument(fmt::format(
            "build_strip_mesh: {} = {} is not a positive multiple of 1/n (n = {})", what, extent, n));
    }
    return static_cast<int>(rounded);
}

}  // namespace

Mesh build_strip_mesh(double length, double fluid_height, double solid_height, int n)
{
    if (!(length > 0.0) || !(fluid_height > 0.0) || !(solid_height > 0.0)) {
        throw InvalidArgument(fmt::format(
            "build_strip_mesh: nonpositive dimension (L={}, H_f={}, H_s={})", length, fluid_height,
            solid_height));
    }
    if (n < 4 || n % 2 != 0) {
        throw InvalidArgument(fmt::format("build_strip_mesh: n must be even and >= 4, got {}", n));
    }
    const int nx = cells_along(length, n, "L");
    const int ny_f = cells_along(fluid_height, n, "H_f");
    const int ny_s = cells_along(solid_height, n, "H_s");
    const int ny = ny_f + ny_s;
    const double h = 1.0 / n;

    std::vector<Vec2> vertices;
    vertices.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1) + nx * ny));
    auto corner = [&](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            vertices.emplace_back(i * h, -fluid_height + j * h);
        }
    }
    const int centre_offset = static_cast<int>(vertices.size());
    auto centre = [&](int i, int j) { return centre_offset + j * nx + i; };
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            vertices.emplace_back((i + 0.5) * h, -fluid_height + (j + 0.5) * h);
        }
    }

    std::vector<int> partner(vertices.size(), -1);
    for (int j = 0; j <= ny; ++j) {
        partner[static_cast<std::size_t>(corner(0, j))] = corner(nx, j);
        partner[static_cast<std::size_t>(corner(nx, j))] = corner(0, j);
    }

    std::vector<std::array<int, 3>> cells;
    std::vector<Subdomain> tags;
    cells.reserve(static_cast<std::size_t>(4 * nx * ny));
    std::vector<Facet> facets;

    auto make_facet = [&](int a, int b, FacetTag tag, int cell, int other, Vec2 normal) {
        Facet f;
        f.vertices = {a, b};
        f.tag = tag;
        f.cell = cell;
        f.other_cell = other;
        f.normal = normal;
        f.length = (vertices[static_cast<std::size_t>(b)] - vertices[static_cast<std::size_t>(a)]).norm();
        facets.push_back(f);
    };

    // Cell index of the k-th triangle of square (i, j): 0 bottom, 1 right, 2 top, 3 left.
    auto tri = [&](int i, int j, int k) { return 4 * (j * nx + i) + k; };

    for (int j = 0; j < ny; ++j) {
        const Subdomain sd = j < ny_f ? Subdomain::Fluid : Subdomain::Solid;
        for (int i = 0; i < nx; ++i) {
            const int a = corner(i, j);
            const int b = corner(i + 1, j);
            const int c = corner(i + 1, j + 1);
            const int d = corner(i, j + 1);
            const int m = centre(i, j);
            cells.push_back({a, b, m});
            cells.push_back({b, c, m});
            cells.push_back({c, d, m});
            cells.push_back({d, a, m});
            for (int k = 0; k < 4; ++k) {
                tags.push_back(sd);
            }
        }
    }

    for (int i = 0; i < nx; ++i) {
        make_facet(corner(i, 0), corner(i + 1, 0), FacetTag::Wall, tri(i, 0, 0), -1, Vec2(0.0, -1.0));
    }
    for (int i = 0; i < nx; ++i) {
        make_facet(corner(i, ny_f), corner(i + 1, ny_f), FacetTag::Interface, tri(i, ny_f - 1, 2),
                   tri(i, ny_f, 0), Vec2(0.0, 1.0));
    }
    for (int i = 0; i < nx; ++i) {
        make_facet(corner(i, ny), corner(i + 1, ny), FacetTag::Outer, tri(i, ny - 1, 2), -1,
                   Vec2(0.0, 1.0));
    }
    for (int j = 0; j < ny; ++j) {
        make_facet(corner(0, j), corner(0, j + 1), FacetTag::Periodic, tri(0, j, 3), -1,
                   Vec2(-1.0, 0.0));
        make_facet(corner(nx, j), corner(nx, j + 1), FacetTag::Periodic, tri(nx - 1, j, 1), -1,
                   Vec2(1.0, 0.0));
    }

    return Mesh(std::move(vertices), std::move(cells), std::move(tags), std::move(facets),
                std::move(partner), length, fluid_height, solid_height, n);
}

}  // namespace plaquefsi
