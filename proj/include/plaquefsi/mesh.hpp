#pragma once

#include "plaquefsi/common.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace plaquefsi {

enum class Subdomain : std::uint8_t { Fluid, Solid };

enum class FacetTag : std::uint8_t { Interface, Outer, Wall, Periodic };

const char* to_string(Subdomain s);
const char* to_string(FacetTag t);

/// Boundary or interface edge of the triangulation.
///
/// `cell` is the adjacent simplex used for one-sided evaluation: the fluid
/// simplex for INTERFACE facets, the only neighbour otherwise. `other_cell`
/// is the solid simplex across an INTERFACE facet and -1 elsewhere.
/// `normal` is the unit normal; on INTERFACE it points from fluid into solid,
/// on every other tag it is the outward normal of the adjacent cell.
struct Facet {
    std::array<int, 2> vertices{};
    FacetTag tag = FacetTag::Wall;
    int cell = -1;
    int other_cell = -1;
    Vec2 normal = Vec2::Zero();
    double length = 0.0;
};

/// Simplicial mesh of the periodic strip [0, L) x [-H_f, H_s].
///
/// The vertex columns at x = 0 and x = L are both stored; `periodic_partner`
/// pairs them. Finite element spaces merge paired vertices into one degree of
/// freedom.
class Mesh {
public:
    Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> cells,
         std::vector<Subdomain> cell_tags, std::vector<Facet> facets,
         std::vector<int> periodic_partner, double length, double fluid_height,
         double solid_height, int cells_per_unit);

    [[nodiscard]] int num_vertices() const { return static_cast<int>(vertices_.size()); }
    [[nodiscard]] int num_cells() const { return static_cast<int>(cells_.size()); }
    [[nodiscard]] int num_facets() const { return static_cast<int>(facets_.size()); }

    [[nodiscard]] const Vec2& vertex(int i) const { return vertices_[static_cast<std::size_t>(i)]; }
    [[nodiscard]] const std::array<int, 3>& cell(int c) const { return cells_[static_cast<std::size_t>(c)]; }
    [[nodiscard]] Subdomain cell_tag(int c) const { return cell_tags_[static_cast<std::size_t>(c)]; }
    [[nodiscard]] const Facet& facet(int f) const { return facets_[static_cast<std::size_t>(f)]; }
    [[nodiscard]] std::span<const Facet> facets() const { return facets_; }
    [[nodiscard]] std::span<const Vec2> vertices() const { return vertices_; }

    /// Index of the vertex identified with `v` across the periodic boundary,
    /// or -1 for vertices off the lateral boundary.
    [[nodiscard]] int periodic_partner(int v) const { return periodic_partner_[static_cast<std::size_t>(v)]; }

    /// Representative of the periodic class of `v` (the x = 0 copy).
    [[nodiscard]] int canonical_vertex(int v) const;

    [[nodiscard]] std::vector<int> facets_with_tag(FacetTag tag) const;
    [[nodiscard]] std::vector<int> cells_in(Subdomain s) const;

    [[nodiscard]] double cell_area(int c) const;
    [[nodiscard]] Vec2 barycenter(int c) const;

    [[nodiscard]] double length() const { return length_; }
    [[nodiscard]] double fluid_height() const { return fluid_height_; }
    [[nodiscard]] double solid_height() const { return solid_height_; }
    [[nodiscard]] int cells_per_unit() const { return cells_per_unit_; }
    [[nodiscard]] double h() const { return 1.0 / cells_per_unit_; }

    /// Plain-text export. Columns are documented in the header lines.
    void write(std::ostream& os) const;

private:
    std::vector<Vec2> vertices_;
    std::vector<std::array<int, 3>> cells_;
    std::vector<Subdomain> cell_tags_;
    std::vector<Facet> facets_;
    std::vector<int> periodic_partner_;
    double length_;
    double fluid_height_;
    double solid_height_;
    int cells_per_unit_;
};

/// Crossed-triangle mesh of the periodic strip: FLUID below y = 0, SOLID
/// above, interface on y = 0, outer boundary on y = H_s and a no-slip wall
/// on y = -H_f. `n` is the number of square cells per unit length; each
/// square is split into four triangles through its centre.
Mesh build_strip_mesh(double length, double fluid_height, double solid_height, int n);

}  // namespace plaquefsi
