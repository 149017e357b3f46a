#include "plaquefsi/fe.hpp"
#include "plaquefsi/mesh.hpp"

#include <gtest/gtest.h>

#include <set>
#include <sstream>

using namespace plaquefsi;

TEST(Mesh, FourCellsHaveFlatInterface)
{
    const Mesh m = build_strip_mesh(1.0, 0.5, 0.5, 4);
    const auto iface = m.facets_with_tag(FacetTag::Interface);
    EXPECT_EQ(iface.size(), 4u);
    for (int f : iface) {
        EXPECT_NEAR(m.facet(f).normal.x(), 0.0, 1e-14);
        EXPECT_NEAR(m.facet(f).normal.y(), 1.0, 1e-14);
    }
    EXPECT_FALSE(m.cells_in(Subdomain::Fluid).empty());
    EXPECT_FALSE(m.cells_in(Subdomain::Solid).empty());
}

TEST(Mesh, CrossedTriangulationCellCount)
{
    const Mesh m = build_strip_mesh(1.0, 0.5, 0.5, 8);
    EXPECT_EQ(m.num_cells(), 4 * 8 * 8);
}

TEST(Mesh, NonpositiveDimensionRejected)
{
    EXPECT_THROW(build_strip_mesh(1.0, 0.0, 0.5, 4), InvalidArgument);
    EXPECT_THROW(build_strip_mesh(-1.0, 0.5, 0.5, 4), InvalidArgument);
}

TEST(Mesh, FacetTagsTouchTheRightSubdomains)
{
    const Mesh m = build_strip_mesh(1.0, 0.5, 0.5, 8);
    for (const Facet& f : m.facets()) {
        switch (f.tag) {
        case FacetTag::Interface:
            ASSERT_GE(f.other_cell, 0);
            EXPECT_EQ(m.cell_tag(f.cell), Subdomain::Fluid);
            EXPECT_EQ(m.cell_tag(f.other_cell), Subdomain::Solid);
            break;
        case FacetTag::Outer:
            EXPECT_EQ(m.cell_tag(f.cell), Subdomain::Solid);
            break;
        case FacetTag::Wall:
            EXPECT_EQ(m.cell_tag(f.cell), Subdomain::Fluid);
            break;
        case FacetTag::Periodic:
            break;
        }
    }
    EXPECT_EQ(m.cells_in(Subdomain::Fluid).size() + m.cells_in(Subdomain::Solid).size(),
              static_cast<std::size_t>(m.num_cells()));
}

TEST(Mesh, PeriodicMapIsAnInvolutionWithEqualHeights)
{
    const Mesh m = build_strip_mesh(1.0, 0.5, 0.5, 8);
    int paired = 0;
    for (int v = 0; v < m.num_vertices(); ++v) {
        const int p = m.periodic_partner(v);
        if (p < 0) {
            continue;
        }
        ++paired;
        EXPECT_EQ(m.periodic_partner(p), v);
        EXPECT_DOUBLE_EQ(m.vertex(p).y(), m.vertex(v).y());
        EXPECT_NEAR(std::abs(m.vertex(p).x() - m.vertex(v).x()), 1.0, 1e-14);
    }
    EXPECT_GT(paired, 0);
}

TEST(Mesh, InterfaceLengthInvariantUnderRefinement)
{
    for (int n : {4, 8, 16, 32}) {
        const Mesh m = build_strip_mesh(1.0, 0.5, 0.5, n);
        double len = 0.0;
        for (int f : m.facets_with_tag(FacetTag::Interface)) {
            len += m.facet(f).length;
            EXPECT_NEAR(m.facet(f).normal.norm(), 1.0, 1e-14);
        }
        EXPECT_NEAR(len, 1.0, 1e-14);
    }
}

TEST(Mesh, ExportListsEveryEntity)
{
    const Mesh m = build_strip_mesh(1.0, 0.5, 0.5, 4);
    std::ostringstream os;
    m.write(os);
    std::istringstream is(os.str());
    std::string line;
    int vertices = 0;
    int cells = 0;
    int facets = 0;
    while (std::getline(is, line)) {
        vertices += line.rfind("vertex ", 0) == 0;
        cells += line.rfind("cell ", 0) == 0;
        facets += line.rfind("facet ", 0) == 0;
    }
    EXPECT_EQ(vertices, m.num_vertices());
    EXPECT_EQ(cells, m.num_cells());
    EXPECT_EQ(facets, m.num_facets());
}

TEST(Space, PeriodicDofsAreMerged)
{
    auto mesh = std::make_shared<const Mesh>(build_strip_mesh(1.0, 0.5, 0.5, 4));
    const Space p1(mesh, 1, Subdomain::Fluid);
    // 4 columns of corner vertices (periodic) times 3 rows, plus 4 x 2 centres.
    EXPECT_EQ(p1.num_dofs(), 4 * 3 + 4 * 2);
    const Space p2(mesh, 2, Subdomain::Solid);
    std::set<std::int64_t> keys;
    for (int d = 0; d < p2.num_dofs(); ++d) {
        EXPECT_TRUE(keys.insert(p2.node_key(d)).second);
        EXPECT_EQ(p2.dof_of_key(p2.node_key(d)), d);
    }
}

TEST(Space, LumpedMassSumsToArea)
{
    auto mesh = std::make_shared<const Mesh>(build_strip_mesh(1.0, 0.5, 0.5, 8));
    const Space p1(mesh, 1, Subdomain::Solid);
    EXPECT_NEAR(lumped_mass(p1).sum(), 0.5, 1e-14);
    EXPECT_NEAR(lumped_facet_mass(p1, FacetTag::Interface).sum(), 1.0, 1e-14);
}
