#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "roughwall/geometry.hpp"

using namespace roughwall;
using namespace roughwall::geom;

namespace {

RoughProfile cosine_profile() { return RoughProfile(-0.5, {0.25}, {}); }
RoughProfile asymmetric_profile() { return RoughProfile(-0.5, {0.2}, {0.0, 0.1}); }

int euler_characteristic(const Mesh& m) {
  std::set<std::pair<int, int>> edges;
  for (const auto& t : m.triangles()) {
    for (int k = 0; k < 3; ++k) {
      int a = t[k], b = t[(k + 1) % 3];
      edges.insert({std::min(a, b), std::max(a, b)});
    }
  }
  return m.vertex_count() - static_cast<int>(edges.size()) + m.triangle_count();
}

}  // namespace

TEST(Profile, FlatAndCosineValues) {
  EXPECT_DOUBLE_EQ(eval_profile(RoughProfile::flat(-0.5), 1.3), -0.5);
  EXPECT_NEAR(eval_profile(cosine_profile(), 0.0), -0.25, 1e-15);
  EXPECT_NEAR(eval_profile(cosine_profile(), M_PI), -0.75, 1e-15);
}

TEST(Profile, Periodic) {
  const RoughProfile p = asymmetric_profile();
  for (double y : {0.1, 1.7, 4.0}) EXPECT_NEAR(p(y), p(y + kTwoPi), 1e-13);
}

TEST(Profile, RejectsOutOfRange) {
  EXPECT_THROW(RoughProfile(-0.5, {0.6}, {}), GeometryError);
  EXPECT_THROW(RoughProfile::flat(0.0), GeometryError);
  EXPECT_THROW(RoughProfile::flat(-1.0), GeometryError);
}

TEST(Profile, SlopeAndMirror) {
  const RoughProfile p = asymmetric_profile();
  EXPECT_GT(p.max_slope(), 0.2);
  EXPECT_LT(p.max_slope(), 0.2 + 0.2 + 1e-12);
  const RoughProfile m = p.mirrored();
  for (double y : {0.3, 2.0, 5.5}) EXPECT_NEAR(m(y), p(-y), 1e-14);
}

TEST(DomainSpec, Divisibility) {
  DomainSpec s;
  s.epsilon = 0.1;
  EXPECT_NO_THROW(validate(s));
  EXPECT_EQ(s.periods(), 10);
  s.epsilon = 0.3;
  EXPECT_THROW(validate(s), GeometryError);
  s.epsilon = -0.1;
  EXPECT_THROW(validate(s), GeometryError);
}

TEST(RoughMesh, FlatBottomDepth) {
  DomainSpec s;
  s.epsilon = 0.1;
  const Mesh m = build_rough_mesh(s, 8, 8);
  for (int v : m.tagged_vertices(BoundaryTag::GammaEps)) {
    EXPECT_NEAR(m.vertices()[v].y, -0.05, 1e-15);
  }
  EXPECT_TRUE(mesh_defects(m).empty());
  EXPECT_EQ(euler_characteristic(m), 1);
}

TEST(RoughMesh, CosineBottomAtOrigin) {
  DomainSpec s;
  s.epsilon = 0.1;
  s.profile = cosine_profile();
  const Mesh m = build_rough_mesh(s, 8, 8);
  EXPECT_NEAR(m.vertices()[m.layout()->vertex(0, 0)].y, -0.025, 1e-15);
  EXPECT_TRUE(mesh_defects(m).empty());
}

TEST(RoughMesh, TagsAndPairs) {
  DomainSpec s;
  s.epsilon = 0.2;
  s.profile = asymmetric_profile();
  const Mesh m = build_rough_mesh(s, 16, 8);
  for (int v : m.tagged_vertices(BoundaryTag::Interface)) EXPECT_EQ(m.vertices()[v].y, 0.0);
  for (int v : m.tagged_vertices(BoundaryTag::GammaIn)) EXPECT_EQ(m.vertices()[v].x, 0.0);
  for (int v : m.tagged_vertices(BoundaryTag::Gamma1)) EXPECT_EQ(m.vertices()[v].y, 1.0);
  EXPECT_EQ(static_cast<int>(m.periodic_pairs().size()), m.layout()->layers + 1);
  EXPECT_EQ(m.tagged_vertices(BoundaryTag::Interface).size(), 16u * 5u + 1u);
  // Lower block lies below the interface, upper above.
  for (int t = 0; t < m.triangle_count(); ++t) {
    const auto& tri = m.triangles()[t];
    for (int v : tri) {
      if (m.blocks()[t] == Block::Lower) {
        EXPECT_LE(m.vertices()[v].y, 0.0);
      } else {
        EXPECT_GE(m.vertices()[v].y, 0.0);
      }
    }
  }
}

TEST(RoughMesh, SublayerVerticesStrictlyInside) {
  DomainSpec s;
  s.epsilon = 0.2;
  s.profile = asymmetric_profile();
  const Mesh m = build_rough_mesh(s, 16, 8);
  const auto& lay = *m.layout();
  for (int i = 0; i <= lay.columns; ++i) {
    const double bottom = m.vertices()[lay.vertex(i, 0)].y;
    for (int j = 1; j < 8; ++j) {
      const double y = m.vertices()[lay.vertex(i, j)].y;
      EXPECT_GT(y, bottom);
      EXPECT_LT(y, 0.0);
    }
  }
}

TEST(RoughMesh, RefinementNesting) {
  DomainSpec s;
  s.epsilon = 0.2;
  s.profile = asymmetric_profile();
  const Mesh coarse = build_rough_mesh(s, 8, 8);
  const Mesh fine = build_rough_mesh(s, 16, 16);
  const auto& lc = *coarse.layout();
  const auto& lf = *fine.layout();
  for (int i = 0; i <= lc.columns; ++i) {
    for (int j = 0; j <= lc.layers; ++j) {
      const Point pc = coarse.vertices()[lc.vertex(i, j)];
      const Point pf = fine.vertices()[lf.vertex(2 * i, 2 * j)];
      EXPECT_NEAR(pc.x, pf.x, 1e-13);
      EXPECT_NEAR(pc.y, pf.y, 1e-13);
    }
  }
}

TEST(RoughMesh, MirrorSymmetricTriangulation) {
  // Vertex sets and triangles of one period are mirror images about x1 = 0.
  DomainSpec s;
  s.epsilon = 0.2;
  s.profile = cosine_profile();
  const Mesh m = build_rough_mesh(s, 16, 8);
  const auto& lay = *m.layout();
  const int ppp = 16;
  for (int i = 0; i < ppp; ++i) {
    EXPECT_NE(lay.rising[i], lay.rising[ppp - 1 - i]);
  }
}

TEST(CellMesh, FlatRectangle) {
  const Mesh m = build_cell_mesh(RoughProfile::flat(-0.5), 10.0, 16, 8);
  EXPECT_DOUBLE_EQ(m.min_x(), 0.0);
  EXPECT_NEAR(m.max_x(), kTwoPi, 1e-14);
  EXPECT_DOUBLE_EQ(m.min_y(), -0.5);
  EXPECT_DOUBLE_EQ(m.max_y(), 10.0);
  EXPECT_TRUE(mesh_defects(m).empty());
}

TEST(CellMesh, InterfaceAndBottom) {
  const RoughProfile p = cosine_profile();
  const Mesh m = build_cell_mesh(p, 10.0, 16, 8);
  int interface_edges = 0;
  for (const auto& e : m.boundary_edges()) interface_edges += e.tag == BoundaryTag::Interface;
  EXPECT_EQ(interface_edges, 16);
  for (int v : m.tagged_vertices(BoundaryTag::CellBottom)) {
    EXPECT_NEAR(m.vertices()[v].y, p(m.vertices()[v].x), 1e-14);
  }
  EXPECT_TRUE(mesh_defects(m).empty());
  EXPECT_EQ(euler_characteristic(m), 1);
}

TEST(CellMesh, GradedAboveOne) {
  const std::vector<double> lv = graded_levels(10.0, 8);
  EXPECT_DOUBLE_EQ(lv.back(), 10.0);
  for (std::size_t j = 1; j <= 8; ++j) EXPECT_NEAR(lv[j] - lv[j - 1], 0.125, 1e-15);
  for (std::size_t j = 10; j + 1 < lv.size(); ++j) {
    EXPECT_NEAR((lv[j] - lv[j - 1]) / (lv[j - 1] - lv[j - 2]), kGradingRatio, 1e-12);
  }
  EXPECT_THROW(build_cell_mesh(cosine_profile(), 4.0, 16, 8), GeometryError);
}

TEST(QuarterMesh, BoxAndTags) {
  const Mesh m = build_quarter_mesh(RoughProfile::flat(-0.5), 10, 20.0, 8, 8);
  EXPECT_NEAR(m.max_x(), 20.0 * M_PI, 1e-12);
  EXPECT_DOUBLE_EQ(m.min_y(), -0.5);
  EXPECT_DOUBLE_EQ(m.max_y(), 20.0);
  EXPECT_EQ(m.tagged_vertices(BoundaryTag::QuarterB).size(), 8u * 10u + 1u);
  for (int v : m.tagged_vertices(BoundaryTag::QuarterE)) EXPECT_EQ(m.vertices()[v].x, 0.0);
  EXPECT_TRUE(m.periodic_pairs().empty());
  EXPECT_TRUE(mesh_defects(m).empty());
  EXPECT_THROW(build_quarter_mesh(RoughProfile::flat(-0.5), 4, 20.0, 8, 8), GeometryError);
}

TEST(Mesh, ResolutionPreconditions) {
  DomainSpec s;
  EXPECT_THROW(build_rough_mesh(s, 4, 8), GeometryError);
  EXPECT_THROW(build_rough_mesh(s, 8, 4), GeometryError);
}

TEST(Mesh, DefectsDetectFlippedTriangle) {
  const Mesh good = build_smooth_mesh(1.0, 4, 4, false);
  auto tris = good.triangles();
  std::swap(tris[0][1], tris[0][2]);
  const Mesh bad(good.vertices(), tris, good.blocks(), good.boundary_edges(), {}, good.period());
  EXPECT_FALSE(mesh_defects(bad).empty());
}

TEST(Mesh, LocateMatchesBruteForce) {
  DomainSpec s;
  s.epsilon = 0.2;
  s.profile = asymmetric_profile();
  const Mesh m = build_rough_mesh(s, 16, 8);
  const Mesh plain(m.vertices(), m.triangles(), m.blocks(), m.boundary_edges(), {}, m.period());
  for (double x : {0.0, 0.013, 1.0, 3.3, kTwoPi}) {
    for (double y : {-0.02, 0.0, 0.3, 1.0}) {
      const auto a = m.locate({x, y});
      const auto b = plain.locate({x, y});
      ASSERT_EQ(a.has_value(), b.has_value()) << x << " " << y;
      if (!a) continue;
      // Points may sit on shared edges; compare the reconstructed position.
      auto pos = [&](const Location& l) {
        Point q;
        for (int k = 0; k < 3; ++k) q = q + l.bary[k] * m.vertices()[m.triangles()[l.triangle][k]];
        return q;
      };
      EXPECT_NEAR(pos(*a).x, x, 1e-12);
      EXPECT_NEAR(pos(*a).y, y, 1e-12);
    }
  }
  EXPECT_FALSE(m.locate({-0.1, 0.5}).has_value());
  EXPECT_FALSE(m.locate({1.0, 1.1}).has_value());
}

TEST(Mesh, ReflectionKeepsOrientation) {
  const Mesh q = build_quarter_mesh(asymmetric_profile(), 5, 10.0, 8, 8);
  const Mesh r = reflect_x(q);
  for (int t = 0; t < r.triangle_count(); ++t) ASSERT_GT(r.signed_area(t), 0.0);
  EXPECT_TRUE(mesh_defects(r).empty());
  EXPECT_TRUE(r.locate({-1.0, 2.0}).has_value());
}
