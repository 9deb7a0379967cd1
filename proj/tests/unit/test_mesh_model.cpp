#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "error_kind.hpp"
#include "femtet/mesh_model.hpp"
#include "mesh_gen.hpp"

using namespace femtet;
using namespace femtet::testkit;

namespace {

Mesh sample() { return extract_mesh(msh::parse_msh(sample_mesh_text()), 1); }

Mesh cube(int n, int order, double perturb = 0.0) {
  return extract_mesh(msh::parse_msh(to_msh(cube_mesh(n, order, perturb, 3))), order);
}

double det3(const Vec3& a, const Vec3& b, const Vec3& c) { return dot(a, cross(b, c)); }

}  // namespace

TEST(Geometry, SampleExampleElement) {
  const Mesh m = sample();
  const auto g = compute_geometry(m);
  const auto x = tet_vertices(m, 0);
  const double det = det3(x[1] - x[0], x[2] - x[0], x[3] - x[0]);
  EXPECT_NEAR(g.detBk[0], det, 1e-15);
  double vol = 0;
  for (double d : g.detBk) vol += d / 6;
  EXPECT_NEAR(vol, m.volume(), 1e-15);
  EXPECT_NEAR(vol, 1.0 / 6, 1e-15);
}

TEST(Geometry, InverseRowsAreDual) {
  const Mesh m = cube(2, 1, 0.2);
  const auto g = compute_geometry(m);
  for (Index k = 0; k < m.n_tets(); ++k) {
    const auto x = tet_vertices(m, k);
    const Vec3 v[3] = {x[1] - x[0], x[2] - x[0], x[3] - x[0]};
    const Vec3 b[3] = {g.b1[k], g.b2[k], g.b3[k]};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) EXPECT_NEAR(dot(b[i], v[j]), i == j ? 1.0 : 0.0, 1e-12);
    EXPECT_GT(g.detBk[k], 0.0);
  }
}

TEST(Geometry, BoundaryAreasSumToSurface) {
  const Mesh m = cube(3, 2, 0.1);
  const auto g = compute_geometry(m);
  double area = 0;
  for (double a : g.bd_area2) area += a / 2;
  EXPECT_NEAR(area, 6.0, 1e-12);
}

TEST(Geometry, NegativeOrientation) {
  auto gm = cube_mesh(1, 1);
  std::swap(gm.tets[2][0], gm.tets[2][1]);
  const Mesh m = extract_mesh(msh::parse_msh(to_msh(gm)), 1);
  EXPECT_EQ(kind_of([&] { compute_geometry(m); }), ErrorKind::NegativeOrientation);
}

TEST(Geometry, DegenerateElement) {
  auto gm = cube_mesh(1, 1);
  // Collapse one vertex onto the plane of the others.
  const auto& t = gm.tets[0];
  auto pos = [&](std::int64_t id) {
    for (std::size_t i = 0; i < gm.node_ids.size(); ++i)
      if (gm.node_ids[i] == id) return i;
    return std::size_t{0};
  };
  Vec3 a = gm.nodes[pos(t[0])], b = gm.nodes[pos(t[1])], c = gm.nodes[pos(t[2])];
  gm.nodes[pos(t[3])] = (1.0 / 3) * (a + b + c);
  const Mesh m = extract_mesh(msh::parse_msh(to_msh(gm)), 1);
  EXPECT_EQ(kind_of([&] { compute_geometry(m); }), ErrorKind::DegenerateElement);
}

TEST(Connectivity, SampleExample) {
  const Mesh m = sample();
  const auto c = build_connectivity(m);
  // 4 tets × 4 faces = 16 = 2·interior + boundary, 10 boundary triangles.
  EXPECT_EQ(c.n_boundary_faces(), 10);
  EXPECT_EQ(c.n_faces(), 13);
}

TEST(Connectivity, EulerCountsOnCube) {
  for (int n : {1, 2, 3}) {
    const Mesh m = cube(n, 1);
    const auto c = build_connectivity(m);
    EXPECT_EQ(2 * c.n_faces() - c.n_boundary_faces(), 4 * m.n_tets());
    EXPECT_EQ(c.n_boundary_faces(), m.n_tris());
    EXPECT_EQ(c.n_boundary_faces(), 12 * n * n);
  }
}

TEST(Connectivity, LocalFaceConsistency) {
  const Mesh m = cube(2, 1, 0.2);
  const auto c = build_connectivity(m);
  for (Index k = 0; k < m.n_tets(); ++k) {
    auto t = m.tet(k);
    for (int j = 0; j < 4; ++j) {
      const Index f = c.ttrh2faces[k][j];
      const auto& owners = c.faces2ttrh[f];
      EXPECT_TRUE(owners[0] == k || owners[1] == k);
      std::set<Index> face(c.faces[f].begin(), c.faces[f].end());
      EXPECT_EQ(face.count(t[j]), 0u) << "face j must be opposite vertex j";
      EXPECT_EQ(face.size(), 3u);
    }
  }
  // Oriented outward from the first owner.
  for (Index f = 0; f < c.n_faces(); ++f) {
    const auto& F = c.faces[f];
    const Vec3 n = cross(m.coord[F[1]] - m.coord[F[0]], m.coord[F[2]] - m.coord[F[0]]);
    const auto x = tet_vertices(m, c.faces2ttrh[f][0]);
    const Vec3 centroid = 0.25 * (x[0] + x[1] + x[2] + x[3]);
    EXPECT_GT(dot(n, m.coord[F[0]] - centroid), 0.0);
  }
}

TEST(Connectivity, NonConformalTripleFace) {
  auto gm = cube_mesh(1, 1);
  gm.tets.push_back(gm.tets[0]);
  gm.tet_entity.push_back(gm.tet_entity[0]);
  const Mesh m = extract_mesh(msh::parse_msh(to_msh(gm)), 1);
  EXPECT_EQ(kind_of([&] { build_connectivity(m); }), ErrorKind::NonConformal);
}

TEST(Boundary, SampleDirichletNodes) {
  const Mesh m = sample();
  const std::vector<std::string> groups{"DirichletCondition"};
  const auto bc = classify_boundary(m, groups);
  EXPECT_EQ(bc.iD, (std::vector<Index>{0, 1, 2, 3, 4, 6}));
  EXPECT_EQ(bc.inD, (std::vector<Index>{5}));
  EXPECT_EQ(bc.robin_rows.size(), 6u);
  EXPECT_EQ(std::count(bc.gammaD.begin(), bc.gammaD.end(), true), 4);
}

TEST(Boundary, PartitionInvariant) {
  const Mesh m = cube(2, 3);
  const std::vector<std::string> groups{"x0", "z1"};
  const auto bc = classify_boundary(m, groups);
  std::vector<Index> all(bc.iD);
  all.insert(all.end(), bc.inD.begin(), bc.inD.end());
  std::sort(all.begin(), all.end());
  ASSERT_EQ(static_cast<Index>(all.size()), m.n_nodes());
  for (Index i = 0; i < m.n_nodes(); ++i) EXPECT_EQ(all[i], i);
  EXPECT_TRUE(std::is_sorted(bc.iD.begin(), bc.iD.end()));
  // Every Dirichlet node lies on x=0 or z=1.
  for (Index i : bc.iD) {
    const auto& x = m.coord[i];
    EXPECT_TRUE(std::abs(x[0]) < 1e-12 || std::abs(x[2] - 1) < 1e-12);
  }
  for (Index r : bc.robin_rows) EXPECT_FALSE(bc.gammaD[r]);
}

TEST(Boundary, EmptyDirichlet) {
  const Mesh m = sample();
  const auto bc = classify_boundary(m, {});
  EXPECT_TRUE(bc.iD.empty());
  EXPECT_EQ(bc.inD.size(), 7u);
  EXPECT_EQ(bc.robin_rows.size(), 10u);
}

TEST(Boundary, UnknownGroup) {
  const Mesh m = sample();
  const std::vector<std::string> groups{"Nope"};
  EXPECT_EQ(kind_of([&] { classify_boundary(m, groups); }), ErrorKind::UnknownGroup);
}

TEST(Quality, RegularTetrahedron) {
  auto gm = cube_mesh(1, 1);
  gm.nodes = {{0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2, 0},
              {0.5, std::sqrt(3.0) / 6, std::sqrt(2.0 / 3)}};
  gm.node_ids = {1, 2, 3, 4};
  gm.tets = {{1, 2, 3, 4}};
  gm.tet_entity = {1};
  gm.tris = {{2, 3, 4}, {1, 4, 3}, {1, 2, 4}, {1, 3, 2}};
  gm.tri_entity = {1, 1, 1, 1};
  gm.groups = {{2, 1, "S", {1}}, {3, 2, "V", {1}}};
  const Mesh m = extract_mesh(msh::parse_msh(to_msh(gm)), 1);
  const auto q = compute_quality(m, compute_geometry(m));
  // h = 1, inradius = 1/sqrt(24).
  EXPECT_NEAR(q.h_max, 1.0, 1e-14);
  EXPECT_NEAR(q.rho[0], 1.0 / std::sqrt(24.0), 1e-14);
  EXPECT_NEAR(q.chunkiness, std::sqrt(24.0), 1e-12);
}

TEST(Quality, CubeHMax) {
  const Mesh m = cube(2, 1);
  const auto q = compute_quality(m, compute_geometry(m));
  EXPECT_NEAR(q.h_max, std::sqrt(3.0) / 2, 1e-14);
  EXPECT_EQ(q.h.size(), static_cast<std::size_t>(m.n_tets()));
}
