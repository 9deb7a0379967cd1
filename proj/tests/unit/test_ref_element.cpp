#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>

#include "error_kind.hpp"
#include "femtet/ref_element.hpp"

using namespace femtet;
using femtet::testkit::kind_of;

namespace {

std::array<double, 4> random_lambda(std::mt19937& rng, int n_bary) {
  std::exponential_distribution<double> e(1.0);
  std::array<double, 4> l{0, 0, 0, 0};
  double s = 0;
  for (int i = 0; i < n_bary; ++i) s += (l[i] = e(rng));
  for (int i = 0; i < n_bary; ++i) l[i] /= s;
  return l;
}

std::array<double, 3> xhat_of(const std::array<double, 4>& l) { return {l[1], l[2], l[3]}; }

class PerDegree : public ::testing::TestWithParam<std::tuple<CellKind, int>> {};

}  // namespace

TEST(NodeOrder, TetDegreeOne) {
  EXPECT_EQ(tet_node_order(1), (std::vector<BaryIndex>{
                                   {1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}));
}

TEST(NodeOrder, TetDegreeTwoEdges) {
  const auto n = tet_node_order(2);
  ASSERT_EQ(n.size(), 10u);
  EXPECT_EQ(n[4], (BaryIndex{1, 1, 0, 0}));
  EXPECT_EQ(n[5], (BaryIndex{0, 1, 1, 0}));
  EXPECT_EQ(n[6], (BaryIndex{1, 0, 1, 0}));
  EXPECT_EQ(n[7], (BaryIndex{1, 0, 0, 1}));
  EXPECT_EQ(n[8], (BaryIndex{0, 0, 1, 1}));
  EXPECT_EQ(n[9], (BaryIndex{0, 1, 0, 1}));
}

TEST(NodeOrder, TetDegreeThreeEdgeDirectionAndFaces) {
  const auto n = tet_node_order(3);
  ASSERT_EQ(n.size(), 20u);
  EXPECT_EQ(n[4], (BaryIndex{2, 1, 0, 0}));   // edge 0->1, near vertex 0
  EXPECT_EQ(n[5], (BaryIndex{1, 2, 0, 0}));
  EXPECT_EQ(n[8], (BaryIndex{1, 0, 2, 0}));   // edge 2->0, near vertex 2
  EXPECT_EQ(n[10], (BaryIndex{1, 0, 0, 2}));  // edge 3->0, near vertex 3
  EXPECT_EQ(n[14], (BaryIndex{0, 1, 0, 2}));  // edge 3->1, near vertex 3
  EXPECT_EQ(n[16], (BaryIndex{1, 1, 1, 0}));
  EXPECT_EQ(n[17], (BaryIndex{1, 1, 0, 1}));
  EXPECT_EQ(n[18], (BaryIndex{1, 0, 1, 1}));
  EXPECT_EQ(n[19], (BaryIndex{0, 1, 1, 1}));
}

TEST(NodeOrder, TetDegreeFourFacesAndInterior) {
  const auto n = tet_node_order(4);
  ASSERT_EQ(n.size(), 35u);
  EXPECT_EQ(n[22], (BaryIndex{2, 1, 1, 0}));
  EXPECT_EQ(n[23], (BaryIndex{1, 1, 2, 0}));
  EXPECT_EQ(n[24], (BaryIndex{1, 2, 1, 0}));
  EXPECT_EQ(n[34], (BaryIndex{1, 1, 1, 1}));
}

TEST(NodeOrder, TriangleOrders) {
  EXPECT_EQ(tri_node_order(2), (std::vector<BaryIndex>{{2, 0, 0, 0}, {0, 2, 0, 0},
                                                        {0, 0, 2, 0}, {1, 1, 0, 0},
                                                        {0, 1, 1, 0}, {1, 0, 1, 0}}));
  EXPECT_EQ(tri_node_order(3)[9], (BaryIndex{1, 1, 1, 0}));
  EXPECT_EQ(tri_node_order(1).size(), 3u);
  const auto t4 = tri_node_order(4);
  EXPECT_EQ(t4[12], (BaryIndex{2, 1, 1, 0}));
  EXPECT_EQ(t4[13], (BaryIndex{1, 2, 1, 0}));
  EXPECT_EQ(t4[14], (BaryIndex{1, 1, 2, 0}));
}

TEST(NodeOrder, LatticeCounts) {
  const int tet[] = {4, 10, 20, 35};
  const int tri[] = {3, 6, 10, 15};
  for (int m = 1; m <= 4; ++m) {
    EXPECT_EQ(static_cast<int>(tet_node_order(m).size()), tet[m - 1]);
    EXPECT_EQ(static_cast<int>(tri_node_order(m).size()), tri[m - 1]);
    EXPECT_EQ(ReferenceElement(CellKind::Tetrahedron, m).dof(), tet[m - 1]);
    EXPECT_EQ(ReferenceElement(CellKind::Triangle, m).dof(), tri[m - 1]);
  }
}

TEST(NodeOrder, EveryNodeOnceAndSummingToM) {
  for (int m = 1; m <= 4; ++m) {
    auto n = tet_node_order(m);
    for (const auto& b : n) EXPECT_EQ(b[0] + b[1] + b[2] + b[3], m);
    std::sort(n.begin(), n.end());
    EXPECT_EQ(std::adjacent_find(n.begin(), n.end()), n.end());
  }
}

TEST(NodeOrder, UnsupportedDegrees) {
  EXPECT_EQ(kind_of([] { tet_node_order(0); }), ErrorKind::UnsupportedDegree);
  EXPECT_EQ(kind_of([] { tet_node_order(5); }), ErrorKind::UnsupportedDegree);
  EXPECT_EQ(kind_of([] { tri_node_order(5); }), ErrorKind::UnsupportedDegree);
  EXPECT_EQ(kind_of([] { ReferenceElement(CellKind::Tetrahedron, 5); }),
            ErrorKind::UnsupportedDegree);
}

TEST(ShapeFunctions, Examples) {
  const ReferenceElement p1(CellKind::Tetrahedron, 1);
  const double c[] = {0.25, 0.25, 0.25, 0.25};
  EXPECT_DOUBLE_EQ(p1.value(0, c), 0.25);
  const ReferenceElement p2(CellKind::Tetrahedron, 2);
  const double mid[] = {0.5, 0.5, 0, 0};
  const double v0[] = {1, 0, 0, 0};
  EXPECT_NEAR(p2.value(4, mid), 1.0, 1e-15);
  EXPECT_NEAR(p2.value(4, v0), 0.0, 1e-15);
}

TEST(ShapeFunctions, LinearGradients) {
  const ReferenceElement p1(CellKind::Tetrahedron, 1);
  const double x[] = {0.1, 0.2, 0.3};
  EXPECT_EQ(p1.grad_at(0, x), (std::array<double, 3>{-1, -1, -1}));
  EXPECT_EQ(p1.grad_at(2, x), (std::array<double, 3>{0, 1, 0}));
}

TEST(ShapeFunctions, CentroidFiniteDifference) {
  const ReferenceElement p2(CellKind::Tetrahedron, 2);
  const double h = 1e-6;
  const double c[] = {0.25, 0.25, 0.25};
  const auto g = p2.grad_at(4, c);
  for (int k = 0; k < 3; ++k) {
    double xp[] = {c[0], c[1], c[2]};
    double xm[] = {c[0], c[1], c[2]};
    xp[k] += h;
    xm[k] -= h;
    const double fd = (p2.value(4, p2.lambda_of(xp)) - p2.value(4, p2.lambda_of(xm))) / (2 * h);
    EXPECT_NEAR(g[k], fd, 1e-8);
  }
}

TEST(FaceNodeMap, Examples) {
  EXPECT_EQ(face_node_map(1, 3), (std::vector<int>{0, 2, 1}));
  auto f = face_node_map(2, 3);
  ASSERT_EQ(f.size(), 6u);
  std::sort(f.begin(), f.end());
  EXPECT_EQ(f, (std::vector<int>{0, 1, 2, 4, 5, 6}));
  EXPECT_EQ(kind_of([] { face_node_map(2, 4); }), ErrorKind::ShapeMismatch);
  EXPECT_EQ(kind_of([] { face_node_map(6, 0); }), ErrorKind::UnsupportedDegree);
}

TEST(FaceNodeMap, MatchesTriangleLatticeAndIsOutward) {
  for (int m = 1; m <= 4; ++m) {
    const auto tet = tet_node_order(m);
    const auto tri = tri_node_order(m);
    for (int face = 0; face < 4; ++face) {
      const auto map = face_node_map(m, face);
      ASSERT_EQ(map.size(), tri.size());
      // Vertices of the face in triangle order.
      std::array<int, 3> fv{};
      for (int v = 0; v < 3; ++v) {
        for (int n = 0; n < 4; ++n) {
          if (tet[map[v]][n] == m) fv[v] = n;
        }
      }
      for (std::size_t p = 0; p < map.size(); ++p) {
        const auto& b = tet[map[p]];
        EXPECT_EQ(b[face], 0);
        EXPECT_EQ((BaryIndex{b[fv[0]], b[fv[1]], b[fv[2]], 0}), tri[p])
            << "m=" << m << " face=" << face << " p=" << p;
      }
      // Outward: normal of (v0, v1, v2) points away from the opposite vertex.
      const std::array<std::array<double, 3>, 4> X{{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
      auto sub = [](auto a, auto b) { return std::array<double, 3>{a[0] - b[0], a[1] - b[1], a[2] - b[2]}; };
      const auto e1 = sub(X[fv[1]], X[fv[0]]);
      const auto e2 = sub(X[fv[2]], X[fv[0]]);
      const std::array<double, 3> nrm{e1[1] * e2[2] - e1[2] * e2[1], e1[2] * e2[0] - e1[0] * e2[2],
                                      e1[0] * e2[1] - e1[1] * e2[0]};
      const auto out = sub(X[fv[0]], X[face]);
      EXPECT_GT(nrm[0] * out[0] + nrm[1] * out[1] + nrm[2] * out[2], 0.0);
    }
  }
}

TEST_P(PerDegree, KroneckerDelta) {
  const auto [kind, m] = GetParam();
  const ReferenceElement e(kind, m);
  for (int s = 0; s < e.dof(); ++s) {
    const auto l = e.node_lambda(s);
    for (int r = 0; r < e.dof(); ++r) {
      EXPECT_NEAR(e.value(r, std::span(l.data(), e.n_bary())), r == s ? 1.0 : 0.0, 1e-12);
    }
  }
}

TEST_P(PerDegree, PartitionOfUnityAndGradientSum) {
  const auto [kind, m] = GetParam();
  const ReferenceElement e(kind, m);
  std::mt19937 rng(42 + m);
  for (int t = 0; t < 200; ++t) {
    const auto l = random_lambda(rng, e.n_bary());
    double sum = 0;
    std::array<double, 3> gsum{0, 0, 0};
    for (int r = 0; r < e.dof(); ++r) {
      sum += e.value(r, std::span(l.data(), e.n_bary()));
      const auto g = e.grad(r, std::span(l.data(), e.n_bary()));
      for (int k = 0; k < 3; ++k) gsum[k] += g[k];
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(gsum[k], 0.0, 1e-10);
  }
}

TEST_P(PerDegree, PolynomialReproduction) {
  const auto [kind, m] = GetParam();
  const ReferenceElement e(kind, m);
  std::mt19937 rng(7 + m);
  const int dim = e.dim();
  for (int a = 0; a <= m; ++a) {
    for (int b = 0; a + b <= m; ++b) {
      for (int c = 0; a + b + c <= m; ++c) {
        if (dim == 2 && c > 0) continue;
        auto mono = [&](const std::array<double, 4>& l) {
          const auto x = xhat_of(l);
          return std::pow(x[0], a) * std::pow(x[1], b) * std::pow(x[2], c);
        };
        for (int t = 0; t < 20; ++t) {
          const auto l = random_lambda(rng, e.n_bary());
          double s = 0;
          for (int r = 0; r < e.dof(); ++r) {
            s += mono(e.node_lambda(r)) * e.value(r, std::span(l.data(), e.n_bary()));
          }
          EXPECT_NEAR(s, mono(l), 1e-10);
        }
      }
    }
  }
}

TEST_P(PerDegree, GradientFiniteDifference) {
  const auto [kind, m] = GetParam();
  const ReferenceElement e(kind, m);
  std::mt19937 rng(99 + m);
  const double h = 1e-6;
  for (int t = 0; t < 10; ++t) {
    auto l = random_lambda(rng, e.n_bary());
    const auto x = xhat_of(l);
    for (int r = 0; r < e.dof(); ++r) {
      const auto g = e.grad_at(r, std::span(x.data(), e.dim()));
      double gnorm = std::hypot(g[0], g[1], g[2]);
      for (int k = 0; k < e.dim(); ++k) {
        auto xp = x, xm = x;
        xp[k] += h;
        xm[k] -= h;
        const auto lp = e.lambda_of(std::span(xp.data(), e.dim()));
        const auto lm = e.lambda_of(std::span(xm.data(), e.dim()));
        const double fd = (e.value(r, std::span(lp.data(), e.n_bary())) -
                           e.value(r, std::span(lm.data(), e.n_bary()))) /
                          (2 * h);
        EXPECT_LE(std::abs(fd - g[k]), 1e-6 * std::max(1.0, gnorm));
      }
    }
  }
}

TEST_P(PerDegree, TabulationMatchesPointwise) {
  const auto [kind, m] = GetParam();
  const ReferenceElement e(kind, m);
  std::mt19937 rng(5);
  std::vector<std::array<double, 4>> pts;
  for (int t = 0; t < 5; ++t) pts.push_back(random_lambda(rng, e.n_bary()));
  const Tabulation tab = tabulate(e, pts);
  for (int q = 0; q < 5; ++q) {
    for (int r = 0; r < e.dof(); ++r) {
      EXPECT_EQ(tab.value(q, r), e.value(r, std::span(pts[q].data(), e.n_bary())));
      const auto g = e.grad(r, std::span(pts[q].data(), e.n_bary()));
      for (int k = 0; k < 3; ++k) EXPECT_EQ(tab.grad(q, r)[k], g[k]);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(
    AllElements, PerDegree,
    ::testing::Combine(::testing::Values(CellKind::Tetrahedron, CellKind::Triangle),
                       ::testing::Values(1, 2, 3, 4)),
    [](const auto& info) {
      return std::string(std::get<0>(info.param) == CellKind::Tetrahedron ? "Tet" : "Tri") +
             "P" + std::to_string(std::get<1>(info.param));
    });
