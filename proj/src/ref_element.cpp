#include "femtet/ref_element.hpp"

#include <string>

#include "femtet/error.hpp"

namespace femtet {
namespace {

void check_degree(int degree) {
  if (degree < 1 || degree > 4) {
    throw Error(ErrorKind::UnsupportedDegree,
                "degree " + std::to_string(degree) + " (supported: 1..4)");
  }
}

// Interior-node recursion: an inner lattice of degree k (possibly 0 = one
// node) is shifted by +1 in every barycentric component.
std::vector<BaryIndex> tri_lattice(int m) {
  std::vector<BaryIndex> out;
  if (m == 0) {
    out.push_back({0, 0, 0, 0});
    return out;
  }
  out.push_back({m, 0, 0, 0});
  out.push_back({0, m, 0, 0});
  out.push_back({0, 0, m, 0});
  // Edges (0,1), (1,2), (2,0), each walked from its first vertex.
  constexpr int edges[3][2] = {{0, 1}, {1, 2}, {2, 0}};
  for (const auto& e : edges) {
    for (int k = 1; k < m; ++k) {
      BaryIndex b{0, 0, 0, 0};
      b[e[0]] = m - k;
      b[e[1]] = k;
      out.push_back(b);
    }
  }
  if (m >= 3) {
    for (BaryIndex b : tri_lattice(m - 3)) {
      out.push_back({b[0] + 1, b[1] + 1, b[2] + 1, 0});
    }
  }
  return out;
}

// Outward-oriented vertex triples of the tetrahedron faces, in the order
// used for face-interior nodes.
constexpr int kFaceVertices[4][3] = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {3, 1, 2}};

std::vector<BaryIndex> tet_lattice(int m) {
  std::vector<BaryIndex> out;
  if (m == 0) {
    out.push_back({0, 0, 0, 0});
    return out;
  }
  for (int v = 0; v < 4; ++v) {
    BaryIndex b{0, 0, 0, 0};
    b[v] = m;
    out.push_back(b);
  }
  constexpr int edges[6][2] = {{0, 1}, {1, 2}, {2, 0}, {3, 0}, {3, 2}, {3, 1}};
  for (const auto& e : edges) {
    for (int k = 1; k < m; ++k) {
      BaryIndex b{0, 0, 0, 0};
      b[e[0]] = m - k;
      b[e[1]] = k;
      out.push_back(b);
    }
  }
  if (m >= 3) {
    const auto inner = tri_lattice(m - 3);
    for (const auto& f : kFaceVertices) {
      for (const BaryIndex& t : inner) {
        BaryIndex b{0, 0, 0, 0};
        for (int c = 0; c < 3; ++c) b[f[c]] = t[c] + 1;
        out.push_back(b);
      }
    }
  }
  if (m >= 4) {
    for (BaryIndex b : tet_lattice(m - 4)) {
      out.push_back({b[0] + 1, b[1] + 1, b[2] + 1, b[3] + 1});
    }
  }
  return out;
}

// P(s) = Π_{ℓ<i} (m s − ℓ)/(i − ℓ) and its derivative.
void factor(int i, int m, double s, double& value, double& deriv) {
  value = 1.0;
  deriv = 0.0;
  for (int l = 0; l < i; ++l) {
    const double denom = static_cast<double>(i - l);
    const double term = (m * s - l) / denom;
    const double dterm = m / denom;
    deriv = deriv * term + value * dterm;
    value *= term;
  }
}

}  // namespace

std::vector<BaryIndex> tet_node_order(int degree) {
  check_degree(degree);
  return tet_lattice(degree);
}

std::vector<BaryIndex> tri_node_order(int degree) {
  check_degree(degree);
  return tri_lattice(degree);
}

std::vector<int> face_node_map(int degree, int face) {
  check_degree(degree);
  if (face < 0 || face > 3) {
    throw Error(ErrorKind::ShapeMismatch, "face index " + std::to_string(face));
  }
  // Remaining vertices ascending; swap the last two when the induced normal
  // would point into the tetrahedron (faces 1 and 3 of the reference cell).
  std::array<int, 3> verts{};
  int k = 0;
  for (int v = 0; v < 4; ++v) {
    if (v != face) verts[k++] = v;
  }
  if (face == 1 || face == 3) std::swap(verts[1], verts[2]);

  const auto tet = tet_lattice(degree);
  std::vector<int> out;
  for (const BaryIndex& t : tri_lattice(degree)) {
    BaryIndex b{0, 0, 0, 0};
    for (int c = 0; c < 3; ++c) b[verts[c]] = t[c];
    for (std::size_t r = 0; r < tet.size(); ++r) {
      if (tet[r] == b) {
        out.push_back(static_cast<int>(r));
        break;
      }
    }
  }
  return out;
}

ReferenceElement::ReferenceElement(CellKind kind, int degree)
    : kind_(kind), degree_(degree) {
  nodes_ = kind == CellKind::Tetrahedron ? tet_node_order(degree)
                                         : tri_node_order(degree);
}

std::array<double, 4> ReferenceElement::node_lambda(int r) const {
  std::array<double, 4> out{};
  for (int n = 0; n < n_bary(); ++n) {
    out[n] = static_cast<double>(nodes_[r][n]) / degree_;
  }
  return out;
}

double ReferenceElement::value(int r, std::span<const double> lambda) const {
  const BaryIndex& idx = nodes_[r];
  double v = 1.0;
  for (int n = 0; n < n_bary(); ++n) {
    double p = 0.0;
    double dp = 0.0;
    factor(idx[n], degree_, lambda[n], p, dp);
    v *= p;
  }
  return v;
}

std::array<double, 4> ReferenceElement::bary_grad(
    int r, std::span<const double> lambda) const {
  const BaryIndex& idx = nodes_[r];
  std::array<double, 4> p{1.0, 1.0, 1.0, 1.0};
  std::array<double, 4> dp{0.0, 0.0, 0.0, 0.0};
  for (int n = 0; n < n_bary(); ++n) factor(idx[n], degree_, lambda[n], p[n], dp[n]);
  std::array<double, 4> out{};
  for (int n = 0; n < n_bary(); ++n) {
    double g = dp[n];
    for (int k = 0; k < n_bary(); ++k) {
      if (k != n) g *= p[k];
    }
    out[n] = g;
  }
  return out;
}

std::array<double, 3> ReferenceElement::grad(int r,
                                             std::span<const double> lambda) const {
  // λ0 = 1 − Σ x̂_k and λ_{k+1} = x̂_k.
  const auto db = bary_grad(r, lambda);
  std::array<double, 3> out{};
  for (int k = 0; k < dim(); ++k) out[k] = db[k + 1] - db[0];
  return out;
}

std::array<double, 4> ReferenceElement::lambda_of(
    std::span<const double> xhat) const {
  std::array<double, 4> lam{};
  double s = 0.0;
  for (int k = 0; k < dim(); ++k) {
    lam[k + 1] = xhat[k];
    s += xhat[k];
  }
  lam[0] = 1.0 - s;
  return lam;
}

std::array<double, 3> ReferenceElement::grad_at(
    int r, std::span<const double> xhat) const {
  const auto lam = lambda_of(xhat);
  return grad(r, lam);
}

Tabulation tabulate(const ReferenceElement& elem,
                    std::span<const std::array<double, 4>> lambdas) {
  Tabulation tab;
  tab.n_points = static_cast<int>(lambdas.size());
  tab.dof = elem.dof();
  tab.values.resize(static_cast<std::size_t>(tab.n_points) * tab.dof);
  tab.grads.resize(static_cast<std::size_t>(tab.n_points) * tab.dof * 3);
  for (int q = 0; q < tab.n_points; ++q) {
    for (int r = 0; r < tab.dof; ++r) {
      tab.values[q * tab.dof + r] = elem.value(r, lambdas[q]);
      const auto g = elem.grad(r, lambdas[q]);
      for (int k = 0; k < 3; ++k) tab.grads[(q * tab.dof + r) * 3 + k] = g[k];
    }
  }
  return tab;
}

}  // namespace femtet
