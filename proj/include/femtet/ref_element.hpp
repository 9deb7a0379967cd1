#pragma once

// Lagrange P_m reference simplices (m = 1..4) with GMSH node ordering.
//
// Reference tetrahedron vertices: (0,0,0), (1,0,0), (0,1,0), (0,0,1); the
// reference triangle is its ẑ = 0 face. Nodes are addressed by integer
// barycentric multi-indices (i0, i1, i2[, i3]) summing to m; the node lies at
// barycentric coordinates i/m. Shape functions are evaluated on demand from
// the product formula
//
//   N_r(λ) = Π_n Π_{ℓ < i_n} (λ_n − ℓ/m) / (i_n/m − ℓ/m).

#include <array>
#include <span>
#include <vector>

namespace femtet {

enum class CellKind { Tetrahedron, Triangle };

/// Integer barycentric index. Triangles leave the last component at zero.
using BaryIndex = std::array<int, 4>;

std::vector<BaryIndex> tet_node_order(int degree);
std::vector<BaryIndex> tri_node_order(int degree);

/// Tet-local indices of the nodes on face `face` (the face where i_face = 0),
/// listed in triangle GMSH order with the face oriented outward.
std::vector<int> face_node_map(int degree, int face);

class ReferenceElement {
 public:
  ReferenceElement(CellKind kind, int degree);

  CellKind kind() const { return kind_; }
  int degree() const { return degree_; }
  int dof() const { return static_cast<int>(nodes_.size()); }
  /// Number of barycentric coordinates (4 for tetrahedra, 3 for triangles).
  int n_bary() const { return kind_ == CellKind::Tetrahedron ? 4 : 3; }
  /// Number of reference Cartesian coordinates (3 or 2).
  int dim() const { return n_bary() - 1; }

  const std::vector<BaryIndex>& nodes() const { return nodes_; }

  /// Barycentric coordinates of node r.
  std::array<double, 4> node_lambda(int r) const;

  /// N_r at barycentric point `lambda` (n_bary() entries).
  double value(int r, std::span<const double> lambda) const;

  /// ∂N_r/∂λ_n for every barycentric coordinate n.
  std::array<double, 4> bary_grad(int r, std::span<const double> lambda) const;

  /// Gradient with respect to reference Cartesian coordinates, evaluated at
  /// barycentric point `lambda`. Triangles fill the first two entries.
  std::array<double, 3> grad(int r, std::span<const double> lambda) const;

  /// Same as grad() but taking the reference Cartesian point x̂.
  std::array<double, 3> grad_at(int r, std::span<const double> xhat) const;

  /// Barycentric coordinates of a reference Cartesian point.
  std::array<double, 4> lambda_of(std::span<const double> xhat) const;

 private:
  CellKind kind_;
  int degree_;
  std::vector<BaryIndex> nodes_;
};

/// Shape-function values and reference gradients at a fixed point set.
struct Tabulation {
  int n_points = 0;
  int dof = 0;
  std::vector<double> values;  // n_points x dof
  std::vector<double> grads;   // n_points x dof x 3

  double value(int q, int r) const { return values[q * dof + r]; }
  const double* grad(int q, int r) const { return &grads[(q * dof + r) * 3]; }
};

Tabulation tabulate(const ReferenceElement& elem,
                    std::span<const std::array<double, 4>> lambdas);

}  // namespace femtet
