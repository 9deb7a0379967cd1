#pragma once

#include <array>
#include <span>
#include <vector>

#include "femtet/ref_element.hpp"

namespace femtet {

/// Quadrature on the reference simplex in barycentric coordinates.
///
/// Weights sum to one: the reference measure (1/6 for the tetrahedron, 1/2 for
/// the triangle) is applied by the caller, together with the Jacobian.
struct QuadratureRule {
  CellKind kind = CellKind::Tetrahedron;
  std::vector<std::array<double, 4>> points;
  std::vector<double> weights;
  int exactness = 0;

  int size() const { return static_cast<int>(weights.size()); }
};

/// Highest exactness simplex_rule() will provide.
inline constexpr int kMaxQuadratureDegree = 15;

/// Deterministic rule exact for polynomials of total degree ≥ required_degree.
/// Low orders use positive symmetric rules; higher orders use Grundmann–Möller.
QuadratureRule simplex_rule(CellKind kind, int required_degree);

/// Grundmann–Möller rule of index s (exactness 2s + 1).
QuadratureRule grundmann_moller_rule(CellKind kind, int s);

/// Exact integral of x̂^a ŷ^b ẑ^c over the reference cell (triangles use the
/// first two exponents): a! b! c! / (a+b+c+3)!, or a! b! / (a+b+2)!.
double monomial_integral(std::span<const int> exponents, CellKind kind);

}  // namespace femtet
