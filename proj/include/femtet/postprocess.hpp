#pragma once

// Point location, pointwise evaluation of finite-element fields, error norms
// and legacy VTK export.

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "femtet/expr.hpp"
#include "femtet/mesh_model.hpp"
#include "femtet/quadrature.hpp"
#include "femtet/sparse.hpp"

namespace femtet {

inline constexpr Index kNotFound = -1;

struct PointLocation {
  Index element = kNotFound;
  std::array<double, 4> lambda{};

  bool found() const { return element != kNotFound; }
};

/// Barycentric containment tolerance, and the looser retry tolerance.
inline constexpr double kLocateTol = 1e-12;
inline constexpr double kLocateRetryTol = 1e-8;

/// Lowest-index tetrahedron containing each point. Accepted barycentric
/// coordinates are clamped to [0, 1] and renormalized to sum to one. Meshes
/// above 10⁴ tetrahedra use a uniform-grid prefilter with identical results.
std::vector<PointLocation> locate_points(const Mesh& mesh,
                                         const GeometryCache& geom,
                                         std::span<const Vec3> points);

/// Row p holds N_r(λ_p) at columns ttrh(element_p, r).
/// UnlocatedPoint if any location is NotFound.
CsrMatrix build_eval_matrix(const Mesh& mesh,
                            std::span<const PointLocation> located);

/// u_h at each point; NaN where the point lies outside the mesh.
std::vector<double> evaluate_at(const Mesh& mesh, const GeometryCache& geom,
                                std::span<const double> u,
                                std::span<const Vec3> points);

struct ErrorNorms {
  double l2 = 0.0;
  double h1_semi = 0.0;
};

/// ‖u_h − u‖_L2 and |u_h − u|_H1 by quadrature. `exact_grad` is a Vector3
/// field; pass a default (scalar zero) field to skip the H1 part.
ErrorNorms error_norms(const Mesh& mesh, const GeometryCache& geom,
                       std::span<const double> u,
                       const CoefficientField& exact,
                       const CoefficientField& exact_grad,
                       const QuadratureRule& rule, double t = 0.0);

struct NamedField {
  std::string name;
  std::span<const double> values;  // one per mesh node
};

/// Legacy ASCII VTK unstructured grid. Cells are the vertex tetrahedra; all
/// nodes, including high-order ones, are written as points.
void write_vtk(const Mesh& mesh, std::span<const NamedField> fields,
               const std::filesystem::path& path);

}  // namespace femtet
