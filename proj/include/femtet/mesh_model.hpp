#pragma once

// Per-element geometry, face connectivity, boundary classification and
// shape-quality metrics derived from a Mesh.

#include <array>
#include <span>
#include <string>
#include <vector>

#include "femtet/msh_reader.hpp"
#include "femtet/types.hpp"

namespace femtet {

/// Affine-map data for every tetrahedron and boundary triangle.
///
/// For tetrahedron K with vertices x0..x3 and v0j = xj − x0:
///   detBk = v01 · (v02 × v03)
///   b1 = (v02 × v03)/detBk, b2 = (v03 × v01)/detBk, b3 = (v01 × v02)/detBk
/// are the rows of B_K⁻¹, so ∇φ = Σ_k b_k ∂N̂/∂x̂_k.
struct GeometryCache {
  std::vector<double> detBk;
  std::vector<Vec3> b1, b2, b3;
  std::vector<Vec3> bd_normal;  // ℓ1 × ℓ2, not normalized
  std::vector<double> bd_area2; // ‖ℓ1 × ℓ2‖ = twice the triangle area
};

GeometryCache compute_geometry(const Mesh& mesh);

inline constexpr Index kNoOwner = -1;

struct Connectivity {
  std::vector<std::array<Index, 3>> faces;       // oriented per first owner
  std::vector<std::array<Index, 4>> ttrh2faces;  // face opposite vertex j
  std::vector<std::array<Index, 2>> faces2ttrh;  // second = kNoOwner on Γ

  Index n_faces() const { return static_cast<Index>(faces.size()); }
  Index n_boundary_faces() const;
};

Connectivity build_connectivity(const Mesh& mesh);

struct BoundaryClassification {
  std::vector<bool> gammaD;      // per trB row
  std::vector<Index> iD;         // sorted Dirichlet nodes
  std::vector<Index> inD;        // sorted complement
  std::vector<Index> robin_rows; // trB rows not on Γ_D
};

BoundaryClassification classify_boundary(
    const Mesh& mesh, std::span<const std::string> dirichlet_groups);

struct QualityReport {
  std::vector<double> h;    // element diameters
  std::vector<double> rho;  // inradii
  double chunkiness = 0.0;  // max h/ρ
  double h_max = 0.0;
};

QualityReport compute_quality(const Mesh& mesh, const GeometryCache& geom);

/// Vertex coordinates of tetrahedron k.
std::array<Vec3, 4> tet_vertices(const Mesh& mesh, Index k);

}  // namespace femtet
