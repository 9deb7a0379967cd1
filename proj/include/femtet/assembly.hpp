#pragma once

// Element-by-element assembly of the global operators
//
//   S_κ  stiffness          ∫ κ∇φ_j · ∇φ_i
//   M_c  mass               ∫ c φ_j φ_i
//   A_β  advection          ∫ (β · ∇φ_j) φ_i
//   R_α  boundary mass      ∫_Γ_R α φ_j φ_i
//   b_f  load               ∫ f φ_i
//   t_R  Robin load         ∫_Γ_R g_R φ_i
//
// Coefficients are evaluated at the mapped quadrature points with `tag` set to
// the element's entity tag. Element ranges are processed in parallel; the
// per-range triplet buffers are concatenated in element order before the
// duplicate sum, so results are bitwise identical for any thread count.

#include <span>
#include <vector>

#include "femtet/expr.hpp"
#include "femtet/mesh_model.hpp"
#include "femtet/msh_reader.hpp"
#include "femtet/quadrature.hpp"
#include "femtet/sparse.hpp"

namespace femtet {

/// Quadrature exactness used when the caller does not ask for more.
inline int default_quadrature_degree(int degree) { return 2 * degree; }

std::vector<double> assemble_load(const Mesh& mesh, const GeometryCache& geom,
                                  const CoefficientField& f,
                                  const QuadratureRule& rule, double t = 0.0);

std::vector<double> assemble_robin_vector(const Mesh& mesh,
                                          const GeometryCache& geom,
                                          const CoefficientField& g,
                                          std::span<const Index> robin_rows,
                                          const QuadratureRule& rule,
                                          double t = 0.0);

CsrMatrix assemble_mass(const Mesh& mesh, const GeometryCache& geom,
                        const CoefficientField& c, const QuadratureRule& rule,
                        double t = 0.0);

CsrMatrix assemble_boundary_mass(const Mesh& mesh, const GeometryCache& geom,
                                 const CoefficientField& alpha,
                                 std::span<const Index> robin_rows,
                                 const QuadratureRule& rule, double t = 0.0);

/// κ must be a Matrix3 field.
CsrMatrix assemble_stiffness(const Mesh& mesh, const GeometryCache& geom,
                             const CoefficientField& kappa,
                             const QuadratureRule& rule, double t = 0.0);

/// β must be a Vector3 field.
CsrMatrix assemble_advection(const Mesh& mesh, const GeometryCache& geom,
                             const CoefficientField& beta,
                             const QuadratureRule& rule, double t = 0.0);

struct LinearSystem {
  CsrMatrix C;
  std::vector<double> d;
};

/// C = S + R + A + M, d = b + t. ShapeMismatch if any size disagrees.
LinearSystem combine_system(const CsrMatrix& S, const CsrMatrix& R,
                            const CsrMatrix& A, const CsrMatrix& M,
                            std::span<const double> b,
                            std::span<const double> t);

}  // namespace femtet
