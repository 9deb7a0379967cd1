#pragma once

// End-to-end runs driven by a RunConfig: mesh loading and preprocessing,
// assembly, steady or Crank–Nicolson solution, error norms and outputs.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "femtet/assembly.hpp"
#include "femtet/config.hpp"
#include "femtet/mesh_model.hpp"
#include "femtet/postprocess.hpp"
#include "femtet/quadrature.hpp"
#include "femtet/solver.hpp"

namespace femtet {

struct Discretization {
  Mesh mesh;
  GeometryCache geom;
  BoundaryClassification bc;
  QuadratureRule volume_rule;
  QuadratureRule boundary_rule;
};

/// Loads the mesh (config mesh unless `mesh_path` is given), validates the
/// boundary assignment and precomputes geometry.
Discretization prepare(const RunConfig& cfg,
                       const std::optional<std::filesystem::path>& mesh_path = {});

struct Operators {
  CsrMatrix S, M, A, R;
  std::vector<double> b, t;
  LinearSystem system;
};

Operators assemble_operators(const RunConfig& cfg, const Discretization& disc,
                             double time = 0.0);

/// Nodal interpolant of a scalar field; `tag` is the entity tag of the first
/// tetrahedron containing the node.
std::vector<double> interpolate(const Mesh& mesh, const CoefficientField& field,
                                double t);

struct RunResult {
  Discretization disc;
  std::vector<Snapshot> snapshots;  // one entry for steady problems
  std::optional<ErrorNorms> errors;
  double assembly_seconds = 0.0;
  double solve_seconds = 0.0;

  const std::vector<double>& final_u() const { return snapshots.back().solution.u; }
};

RunResult run(const RunConfig& cfg,
              const std::optional<std::filesystem::path>& mesh_path = {});

/// VTK files (one per snapshot) and probe CSV per the output block. Probe
/// values of the final state go to `probe_out` when no probe_csv is set.
void write_outputs(const RunConfig& cfg, const RunResult& result,
                   std::ostream& probe_out);

/// "x,y,z,u" lines; unlocated points give "nan".
void write_probe_csv(std::ostream& out, std::span<const Vec3> points,
                     std::span<const double> values);

struct ConvergenceRow {
  int level = 0;
  double h = 0.0;
  Index n_nodes = 0;
  double l2 = 0.0;
  double h1_semi = 0.0;
  std::optional<double> rate_l2;
  std::optional<double> rate_h1;
};

/// Solves on each mesh in turn. ConfigError without an output.errors block.
std::vector<ConvergenceRow> run_convergence(
    const RunConfig& cfg, std::span<const std::filesystem::path> meshes);

void write_convergence_csv(std::ostream& out,
                           std::span<const ConvergenceRow> rows);

}  // namespace femtet
