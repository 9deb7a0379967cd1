#pragma once

// JSON run configuration.
//
// {
//   "mesh": "cube.msh",                 relative to the config file
//   "degree": 2,
//   "quadrature_degree": 6,             optional, default 2*degree
//   "coefficients": {
//     "kappa": "1" | [9 expressions],   scalar k means k*I
//     "beta": [3 expressions],
//     "c": "0", "f": "1"
//   },
//   "boundary": {
//     "dirichlet": {"groups": ["Wall"], "value": "300"},
//     "robin": {"groups": ["Fins"] | "rest", "alpha": "5", "g": "135"}
//   },
//   "solver": {"method": "auto", "tol": 1e-10, "max_iter": 20000,
//              "preconditioner": "jacobi"},
//   "transient": {"rho_cp": "1", "t_start": 0, "t_end": 1, "dt": 0.1,
//                 "initial": "0", "snapshot_every": 1},
//   "output": {"vtk": "out_{step}.vtk", "probes": [[x, y, z], ...],
//              "probe_csv": "probes.csv",
//              "errors": {"exact": "...", "exact_grad": [3 expressions]}}
// }
//
// Expressions may also be given as JSON numbers.

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "femtet/expr.hpp"
#include "femtet/msh_reader.hpp"
#include "femtet/solver.hpp"

namespace femtet {

struct TransientConfig {
  CoefficientField rho_cp = CoefficientField::scalar(Expr::constant(1.0));
  CoefficientField initial;
  TimeStepping stepping;
};

struct ErrorConfig {
  CoefficientField exact;
  CoefficientField exact_grad;  // Vector3, or scalar zero when absent
};

struct RunConfig {
  std::filesystem::path mesh_path;
  int degree = 1;
  std::optional<int> quadrature_degree;

  CoefficientField kappa = CoefficientField::isotropic(Expr::constant(1.0));
  CoefficientField beta = CoefficientField::vector3({});
  CoefficientField c;
  CoefficientField f;

  std::vector<std::string> dirichlet_groups;
  CoefficientField dirichlet_value;
  std::vector<std::string> robin_groups;
  bool robin_rest = false;
  CoefficientField robin_alpha;
  CoefficientField robin_g;

  SolverConfig solver;
  std::optional<TransientConfig> transient;

  std::optional<std::string> vtk_pattern;  // relative to the config file
  std::vector<Vec3> probes;
  std::optional<std::filesystem::path> probe_csv;
  std::optional<ErrorConfig> errors;

  std::filesystem::path base_dir;  // directory of the config file

  int volume_quadrature_degree() const;
  int boundary_quadrature_degree() const;
  std::filesystem::path resolve(const std::filesystem::path& p) const;
};

/// ConfigError on any schema or value violation.
RunConfig parse_config(std::string_view json_text,
                       const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

/// Checks the boundary groups against a mesh: every group exists with
/// dimension 2, Dirichlet and Robin do not overlap, and together they cover
/// every boundary entity tag. Returns the Robin entity tags.
std::vector<int> validate_boundary(const RunConfig& cfg, const Mesh& mesh);

}  // namespace femtet
