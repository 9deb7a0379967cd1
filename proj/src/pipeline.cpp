#include "femtet/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "femtet/error.hpp"

namespace femtet {
namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::string expand_step(std::string pattern, int step) {
  const std::string key = "{step}";
  const std::string value = std::to_string(step);
  for (auto pos = pattern.find(key); pos != std::string::npos;
       pos = pattern.find(key, pos + value.size())) {
    pattern.replace(pos, key.size(), value);
  }
  return pattern;
}

std::vector<double> load_vector(const RunConfig& cfg, const Discretization& d,
                                double time) {
  auto b = assemble_load(d.mesh, d.geom, cfg.f, d.volume_rule, time);
  const auto t = assemble_robin_vector(d.mesh, d.geom, cfg.robin_g,
                                       d.bc.robin_rows, d.boundary_rule, time);
  for (std::size_t i = 0; i < b.size(); ++i) b[i] += t[i];
  return b;
}

}  // namespace

Discretization prepare(const RunConfig& cfg,
                       const std::optional<std::filesystem::path>& mesh_path) {
  Discretization d;
  d.mesh = load_mesh(mesh_path ? *mesh_path : cfg.resolve(cfg.mesh_path),
                     cfg.degree);
  validate_boundary(cfg, d.mesh);
  d.geom = compute_geometry(d.mesh);
  d.bc = classify_boundary(d.mesh, cfg.dirichlet_groups);
  d.volume_rule = simplex_rule(CellKind::Tetrahedron, cfg.volume_quadrature_degree());
  d.boundary_rule = simplex_rule(CellKind::Triangle, cfg.boundary_quadrature_degree());
  return d;
}

Operators assemble_operators(const RunConfig& cfg, const Discretization& d,
                             double time) {
  Operators op;
  op.S = assemble_stiffness(d.mesh, d.geom, cfg.kappa, d.volume_rule, time);
  op.M = assemble_mass(d.mesh, d.geom, cfg.c, d.volume_rule, time);
  op.A = assemble_advection(d.mesh, d.geom, cfg.beta, d.volume_rule, time);
  op.R = assemble_boundary_mass(d.mesh, d.geom, cfg.robin_alpha, d.bc.robin_rows,
                                d.boundary_rule, time);
  op.b = assemble_load(d.mesh, d.geom, cfg.f, d.volume_rule, time);
  op.t = assemble_robin_vector(d.mesh, d.geom, cfg.robin_g, d.bc.robin_rows,
                               d.boundary_rule, time);
  op.system = combine_system(op.S, op.R, op.A, op.M, op.b, op.t);
  return op;
}

std::vector<double> interpolate(const Mesh& mesh, const CoefficientField& field,
                                double t) {
  if (field.shape() != FieldShape::Scalar) {
    throw Error(ErrorKind::ShapeMismatch, "interpolated field must be scalar");
  }
  std::vector<int> tag(mesh.n_nodes(), 0);
  std::vector<bool> seen(mesh.n_nodes(), false);
  for (Index k = 0; k < mesh.n_tets(); ++k) {
    for (Index n : mesh.tet(k)) {
      if (!seen[n]) {
        seen[n] = true;
        tag[n] = mesh.domain[k];
      }
    }
  }
  std::vector<double> u(mesh.n_nodes());
  for (Index n = 0; n < mesh.n_nodes(); ++n) {
    field.eval(mesh.coord[n], t, tag[n], std::span<double>(&u[n], 1));
  }
  return u;
}

RunResult run(const RunConfig& cfg,
              const std::optional<std::filesystem::path>& mesh_path) {
  RunResult res;
  res.disc = prepare(cfg, mesh_path);
  const Discretization& d = res.disc;

  if (!cfg.transient) {
    auto start = std::chrono::steady_clock::now();
    const Operators op = assemble_operators(cfg, d);
    res.assembly_seconds = seconds_since(start);
    start = std::chrono::steady_clock::now();
    const auto uD = dirichlet_values(d.mesh, d.bc, cfg.dirichlet_value, 0.0);
    res.snapshots.push_back(
        {0, 0.0, solve_steady(op.system.C, op.system.d, d.bc, uD, cfg.solver)});
    res.solve_seconds = seconds_since(start);
  } else {
    const TransientConfig& tc = *cfg.transient;
    const TimeStepping& ts = tc.stepping;
    auto start = std::chrono::steady_clock::now();
    const Operators op = assemble_operators(cfg, d, ts.t_start);
    const CsrMatrix M_rho = assemble_mass(d.mesh, d.geom, tc.rho_cp, d.volume_rule,
                                          ts.t_start);
    res.assembly_seconds = seconds_since(start);

    const bool forcing_varies = cfg.f.uses_time() || cfg.robin_g.uses_time();
    auto d_of_t = [&](double t) {
      return forcing_varies ? load_vector(cfg, d, t) : op.system.d;
    };
    auto uD_of_t = [&](double t) {
      return dirichlet_values(d.mesh, d.bc, cfg.dirichlet_value, t);
    };
    std::vector<double> u0 = interpolate(d.mesh, tc.initial, ts.t_start);
    const auto uD0 = uD_of_t(ts.t_start);
    for (std::size_t i = 0; i < d.bc.iD.size(); ++i) u0[d.bc.iD[i]] = uD0[i];

    start = std::chrono::steady_clock::now();
    res.snapshots = crank_nicolson(M_rho, op.system.C, d_of_t, u0, ts, d.bc,
                                   uD_of_t, cfg.solver);
    res.solve_seconds = seconds_since(start);
  }

  if (cfg.errors) {
    const int deg = std::min(kMaxQuadratureDegree,
                             std::max(cfg.volume_quadrature_degree(), 2 * cfg.degree + 2));
    const auto rule = simplex_rule(CellKind::Tetrahedron, deg);
    res.errors = error_norms(d.mesh, d.geom, res.final_u(), cfg.errors->exact,
                             cfg.errors->exact_grad, rule, res.snapshots.back().t);
  }
  return res;
}

void write_probe_csv(std::ostream& out, std::span<const Vec3> points,
                     std::span<const double> values) {
  char buf[160];
  out << "x,y,z,u\n";
  for (std::size_t p = 0; p < points.size(); ++p) {
    if (std::isnan(values[p])) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,nan\n", points[p][0],
                    points[p][1], points[p][2]);
    } else {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", points[p][0],
                    points[p][1], points[p][2], values[p]);
    }
    out << buf;
  }
}

void write_outputs(const RunConfig& cfg, const RunResult& result,
                   std::ostream& probe_out) {
  const Discretization& d = result.disc;
  if (cfg.vtk_pattern) {
    for (const Snapshot& s : result.snapshots) {
      const std::string name = expand_step(*cfg.vtk_pattern, s.step);
      const NamedField field{"u", s.solution.u};
      write_vtk(d.mesh, std::span(&field, 1), cfg.resolve(name));
    }
  }
  if (!cfg.probes.empty()) {
    const auto values = evaluate_at(d.mesh, d.geom, result.final_u(), cfg.probes);
    if (cfg.probe_csv) {
      const auto path = cfg.resolve(*cfg.probe_csv);
      std::ofstream f(path);
      if (!f) throw Error(ErrorKind::IoError, "cannot write " + path.string());
      write_probe_csv(f, cfg.probes, values);
      if (!f) throw Error(ErrorKind::IoError, "failed writing " + path.string());
    } else {
      write_probe_csv(probe_out, cfg.probes, values);
    }
  }
}

std::vector<ConvergenceRow> run_convergence(
    const RunConfig& cfg, std::span<const std::filesystem::path> meshes) {
  if (!cfg.errors) {
    throw Error(ErrorKind::ConfigError,
                "convergence needs an output.errors block with the exact solution");
  }
  std::vector<ConvergenceRow> rows;
  for (std::size_t i = 0; i < meshes.size(); ++i) {
    const RunResult r = run(cfg, meshes[i]);
    ConvergenceRow row;
    row.level = static_cast<int>(i);
    row.h = compute_quality(r.disc.mesh, r.disc.geom).h_max;
    row.n_nodes = r.disc.mesh.n_nodes();
    row.l2 = r.errors->l2;
    row.h1_semi = r.errors->h1_semi;
    if (!rows.empty()) {
      const ConvergenceRow& prev = rows.back();
      const double lh = std::log(prev.h / row.h);
      row.rate_l2 = std::log(prev.l2 / row.l2) / lh;
      row.rate_h1 = std::log(prev.h1_semi / row.h1_semi) / lh;
    }
    rows.push_back(row);
  }
  return rows;
}

void write_convergence_csv(std::ostream& out,
                           std::span<const ConvergenceRow> rows) {
  out << "level,h,nNodes,L2,H1semi,rate_L2,rate_H1\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%.6g,%d,%.6e,%.6e,", r.level, r.h,
                  r.n_nodes, r.l2, r.h1_semi);
    out << buf;
    if (r.rate_l2) {
      std::snprintf(buf, sizeof buf, "%.4f,%.4f", *r.rate_l2, *r.rate_h1);
      out << buf;
    } else {
      out << ',';
    }
    out << '\n';
  }
}

}  // namespace femtet
