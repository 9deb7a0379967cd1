#include "femtet/config.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <set>

#include "femtet/error.hpp"
#include "femtet/quadrature.hpp"
#include "json.hpp"

namespace femtet {
namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorKind::ConfigError, what);
}

void allow_keys(const json& obj, const std::string& where,
                std::initializer_list<std::string_view> keys) {
  if (!obj.is_object()) config_error(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      config_error("unknown key '" + key + "' in " + where);
    }
  }
}

Expr to_expr(const json& v, const std::string& where) {
  if (v.is_number()) {
    const double d = v.get<double>();
    if (!std::isfinite(d)) config_error(where + " is not finite");
    return Expr::constant(d);
  }
  if (!v.is_string()) config_error(where + " must be an expression string or number");
  try {
    return Expr::parse(v.get<std::string>());
  } catch (const Error& e) {
    config_error(where + ": " + e.what());
  }
}

CoefficientField scalar_field(const json& v, const std::string& where) {
  return CoefficientField::scalar(to_expr(v, where));
}

CoefficientField vector_field(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 3) config_error(where + " must list 3 expressions");
  std::array<Expr, 3> e;
  for (int i = 0; i < 3; ++i) e[i] = to_expr(v[i], where + "[" + std::to_string(i) + "]");
  return CoefficientField::vector3(e);
}

CoefficientField kappa_field(const json& v) {
  if (!v.is_array()) return CoefficientField::isotropic(to_expr(v, "coefficients.kappa"));
  if (v.size() != 9) config_error("coefficients.kappa must be one or 9 expressions");
  std::array<Expr, 9> e;
  for (int i = 0; i < 9; ++i) {
    e[i] = to_expr(v[i], "coefficients.kappa[" + std::to_string(i) + "]");
  }
  return CoefficientField::matrix3(e);
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) config_error(where + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) config_error(where + " is not finite");
  return d;
}

int integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) config_error(where + " must be an integer");
  return v.get<int>();
}

std::string string(const json& v, const std::string& where) {
  if (!v.is_string()) config_error(where + " must be a string");
  return v.get<std::string>();
}

std::vector<std::string> group_list(const json& v, const std::string& where) {
  if (!v.is_array()) config_error(where + " must be a list of group names");
  std::vector<std::string> out;
  for (const auto& g : v) out.push_back(string(g, where));
  return out;
}

void read_solver(const json& s, SolverConfig& cfg) {
  allow_keys(s, "solver", {"method", "tol", "max_iter", "preconditioner"});
  if (s.contains("method")) {
    const std::string m = string(s["method"], "solver.method");
    if (m == "auto") cfg.method = SolverMethod::Auto;
    else if (m == "cg") cfg.method = SolverMethod::Cg;
    else if (m == "bicgstab") cfg.method = SolverMethod::Bicgstab;
    else if (m == "dense") cfg.method = SolverMethod::Dense;
    else config_error("solver.method '" + m + "' is not auto, cg, bicgstab or dense");
  }
  if (s.contains("tol")) cfg.tol = number(s["tol"], "solver.tol");
  if (!(cfg.tol > 0.0 && cfg.tol < 1.0)) config_error("solver.tol must lie in (0, 1)");
  if (s.contains("max_iter")) cfg.max_iter = integer(s["max_iter"], "solver.max_iter");
  if (cfg.max_iter < 1) config_error("solver.max_iter must be at least 1");
  if (s.contains("preconditioner")) {
    const std::string p = string(s["preconditioner"], "solver.preconditioner");
    if (p == "jacobi") cfg.preconditioner = Preconditioner::Jacobi;
    else if (p == "none") cfg.preconditioner = Preconditioner::None;
    else config_error("solver.preconditioner '" + p + "' is not jacobi or none");
  }
}

TransientConfig read_transient(const json& t) {
  allow_keys(t, "transient",
             {"rho_cp", "t_start", "t_end", "dt", "initial", "snapshot_every"});
  TransientConfig tc;
  if (t.contains("rho_cp")) tc.rho_cp = scalar_field(t["rho_cp"], "transient.rho_cp");
  if (t.contains("initial")) tc.initial = scalar_field(t["initial"], "transient.initial");
  if (t.contains("t_start")) tc.stepping.t_start = number(t["t_start"], "transient.t_start");
  if (!t.contains("t_end")) config_error("transient.t_end is required");
  if (!t.contains("dt")) config_error("transient.dt is required");
  tc.stepping.t_end = number(t["t_end"], "transient.t_end");
  tc.stepping.dt = number(t["dt"], "transient.dt");
  if (!(tc.stepping.dt > 0.0)) config_error("transient.dt must be positive");
  if (!(tc.stepping.t_end > tc.stepping.t_start)) {
    config_error("transient.t_end must exceed t_start");
  }
  if (t.contains("snapshot_every")) {
    tc.stepping.snapshot_every = integer(t["snapshot_every"], "transient.snapshot_every");
    if (tc.stepping.snapshot_every < 0) config_error("transient.snapshot_every must be >= 0");
  }
  return tc;
}

void read_output(const json& o, RunConfig& cfg) {
  allow_keys(o, "output", {"vtk", "probes", "probe_csv", "errors"});
  if (o.contains("vtk")) cfg.vtk_pattern = string(o["vtk"], "output.vtk");
  if (o.contains("probe_csv")) cfg.probe_csv = string(o["probe_csv"], "output.probe_csv");
  if (o.contains("probes")) {
    const json& p = o["probes"];
    if (!p.is_array()) config_error("output.probes must be a list of [x, y, z]");
    for (const auto& pt : p) {
      if (!pt.is_array() || pt.size() != 3) {
        config_error("output.probes entries must be [x, y, z]");
      }
      cfg.probes.push_back({number(pt[0], "output.probes"),
                            number(pt[1], "output.probes"),
                            number(pt[2], "output.probes")});
    }
  }
  if (o.contains("errors")) {
    const json& e = o["errors"];
    allow_keys(e, "output.errors", {"exact", "exact_grad"});
    if (!e.contains("exact")) config_error("output.errors.exact is required");
    ErrorConfig ec;
    ec.exact = scalar_field(e["exact"], "output.errors.exact");
    if (e.contains("exact_grad")) {
      ec.exact_grad = vector_field(e["exact_grad"], "output.errors.exact_grad");
    }
    cfg.errors = std::move(ec);
  }
}

}  // namespace

int RunConfig::volume_quadrature_degree() const {
  return quadrature_degree.value_or(2 * degree);
}

int RunConfig::boundary_quadrature_degree() const {
  return quadrature_degree.value_or(2 * degree);
}

std::filesystem::path RunConfig::resolve(const std::filesystem::path& p) const {
  return p.is_absolute() ? p : base_dir / p;
}

RunConfig parse_config(std::string_view json_text,
                       const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    config_error(std::string("invalid JSON: ") + e.what());
  }
  allow_keys(root, "the configuration",
             {"mesh", "degree", "quadrature_degree", "coefficients", "boundary",
              "solver", "transient", "output"});
  RunConfig cfg;
  cfg.base_dir = base_dir;

  if (!root.contains("mesh")) config_error("mesh is required");
  cfg.mesh_path = string(root["mesh"], "mesh");
  if (!root.contains("degree")) config_error("degree is required");
  cfg.degree = integer(root["degree"], "degree");
  if (cfg.degree < 1 || cfg.degree > 4) config_error("degree must be 1, 2, 3 or 4");
  if (root.contains("quadrature_degree")) {
    const int q = integer(root["quadrature_degree"], "quadrature_degree");
    if (q < 0 || q > kMaxQuadratureDegree) {
      config_error("quadrature_degree must lie in 0.." +
                   std::to_string(kMaxQuadratureDegree));
    }
    cfg.quadrature_degree = q;
  }

  if (root.contains("coefficients")) {
    const json& c = root["coefficients"];
    allow_keys(c, "coefficients", {"kappa", "beta", "c", "f"});
    if (c.contains("kappa")) cfg.kappa = kappa_field(c["kappa"]);
    if (c.contains("beta")) cfg.beta = vector_field(c["beta"], "coefficients.beta");
    if (c.contains("c")) cfg.c = scalar_field(c["c"], "coefficients.c");
    if (c.contains("f")) cfg.f = scalar_field(c["f"], "coefficients.f");
  }

  if (!root.contains("boundary")) config_error("boundary is required");
  const json& b = root["boundary"];
  allow_keys(b, "boundary", {"dirichlet", "robin"});
  if (b.contains("dirichlet")) {
    const json& d = b["dirichlet"];
    allow_keys(d, "boundary.dirichlet", {"groups", "value"});
    if (d.contains("groups")) {
      cfg.dirichlet_groups = group_list(d["groups"], "boundary.dirichlet.groups");
    }
    if (d.contains("value")) {
      cfg.dirichlet_value = scalar_field(d["value"], "boundary.dirichlet.value");
    }
  }
  if (b.contains("robin")) {
    const json& r = b["robin"];
    allow_keys(r, "boundary.robin", {"groups", "alpha", "g"});
    if (r.contains("groups")) {
      if (r["groups"].is_string()) {
        if (r["groups"].get<std::string>() != "rest") {
          config_error("boundary.robin.groups must be a list or \"rest\"");
        }
        cfg.robin_rest = true;
      } else {
        cfg.robin_groups = group_list(r["groups"], "boundary.robin.groups");
      }
    }
    if (r.contains("alpha")) cfg.robin_alpha = scalar_field(r["alpha"], "boundary.robin.alpha");
    if (r.contains("g")) cfg.robin_g = scalar_field(r["g"], "boundary.robin.g");
  }

  if (root.contains("solver")) read_solver(root["solver"], cfg.solver);
  if (root.contains("transient")) cfg.transient = read_transient(root["transient"]);
  if (root.contains("output")) read_output(root["output"], cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    config_error(e.what());
  }
  return parse_config(text, path.parent_path().empty() ? "." : path.parent_path());
}

std::vector<int> validate_boundary(const RunConfig& cfg, const Mesh& mesh) {
  auto tags_of = [&](const std::vector<std::string>& names, const char* role) {
    std::set<int> tags;
    for (const auto& name : names) {
      auto it = mesh.group_index.find(name);
      if (it == mesh.group_index.end()) {
        config_error(std::string(role) + " group '" + name + "' is not in the mesh");
      }
      if (it->second.dim != 2) {
        config_error(std::string(role) + " group '" + name + "' has dimension " +
                     std::to_string(it->second.dim) + ", expected 2");
      }
      tags.insert(it->second.entity_tags.begin(), it->second.entity_tags.end());
    }
    return tags;
  };
  const std::set<int> dirichlet = tags_of(cfg.dirichlet_groups, "Dirichlet");
  const std::set<int> boundary(mesh.domBd.begin(), mesh.domBd.end());

  std::set<int> robin;
  if (cfg.robin_rest) {
    std::set_difference(boundary.begin(), boundary.end(), dirichlet.begin(),
                        dirichlet.end(), std::inserter(robin, robin.end()));
  } else {
    robin = tags_of(cfg.robin_groups, "Robin");
  }

  std::vector<int> overlap;
  std::set_intersection(dirichlet.begin(), dirichlet.end(), robin.begin(),
                        robin.end(), std::back_inserter(overlap));
  if (!overlap.empty()) {
    std::string list;
    for (int t : overlap) list += (list.empty() ? "" : ", ") + std::to_string(t);
    config_error("surface entities {" + list + "} are both Dirichlet and Robin");
  }

  std::vector<int> uncovered;
  for (int t : boundary) {
    if (!dirichlet.contains(t) && !robin.contains(t)) uncovered.push_back(t);
  }
  if (!uncovered.empty()) {
    std::string list;
    for (int t : uncovered) list += (list.empty() ? "" : ", ") + std::to_string(t);
    config_error("boundary surface entities {" + list +
                 "} have no Dirichlet or Robin condition");
  }
  return {robin.begin(), robin.end()};
}

}  // namespace femtet
