// femtet command-line driver.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "femtet/error.hpp"
#include "femtet/mesh_model.hpp"
#include "femtet/pipeline.hpp"

namespace {

using namespace femtet;

constexpr int kModuleFailure = 1;
constexpr int kConfigFailure = 2;

double percentile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const auto i = static_cast<std::size_t>(p * static_cast<double>(v.size() - 1) + 0.5);
  return v[i];
}

void inspect(const std::string& path, int degree) {
  const Mesh mesh = load_mesh(path, degree);
  const GeometryCache geom = compute_geometry(mesh);
  double volume = 0.0;
  for (double d : geom.detBk) volume += d / 6.0;
  std::printf("nodes %d, tets %d, boundary tris %d, volume %.7g\n",
              mesh.n_nodes(), mesh.n_tets(), mesh.n_tris(), volume);

  for (const auto& g : mesh.groups) {
    const auto& ents = mesh.group_index.at(g.name).entity_tags;
    std::size_t elements = 0;
    auto count = [&](const std::vector<int>& tags) {
      return static_cast<std::size_t>(std::count_if(
          tags.begin(), tags.end(), [&](int t) {
            return std::binary_search(ents.begin(), ents.end(), t);
          }));
    };
    if (g.dim == 3) elements = count(mesh.domain);
    if (g.dim == 2) elements = count(mesh.domBd);
    std::string list;
    for (int t : ents) list += (list.empty() ? "" : ",") + std::to_string(t);
    std::printf("group %s dim %d tag %d entities %zu {%s} elements %zu\n",
                g.name.c_str(), g.dim, g.tag, ents.size(), list.c_str(), elements);
  }

  const QualityReport q = compute_quality(mesh, geom);
  std::vector<double> ratio(q.h.size());
  for (std::size_t k = 0; k < ratio.size(); ++k) ratio[k] = q.h[k] / q.rho[k];
  std::printf("h_max %.7g, h/rho p10 %.4f, p50 %.4f, p90 %.4f, max %.4f\n",
              q.h_max, percentile(ratio, 0.1), percentile(ratio, 0.5),
              percentile(ratio, 0.9), q.chunkiness);
}

void solve(const std::string& config_path, bool verbose) {
  RunConfig cfg = load_config(config_path);
  cfg.solver.verbose = verbose;
  const RunResult r = run(cfg);
  if (verbose) {
    const auto& last = r.snapshots.back();
    std::fprintf(stderr,
                 "nodes %d  unknowns %zu  assembly %.3fs  solve %.3fs  "
                 "iterations %d  residual %.3e\n",
                 r.disc.mesh.n_nodes(), r.disc.bc.inD.size(), r.assembly_seconds,
                 r.solve_seconds, last.solution.iterations, last.solution.residual);
  }
  write_outputs(cfg, r, std::cout);
  if (r.errors) {
    std::printf("L2 %.6e, H1semi %.6e\n", r.errors->l2, r.errors->h1_semi);
  }
}

std::vector<Vec3> read_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path);
  std::vector<Vec3> pts;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    Vec3 x;
    if (!(ss >> x[0] >> x[1] >> x[2])) {
      bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
      if (blank || (line_no == 1 && pts.empty())) continue;  // header
      throw Error(ErrorKind::ConfigError,
                  path + ":" + std::to_string(line_no) + ": expected x,y,z");
    }
    pts.push_back(x);
  }
  return pts;
}

void probe(const std::string& config_path, const std::string& points_path) {
  const RunConfig cfg = load_config(config_path);
  const auto pts = read_points(points_path);
  const RunResult r = run(cfg);
  write_probe_csv(std::cout, pts,
                  evaluate_at(r.disc.mesh, r.disc.geom, r.final_u(), pts));
}

void convergence(const std::string& config_path,
                 const std::vector<std::string>& meshes) {
  const RunConfig cfg = load_config(config_path);
  const std::vector<std::filesystem::path> paths(meshes.begin(), meshes.end());
  write_convergence_csv(std::cout, run_convergence(cfg, paths));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"P_m finite elements on tetrahedral GMSH meshes"};
  app.require_subcommand(1);

  std::string config_path;
  bool verbose = false;
  auto* solve_cmd = app.add_subcommand("solve", "Solve the problem of a config file");
  solve_cmd->add_option("config", config_path, "JSON config")->required();
  solve_cmd->add_flag("--verbose", verbose, "Solver log on stderr");

  std::string mesh_path;
  int degree = 1;
  auto* inspect_cmd = app.add_subcommand("inspect", "Mesh statistics");
  inspect_cmd->add_option("mesh", mesh_path, ".msh file")->required();
  inspect_cmd->add_option("--degree", degree, "Element degree")
      ->check(CLI::Range(1, 4));

  std::string points_path;
  auto* probe_cmd = app.add_subcommand("probe", "Evaluate the solution at points");
  probe_cmd->add_option("config", config_path, "JSON config")->required();
  probe_cmd->add_option("--points", points_path, "CSV with x,y,z rows")->required();

  std::vector<std::string> meshes;
  auto* conv_cmd = app.add_subcommand("convergence", "Error table over meshes");
  conv_cmd->add_option("config", config_path, "JSON config")->required();
  conv_cmd->add_option("--meshes", meshes, "Meshes, coarse to fine")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve_cmd) solve(config_path, verbose);
    if (*inspect_cmd) inspect(mesh_path, degree);
    if (*probe_cmd) probe(config_path, points_path);
    if (*conv_cmd) convergence(config_path, meshes);
  } catch (const Error& e) {
    std::cout.flush();
    std::fprintf(stderr, "femtet: %s\n", e.what());
    return e.kind() == ErrorKind::ConfigError ? kConfigFailure : kModuleFailure;
  } catch (const std::exception& e) {
    std::cout.flush();
    std::fprintf(stderr, "femtet: %s\n", e.what());
    return kModuleFailure;
  }
  return 0;
}
