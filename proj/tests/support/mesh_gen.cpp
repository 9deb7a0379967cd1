#include "mesh_gen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "femtet/ref_element.hpp"

namespace femtet::testkit {
namespace {

constexpr int kLocalFaces[4][3] = {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}};

double signed_volume6(const std::array<Vec3, 4>& x) {
  return dot(x[1] - x[0], cross(x[2] - x[0], x[3] - x[0]));
}

// Adds boundary triangles for faces owned by a single tetrahedron. `tets`
// rows are in local numbering (index into mesh.nodes).
void add_boundary(GenMesh& g, const std::vector<std::vector<std::int64_t>>& tets,
                  const std::function<int(const Vec3&)>& surface_of) {
  std::map<std::array<std::int64_t, 3>, std::pair<int, std::pair<std::size_t, int>>> faces;
  for (std::size_t k = 0; k < tets.size(); ++k) {
    for (int j = 0; j < 4; ++j) {
      std::array<std::int64_t, 3> key{tets[k][kLocalFaces[j][0]],
                                      tets[k][kLocalFaces[j][1]],
                                      tets[k][kLocalFaces[j][2]]};
      std::sort(key.begin(), key.end());
      auto [it, inserted] = faces.try_emplace(key, 0, std::pair{k, j});
      ++it->second.first;
    }
  }
  // Emit in tet order for a stable file layout.
  std::vector<std::pair<std::size_t, int>> boundary;
  for (const auto& [key, v] : faces) {
    if (v.first == 1) boundary.push_back(v.second);
  }
  std::sort(boundary.begin(), boundary.end());
  for (auto [k, j] : boundary) {
    const auto map = face_node_map(g.order, j);
    std::vector<std::int64_t> row;
    for (int r : map) row.push_back(tets[k][r]);
    Vec3 c{0, 0, 0};
    for (int v = 0; v < 3; ++v) c = c + (1.0 / 3.0) * g.nodes[row[v]];
    g.tris.push_back(row);
    g.tri_entity.push_back(surface_of(c));
  }
}

void finalize_ids(GenMesh& g, std::vector<std::vector<std::int64_t>> tets,
                  bool sparse) {
  g.node_ids.resize(g.nodes.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    g.node_ids[i] = sparse ? static_cast<std::int64_t>(3 * i + 7)
                           : static_cast<std::int64_t>(i + 1);
  }
  for (auto& row : g.tris) {
    for (auto& n : row) n = g.node_ids[n];
  }
  for (auto& row : tets) {
    for (auto& n : row) n = g.node_ids[n];
  }
  g.tets = std::move(tets);
}

}  // namespace

GenMesh cube_mesh(int n, int order, double perturb, unsigned seed,
                  bool sparse_ids) {
  GenMesh g;
  g.order = order;
  const int m = order;
  const int nv = n + 1;
  std::vector<Vec3> vertex(static_cast<std::size_t>(nv) * nv * nv);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> jitter(-perturb / n, perturb / n);
  auto vid = [nv](int i, int j, int k) { return (static_cast<std::size_t>(i) * nv + j) * nv + k; };
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      for (int k = 0; k <= n; ++k) {
        Vec3 x{static_cast<double>(i) / n, static_cast<double>(j) / n,
               static_cast<double>(k) / n};
        const bool interior = i > 0 && i < n && j > 0 && j < n && k > 0 && k < n;
        if (interior && perturb > 0.0) x = x + Vec3{jitter(rng), jitter(rng), jitter(rng)};
        vertex[vid(i, j, k)] = x;
      }
    }
  }

  const auto order_nodes = tet_node_order(m);
  std::map<std::array<int, 3>, std::int64_t> fine;  // fine lattice -> node
  std::vector<std::vector<std::int64_t>> tets;
  const std::array<std::array<int, 3>, 6> perms{{{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                                  {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (const auto& p : perms) {
          std::array<std::array<int, 3>, 4> c;
          c[0] = {i, j, k};
          for (int s = 0; s < 3; ++s) {
            c[s + 1] = c[s];
            ++c[s + 1][p[s]];
          }
          std::array<Vec3, 4> x;
          for (int v = 0; v < 4; ++v) x[v] = vertex[vid(c[v][0], c[v][1], c[v][2])];
          if (signed_volume6(x) < 0) {
            std::swap(c[2], c[3]);
            std::swap(x[2], x[3]);
          }
          std::vector<std::int64_t> row;
          for (const auto& b : order_nodes) {
            std::array<int, 3> f{0, 0, 0};
            Vec3 pos{0, 0, 0};
            for (int v = 0; v < 4; ++v) {
              for (int a = 0; a < 3; ++a) f[a] += b[v] * c[v][a];
              pos = pos + (static_cast<double>(b[v]) / m) * x[v];
            }
            auto [it, inserted] = fine.try_emplace(f, static_cast<std::int64_t>(g.nodes.size()));
            if (inserted) g.nodes.push_back(pos);
            row.push_back(it->second);
          }
          tets.push_back(row);
          g.tet_entity.push_back(1);
        }
      }
    }
  }

  add_boundary(g, tets, [](const Vec3& c) {
    constexpr double eps = 1e-9;
    if (std::abs(c[0]) < eps) return 1;
    if (std::abs(c[0] - 1) < eps) return 2;
    if (std::abs(c[1]) < eps) return 3;
    if (std::abs(c[1] - 1) < eps) return 4;
    if (std::abs(c[2]) < eps) return 5;
    if (std::abs(c[2] - 1) < eps) return 6;
    throw std::logic_error("boundary face off the cube surface");
  });
  finalize_ids(g, std::move(tets), sparse_ids);
  const char* names[] = {"x0", "x1", "y0", "y1", "z0", "z1"};
  for (int s = 0; s < 6; ++s) g.groups.push_back({2, 11 + s, names[s], {s + 1}});
  g.groups.push_back({3, 20, "Volume", {1}});
  return g;
}

GenMesh tet_mesh(const std::vector<Vec3>& vertices,
                 const std::vector<std::array<int, 4>>& tets, int order) {
  GenMesh g;
  g.order = order;
  const auto order_nodes = tet_node_order(order);
  std::map<std::vector<std::pair<int, int>>, std::int64_t> lattice;
  std::vector<std::vector<std::int64_t>> rows;
  for (const auto& t : tets) {
    std::vector<std::int64_t> row;
    for (const auto& b : order_nodes) {
      std::vector<std::pair<int, int>> key;
      Vec3 pos{0, 0, 0};
      for (int v = 0; v < 4; ++v) {
        if (b[v] > 0) key.emplace_back(t[v], b[v]);
        pos = pos + (static_cast<double>(b[v]) / order) * vertices[t[v]];
      }
      std::sort(key.begin(), key.end());
      auto [it, inserted] = lattice.try_emplace(key, static_cast<std::int64_t>(g.nodes.size()));
      if (inserted) g.nodes.push_back(pos);
      row.push_back(it->second);
    }
    rows.push_back(row);
    g.tet_entity.push_back(1);
  }
  int next = 0;
  add_boundary(g, rows, [&next](const Vec3&) { return ++next; });
  finalize_ids(g, std::move(rows), false);
  GenGroup all{2, 1000, "Boundary", {}};
  for (int s = 1; s <= next; ++s) {
    g.groups.push_back({2, 100 + s, "S" + std::to_string(s), {s}});
    all.entities.push_back(s);
  }
  g.groups.push_back(all);
  g.groups.push_back({3, 2000, "Volume", {1}});
  return g;
}

GenMesh cylinder_mesh(double radius, double height, int rings, int layers) {
  GenMesh g;
  g.order = 1;
  std::vector<std::array<double, 2>> disk{{0.0, 0.0}};
  std::vector<std::vector<int>> ring_points{{0}};
  for (int i = 1; i <= rings; ++i) {
    std::vector<int> pts;
    for (int k = 0; k < 6 * i; ++k) {
      const double a = 2 * std::numbers::pi * k / (6 * i);
      disk.push_back({radius * i / rings * std::cos(a), radius * i / rings * std::sin(a)});
      pts.push_back(static_cast<int>(disk.size()) - 1);
    }
    ring_points.push_back(pts);
  }
  std::vector<std::array<int, 3>> tri;
  for (int i = 1; i <= rings; ++i) {
    const auto& in = ring_points[i - 1];
    const auto& out = ring_points[i];
    const int ni = static_cast<int>(in.size());
    const int no = static_cast<int>(out.size());
    if (i == 1) {
      for (int q = 0; q < no; ++q) tri.push_back({in[0], out[q], out[(q + 1) % no]});
      continue;
    }
    int p = 0, q = 0;
    while (p < ni || q < no) {
      const double next_in = static_cast<double>(p + 1) / ni;
      const double next_out = static_cast<double>(q + 1) / no;
      if (q < no && (p == ni || next_out <= next_in)) {
        tri.push_back({in[p % ni], out[q], out[(q + 1) % no]});
        ++q;
      } else {
        tri.push_back({in[p % ni], out[q % no], in[(p + 1) % ni]});
        ++p;
      }
    }
  }

  const int np = static_cast<int>(disk.size());
  for (int l = 0; l <= layers; ++l) {
    for (const auto& d : disk) g.nodes.push_back({d[0], d[1], height * l / layers});
  }
  std::vector<std::vector<std::int64_t>> tets;
  for (int l = 0; l < layers; ++l) {
    for (auto t : tri) {
      std::sort(t.begin(), t.end());
      const std::int64_t b0 = t[0] + l * np, b1 = t[1] + l * np, b2 = t[2] + l * np;
      const std::int64_t u0 = b0 + np, u1 = b1 + np, u2 = b2 + np;
      for (std::array<std::int64_t, 4> v : {std::array<std::int64_t, 4>{b0, b1, b2, u2},
                                            std::array<std::int64_t, 4>{b0, b1, u1, u2},
                                            std::array<std::int64_t, 4>{b0, u0, u1, u2}}) {
        std::array<Vec3, 4> x{g.nodes[v[0]], g.nodes[v[1]], g.nodes[v[2]], g.nodes[v[3]]};
        if (signed_volume6(x) < 0) std::swap(v[2], v[3]);
        tets.push_back({v.begin(), v.end()});
        g.tet_entity.push_back(1);
      }
    }
  }
  add_boundary(g, tets, [height](const Vec3& c) {
    if (std::abs(c[2]) < 1e-9 * height) return 1;
    if (std::abs(c[2] - height) < 1e-9 * height) return 2;
    return 3;
  });
  finalize_ids(g, std::move(tets), false);
  g.groups = {{2, 1, "Base", {1}}, {2, 2, "Top", {2}}, {2, 3, "Side", {3}},
              {3, 4, "Volume", {1}}};
  return g;
}

std::string to_msh(const GenMesh& g) {
  std::ostringstream out;
  char buf[160];
  out << "$MeshFormat\n4.1 0 8\n$EndMeshFormat\n";
  out << "$PhysicalNames\n" << g.groups.size() << '\n';
  for (const auto& gr : g.groups) out << gr.dim << ' ' << gr.tag << " \"" << gr.name << "\"\n";
  out << "$EndPhysicalNames\n";

  std::map<std::int64_t, std::size_t> index;
  for (std::size_t i = 0; i < g.node_ids.size(); ++i) index[g.node_ids[i]] = i;
  auto bbox_of = [&](const std::vector<std::vector<std::int64_t>>& rows,
                     const std::vector<int>& ent, int tag) {
    Vec3 lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
    for (std::size_t e = 0; e < rows.size(); ++e) {
      if (ent[e] != tag) continue;
      for (auto id : rows[e]) {
        const Vec3& x = g.nodes[index.at(id)];
        for (int a = 0; a < 3; ++a) {
          lo[a] = std::min(lo[a], x[a]);
          hi[a] = std::max(hi[a], x[a]);
        }
      }
    }
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g %.17g %.17g", lo[0],
                  lo[1], lo[2], hi[0], hi[1], hi[2]);
    return std::string(buf);
  };
  auto phys_of = [&](int dim, int tag) {
    std::vector<int> tags;
    for (const auto& gr : g.groups) {
      if (gr.dim == dim && std::count(gr.entities.begin(), gr.entities.end(), tag)) {
        tags.push_back(gr.tag);
      }
    }
    std::string s = std::to_string(tags.size());
    for (int t : tags) s += ' ' + std::to_string(t);
    return s;
  };

  const std::set<int> surfaces(g.tri_entity.begin(), g.tri_entity.end());
  const std::set<int> volumes(g.tet_entity.begin(), g.tet_entity.end());
  out << "$Entities\n0 0 " << surfaces.size() << ' ' << volumes.size() << '\n';
  for (int s : surfaces) {
    out << s << ' ' << bbox_of(g.tris, g.tri_entity, s) << ' ' << phys_of(2, s) << " 0\n";
  }
  for (int v : volumes) {
    out << v << ' ' << bbox_of(g.tets, g.tet_entity, v) << ' ' << phys_of(3, v) << ' '
        << surfaces.size();
    for (int s : surfaces) out << ' ' << s;
    out << '\n';
  }
  out << "$EndEntities\n";

  const auto [min_id, max_id] = std::minmax_element(g.node_ids.begin(), g.node_ids.end());
  out << "$Nodes\n1 " << g.nodes.size() << ' ' << *min_id << ' ' << *max_id << '\n';
  out << "3 " << *volumes.begin() << " 0 " << g.nodes.size() << '\n';
  for (auto id : g.node_ids) out << id << '\n';
  for (const Vec3& x : g.nodes) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", x[0], x[1], x[2]);
    out << buf;
  }
  out << "$EndNodes\n";

  const int tri_code[] = {0, 2, 9, 21, 23};
  const int tet_code[] = {0, 4, 11, 29, 30};
  const std::size_t total = g.tris.size() + g.tets.size();
  out << "$Elements\n" << surfaces.size() + volumes.size() << ' ' << total << " 1 "
      << total << '\n';
  std::size_t next = 1;
  auto block = [&](const std::vector<std::vector<std::int64_t>>& rows,
                   const std::vector<int>& ent, int dim, int tag, int code) {
    std::size_t count = std::count(ent.begin(), ent.end(), tag);
    out << dim << ' ' << tag << ' ' << code << ' ' << count << '\n';
    for (std::size_t e = 0; e < rows.size(); ++e) {
      if (ent[e] != tag) continue;
      out << next++;
      for (auto id : rows[e]) out << ' ' << id;
      out << '\n';
    }
  };
  for (int s : surfaces) block(g.tris, g.tri_entity, 2, s, tri_code[g.order]);
  for (int v : volumes) block(g.tets, g.tet_entity, 3, v, tet_code[g.order]);
  out << "$EndElements\n";
  return out.str();
}

void write_msh(const GenMesh& mesh, const std::filesystem::path& path) {
  std::ofstream f(path);
  f << to_msh(mesh);
  if (!f) throw std::runtime_error("cannot write " + path.string());
}

std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(FEMTET_TEST_DATA) / name;
}

std::string sample_mesh_text() {
  std::ifstream in(data_path("sample.msh"));
  std::ostringstream ss;
  ss << in.rdbuf();
  if (ss.str().empty()) throw std::runtime_error("sample.msh missing");
  return ss.str();
}

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / "femtet_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace femtet::testkit
