#include "femtet/mesh_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "femtet/error.hpp"

namespace femtet {
namespace {

double tet_diameter(const std::array<Vec3, 4>& x) {
  double h = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) h = std::max(h, norm(x[i] - x[j]));
  }
  return h;
}

}  // namespace

std::array<Vec3, 4> tet_vertices(const Mesh& mesh, Index k) {
  auto t = mesh.tet(k);
  return {mesh.coord[t[0]], mesh.coord[t[1]], mesh.coord[t[2]],
          mesh.coord[t[3]]};
}

GeometryCache compute_geometry(const Mesh& mesh) {
  const Index nt = mesh.n_tets();
  GeometryCache g;
  g.detBk.resize(nt);
  g.b1.resize(nt);
  g.b2.resize(nt);
  g.b3.resize(nt);
  for (Index k = 0; k < nt; ++k) {
    const auto x = tet_vertices(mesh, k);
    const Vec3 v01 = x[1] - x[0];
    const Vec3 v02 = x[2] - x[0];
    const Vec3 v03 = x[3] - x[0];
    const double det = dot(v01, cross(v02, v03));
    const double h = tet_diameter(x);
    if (std::abs(det) < 1e-14 * h * h * h || h == 0.0) {
      throw Error(ErrorKind::DegenerateElement,
                  "tetrahedron " + std::to_string(k + 1) + " has det(B_K) = " +
                      std::to_string(det));
    }
    if (det < 0.0) {
      throw Error(ErrorKind::NegativeOrientation,
                  "tetrahedron " + std::to_string(k + 1) +
                      " is negatively oriented");
    }
    g.detBk[k] = det;
    g.b1[k] = (1.0 / det) * cross(v02, v03);
    g.b2[k] = (1.0 / det) * cross(v03, v01);
    g.b3[k] = (1.0 / det) * cross(v01, v02);
  }

  const Index nb = mesh.n_tris();
  g.bd_normal.resize(nb);
  g.bd_area2.resize(nb);
  for (Index k = 0; k < nb; ++k) {
    auto t = mesh.tri(k);
    const Vec3 l1 = mesh.coord[t[1]] - mesh.coord[t[0]];
    const Vec3 l2 = mesh.coord[t[2]] - mesh.coord[t[0]];
    g.bd_normal[k] = cross(l1, l2);
    g.bd_area2[k] = norm(g.bd_normal[k]);
  }
  return g;
}

Index Connectivity::n_boundary_faces() const {
  return static_cast<Index>(std::count_if(
      faces2ttrh.begin(), faces2ttrh.end(),
      [](const auto& f) { return f[1] == kNoOwner; }));
}

Connectivity build_connectivity(const Mesh& mesh) {
  // Face j of a tetrahedron is opposite vertex j, oriented outward.
  constexpr int kLocalFaces[4][3] = {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}};
  const Index nt = mesh.n_tets();

  // Stacked layout: all tets' face 0, then all tets' face 1, ...
  struct Entry {
    std::array<Index, 3> key;
    Index stacked;
  };
  std::vector<Entry> entries;
  entries.reserve(static_cast<std::size_t>(nt) * 4);
  for (int j = 0; j < 4; ++j) {
    for (Index k = 0; k < nt; ++k) {
      auto t = mesh.tet(k);
      std::array<Index, 3> key{t[kLocalFaces[j][0]], t[kLocalFaces[j][1]],
                               t[kLocalFaces[j][2]]};
      std::sort(key.begin(), key.end());
      entries.push_back({key, j * nt + k});
    }
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return a.key < b.key; });

  Connectivity c;
  c.ttrh2faces.resize(nt);
  std::size_t i = 0;
  while (i < entries.size()) {
    std::size_t j = i;
    while (j < entries.size() && entries[j].key == entries[i].key) ++j;
    if (j - i > 2) {
      throw Error(ErrorKind::NonConformal,
                  "face shared by " + std::to_string(j - i) + " tetrahedra");
    }
    const Index face_id = c.n_faces();
    const Index first = entries[i].stacked;
    const Index first_tet = first % nt;
    const int first_local = first / nt;
    auto t = mesh.tet(first_tet);
    c.faces.push_back({t[kLocalFaces[first_local][0]],
                       t[kLocalFaces[first_local][1]],
                       t[kLocalFaces[first_local][2]]});
    std::array<Index, 2> owners{first_tet, kNoOwner};
    if (j - i == 2) owners[1] = entries[i + 1].stacked % nt;
    if (owners[1] == owners[0]) {
      throw Error(ErrorKind::NonConformal,
                  "tetrahedron " + std::to_string(first_tet + 1) +
                      " repeats a face");
    }
    c.faces2ttrh.push_back(owners);
    for (std::size_t e = i; e < j; ++e) {
      c.ttrh2faces[entries[e].stacked % nt][entries[e].stacked / nt] = face_id;
    }
    i = j;
  }
  return c;
}

BoundaryClassification classify_boundary(
    const Mesh& mesh, std::span<const std::string> dirichlet_groups) {
  std::vector<int> tags;
  for (const auto& name : dirichlet_groups) {
    auto it = mesh.group_index.find(name);
    if (it == mesh.group_index.end()) {
      throw Error(ErrorKind::UnknownGroup, "physical group '" + name + "'");
    }
    tags.insert(tags.end(), it->second.entity_tags.begin(),
                it->second.entity_tags.end());
  }
  std::sort(tags.begin(), tags.end());

  BoundaryClassification bc;
  const Index nb = mesh.n_tris();
  bc.gammaD.assign(nb, false);
  std::vector<bool> is_dirichlet(mesh.n_nodes(), false);
  for (Index k = 0; k < nb; ++k) {
    if (std::binary_search(tags.begin(), tags.end(), mesh.domBd[k])) {
      bc.gammaD[k] = true;
      for (Index n : mesh.tri(k)) is_dirichlet[n] = true;
    } else {
      bc.robin_rows.push_back(k);
    }
  }
  for (Index n = 0; n < mesh.n_nodes(); ++n) {
    (is_dirichlet[n] ? bc.iD : bc.inD).push_back(n);
  }
  return bc;
}

QualityReport compute_quality(const Mesh& mesh, const GeometryCache& geom) {
  QualityReport q;
  const Index nt = mesh.n_tets();
  q.h.resize(nt);
  q.rho.resize(nt);
  for (Index k = 0; k < nt; ++k) {
    const auto x = tet_vertices(mesh, k);
    q.h[k] = tet_diameter(x);
    const double area = 0.5 * (norm(cross(x[2] - x[1], x[3] - x[1])) +
                               norm(cross(x[3] - x[0], x[2] - x[0])) +
                               norm(cross(x[1] - x[0], x[3] - x[0])) +
                               norm(cross(x[2] - x[0], x[1] - x[0])));
    const double volume = geom.detBk[k] / 6.0;
    q.rho[k] = 3.0 * volume / area;
    q.chunkiness = std::max(q.chunkiness, q.h[k] / q.rho[k]);
    q.h_max = std::max(q.h_max, q.h[k]);
  }
  return q;
}

}  // namespace femtet
