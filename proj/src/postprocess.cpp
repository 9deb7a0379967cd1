#include "femtet/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>

#include "femtet/error.hpp"
#include "femtet/parallel.hpp"
#include "femtet/ref_element.hpp"

namespace femtet {
namespace {

constexpr Index kGridThreshold = 10000;

std::array<double, 4> barycentric(const Mesh& mesh, const GeometryCache& geom,
                                  Index k, const Vec3& x) {
  const Vec3 d = x - mesh.coord[mesh.tet(k)[0]];
  const double l1 = dot(geom.b1[k], d);
  const double l2 = dot(geom.b2[k], d);
  const double l3 = dot(geom.b3[k], d);
  return {1.0 - l1 - l2 - l3, l1, l2, l3};
}

bool inside(const std::array<double, 4>& lambda, double tol) {
  return std::all_of(lambda.begin(), lambda.end(),
                     [tol](double l) { return l >= -tol; });
}

std::array<double, 4> clamp_normalize(std::array<double, 4> lambda) {
  double sum = 0.0;
  for (double& l : lambda) {
    l = std::clamp(l, 0.0, 1.0);
    sum += l;
  }
  for (double& l : lambda) l /= sum;
  return lambda;
}

// Uniform grid over element bounding boxes; each cell lists the elements
// whose (slightly inflated) box overlaps it, in ascending order.
class ElementGrid {
 public:
  explicit ElementGrid(const Mesh& mesh) {
    const Index nt = mesh.n_tets();
    std::vector<std::array<Vec3, 2>> boxes(nt);
    lo_ = {std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
           std::numeric_limits<double>::max()};
    Vec3 hi{-lo_[0], -lo_[1], -lo_[2]};
    for (Index k = 0; k < nt; ++k) {
      const auto x = tet_vertices(mesh, k);
      Vec3 a = x[0], b = x[0];
      for (const Vec3& v : x) {
        for (int c = 0; c < 3; ++c) {
          a[c] = std::min(a[c], v[c]);
          b[c] = std::max(b[c], v[c]);
        }
      }
      const double pad = 1e-6 * norm(b - a);
      boxes[k] = {a - Vec3{pad, pad, pad}, b + Vec3{pad, pad, pad}};
      for (int c = 0; c < 3; ++c) {
        lo_[c] = std::min(lo_[c], boxes[k][0][c]);
        hi[c] = std::max(hi[c], boxes[k][1][c]);
      }
    }
    const int per_axis = std::max(1, static_cast<int>(std::cbrt(static_cast<double>(nt))));
    for (int c = 0; c < 3; ++c) {
      n_[c] = per_axis;
      width_[c] = std::max((hi[c] - lo_[c]) / per_axis, 1e-300);
    }
    cells_.resize(static_cast<std::size_t>(n_[0]) * n_[1] * n_[2]);
    for (Index k = 0; k < nt; ++k) {
      std::array<int, 3> a{}, b{};
      for (int c = 0; c < 3; ++c) {
        a[c] = clamp_axis(c, boxes[k][0][c]);
        b[c] = clamp_axis(c, boxes[k][1][c]);
      }
      for (int i = a[0]; i <= b[0]; ++i) {
        for (int j = a[1]; j <= b[1]; ++j) {
          for (int l = a[2]; l <= b[2]; ++l) cells_[cell(i, j, l)].push_back(k);
        }
      }
    }
    hi_ = hi;
  }

  std::span<const Index> candidates(const Vec3& x) const {
    for (int c = 0; c < 3; ++c) {
      if (x[c] < lo_[c] || x[c] > hi_[c]) return {};
    }
    return cells_[cell(clamp_axis(0, x[0]), clamp_axis(1, x[1]),
                       clamp_axis(2, x[2]))];
  }

 private:
  int clamp_axis(int c, double v) const {
    const int i = static_cast<int>(std::floor((v - lo_[c]) / width_[c]));
    return std::clamp(i, 0, n_[c] - 1);
  }
  std::size_t cell(int i, int j, int l) const {
    return (static_cast<std::size_t>(i) * n_[1] + j) * n_[2] + l;
  }

  Vec3 lo_{}, hi_{}, width_{};
  std::array<int, 3> n_{};
  std::vector<std::vector<Index>> cells_;
};

}  // namespace

std::vector<PointLocation> locate_points(const Mesh& mesh,
                                         const GeometryCache& geom,
                                         std::span<const Vec3> points) {
  std::vector<PointLocation> out(points.size());
  std::unique_ptr<ElementGrid> grid;
  if (mesh.n_tets() > kGridThreshold) grid = std::make_unique<ElementGrid>(mesh);

  auto search = [&](const Vec3& x, std::span<const Index> candidates,
                    bool all, double tol, PointLocation& loc) {
    const Index n = all ? mesh.n_tets() : static_cast<Index>(candidates.size());
    for (Index i = 0; i < n; ++i) {
      const Index k = all ? i : candidates[i];
      const auto lambda = barycentric(mesh, geom, k, x);
      if (inside(lambda, tol)) {
        loc = {k, clamp_normalize(lambda)};
        return true;
      }
    }
    return false;
  };

  parallel_chunks(points.size(), [&](int, std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const std::span<const Index> cand =
          grid ? grid->candidates(points[p]) : std::span<const Index>{};
      const bool all = !grid;
      if (!search(points[p], cand, all, kLocateTol, out[p])) {
        search(points[p], cand, all, kLocateRetryTol, out[p]);
      }
    }
  }, 64);
  return out;
}

CsrMatrix build_eval_matrix(const Mesh& mesh,
                            std::span<const PointLocation> located) {
  const ReferenceElement ref(CellKind::Tetrahedron, mesh.degree);
  Triplets t;
  t.reserve(located.size() * mesh.dofK);
  for (std::size_t p = 0; p < located.size(); ++p) {
    if (!located[p].found()) {
      throw Error(ErrorKind::UnlocatedPoint,
                  "point " + std::to_string(p + 1) + " lies outside the mesh");
    }
    const auto nodes = mesh.tet(located[p].element);
    for (int r = 0; r < mesh.dofK; ++r) {
      t.add(static_cast<Index>(p), nodes[r], ref.value(r, located[p].lambda));
    }
  }
  return CsrMatrix::from_triplets(static_cast<Index>(located.size()),
                                  mesh.n_nodes(), t);
}

std::vector<double> evaluate_at(const Mesh& mesh, const GeometryCache& geom,
                                std::span<const double> u,
                                std::span<const Vec3> points) {
  const auto located = locate_points(mesh, geom, points);
  const ReferenceElement ref(CellKind::Tetrahedron, mesh.degree);
  std::vector<double> out(points.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t p = 0; p < points.size(); ++p) {
    if (!located[p].found()) continue;
    const auto nodes = mesh.tet(located[p].element);
    double s = 0.0;
    for (int r = 0; r < mesh.dofK; ++r) {
      s += u[nodes[r]] * ref.value(r, located[p].lambda);
    }
    out[p] = s;
  }
  return out;
}

ErrorNorms error_norms(const Mesh& mesh, const GeometryCache& geom,
                       std::span<const double> u,
                       const CoefficientField& exact,
                       const CoefficientField& exact_grad,
                       const QuadratureRule& rule, double t) {
  if (u.size() != static_cast<std::size_t>(mesh.n_nodes())) {
    throw Error(ErrorKind::ShapeMismatch, "nodal vector has the wrong length");
  }
  if (exact.shape() != FieldShape::Scalar) {
    throw Error(ErrorKind::ShapeMismatch, "exact solution must be scalar");
  }
  const bool with_grad = exact_grad.shape() == FieldShape::Vector3;
  const ReferenceElement ref(CellKind::Tetrahedron, mesh.degree);
  const Tabulation tab = tabulate(ref, rule.points);
  double l2 = 0.0;
  double h1 = 0.0;
  double ue = 0.0;
  std::array<double, 3> ge{};
  for (Index k = 0; k < mesh.n_tets(); ++k) {
    const auto nodes = mesh.tet(k);
    const auto xv = tet_vertices(mesh, k);
    const double scale = geom.detBk[k] / 6.0;
    for (int q = 0; q < rule.size(); ++q) {
      Vec3 x{0.0, 0.0, 0.0};
      for (int i = 0; i < 4; ++i) x = x + rule.points[q][i] * xv[i];
      double uh = 0.0;
      Vec3 gh_ref{0.0, 0.0, 0.0};
      for (int r = 0; r < tab.dof; ++r) {
        const double ur = u[nodes[r]];
        uh += ur * tab.value(q, r);
        const double* g = tab.grad(q, r);
        gh_ref = gh_ref + ur * Vec3{g[0], g[1], g[2]};
      }
      exact.eval(x, t, mesh.domain[k], std::span<double>(&ue, 1));
      const double w = scale * rule.weights[q];
      l2 += w * (uh - ue) * (uh - ue);
      if (with_grad) {
        exact_grad.eval(x, t, mesh.domain[k], ge);
        const Vec3 gh = gh_ref[0] * geom.b1[k] + gh_ref[1] * geom.b2[k] +
                        gh_ref[2] * geom.b3[k];
        const Vec3 diff = gh - Vec3{ge[0], ge[1], ge[2]};
        h1 += w * dot(diff, diff);
      }
    }
  }
  return {std::sqrt(std::max(l2, 0.0)), std::sqrt(std::max(h1, 0.0))};
}

void write_vtk(const Mesh& mesh, std::span<const NamedField> fields,
               const std::filesystem::path& path) {
  for (const auto& f : fields) {
    if (f.values.size() != static_cast<std::size_t>(mesh.n_nodes())) {
      throw Error(ErrorKind::ShapeMismatch,
                  "field '" + f.name + "' has the wrong length");
    }
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  char buf[96];
  out << "# vtk DataFile Version 3.0\nfemtet\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.n_nodes() << " double\n";
  for (const Vec3& x : mesh.coord) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", x[0], x[1], x[2]);
    out << buf;
  }
  const Index nt = mesh.n_tets();
  out << "CELLS " << nt << ' ' << 5 * static_cast<long long>(nt) << '\n';
  for (Index k = 0; k < nt; ++k) {
    const auto t = mesh.tet(k);
    out << "4 " << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << '\n';
  }
  out << "CELL_TYPES " << nt << '\n';
  for (Index k = 0; k < nt; ++k) out << "10\n";
  if (!fields.empty()) out << "POINT_DATA " << mesh.n_nodes() << '\n';
  for (const auto& f : fields) {
    out << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : f.values) {
      std::snprintf(buf, sizeof buf, "%.17g\n", v);
      out << buf;
    }
  }
  out.flush();
  if (!out) throw Error(ErrorKind::IoError, "failed writing " + path.string());
}

}  // namespace femtet
