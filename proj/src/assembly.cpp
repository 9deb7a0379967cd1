#include "femtet/assembly.hpp"

#include <algorithm>

#include "femtet/error.hpp"
#include "femtet/parallel.hpp"

namespace femtet {
namespace {

// Evaluates a coefficient, short-circuiting fields without variables.
class Coefficient {
 public:
  Coefficient(const CoefficientField& field, double t)
      : field_(field), t_(t), constant_(field.is_constant()) {
    if (constant_) field_.eval({0.0, 0.0, 0.0}, t_, 0, values());
  }

  std::span<const double> at(const Vec3& x, int tag) {
    if (!constant_) field_.eval(x, t_, tag, values());
    return values();
  }

 private:
  std::span<double> values() {
    return {cache_.data(), static_cast<std::size_t>(field_.size())};
  }

  const CoefficientField& field_;
  double t_;
  bool constant_;
  std::array<double, 9> cache_{};
};

void require_shape(const CoefficientField& f, FieldShape shape,
                   const char* what) {
  if (f.shape() != shape) {
    throw Error(ErrorKind::ShapeMismatch, std::string(what) +
                                              " coefficient has the wrong shape");
  }
}

void require_rule(const QuadratureRule& rule, CellKind kind) {
  if (rule.kind != kind) {
    throw Error(ErrorKind::ShapeMismatch,
                kind == CellKind::Tetrahedron
                    ? "volume assembly needs a tetrahedron rule"
                    : "boundary assembly needs a triangle rule");
  }
}

Vec3 map_point(std::span<const Vec3> vertices, const std::array<double, 4>& lambda) {
  Vec3 x{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < vertices.size(); ++i) x = x + lambda[i] * vertices[i];
  return x;
}

// Element loop producing dof x dof local matrices.
template <class NodesOf, class Local>
CsrMatrix assemble_matrix(Index n_nodes, std::size_t n_elems, int dof,
                          NodesOf nodes_of, Local local) {
  std::vector<Triplets> buffers(thread_count());
  const int chunks = parallel_chunks(
      n_elems, [&](int chunk, std::size_t begin, std::size_t end) {
        Triplets& out = buffers[chunk];
        out.reserve((end - begin) * dof * dof);
        std::vector<double> a(static_cast<std::size_t>(dof) * dof);
        auto state = local.make_state();
        for (std::size_t e = begin; e < end; ++e) {
          std::fill(a.begin(), a.end(), 0.0);
          local(state, e, a);
          const auto nodes = nodes_of(e);
          for (int r = 0; r < dof; ++r) {
            for (int s = 0; s < dof; ++s) out.add(nodes[r], nodes[s], a[r * dof + s]);
          }
        }
      });
  Triplets all;
  std::size_t total = 0;
  for (int c = 0; c < chunks; ++c) total += buffers[c].size();
  all.reserve(total);
  for (int c = 0; c < chunks; ++c) {
    all.append(buffers[c]);
    buffers[c] = Triplets{};
  }
  return CsrMatrix::from_triplets(n_nodes, n_nodes, all);
}

// Element loop producing local vectors; summed serially in element order.
template <class NodesOf, class Local>
std::vector<double> assemble_vector(Index n_nodes, std::size_t n_elems, int dof,
                                    NodesOf nodes_of, Local local) {
  std::vector<double> local_all(n_elems * dof, 0.0);
  parallel_chunks(n_elems, [&](int, std::size_t begin, std::size_t end) {
    auto state = local.make_state();
    for (std::size_t e = begin; e < end; ++e) {
      local(state, e, std::span<double>(local_all.data() + e * dof, dof));
    }
  });
  std::vector<double> b(n_nodes, 0.0);
  for (std::size_t e = 0; e < n_elems; ++e) {
    const auto nodes = nodes_of(e);
    for (int r = 0; r < dof; ++r) b[nodes[r]] += local_all[e * dof + r];
  }
  return b;
}

std::array<Vec3, 3> tri_vertices(const Mesh& mesh, Index row) {
  const auto t = mesh.tri(row);
  return {mesh.coord[t[0]], mesh.coord[t[1]], mesh.coord[t[2]]};
}

// Shared data for volume integrals.
struct VolumeSetup {
  const Mesh& mesh;
  const GeometryCache& geom;
  const QuadratureRule& rule;
  Tabulation tab;

  VolumeSetup(const Mesh& m, const GeometryCache& g, const QuadratureRule& r)
      : mesh(m),
        geom(g),
        rule(r),
        tab(tabulate(ReferenceElement(CellKind::Tetrahedron, m.degree), r.points)) {
    require_rule(r, CellKind::Tetrahedron);
  }

  auto nodes_of() const {
    return [this](std::size_t e) { return mesh.tet(static_cast<Index>(e)); };
  }

  // Physical gradients of every shape function at quadrature point q.
  void physical_grads(Index k, int q, std::span<Vec3> g) const {
    const Vec3& b1 = geom.b1[k];
    const Vec3& b2 = geom.b2[k];
    const Vec3& b3 = geom.b3[k];
    for (int r = 0; r < tab.dof; ++r) {
      const double* gh = tab.grad(q, r);
      g[r] = gh[0] * b1 + gh[1] * b2 + gh[2] * b3;
    }
  }
};

struct BoundarySetup {
  const Mesh& mesh;
  const GeometryCache& geom;
  const QuadratureRule& rule;
  std::span<const Index> rows;
  Tabulation tab;

  BoundarySetup(const Mesh& m, const GeometryCache& g, const QuadratureRule& r,
                std::span<const Index> robin_rows)
      : mesh(m),
        geom(g),
        rule(r),
        rows(robin_rows),
        tab(tabulate(ReferenceElement(CellKind::Triangle, m.degree), r.points)) {
    require_rule(r, CellKind::Triangle);
    for (Index row : rows) {
      if (row < 0 || row >= m.n_tris()) {
        throw Error(ErrorKind::ShapeMismatch,
                    "boundary row " + std::to_string(row + 1) + " out of range");
      }
    }
  }

  auto nodes_of() const {
    return [this](std::size_t e) { return mesh.tri(rows[e]); };
  }
};

}  // namespace

std::vector<double> assemble_load(const Mesh& mesh, const GeometryCache& geom,
                                  const CoefficientField& f,
                                  const QuadratureRule& rule, double t) {
  require_shape(f, FieldShape::Scalar, "load");
  VolumeSetup s(mesh, geom, rule);
  if (f.is_zero()) return std::vector<double>(mesh.n_nodes(), 0.0);
  struct Local {
    const VolumeSetup& s;
    const CoefficientField& f;
    double t;
    Coefficient make_state() const { return Coefficient(f, t); }
    void operator()(Coefficient& coef, std::size_t e, std::span<double> b) const {
      const Index k = static_cast<Index>(e);
      const auto x = tet_vertices(s.mesh, k);
      const double scale = s.geom.detBk[k] / 6.0;
      for (int q = 0; q < s.rule.size(); ++q) {
        const double w = scale * s.rule.weights[q] *
                         coef.at(map_point(x, s.rule.points[q]), s.mesh.domain[k])[0];
        for (int r = 0; r < s.tab.dof; ++r) b[r] += w * s.tab.value(q, r);
      }
    }
  };
  return assemble_vector(mesh.n_nodes(), mesh.n_tets(), mesh.dofK, s.nodes_of(),
                         Local{s, f, t});
}

std::vector<double> assemble_robin_vector(const Mesh& mesh,
                                          const GeometryCache& geom,
                                          const CoefficientField& g,
                                          std::span<const Index> robin_rows,
                                          const QuadratureRule& rule,
                                          double t) {
  require_shape(g, FieldShape::Scalar, "Robin data");
  BoundarySetup s(mesh, geom, rule, robin_rows);
  if (g.is_zero()) return std::vector<double>(mesh.n_nodes(), 0.0);
  struct Local {
    const BoundarySetup& s;
    const CoefficientField& g;
    double t;
    Coefficient make_state() const { return Coefficient(g, t); }
    void operator()(Coefficient& coef, std::size_t e, std::span<double> b) const {
      const Index row = s.rows[e];
      const auto x = tri_vertices(s.mesh, row);
      const double scale = s.geom.bd_area2[row] / 2.0;
      for (int q = 0; q < s.rule.size(); ++q) {
        const double w = scale * s.rule.weights[q] *
                         coef.at(map_point(x, s.rule.points[q]), s.mesh.domBd[row])[0];
        for (int r = 0; r < s.tab.dof; ++r) b[r] += w * s.tab.value(q, r);
      }
    }
  };
  return assemble_vector(mesh.n_nodes(), robin_rows.size(), mesh.dofA,
                         s.nodes_of(), Local{s, g, t});
}

CsrMatrix assemble_mass(const Mesh& mesh, const GeometryCache& geom,
                        const CoefficientField& c, const QuadratureRule& rule,
                        double t) {
  require_shape(c, FieldShape::Scalar, "reaction");
  VolumeSetup s(mesh, geom, rule);
  if (c.is_zero()) return CsrMatrix(mesh.n_nodes(), mesh.n_nodes());
  struct Local {
    const VolumeSetup& s;
    const CoefficientField& c;
    double t;
    Coefficient make_state() const { return Coefficient(c, t); }
    void operator()(Coefficient& coef, std::size_t e, std::span<double> a) const {
      const Index k = static_cast<Index>(e);
      const auto x = tet_vertices(s.mesh, k);
      const double scale = s.geom.detBk[k] / 6.0;
      const int dof = s.tab.dof;
      for (int q = 0; q < s.rule.size(); ++q) {
        const double w = scale * s.rule.weights[q] *
                         coef.at(map_point(x, s.rule.points[q]), s.mesh.domain[k])[0];
        for (int r = 0; r < dof; ++r) {
          const double wr = w * s.tab.value(q, r);
          for (int j = 0; j < dof; ++j) a[r * dof + j] += wr * s.tab.value(q, j);
        }
      }
    }
  };
  return assemble_matrix(mesh.n_nodes(), mesh.n_tets(), mesh.dofK, s.nodes_of(),
                         Local{s, c, t});
}

CsrMatrix assemble_boundary_mass(const Mesh& mesh, const GeometryCache& geom,
                                 const CoefficientField& alpha,
                                 std::span<const Index> robin_rows,
                                 const QuadratureRule& rule, double t) {
  require_shape(alpha, FieldShape::Scalar, "Robin");
  BoundarySetup s(mesh, geom, rule, robin_rows);
  if (alpha.is_zero()) return CsrMatrix(mesh.n_nodes(), mesh.n_nodes());
  struct Local {
    const BoundarySetup& s;
    const CoefficientField& alpha;
    double t;
    Coefficient make_state() const { return Coefficient(alpha, t); }
    void operator()(Coefficient& coef, std::size_t e, std::span<double> a) const {
      const Index row = s.rows[e];
      const auto x = tri_vertices(s.mesh, row);
      const double scale = s.geom.bd_area2[row] / 2.0;
      const int dof = s.tab.dof;
      for (int q = 0; q < s.rule.size(); ++q) {
        const double w = scale * s.rule.weights[q] *
                         coef.at(map_point(x, s.rule.points[q]), s.mesh.domBd[row])[0];
        for (int r = 0; r < dof; ++r) {
          const double wr = w * s.tab.value(q, r);
          for (int j = 0; j < dof; ++j) a[r * dof + j] += wr * s.tab.value(q, j);
        }
      }
    }
  };
  return assemble_matrix(mesh.n_nodes(), robin_rows.size(), mesh.dofA,
                         s.nodes_of(), Local{s, alpha, t});
}

CsrMatrix assemble_stiffness(const Mesh& mesh, const GeometryCache& geom,
                             const CoefficientField& kappa,
                             const QuadratureRule& rule, double t) {
  require_shape(kappa, FieldShape::Matrix3, "diffusion");
  VolumeSetup s(mesh, geom, rule);
  if (kappa.is_zero()) return CsrMatrix(mesh.n_nodes(), mesh.n_nodes());
  struct State {
    Coefficient coef;
    std::vector<Vec3> g;
    std::vector<Vec3> kg;
  };
  struct Local {
    const VolumeSetup& s;
    const CoefficientField& kappa;
    double t;
    State make_state() const {
      return {Coefficient(kappa, t), std::vector<Vec3>(s.tab.dof),
              std::vector<Vec3>(s.tab.dof)};
    }
    void operator()(State& st, std::size_t e, std::span<double> a) const {
      const Index k = static_cast<Index>(e);
      const auto x = tet_vertices(s.mesh, k);
      const double scale = s.geom.detBk[k] / 6.0;
      const int dof = s.tab.dof;
      for (int q = 0; q < s.rule.size(); ++q) {
        const auto K = st.coef.at(map_point(x, s.rule.points[q]), s.mesh.domain[k]);
        const double w = scale * s.rule.weights[q];
        s.physical_grads(k, q, st.g);
        for (int j = 0; j < dof; ++j) {
          const Vec3& g = st.g[j];
          st.kg[j] = {K[0] * g[0] + K[1] * g[1] + K[2] * g[2],
                      K[3] * g[0] + K[4] * g[1] + K[5] * g[2],
                      K[6] * g[0] + K[7] * g[1] + K[8] * g[2]};
        }
        for (int r = 0; r < dof; ++r) {
          const Vec3 gr = w * st.g[r];
          for (int j = 0; j < dof; ++j) a[r * dof + j] += dot(gr, st.kg[j]);
        }
      }
    }
  };
  return assemble_matrix(mesh.n_nodes(), mesh.n_tets(), mesh.dofK, s.nodes_of(),
                         Local{s, kappa, t});
}

CsrMatrix assemble_advection(const Mesh& mesh, const GeometryCache& geom,
                             const CoefficientField& beta,
                             const QuadratureRule& rule, double t) {
  require_shape(beta, FieldShape::Vector3, "advection");
  VolumeSetup s(mesh, geom, rule);
  if (beta.is_zero()) return CsrMatrix(mesh.n_nodes(), mesh.n_nodes());
  struct State {
    Coefficient coef;
    std::vector<Vec3> g;
    std::vector<double> bg;
  };
  struct Local {
    const VolumeSetup& s;
    const CoefficientField& beta;
    double t;
    State make_state() const {
      return {Coefficient(beta, t), std::vector<Vec3>(s.tab.dof),
              std::vector<double>(s.tab.dof)};
    }
    void operator()(State& st, std::size_t e, std::span<double> a) const {
      const Index k = static_cast<Index>(e);
      const auto x = tet_vertices(s.mesh, k);
      const double scale = s.geom.detBk[k] / 6.0;
      const int dof = s.tab.dof;
      for (int q = 0; q < s.rule.size(); ++q) {
        const auto b = st.coef.at(map_point(x, s.rule.points[q]), s.mesh.domain[k]);
        const Vec3 bv{b[0], b[1], b[2]};
        const double w = scale * s.rule.weights[q];
        s.physical_grads(k, q, st.g);
        for (int j = 0; j < dof; ++j) st.bg[j] = dot(bv, st.g[j]);
        for (int r = 0; r < dof; ++r) {
          const double wr = w * s.tab.value(q, r);
          for (int j = 0; j < dof; ++j) a[r * dof + j] += wr * st.bg[j];
        }
      }
    }
  };
  return assemble_matrix(mesh.n_nodes(), mesh.n_tets(), mesh.dofK, s.nodes_of(),
                         Local{s, beta, t});
}

LinearSystem combine_system(const CsrMatrix& S, const CsrMatrix& R,
                            const CsrMatrix& A, const CsrMatrix& M,
                            std::span<const double> b,
                            std::span<const double> t) {
  const Index n = S.n_rows();
  for (const CsrMatrix* m : {&S, &R, &A, &M}) {
    if (m->n_rows() != n || m->n_cols() != n) {
      throw Error(ErrorKind::ShapeMismatch, "operators differ in size");
    }
  }
  if (b.size() != static_cast<std::size_t>(n) ||
      t.size() != static_cast<std::size_t>(n)) {
    throw Error(ErrorKind::ShapeMismatch, "right-hand sides differ in size");
  }
  LinearSystem sys{add(add(S, R), add(A, M)), std::vector<double>(n)};
  for (Index i = 0; i < n; ++i) sys.d[i] = b[i] + t[i];
  return sys;
}

}  // namespace femtet
