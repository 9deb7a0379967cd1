#include "femtet/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "femtet/error.hpp"

namespace femtet {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void require_square(const CsrMatrix& A, std::span<const double> rhs) {
  if (A.n_rows() != A.n_cols() ||
      static_cast<std::size_t>(A.n_rows()) != rhs.size()) {
    throw Error(ErrorKind::ShapeMismatch,
                "system " + std::to_string(A.n_rows()) + "x" +
                    std::to_string(A.n_cols()) + " with right-hand side of " +
                    std::to_string(rhs.size()));
  }
}

std::vector<double> inverse_diagonal(const CsrMatrix& A,
                                     Preconditioner preconditioner) {
  std::vector<double> inv(A.n_rows(), 1.0);
  if (preconditioner == Preconditioner::Jacobi) {
    const auto d = A.diagonal();
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (d[i] != 0.0) inv[i] = 1.0 / d[i];
    }
  }
  return inv;
}

std::vector<double> residual(const CsrMatrix& A, std::span<const double> x,
                             std::span<const double> b) {
  std::vector<double> r = A.multiply(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  return r;
}

void log_iteration(const SolverConfig& cfg, const char* name, int it,
                   double rel) {
  if (cfg.verbose && (it % 50 == 0 || it == 1)) {
    std::fprintf(stderr, "%s iter %d  rel. residual %.3e\n", name, it, rel);
  }
}

[[noreturn]] void no_convergence(const char* name, const SolverConfig& cfg,
                                 double rel) {
  throw Error(ErrorKind::NoConvergence,
              std::string(name) + " reached " + std::to_string(cfg.max_iter) +
                  " iterations at relative residual " + std::to_string(rel));
}

std::vector<double> initial_guess(std::span<const double> x0, std::size_t n) {
  if (x0.empty()) return std::vector<double>(n, 0.0);
  if (x0.size() != n) {
    throw Error(ErrorKind::ShapeMismatch, "initial guess has the wrong length");
  }
  return {x0.begin(), x0.end()};
}

}  // namespace

IterativeResult cg_solve(const CsrMatrix& A, std::span<const double> rhs,
                         const SolverConfig& cfg, std::span<const double> x0) {
  require_square(A, rhs);
  const std::size_t n = rhs.size();
  IterativeResult res;
  res.x = initial_guess(x0, n);
  const double bnorm = norm2(rhs);
  if (bnorm == 0.0) {
    std::fill(res.x.begin(), res.x.end(), 0.0);
    return res;
  }
  const double target = cfg.tol * bnorm;
  const auto inv_diag = inverse_diagonal(A, cfg.preconditioner);

  std::vector<double> r = residual(A, res.x, rhs);
  double rnorm = norm2(r);
  std::vector<double> z(n), p(n), Ap(n);
  auto restart = [&] {
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    p = z;
    return dot(r, z);
  };
  double rz = restart();
  int it = 0;
  while (rnorm > target) {
    if (it == cfg.max_iter) no_convergence("cg", cfg, rnorm / bnorm);
    ++it;
    A.multiply(p, Ap);
    const double pAp = dot(p, Ap);
    if (!(pAp > 0.0)) {
      throw Error(ErrorKind::BreakdownDetected,
                  "cg met a non-positive curvature direction");
    }
    const double alpha = rz / pAp;
    for (std::size_t i = 0; i < n; ++i) {
      res.x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
    }
    rnorm = norm2(r);
    log_iteration(cfg, "cg", it, rnorm / bnorm);
    if (rnorm <= target) {
      r = residual(A, res.x, rhs);
      rnorm = norm2(r);
      if (rnorm <= target) break;
      rz = restart();
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  res.iterations = it;
  res.residual = norm2(residual(A, res.x, rhs));
  return res;
}

IterativeResult bicgstab_solve(const CsrMatrix& A, std::span<const double> rhs,
                               const SolverConfig& cfg,
                               std::span<const double> x0) {
  require_square(A, rhs);
  const std::size_t n = rhs.size();
  IterativeResult res;
  res.x = initial_guess(x0, n);
  const double bnorm = norm2(rhs);
  if (bnorm == 0.0) {
    std::fill(res.x.begin(), res.x.end(), 0.0);
    return res;
  }
  const double target = cfg.tol * bnorm;
  const auto inv_diag = inverse_diagonal(A, cfg.preconditioner);

  std::vector<double> r = residual(A, res.x, rhs);
  double rnorm = norm2(r);
  std::vector<double> rhat, p(n), v(n), y(n), s(n), z(n), t(n);
  double rho_old = 1.0, alpha = 1.0, omega = 1.0;
  bool fresh = true;
  auto restart = [&] {
    rhat = r;
    std::fill(p.begin(), p.end(), 0.0);
    std::fill(v.begin(), v.end(), 0.0);
    rho_old = alpha = omega = 1.0;
    fresh = true;
  };
  // Near-orthogonality triggers one restart; a second in a row is a breakdown.
  auto degenerate = [&](double value, double scale, const char* what) {
    if (std::isfinite(value) && std::abs(value) > 1e-14 * scale) return false;
    if (fresh || !std::isfinite(value)) {
      throw Error(ErrorKind::BreakdownDetected,
                  std::string("bicgstab: ") + what + " vanished");
    }
    restart();
    return true;
  };
  restart();
  int it = 0;
  while (rnorm > target) {
    if (it == cfg.max_iter) no_convergence("bicgstab", cfg, rnorm / bnorm);
    ++it;
    const double rho = dot(rhat, r);
    if (degenerate(rho, norm2(rhat) * rnorm, "(r̂, r)")) continue;
    const double beta = (rho / rho_old) * (alpha / omega);
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    for (std::size_t i = 0; i < n; ++i) y[i] = inv_diag[i] * p[i];
    A.multiply(y, v);
    const double rhat_v = dot(rhat, v);
    if (degenerate(rhat_v, norm2(rhat) * norm2(v), "(r̂, v)")) continue;
    alpha = rho / rhat_v;
    for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    if (norm2(s) <= target) {
      for (std::size_t i = 0; i < n; ++i) res.x[i] += alpha * y[i];
      r = residual(A, res.x, rhs);
      rnorm = norm2(r);
      log_iteration(cfg, "bicgstab", it, rnorm / bnorm);
      if (rnorm > target) restart();
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * s[i];
    A.multiply(z, t);
    const double tt = dot(t, t);
    if (!(tt > 0.0)) {
      throw Error(ErrorKind::BreakdownDetected, "bicgstab: A z vanished");
    }
    omega = dot(t, s) / tt;
    for (std::size_t i = 0; i < n; ++i) {
      res.x[i] += alpha * y[i] + omega * z[i];
      r[i] = s[i] - omega * t[i];
    }
    rnorm = norm2(r);
    rho_old = rho;
    fresh = false;
    log_iteration(cfg, "bicgstab", it, rnorm / bnorm);
    if (rnorm <= target) {
      r = residual(A, res.x, rhs);
      rnorm = norm2(r);
      if (rnorm > target) restart();
    } else if (omega == 0.0) {
      throw Error(ErrorKind::BreakdownDetected, "bicgstab: ω vanished");
    }
  }
  res.iterations = it;
  res.residual = norm2(residual(A, res.x, rhs));
  return res;
}

DenseLu::DenseLu(const CsrMatrix& A) : n_(A.n_rows()) {
  if (A.n_rows() != A.n_cols()) {
    throw Error(ErrorKind::ShapeMismatch, "dense LU of a non-square matrix");
  }
  const std::size_t n = n_;
  lu_.assign(n * n, 0.0);
  for (Index r = 0; r < n_; ++r) {
    for (Index p = A.row_ptr()[r]; p < A.row_ptr()[r + 1]; ++p) {
      lu_[r * n + A.col_idx()[p]] = A.values()[p];
    }
  }
  perm_.resize(n);
  for (Index i = 0; i < n_; ++i) perm_[i] = i;
  const double threshold = 1e-12 * A.max_abs();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(lu_[i * n + k]) > std::abs(lu_[piv * n + k])) piv = i;
    }
    if (!(std::abs(lu_[piv * n + k]) > threshold)) {
      throw Error(ErrorKind::SingularSystem,
                  "zero pivot in column " + std::to_string(k + 1));
    }
    if (piv != k) {
      std::swap_ranges(lu_.begin() + k * n, lu_.begin() + (k + 1) * n,
                       lu_.begin() + piv * n);
      std::swap(perm_[k], perm_[piv]);
    }
    const double inv = 1.0 / lu_[k * n + k];
    for (std::size_t i = k + 1; i < n; ++i) {
      double& l = lu_[i * n + k];
      if (l == 0.0) continue;
      l *= inv;
      for (std::size_t j = k + 1; j < n; ++j) lu_[i * n + j] -= l * lu_[k * n + j];
    }
  }
}

std::vector<double> DenseLu::solve(std::span<const double> rhs) const {
  const std::size_t n = n_;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = rhs[perm_[i]];
    for (std::size_t j = 0; j < i; ++j) s -= lu_[i * n + j] * x[j];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= lu_[i * n + j] * x[j];
    x[i] = s / lu_[i * n + i];
  }
  return x;
}

ReducedSystem::ReducedSystem(const CsrMatrix& C,
                             const BoundaryClassification& bc,
                             const SolverConfig& cfg)
    : bc_(&bc),
      cfg_(cfg),
      method_(cfg.method),
      n_full_(C.n_rows()),
      nn_(C.submatrix(bc.inD, bc.inD)),
      nd_(C.submatrix(bc.inD, bc.iD)) {
  if (C.n_rows() != C.n_cols() ||
      bc.iD.size() + bc.inD.size() != static_cast<std::size_t>(C.n_rows())) {
    throw Error(ErrorKind::ShapeMismatch,
                "node partition does not match the system size");
  }
  if (method_ == SolverMethod::Auto) {
    method_ = nn_.max_abs_asymmetry() <= 1e-12 * nn_.max_abs()
                  ? SolverMethod::Cg
                  : SolverMethod::Bicgstab;
  }
  if (method_ == SolverMethod::Dense) {
    if (nn_.n_rows() > kMaxDenseSize) {
      throw Error(ErrorKind::ConfigError,
                  "dense solver limited to " + std::to_string(kMaxDenseSize) +
                      " unknowns, system has " + std::to_string(nn_.n_rows()));
    }
    lu_ = std::make_unique<DenseLu>(nn_);
  }
}

ReducedSystem::~ReducedSystem() = default;
ReducedSystem::ReducedSystem(ReducedSystem&&) noexcept = default;
ReducedSystem& ReducedSystem::operator=(ReducedSystem&&) noexcept = default;

IterativeResult ReducedSystem::solve(std::span<const double> d,
                                     std::span<const double> u_dirichlet,
                                     std::span<const double> guess) const {
  const auto& iD = bc_->iD;
  const auto& inD = bc_->inD;
  if (d.size() != static_cast<std::size_t>(n_full_) ||
      u_dirichlet.size() != iD.size() ||
      (!guess.empty() && guess.size() != static_cast<std::size_t>(n_full_))) {
    throw Error(ErrorKind::ShapeMismatch, "reduced solve inputs differ in size");
  }
  std::vector<double> rhs = nd_.multiply(u_dirichlet);
  for (std::size_t i = 0; i < inD.size(); ++i) rhs[i] = d[inD[i]] - rhs[i];

  std::vector<double> x0;
  if (!guess.empty()) {
    x0.resize(inD.size());
    for (std::size_t i = 0; i < inD.size(); ++i) x0[i] = guess[inD[i]];
  }

  IterativeResult reduced;
  switch (method_) {
    case SolverMethod::Dense:
      reduced.x = lu_->solve(rhs);
      reduced.residual = norm2(residual(nn_, reduced.x, rhs));
      break;
    case SolverMethod::Cg:
      reduced = cg_solve(nn_, rhs, cfg_, x0);
      break;
    default:
      reduced = bicgstab_solve(nn_, rhs, cfg_, x0);
      break;
  }

  IterativeResult full;
  full.iterations = reduced.iterations;
  full.residual = reduced.residual;
  full.x.assign(n_full_, 0.0);
  for (std::size_t i = 0; i < iD.size(); ++i) full.x[iD[i]] = u_dirichlet[i];
  for (std::size_t i = 0; i < inD.size(); ++i) full.x[inD[i]] = reduced.x[i];
  for (double v : full.x) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::NonFiniteValue, "solution has non-finite entries");
    }
  }
  return full;
}

std::vector<double> dirichlet_values(const Mesh& mesh,
                                     const BoundaryClassification& bc,
                                     const CoefficientField& uD, double t) {
  if (uD.shape() != FieldShape::Scalar) {
    throw Error(ErrorKind::ShapeMismatch, "Dirichlet data must be scalar");
  }
  std::vector<int> tag(mesh.n_nodes(), 0);
  std::vector<bool> seen(mesh.n_nodes(), false);
  for (Index k = 0; k < mesh.n_tris(); ++k) {
    if (!bc.gammaD[k]) continue;
    for (Index n : mesh.tri(k)) {
      if (!seen[n]) {
        seen[n] = true;
        tag[n] = mesh.domBd[k];
      }
    }
  }
  std::vector<double> values(bc.iD.size());
  for (std::size_t i = 0; i < bc.iD.size(); ++i) {
    const Index n = bc.iD[i];
    uD.eval(mesh.coord[n], t, tag[n], std::span<double>(&values[i], 1));
  }
  return values;
}

Solution solve_steady(const CsrMatrix& C, std::span<const double> d,
                      const BoundaryClassification& bc,
                      std::span<const double> u_dirichlet,
                      const SolverConfig& cfg) {
  ReducedSystem sys(C, bc, cfg);
  auto r = sys.solve(d, u_dirichlet);
  return {std::move(r.x), r.iterations, r.residual};
}

int step_count(const TimeStepping& ts) {
  if (!(ts.dt > 0.0) || !(ts.t_end >= ts.t_start)) {
    throw Error(ErrorKind::ConfigError,
                "time stepping needs dt > 0 and t_end >= t_start");
  }
  const double n = (ts.t_end - ts.t_start) / ts.dt;
  return static_cast<int>(std::ceil(n - 1e-9 * std::max(1.0, n)));
}

std::vector<Snapshot> crank_nicolson(
    const CsrMatrix& M, const CsrMatrix& C,
    const std::function<std::vector<double>(double)>& d_of_t,
    std::span<const double> u0, const TimeStepping& ts,
    const BoundaryClassification& bc,
    const std::function<std::vector<double>(double)>& uD_of_t,
    const SolverConfig& cfg) {
  const int steps = step_count(ts);
  if (u0.size() != static_cast<std::size_t>(M.n_rows())) {
    throw Error(ErrorKind::ShapeMismatch, "initial state has the wrong length");
  }
  const double inv_dt = 1.0 / ts.dt;
  const CsrMatrix lhs = add(M, C, inv_dt, 0.5);
  const CsrMatrix rhs_op = add(M, C, inv_dt, -0.5);
  const ReducedSystem sys(lhs, bc, cfg);

  std::vector<Snapshot> out;
  std::vector<double> u(u0.begin(), u0.end());
  out.push_back({0, ts.t_start, {u, 0, 0.0}});
  std::vector<double> d_old = d_of_t(ts.t_start);
  for (int n = 1; n <= steps; ++n) {
    const double t = ts.t_start + n * ts.dt;
    std::vector<double> d_new = d_of_t(t);
    std::vector<double> rhs = rhs_op.multiply(u);
    for (std::size_t i = 0; i < rhs.size(); ++i) {
      rhs[i] += 0.5 * (d_old[i] + d_new[i]);
    }
    auto r = sys.solve(rhs, uD_of_t(t), u);
    u = std::move(r.x);
    d_old = std::move(d_new);
    if (cfg.verbose) {
      std::fprintf(stderr, "step %d  t = %.6g  iterations %d\n", n, t,
                   r.iterations);
    }
    const bool keep = n == steps || (ts.snapshot_every > 0 &&
                                     n % ts.snapshot_every == 0);
    if (keep) out.push_back({n, t, {u, r.iterations, r.residual}});
  }
  return out;
}

}  // namespace femtet
