#pragma once

// Dirichlet elimination, iterative/dense linear solvers and Crank–Nicolson
// time stepping.

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "femtet/expr.hpp"
#include "femtet/mesh_model.hpp"
#include "femtet/sparse.hpp"

namespace femtet {

enum class SolverMethod { Auto, Cg, Bicgstab, Dense };
enum class Preconditioner { None, Jacobi };

struct SolverConfig {
  SolverMethod method = SolverMethod::Auto;
  double tol = 1e-10;  // on ‖r‖ / ‖rhs‖
  int max_iter = 20000;
  Preconditioner preconditioner = Preconditioner::Jacobi;
  bool verbose = false;  // iteration log on stderr
};

/// Largest system the dense path accepts.
inline constexpr Index kMaxDenseSize = 2000;

struct IterativeResult {
  std::vector<double> x;
  int iterations = 0;
  double residual = 0.0;  // ‖rhs − A x‖₂, recomputed from x
};

/// Conjugate gradients; A must be symmetric positive definite.
IterativeResult cg_solve(const CsrMatrix& A, std::span<const double> rhs,
                         const SolverConfig& cfg,
                         std::span<const double> x0 = {});

IterativeResult bicgstab_solve(const CsrMatrix& A, std::span<const double> rhs,
                               const SolverConfig& cfg,
                               std::span<const double> x0 = {});

/// LU with partial pivoting on a dense copy of A.
class DenseLu {
 public:
  explicit DenseLu(const CsrMatrix& A);
  std::vector<double> solve(std::span<const double> rhs) const;

 private:
  Index n_;
  std::vector<double> lu_;
  std::vector<Index> perm_;
};

/// The inD x inD block of a system with the iD unknowns eliminated, ready
/// for repeated solves.
class ReducedSystem {
 public:
  ReducedSystem(const CsrMatrix& C, const BoundaryClassification& bc,
                const SolverConfig& cfg);
  ~ReducedSystem();
  ReducedSystem(ReducedSystem&&) noexcept;
  ReducedSystem& operator=(ReducedSystem&&) noexcept;

  /// Returns the full nodal vector: u[iD] = u_dirichlet, u[inD] solved.
  /// `guess` (full length, optional) seeds iterative methods.
  IterativeResult solve(std::span<const double> d,
                        std::span<const double> u_dirichlet,
                        std::span<const double> guess = {}) const;

  SolverMethod method() const { return method_; }

 private:
  const BoundaryClassification* bc_;
  SolverConfig cfg_;
  SolverMethod method_;
  Index n_full_;
  CsrMatrix nn_;
  CsrMatrix nd_;
  std::unique_ptr<DenseLu> lu_;
};

struct Solution {
  std::vector<double> u;
  int iterations = 0;
  double residual = 0.0;
};

/// Values of u_D at the Dirichlet nodes, in bc.iD order. `tag` is the entity
/// tag of the first Dirichlet triangle containing the node.
std::vector<double> dirichlet_values(const Mesh& mesh,
                                     const BoundaryClassification& bc,
                                     const CoefficientField& uD, double t);

Solution solve_steady(const CsrMatrix& C, std::span<const double> d,
                      const BoundaryClassification& bc,
                      std::span<const double> u_dirichlet,
                      const SolverConfig& cfg);

struct Snapshot {
  int step = 0;
  double t = 0.0;
  Solution solution;
};

struct TimeStepping {
  double t_start = 0.0;
  double t_end = 1.0;
  double dt = 0.1;
  int snapshot_every = 0;  // 0: initial and final state only
};

/// Number of fixed-size steps covering [t_start, t_end].
int step_count(const TimeStepping& ts);

/// Crank–Nicolson for M u' + C u = d(t):
///   (M/τ + C/2) u^{n+1} = (M/τ − C/2) u^n + (d^{n+1} + d^n)/2,
/// with u^{n+1}[iD] = u_D(t_{n+1}). Returns snapshots at step 0, every
/// `snapshot_every` steps, and the final step.
std::vector<Snapshot> crank_nicolson(
    const CsrMatrix& M, const CsrMatrix& C,
    const std::function<std::vector<double>(double)>& d_of_t,
    std::span<const double> u0, const TimeStepping& ts,
    const BoundaryClassification& bc,
    const std::function<std::vector<double>(double)>& uD_of_t,
    const SolverConfig& cfg);

}  // namespace femtet
