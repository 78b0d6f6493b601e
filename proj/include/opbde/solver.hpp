#pragma once

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <memory>
#include <stdexcept>
#include <string>

namespace opbde {

enum class SolverMethod {
  /// Direct factorisation below direct_threshold unknowns, Krylov above.
  automatic,
  /// Sparse LU with iterative refinement.
  direct,
  /// BiCGSTAB preconditioned by the LU factors of an earlier system.
  krylov,
  /// BiCGSTAB with an incomplete LU preconditioner.
  krylov_ilut,
  /// Stationary iteration x += P^{-1} (b - A x) with an incomplete LU P; the
  /// residual contracts by a roughly constant factor per sweep, so the final
  /// residual tracks the tolerance.
  richardson,
};

struct SolverOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-13;
  int max_iterations = 500;
  SolverMethod method = SolverMethod::automatic;
  std::size_t direct_threshold = 100000;
  /// Krylov only: refactorise the preconditioner once a solve needs more
  /// iterations than this.
  int refresh_iterations = 6;
  /// Incomplete LU parameters for krylov_ilut and richardson.
  double ilut_droptol = 1e-6;
  int ilut_fill = 20;

  void validate() const;
};

struct StepReport {
  double residual = 0.0;
  double rhs_norm = 0.0;
  int iterations = 0;
  double wall_seconds = 0.0;
  std::size_t g_floor_hits = 0;
  bool converged = false;
  bool refactored = false;
};

/// A linear solve missed its tolerance within max_iterations.
class SolveError : public std::runtime_error {
 public:
  SolveError(const std::string& what, StepReport report) : std::runtime_error(what), report_(report) {}
  const StepReport& report() const { return report_; }

 private:
  StepReport report_;
};

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

/// A sparse system with optional diagonal equilibration: the solver works on
/// diag(row_scale) * op * diag(col_scale) and maps the solution back. The
/// convergence test is always on the unscaled residual ||op x - rhs||_2.
struct LinearSystem {
  SparseMatrix op;
  Eigen::VectorXd rhs;
  Eigen::VectorXd row_scale;
  Eigen::VectorXd col_scale;
};

/// Residual-based linear solver. Keeps the symbolic factorisation and, for the
/// Krylov path, the numeric factors of an earlier matrix between calls, so one
/// instance should be reused across the steps of a run.
class LinearSolver {
 public:
  LinearSolver();
  ~LinearSolver();
  LinearSolver(LinearSolver&&) noexcept;
  LinearSolver& operator=(LinearSolver&&) noexcept;

  /// Returns the solution; fills report. Throws SolveError on failure.
  Eigen::VectorXd solve(const LinearSystem& system, const SolverOptions& opts, StepReport& report);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace opbde
