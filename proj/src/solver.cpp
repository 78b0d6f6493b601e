#include "opbde/solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <chrono>
#include <cmath>
#include <sstream>

#include "opbde/errors.hpp"

namespace opbde {
namespace {

using LU = Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>;

// Adapts externally owned LU factors to Eigen's preconditioner interface.
class LuPreconditioner {
 public:
  LuPreconditioner() = default;

  void attach(const LU* lu) { lu_ = lu; }

  template <typename MatType>
  LuPreconditioner& analyzePattern(const MatType&) {
    return *this;
  }
  template <typename MatType>
  LuPreconditioner& factorize(const MatType&) {
    return *this;
  }
  template <typename MatType>
  LuPreconditioner& compute(const MatType&) {
    return *this;
  }

  template <typename Rhs>
  Eigen::VectorXd solve(const Rhs& b) const {
    return lu_->solve(b);
  }

  Eigen::ComputationInfo info() const { return lu_ ? Eigen::Success : Eigen::InvalidInput; }

 private:
  const LU* lu_ = nullptr;
};

Eigen::VectorXd or_ones(const Eigen::VectorXd& v, Eigen::Index n) {
  return v.size() == n ? v : Eigen::VectorXd::Ones(n);
}

}  // namespace

void SolverOptions::validate() const {
  if (!(rel_tol > 0.0)) throw ParameterError("solver rel_tol must be positive");
  if (!(abs_tol >= 0.0)) throw ParameterError("solver abs_tol must be non-negative");
  if (max_iterations < 1) throw ParameterError("solver max_iterations must be at least 1");
  if (!(ilut_droptol >= 0.0)) throw ParameterError("solver ilut_droptol must be non-negative");
  if (ilut_fill < 1) throw ParameterError("solver ilut_fill must be at least 1");
}

struct LinearSolver::Impl {
  LU lu;
  Eigen::Index pattern_rows = -1;
  Eigen::Index pattern_nnz = -1;
  bool factors_fresh = false;  // lu holds the factors of some earlier scaled matrix

  void factorize(const SparseMatrix& scaled, StepReport& report) {
    if (scaled.rows() != pattern_rows || scaled.nonZeros() != pattern_nnz) {
      lu.analyzePattern(scaled);
      pattern_rows = scaled.rows();
      pattern_nnz = scaled.nonZeros();
    }
    lu.factorize(scaled);
    if (lu.info() != Eigen::Success) {
      factors_fresh = false;
      throw SolveError("sparse LU factorisation failed: " + lu.lastErrorMessage(), report);
    }
    factors_fresh = true;
    report.refactored = true;
  }
};

LinearSolver::LinearSolver() : impl_(std::make_unique<Impl>()) {}
LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

Eigen::VectorXd LinearSolver::solve(const LinearSystem& system, const SolverOptions& opts, StepReport& report) {
  opts.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::Index n = system.op.rows();
  if (system.op.cols() != n || system.rhs.size() != n) throw DimensionError("linear system is not square");

  const Eigen::VectorXd R = or_ones(system.row_scale, n);
  const Eigen::VectorXd C = or_ones(system.col_scale, n);
  const SparseMatrix scaled = R.asDiagonal() * system.op * C.asDiagonal();

  report.rhs_norm = system.rhs.norm();
  const double target = std::max(opts.abs_tol, opts.rel_tol * report.rhs_norm);
  auto residual_of = [&](const Eigen::VectorXd& x) { return (system.rhs - system.op * x).norm(); };

  SolverMethod method = opts.method;
  if (method == SolverMethod::automatic) {
    method = static_cast<std::size_t>(n) < opts.direct_threshold ? SolverMethod::direct : SolverMethod::krylov;
  }

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  report.iterations = 0;
  report.refactored = false;

  if (method == SolverMethod::direct) {
    impl_->factorize(scaled, report);
    x = C.cwiseProduct(impl_->lu.solve(R.cwiseProduct(system.rhs)));
    report.iterations = 1;
    report.residual = residual_of(x);
    // Iterative refinement with the same factors.
    while (report.residual > target && report.iterations < opts.max_iterations && report.iterations < 8) {
      const Eigen::VectorXd r = system.rhs - system.op * x;
      x += C.cwiseProduct(impl_->lu.solve(R.cwiseProduct(r)));
      ++report.iterations;
      const double res = residual_of(x);
      if (!(res < report.residual)) {
        report.residual = res;
        break;
      }
      report.residual = res;
    }
  } else if (method == SolverMethod::richardson) {
    // Works on the unscaled operator: the equilibrated one makes the sweeps
    // contract too fast for the final residual to follow the tolerance.
    Eigen::IncompleteLUT<double> ilu;
    ilu.setDroptol(opts.ilut_droptol);
    ilu.setFillfactor(opts.ilut_fill);
    ilu.compute(system.op);
    if (ilu.info() != Eigen::Success) throw SolveError("incomplete LU factorisation failed", report);
    report.residual = report.rhs_norm;
    while (report.residual > target && report.iterations < opts.max_iterations) {
      x += ilu.solve(Eigen::VectorXd(system.rhs - system.op * x));
      ++report.iterations;
      report.residual = residual_of(x);
      if (!std::isfinite(report.residual) || report.residual > 1e6 * report.rhs_norm) break;
    }
  } else {
    const Eigen::VectorXd b = R.cwiseProduct(system.rhs);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
    double inner_tol = opts.rel_tol;
    int budget = opts.max_iterations;

    auto run_bicgstab = [&](auto& solver) {
      for (int round = 0; round < 8 && budget > 0; ++round) {
        solver.setTolerance(inner_tol);
        solver.setMaxIterations(budget);
        y = solver.solveWithGuess(b, y);
        report.iterations += static_cast<int>(solver.iterations());
        budget -= std::max<int>(1, static_cast<int>(solver.iterations()));
        x = C.cwiseProduct(y);
        report.residual = residual_of(x);
        if (report.residual <= target) return;
        // Tighten the inner tolerance by the observed shortfall.
        inner_tol *= std::max(1e-3, 0.5 * target / report.residual);
      }
    };

    if (method == SolverMethod::krylov_ilut) {
      Eigen::BiCGSTAB<SparseMatrix, Eigen::IncompleteLUT<double>> bicg;
      bicg.preconditioner().setDroptol(opts.ilut_droptol);
      bicg.preconditioner().setFillfactor(opts.ilut_fill);
      bicg.compute(scaled);
      run_bicgstab(bicg);
    } else {
      if (!impl_->factors_fresh || impl_->pattern_rows != n) impl_->factorize(scaled, report);
      Eigen::BiCGSTAB<SparseMatrix, LuPreconditioner> bicg;
      bicg.preconditioner().attach(&impl_->lu);
      bicg.compute(scaled);
      run_bicgstab(bicg);
      if (report.residual > target && !report.refactored) {
        // Stale preconditioner: refactorise on this matrix and retry once.
        impl_->factorize(scaled, report);
        budget = opts.max_iterations;
        inner_tol = opts.rel_tol;
        run_bicgstab(bicg);
      }
      if (report.iterations > opts.refresh_iterations) impl_->factors_fresh = false;
    }
  }

  report.converged = std::isfinite(report.residual) && report.residual <= target;
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!report.converged) {
    std::ostringstream os;
    os << "linear solve did not reach tolerance: residual " << report.residual << " > " << target << " after "
       << report.iterations << " iterations";
    throw SolveError(os.str(), report);
  }
  return x;
}

}  // namespace opbde
