#pragma once

// Second-order, energy-dissipation-rate-preserving time stepper for the
// embedded-domain Cahn-Hilliard system. Each step solves one linear system in
// (phi^{n+1}, mu*^{n+1/2}); q^{n+1} is eliminated through
// q^{n+1} = q^n + g_bar (phi^{n+1} - phi^n) and updated afterwards.

#include <cstddef>

#include "opbde/geometry.hpp"
#include "opbde/model.hpp"
#include "opbde/solver.hpp"

namespace opbde {

/// Unknown vector layout: phi^{n+1} for every cell, then mu* for every cell,
/// both in grid storage order.
struct UnknownLayout {
  std::size_t cells = 0;

  std::size_t phi(std::size_t cell) const { return cell; }
  std::size_t mu(std::size_t cell) const { return cells + cell; }
  std::size_t size() const { return 2 * cells; }
};

/// Values at n + 1/2 obtained by extrapolation: 3/2 (.)^n - 1/2 (.)^{n-1} for
/// n >= 1 and (.)^n for n = 0.
struct Extrapolation {
  CellField g_bar;
  double gamma_inv_bar = 0.0;
  double M_bar = 0.0;
  std::size_t g_floor_hits = 0;
};

double extrapolate_value(double now, double prev, long n);

Extrapolation extrapolate(const SimState& state, const PhysParams& params);

struct StepSystem {
  LinearSystem linear;
  UnknownLayout layout;
  GridSpec grid;
  Extrapolation ext;
  double dt = 0.0;
};

/// Builds the coupled system of one step. Row block 1 (phi rows):
///   (phi^{n+1} - phi^n)/dt - chi D_h(psi M, chi mu*) + 1/2 chi S3 = 0,
/// row block 2 (mu* rows):
///   mu* - psi g_bar q^{n+1/2} + K D_h(psi, phi^{n+1/2})
///       - 1/2 sum_faces |D psi| A[alpha (phi^{n+1/2} - h1) - h2 + gamma_inv (phi^{n+1} - phi^n)/dt] = 0,
/// where S3 is the four-face sum of |D psi| A(h3).
StepSystem assemble(const SimState& state, const PhysParams& params, const EmbeddingField& embedding,
                    const BoundaryData& bdata, double dt);

struct SolvedStep {
  CellField phi_next;
  CellField mu_star;
  StepReport report;
};

SolvedStep solve(const StepSystem& system, const SolverOptions& opts);
SolvedStep solve(const StepSystem& system, const SolverOptions& opts, LinearSolver& solver);

/// q^{n+1} = q^n + g_bar (phi^{n+1} - phi^n).
CellField update_q(const SimState& state, const CellField& phi_next, const CellField& g_bar);

/// Everything needed to audit one step against the discrete energy law.
struct StepAudit {
  CellField phi_old;
  CellField phi_new;
  CellField q_old;
  CellField q_new;
  CellField mu_star;
  double dt = 0.0;
  double gamma_inv_bar = 0.0;
  double M_bar = 0.0;
};

struct StepResult {
  SimState state;
  StepReport report;
  StepAudit audit;
};

StepResult step(const SimState& state, const PhysParams& params, const EmbeddingField& embedding,
                const BoundaryData& bdata, double dt, const SolverOptions& opts);

/// Reusable stepper; holds the linear solver cache for a fixed problem.
class Stepper {
 public:
  Stepper(PhysParams params, EmbeddingField embedding, BoundaryData bdata, double dt, SolverOptions opts);

  StepResult advance(const SimState& state);

  const PhysParams& params() const { return params_; }
  const EmbeddingField& embedding() const { return embedding_; }
  const BoundaryData& boundary_data() const { return bdata_; }
  double dt() const { return dt_; }
  const SolverOptions& options() const { return opts_; }
  void set_options(const SolverOptions& opts) { opts_ = opts; }

 private:
  PhysParams params_;
  EmbeddingField embedding_;
  BoundaryData bdata_;
  double dt_;
  SolverOptions opts_;
  LinearSolver solver_;
};

}  // namespace opbde
