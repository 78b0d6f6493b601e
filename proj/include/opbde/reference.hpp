#pragma once

// Reference solver for the original Cahn-Hilliard model on a rectangular
// domain, assembled independently of the embedded-domain stepper.
//
// Every edge carries no flux for mu. The phase field is closed either by
// homogeneous Neumann ghosts on all edges, or, on the bottom (substrate)
// edge, by the dynamic condition
//   phi_t = -Gamma [alpha (phi_b - h1) - K d_y phi - h2],
// discretised with Crank-Nicolson on a row of ghost unknowns phi_{i,-1}: the
// wall value is phi_b = (phi_{i,-1} + phi_{i,0}) / 2 and the normal
// derivative is (phi_{i,0} - phi_{i,-1}) / dy.

#include <vector>

#include "opbde/model.hpp"
#include "opbde/solver.hpp"

namespace opbde {

enum class ReferenceBoundary { neumann, dynamic_bottom };

struct ReferenceState {
  SimState base;
  /// Bottom ghost row phi_{i,-1}; empty for all-Neumann runs.
  std::vector<double> ghost_bottom;

  const GridSpec& grid() const { return base.grid(); }
};

/// q from phi; for dynamic_bottom the ghost row starts as a mirror of the
/// first interior row.
ReferenceState reference_initial_state(CellField phi, const PhysParams& params, ReferenceBoundary boundary);

struct ReferenceStepResult {
  ReferenceState state;
  CellField mu;
  StepReport report;
};

/// Wall data h1, h2 are read from the bottom row of bdata; h3 must vanish.
ReferenceStepResult reference_step(const ReferenceState& state, const PhysParams& params, const BoundaryData& bdata,
                                   ReferenceBoundary boundary, double dt, const SolverOptions& opts,
                                   LinearSolver& solver);

ReferenceStepResult reference_step(const ReferenceState& state, const PhysParams& params, const BoundaryData& bdata,
                                   ReferenceBoundary boundary, double dt, const SolverOptions& opts);

/// dx dy [sum 1/2 q^2 + 1/2 K sum_interior_faces (D phi)^2] plus, for the
/// dynamic wall, dx sum_i [1/2 K dy (D_y phi)^2 + 1/2 alpha (phi_b - h1)^2 - h2 phi_b].
double reference_energy(const ReferenceState& state, const PhysParams& params, const BoundaryData& bdata);

}  // namespace opbde
