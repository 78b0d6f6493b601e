#include "opbde/reference.hpp"

#include <cmath>
#include <sstream>

#include "opbde/errors.hpp"
#include "opbde/scheme.hpp"

namespace opbde {

ReferenceState reference_initial_state(CellField phi, const PhysParams& params, ReferenceBoundary boundary) {
  ReferenceState s{initial_state(std::move(phi), params), {}};
  if (boundary == ReferenceBoundary::dynamic_bottom) {
    const GridSpec& g = s.grid();
    s.ghost_bottom.resize(static_cast<std::size_t>(g.Nx));
    for (int i = 0; i < g.Nx; ++i) s.ghost_bottom[static_cast<std::size_t>(i)] = s.base.phi(i, 0);
  }
  return s;
}

ReferenceStepResult reference_step(const ReferenceState& state, const PhysParams& params, const BoundaryData& bdata,
                                   ReferenceBoundary boundary, double dt, const SolverOptions& opts) {
  LinearSolver solver;
  return reference_step(state, params, bdata, boundary, dt, opts, solver);
}

ReferenceStepResult reference_step(const ReferenceState& state, const PhysParams& params, const BoundaryData& bdata,
                                   ReferenceBoundary boundary, double dt, const SolverOptions& opts,
                                   LinearSolver& solver) {
  if (!(dt > 0.0)) throw ParameterError("time step dt must be positive");
  params.validate();
  const GridSpec& g = state.grid();
  require_same_grid(g, bdata.h1.grid(), "reference_step");
  for (double h : bdata.h3.values()) {
    if (h != 0.0) throw ParameterError("reference solver supports only h3 = 0 (no-flux walls)");
  }
  const bool dynamic = boundary == ReferenceBoundary::dynamic_bottom;
  if (dynamic && state.ghost_bottom.size() != static_cast<std::size_t>(g.Nx)) {
    throw DimensionError("reference state lacks the bottom ghost row");
  }

  const SimState& s = state.base;
  const Extrapolation ext = extrapolate(s, params);
  const std::size_t N = g.cells();
  const std::size_t n_unknowns = 2 * N + (dynamic ? static_cast<std::size_t>(g.Nx) : 0);
  auto phi_idx = [&](int i, int j) { return static_cast<int>(g.index(i, j)); };
  auto mu_idx = [&](int i, int j) { return static_cast<int>(N + g.index(i, j)); };
  auto ghost_idx = [&](int i) { return static_cast<int>(2 * N) + i; };

  const double K = params.K;
  const double M = ext.M_bar;
  const double inv_dt = 1.0 / dt;
  const double idx2 = 1.0 / (g.dx() * g.dx());
  const double idy2 = 1.0 / (g.dy() * g.dy());

  std::vector<Eigen::Triplet<double, int>> trip;
  trip.reserve(n_unknowns * 7);
  LinearSystem lin;
  lin.rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_unknowns));

  for (int j = 0; j < g.Ny; ++j) {
    for (int i = 0; i < g.Nx; ++i) {
      const int r1 = phi_idx(i, j);
      const int r2 = mu_idx(i, j);
      const double gb = ext.g_bar(i, j);
      const double phi_c = s.phi(i, j);

      trip.emplace_back(r1, phi_idx(i, j), inv_dt);
      lin.rhs[r1] = phi_c * inv_dt;

      trip.emplace_back(r2, mu_idx(i, j), 1.0);
      double diag_u = -0.5 * gb * gb;
      double rhs2 = gb * s.q(i, j) - 0.5 * gb * gb * phi_c;

      const int nbs[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
      double diag_mu = 0.0;
      for (int k = 0; k < 4; ++k) {
        const int ni = nbs[k][0];
        const int nj = nbs[k][1];
        const double inv_d2 = k < 2 ? idx2 : idy2;
        const bool inside = ni >= 0 && ni < g.Nx && nj >= 0 && nj < g.Ny;
        if (inside) {
          // Mass: M Laplacian of mu with zero-flux walls.
          trip.emplace_back(r1, mu_idx(ni, nj), -M * inv_d2);
          diag_mu += M * inv_d2;
          // Chemical potential: -K Laplacian of phi^{n+1/2}.
          trip.emplace_back(r2, phi_idx(ni, nj), 0.5 * K * inv_d2);
          diag_u -= 0.5 * K * inv_d2;
          rhs2 -= 0.5 * K * inv_d2 * (s.phi(ni, nj) - phi_c);
        } else if (dynamic && nj < 0) {
          trip.emplace_back(r2, ghost_idx(i), 0.5 * K * inv_d2);
          diag_u -= 0.5 * K * inv_d2;
          rhs2 -= 0.5 * K * inv_d2 * (state.ghost_bottom[static_cast<std::size_t>(i)] - phi_c);
        }
      }
      trip.emplace_back(r1, mu_idx(i, j), diag_mu);
      trip.emplace_back(r2, phi_idx(i, j), diag_u);
      lin.rhs[r2] = rhs2;
    }
  }

  if (dynamic) {
    const double gi = ext.gamma_inv_bar;
    const double alpha = params.alpha;
    const double kdy = K / (2.0 * g.dy());
    for (int i = 0; i < g.Nx; ++i) {
      const int r3 = ghost_idx(i);
      const double ghost = state.ghost_bottom[static_cast<std::size_t>(i)];
      const double first = s.phi(i, 0);
      const double wall = 0.5 * (ghost + first);
      trip.emplace_back(r3, ghost_idx(i), 0.5 * gi * inv_dt + 0.25 * alpha + kdy);
      trip.emplace_back(r3, phi_idx(i, 0), 0.5 * gi * inv_dt + 0.25 * alpha - kdy);
      lin.rhs[r3] = gi * inv_dt * wall - 0.5 * alpha * wall + alpha * bdata.h1(i, 0) + bdata.h2(i, 0) +
                    kdy * (first - ghost);
    }
  }

  lin.op = SparseMatrix(static_cast<Eigen::Index>(n_unknowns), static_cast<Eigen::Index>(n_unknowns));
  lin.op.setFromTriplets(trip.begin(), trip.end());
  lin.op.makeCompressed();
  for (Eigen::Index k = 0; k < lin.rhs.size(); ++k) {
    if (!std::isfinite(lin.rhs[k])) throw AssemblyError("reference solver: non-finite right-hand side");
  }

  ReferenceStepResult out;
  out.report.g_floor_hits = ext.g_floor_hits;
  const Eigen::VectorXd x = solver.solve(lin, opts, out.report);

  CellField phi_next(g);
  out.mu = CellField(g);
  for (std::size_t c = 0; c < N; ++c) {
    phi_next[c] = x[static_cast<Eigen::Index>(c)];
    out.mu[c] = x[static_cast<Eigen::Index>(N + c)];
  }
  CellField q_next = update_q(s, phi_next, ext.g_bar);
  out.state.base = SimState{s.n + 1, s.t + dt, std::move(phi_next), std::move(q_next), s.phi};
  if (dynamic) {
    out.state.ghost_bottom.resize(static_cast<std::size_t>(g.Nx));
    for (int i = 0; i < g.Nx; ++i) out.state.ghost_bottom[static_cast<std::size_t>(i)] = x[ghost_idx(i)];
  }
  return out;
}

double reference_energy(const ReferenceState& state, const PhysParams& params, const BoundaryData& bdata) {
  const SimState& s = state.base;
  const GridSpec& g = s.grid();
  double bulk = 0.0;
  for (double q : s.q.values()) bulk += 0.5 * q * q;
  double grad = 0.0;
  const FaceArray dx = diff_x(s.phi);
  const FaceArray dy = diff_y(s.phi);
  for (double v : dx.values()) grad += v * v;
  for (double v : dy.values()) grad += v * v;
  double e = g.cell_area() * (bulk + 0.5 * params.K * grad);
  if (!state.ghost_bottom.empty()) {
    double wall = 0.0;
    for (int i = 0; i < g.Nx; ++i) {
      const double ghost = state.ghost_bottom[static_cast<std::size_t>(i)];
      const double d = (s.phi(i, 0) - ghost) / g.dy();
      const double b = 0.5 * (s.phi(i, 0) + ghost);
      const double h1 = bdata.h1(i, 0);
      wall += 0.5 * params.K * g.dy() * d * d + 0.5 * params.alpha * (b - h1) * (b - h1) - bdata.h2(i, 0) * b;
    }
    e += g.dx() * wall;
  }
  return e;
}

}  // namespace opbde
