#include "opbde/scheme.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <vector>

#include "opbde/errors.hpp"

namespace opbde {
namespace {

struct Neighbor {
  int di;
  int dj;
};

constexpr std::array<Neighbor, 4> kNeighbors{{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};

// |D psi| on the face shared by (i, j) and (i + di, j + dj).
double face_weight(const FaceField& w, int i, int j, const Neighbor& nb) {
  if (nb.di < 0) return w.x(i, j);
  if (nb.di > 0) return w.x(i + 1, j);
  if (nb.dj < 0) return w.y(i, j);
  return w.y(i, j + 1);
}

class TripletSink {
 public:
  TripletSink(std::size_t reserve) { triplets_.reserve(reserve); }

  void add(std::size_t row, std::size_t col, double value, int i, int j) {
    if (!std::isfinite(value)) {
      std::ostringstream os;
      os << "non-finite coefficient " << value << " at cell (" << i << ", " << j << ")";
      throw AssemblyError(os.str());
    }
    triplets_.emplace_back(static_cast<int>(row), static_cast<int>(col), value);
  }

  SparseMatrix build(std::size_t n) const {
    SparseMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    m.setFromTriplets(triplets_.begin(), triplets_.end());
    m.makeCompressed();
    return m;
  }

 private:
  std::vector<Eigen::Triplet<double, int>> triplets_;
};

}  // namespace

double extrapolate_value(double now, double prev, long n) { return n == 0 ? now : 1.5 * now - 0.5 * prev; }

Extrapolation extrapolate(const SimState& state, const PhysParams& params) {
  if (state.n >= 1 && !state.phi_prev) {
    throw ParameterError("extrapolate: state at n >= 1 must carry phi_prev");
  }
  Extrapolation ext;
  ext.g_bar = CellField(state.grid());
  for (std::size_t k = 0; k < state.phi.size(); ++k) {
    const GValue now = g_eval(state.phi[k], params.A, params.potential);
    ext.g_floor_hits += now.floored ? 1 : 0;
    double prev = now.value;
    if (state.n >= 1) {
      const GValue before = g_eval((*state.phi_prev)[k], params.A, params.potential);
      ext.g_floor_hits += before.floored ? 1 : 0;
      prev = before.value;
    }
    ext.g_bar[k] = extrapolate_value(now.value, prev, state.n);
  }
  // Constant coefficients extrapolate to themselves.
  ext.gamma_inv_bar = extrapolate_value(params.gamma_inv, params.gamma_inv, state.n);
  ext.M_bar = extrapolate_value(params.M, params.M, state.n);
  return ext;
}

StepSystem assemble(const SimState& state, const PhysParams& params, const EmbeddingField& embedding,
                    const BoundaryData& bdata, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("time step dt must be positive");
  params.validate();
  const GridSpec& g = state.grid();
  require_same_grid(g, state.q.grid(), "assemble");
  require_same_grid(g, embedding.grid(), "assemble");
  require_same_grid(g, bdata.h1.grid(), "assemble");
  require_same_grid(g, bdata.h2.grid(), "assemble");
  require_same_grid(g, bdata.h3.grid(), "assemble");

  StepSystem sys;
  sys.grid = g;
  sys.dt = dt;
  sys.ext = extrapolate(state, params);
  sys.layout.cells = g.cells();
  const UnknownLayout& L = sys.layout;
  const std::size_t n = L.size();

  const CellField& psi = embedding.psi;
  const CellField& chi = embedding.chi;
  const FaceField& w = embedding.grad_psi_abs;
  const CellField& phi = state.phi;
  const CellField& q = state.q;
  const CellField& gbar = sys.ext.g_bar;
  const CellField& h1 = bdata.h1;
  const CellField& h2 = bdata.h2;
  const CellField s3 = face_weighted_sum(w, bdata.h3);

  const double K = params.K;
  const double alpha = params.alpha;
  const double M = sys.ext.M_bar;
  const double gi = sys.ext.gamma_inv_bar;
  const double inv_dt = 1.0 / dt;
  const double inv_dx2 = 1.0 / (g.dx() * g.dx());
  const double inv_dy2 = 1.0 / (g.dy() * g.dy());

  LinearSystem& lin = sys.linear;
  lin.rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  lin.row_scale = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
  lin.col_scale = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
  TripletSink sink(n * 6);

  for (int j = 0; j < g.Ny; ++j) {
    for (int i = 0; i < g.Nx; ++i) {
      const std::size_t c = g.index(i, j);
      const std::size_t r1 = L.phi(c);
      const std::size_t r2 = L.mu(c);

      // Mass rows: boundary faces carry zero flux through the mirrored ghosts.
      double mu_diag = 0.0;
      sink.add(r1, L.phi(c), inv_dt, i, j);
      // Chemical-potential rows.
      double phi_diag = -0.5 * psi[c] * gbar[c] * gbar[c];
      double rhs2 = psi[c] * gbar[c] * q[c] - 0.5 * psi[c] * gbar[c] * gbar[c] * phi[c];
      sink.add(r2, L.mu(c), 1.0, i, j);

      for (const Neighbor& nb : kNeighbors) {
        const int ni = i + nb.di;
        const int nj = j + nb.dj;
        if (ni < 0 || ni >= g.Nx || nj < 0 || nj >= g.Ny) continue;
        const std::size_t cn = g.index(ni, nj);
        const double inv_d2 = nb.di != 0 ? inv_dx2 : inv_dy2;
        const double apsi = 0.5 * (psi[c] + psi[cn]);

        const double flux = chi[c] * apsi * M * inv_d2;
        sink.add(r1, L.mu(cn), -flux * chi[cn], i, j);
        mu_diag += flux * chi[c];

        const double wf = face_weight(w, i, j, nb);
        const double kc = K * apsi * inv_d2;
        const double bc = 0.5 * wf * (0.25 * alpha + 0.5 * gi * inv_dt);
        sink.add(r2, L.phi(cn), 0.5 * kc - bc, i, j);
        phi_diag += -0.5 * kc - bc;

        const double phi_sum = phi[c] + phi[cn];
        const double ah1 = 0.5 * (h1[c] + h1[cn]);
        const double ah2 = 0.5 * (h2[c] + h2[cn]);
        rhs2 += -0.5 * kc * (phi[cn] - phi[c]) +
                0.5 * wf * (0.25 * alpha * phi_sum - alpha * ah1 - ah2 - 0.5 * gi * inv_dt * phi_sum);
      }
      sink.add(r1, L.mu(c), mu_diag, i, j);
      sink.add(r2, L.phi(c), phi_diag, i, j);

      lin.rhs[static_cast<Eigen::Index>(r1)] = phi[c] * inv_dt - 0.5 * chi[c] * s3[c];
      lin.rhs[static_cast<Eigen::Index>(r2)] = rhs2;
      if (!std::isfinite(lin.rhs[static_cast<Eigen::Index>(r1)]) || !std::isfinite(rhs2)) {
        std::ostringstream os;
        os << "non-finite right-hand side at cell (" << i << ", " << j << ")";
        throw AssemblyError(os.str());
      }
      // Equilibration: the mass row divided by chi, mu* measured as chi mu*.
      lin.row_scale[static_cast<Eigen::Index>(r1)] = 1.0 / chi[c];
      lin.col_scale[static_cast<Eigen::Index>(L.mu(c))] = 1.0 / chi[c];
    }
  }
  lin.op = sink.build(n);
  return sys;
}

SolvedStep solve(const StepSystem& system, const SolverOptions& opts) {
  LinearSolver solver;
  return solve(system, opts, solver);
}

SolvedStep solve(const StepSystem& system, const SolverOptions& opts, LinearSolver& solver) {
  SolvedStep out;
  out.report.g_floor_hits = system.ext.g_floor_hits;
  const Eigen::VectorXd x = solver.solve(system.linear, opts, out.report);
  const UnknownLayout& L = system.layout;
  out.phi_next = CellField(system.grid);
  out.mu_star = CellField(system.grid);
  for (std::size_t c = 0; c < L.cells; ++c) {
    out.phi_next[c] = x[static_cast<Eigen::Index>(L.phi(c))];
    out.mu_star[c] = x[static_cast<Eigen::Index>(L.mu(c))];
  }
  return out;
}

CellField update_q(const SimState& state, const CellField& phi_next, const CellField& g_bar) {
  require_same_grid(state.grid(), phi_next.grid(), "update_q");
  require_same_grid(state.grid(), g_bar.grid(), "update_q");
  CellField q(state.grid());
  for (std::size_t k = 0; k < q.size(); ++k) q[k] = state.q[k] + g_bar[k] * (phi_next[k] - state.phi[k]);
  return q;
}

namespace {

StepResult finish_step(const SimState& state, const StepSystem& sys, SolvedStep solved) {
  CellField q_next = update_q(state, solved.phi_next, sys.ext.g_bar);
  StepResult out;
  out.report = solved.report;
  out.audit = StepAudit{state.phi, solved.phi_next, state.q, q_next, std::move(solved.mu_star), sys.dt,
                        sys.ext.gamma_inv_bar, sys.ext.M_bar};
  out.state = SimState{state.n + 1, state.t + sys.dt, std::move(solved.phi_next), std::move(q_next), state.phi};
  return out;
}

}  // namespace

StepResult step(const SimState& state, const PhysParams& params, const EmbeddingField& embedding,
                const BoundaryData& bdata, double dt, const SolverOptions& opts) {
  const StepSystem sys = assemble(state, params, embedding, bdata, dt);
  return finish_step(state, sys, solve(sys, opts));
}

Stepper::Stepper(PhysParams params, EmbeddingField embedding, BoundaryData bdata, double dt, SolverOptions opts)
    : params_(params), embedding_(std::move(embedding)), bdata_(std::move(bdata)), dt_(dt), opts_(opts) {
  params_.validate();
  opts_.validate();
  if (!(dt_ > 0.0)) throw ParameterError("time step dt must be positive");
}

StepResult Stepper::advance(const SimState& state) {
  const StepSystem sys = assemble(state, params_, embedding_, bdata_, dt_);
  return finish_step(state, sys, solve(sys, opts_, solver_));
}

}  // namespace opbde
