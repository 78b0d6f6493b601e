#include "opbde/model.hpp"

#include <cmath>
#include <sstream>

#include "opbde/errors.hpp"

namespace opbde {

void PhysParams::validate() const {
  auto fail = [](const char* key, const char* rule) {
    throw ParameterError(std::string(key) + " must be " + rule);
  };
  if (!(K > 0.0)) fail("K", "positive");
  if (!(M > 0.0)) fail("M", "positive");
  if (!(gamma_inv >= 0.0)) fail("gamma_inv", "non-negative");
  if (!(alpha >= 0.0)) fail("alpha", "non-negative");
  if (!(A >= 0.0)) fail("A", "non-negative");
  if (!(eps > 0.0)) fail("eps", "positive");
}

BoundaryData BoundaryData::zero(const GridSpec& grid) { return constant(grid, 0.0, 0.0, 0.0); }

BoundaryData BoundaryData::constant(const GridSpec& grid, double h1, double h2, double h3) {
  return BoundaryData{CellField(grid, h1), CellField(grid, h2), CellField(grid, h3)};
}

double f_bulk(double phi, Potential) {
  const double s = phi * phi - 1.0;
  return 0.25 * s * s;
}

double f_prime(double phi, Potential) { return phi * phi * phi - phi; }

GValue g_eval(double phi, double A, Potential p) {
  const double radicand = 2.0 * f_bulk(phi, p) + 2.0 * A;
  const double root = radicand > 0.0 ? std::sqrt(radicand) : 0.0;
  if (root < kGFloor) return {f_prime(phi, p) / kGFloor, true};
  return {f_prime(phi, p) / root, false};
}

CellField q_init(const CellField& phi, double A, Potential p) {
  const GridSpec& g = phi.grid();
  CellField q(g);
  for (int j = 0; j < g.Ny; ++j) {
    for (int i = 0; i < g.Nx; ++i) {
      const double radicand = 2.0 * f_bulk(phi(i, j), p) + 2.0 * A;
      if (radicand < 0.0) {
        std::ostringstream os;
        os << "q_init: 2f + 2A = " << radicand << " < 0 at cell (" << i << ", " << j << ")";
        throw ParameterError(os.str());
      }
      q(i, j) = std::sqrt(radicand);
    }
  }
  return q;
}

SimState initial_state(CellField phi, const PhysParams& params) {
  CellField q = q_init(phi, params.A, params.potential);
  return SimState{0, 0.0, std::move(phi), std::move(q), std::nullopt};
}

double discrete_energy(const CellField& phi, const CellField& q, const EmbeddingField& embedding,
                       const PhysParams& params, const BoundaryData& bdata) {
  const GridSpec& g = phi.grid();
  require_same_grid(g, q.grid(), "discrete_energy");
  require_same_grid(g, embedding.grid(), "discrete_energy");
  require_same_grid(g, bdata.h1.grid(), "discrete_energy");

  double bulk = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k) bulk += 0.5 * embedding.psi[k] * q[k] * q[k];

  const FaceArray apsi_x = avg_x(embedding.psi);
  const FaceArray apsi_y = avg_y(embedding.psi);
  const FaceArray dphi_x = diff_x(phi);
  const FaceArray dphi_y = diff_y(phi);
  double grad = 0.0;
  for (std::size_t k = 0; k < apsi_x.size(); ++k) grad += apsi_x.values()[k] * dphi_x.values()[k] * dphi_x.values()[k];
  for (std::size_t k = 0; k < apsi_y.size(); ++k) grad += apsi_y.values()[k] * dphi_y.values()[k] * dphi_y.values()[k];

  double wall = 0.0;
  auto add_wall = [&](const FaceArray& w, const FaceArray& aphi, const FaceArray& ah1, const FaceArray& ah2) {
    for (std::size_t k = 0; k < w.size(); ++k) {
      const double wk = w.values()[k];
      if (wk == 0.0) continue;
      const double e = aphi.values()[k] - ah1.values()[k];
      wall += wk * (0.5 * params.alpha * e * e - ah2.values()[k] * aphi.values()[k]);
    }
  };
  add_wall(embedding.grad_psi_abs.x, avg_x(phi), avg_x(bdata.h1), avg_x(bdata.h2));
  add_wall(embedding.grad_psi_abs.y, avg_y(phi), avg_y(bdata.h1), avg_y(bdata.h2));

  return g.cell_area() * (bulk + 0.5 * params.K * grad + wall);
}

double discrete_volume(const CellField& phi, const CellField& psi) {
  require_same_grid(phi.grid(), psi.grid(), "discrete_volume");
  double s = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k) s += psi[k] * phi[k];
  return s * phi.grid().cell_area();
}

CellField face_weighted_sum(const FaceField& grad_psi_abs, const CellField& h) {
  const GridSpec& g = h.grid();
  require_same_grid(g, grad_psi_abs.x.grid(), "face_weighted_sum");
  const FaceArray ahx = avg_x(h);
  const FaceArray ahy = avg_y(h);
  const FaceArray& wx = grad_psi_abs.x;
  const FaceArray& wy = grad_psi_abs.y;
  CellField out(g);
  for (int j = 0; j < g.Ny; ++j) {
    for (int i = 0; i < g.Nx; ++i) {
      out(i, j) = wx(i, j) * ahx(i, j) + wx(i + 1, j) * ahx(i + 1, j) + wy(i, j) * ahy(i, j) +
                  wy(i, j + 1) * ahy(i, j + 1);
    }
  }
  return out;
}

double pumped_power(const CellField& mu_star, const CellField& chi, const FaceField& grad_psi_abs,
                    const CellField& h3) {
  require_same_grid(mu_star.grid(), chi.grid(), "pumped_power");
  const CellField s3 = face_weighted_sum(grad_psi_abs, h3);
  double total = 0.0;
  for (std::size_t k = 0; k < mu_star.size(); ++k) total += 0.5 * mu_star[k] * chi[k] * s3[k];
  return total * mu_star.grid().cell_area();
}

}  // namespace opbde
