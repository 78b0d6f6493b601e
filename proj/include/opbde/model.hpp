#pragma once

// Physics layer: bulk potential, the energy-quadratization variable
// q = sqrt(2 f + 2 A), the discrete free energy of the extended model, the
// psi-weighted volume and the pumped-power term of the discrete energy law.

#include <cstddef>
#include <optional>

#include "opbde/geometry.hpp"
#include "opbde/grid.hpp"

namespace opbde {

enum class Potential { quartic_double_well };

struct PhysParams {
  double K = 1e-4;
  double M = 0.01;
  /// 1/Gamma; zero encodes Gamma -> infinity.
  double gamma_inv = 0.0;
  double alpha = 0.0;
  double A = 0.0;
  double eps = 1e-2;
  Potential potential = Potential::quartic_double_well;

  void validate() const;
};

struct BoundaryData {
  CellField h1;
  CellField h2;
  CellField h3;

  static BoundaryData zero(const GridSpec& grid);
  static BoundaryData constant(const GridSpec& grid, double h1, double h2, double h3);
};

struct SimState {
  long n = 0;
  double t = 0.0;
  CellField phi;
  CellField q;
  std::optional<CellField> phi_prev;

  const GridSpec& grid() const { return phi.grid(); }
};

double f_bulk(double phi, Potential p = Potential::quartic_double_well);
double f_prime(double phi, Potential p = Potential::quartic_double_well);

/// Floor applied to sqrt(2 f + 2 A) in g.
inline constexpr double kGFloor = 1e-12;

struct GValue {
  double value = 0.0;
  bool floored = false;
};

/// g = f' / sqrt(2 f + 2 A) with the denominator floored at kGFloor.
GValue g_eval(double phi, double A, Potential p = Potential::quartic_double_well);
inline double g_fn(double phi, double A, Potential p = Potential::quartic_double_well) {
  return g_eval(phi, A, p).value;
}

/// q = sqrt(2 f(phi) + 2 A) cellwise; throws ParameterError naming the first
/// cell with a negative radicand.
CellField q_init(const CellField& phi, double A, Potential p = Potential::quartic_double_well);

/// Initial state with q consistent with phi.
SimState initial_state(CellField phi, const PhysParams& params);

/// dx dy * [ sum_c 1/2 psi q^2 + 1/2 K sum_faces A(psi) (D phi)^2
///           + sum_faces |D psi| (1/2 alpha (A phi - A h1)^2 - A h2 A phi) ].
double discrete_energy(const CellField& phi, const CellField& q, const EmbeddingField& embedding,
                       const PhysParams& params, const BoundaryData& bdata);

/// (psi phi, 1).
double discrete_volume(const CellField& phi, const CellField& psi);

/// dx dy * sum_c 1/2 mu* chi (sum over the four faces of |D psi| A(h3)).
double pumped_power(const CellField& mu_star, const CellField& chi, const FaceField& grad_psi_abs,
                    const CellField& h3);

/// Cellwise sum over the four faces of |D psi| * A(h): the discrete delta
/// layer weight applied to boundary data h.
CellField face_weighted_sum(const FaceField& grad_psi_abs, const CellField& h);

}  // namespace opbde
