#pragma once

// Reproduction harness: restricted L2 comparisons between the extended and
// reference solvers, the discrete energy-law audit, contact-angle
// measurement and parameter sweeps.

#include <string>
#include <vector>

#include "opbde/geometry.hpp"
#include "opbde/model.hpp"
#include "opbde/scheme.hpp"

namespace opbde {

/// sqrt(dx dy sum_{psi >= threshold} (a - b)^2).
double l2_error_restricted(const CellField& phi_ext, const CellField& phi_ref, const CellField& psi,
                           double threshold = 0.5);

/// Copies a field from a sub-grid into an aligned larger grid (same spacing,
/// cell offsets integral); cells not covered take fill. Throws DimensionError
/// if the grids are not aligned.
CellField embed_aligned(const CellField& sub, const GridSpec& target, double fill = 0.0);

/// Inverse of embed_aligned: samples the cells of sub_grid out of a field on
/// an aligned larger grid.
CellField restrict_aligned(const CellField& field, const GridSpec& sub_grid);

struct EnergyLawTerms {
  double energy_old = 0.0;
  double energy_new = 0.0;
  /// (F^{n+1} - F^n) / dt.
  double lhs = 0.0;
  /// Bulk dissipation (D(chi mu*), A(psi M) D(chi mu*)), >= 0.
  double bulk_dissipation = 0.0;
  /// Boundary relaxation dissipation sum_f |D psi| gamma_inv (A dphi/dt)^2 dx dy, >= 0.
  double wall_dissipation = 0.0;
  double pumped_power = 0.0;
  /// -bulk_dissipation - wall_dissipation - pumped_power.
  double rhs = 0.0;
  double residual = 0.0;
};

EnergyLawTerms energy_law_terms(const StepAudit& audit, const EmbeddingField& embedding, const PhysParams& params,
                                const BoundaryData& bdata);

inline double energy_law_residual(const StepAudit& audit, const EmbeddingField& embedding,
                                  const PhysParams& params, const BoundaryData& bdata) {
  return energy_law_terms(audit, embedding, params, bdata).residual;
}

/// Substrate curve y = y0 + amplitude cos(2 pi x / wavelength); flat when
/// amplitude is zero. The droplet sits above it.
struct Substrate {
  double y0 = 0.0;
  double amplitude = 0.0;
  double wavelength = 1.0;

  double height(double x) const;
  double slope(double x) const;
};

struct CircleFit {
  double cx = 0.0;
  double cy = 0.0;
  double radius = 0.0;
  std::size_t points = 0;
};

/// Points where phi changes sign along grid lines, by linear interpolation.
std::vector<Point> zero_contour_points(const CellField& phi);

/// Algebraic least-squares circle through the points.
CircleFit fit_circle(const std::vector<Point>& points);

struct ContactAngle {
  double degrees = 0.0;
  double left_degrees = 0.0;
  double right_degrees = 0.0;
  CircleFit circle;
};

/// Contact angle (through the phi > 0 phase) between a circle fitted to the
/// zero contour, restricted to points whose height above the substrate is in
/// [band_min, band_max], and the substrate; average of both contact lines.
ContactAngle contact_angle(const CellField& phi, const Substrate& substrate, double band_min, double band_max);

struct ComparisonReport {
  std::vector<double> times;
  std::vector<double> l2_errors;
  double eps = 0.0;
  std::string config_digest;
};

}  // namespace opbde
