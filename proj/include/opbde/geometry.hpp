#pragma once

// Embedded-domain geometry: signed distances for a small catalogue of shapes,
// the diffuse characteristic function psi = 1/(exp(6 r/eps) + 1), its
// regularised reciprocal chi, face-wise |D psi| and boundary data extended
// constantly along the normal.

#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "opbde/grid.hpp"

namespace opbde {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Rect {
  double x_min = -0.5;
  double x_max = 0.5;
  double y_min = -0.5;
  double y_max = 0.5;
};

struct Circle {
  double cx = 0.0;
  double cy = 0.0;
  double radius = 0.1;
};

struct FullRectangle {
  Rect extent;
};

/// Region above y = y0, optionally intersected with a box.
struct HalfPlaneSubstrate {
  double y0 = 0.0;
  std::optional<Rect> clip;
};

/// Region above y = y0 + amplitude * cos(2 pi x / wavelength), optionally
/// intersected with a box. The signed distance uses the vertical offset to the
/// substrate curve.
struct SinusoidalSubstrate {
  double y0 = 0.0;
  double amplitude = 0.05;
  double wavelength = 1.0;
  std::optional<Rect> clip;

  double height(double x) const;
  double slope(double x) const;
};

/// A box with circular holes and rectangular notches removed from it.
struct CSGPolygon {
  Rect extent;
  std::vector<Circle> holes;
  std::vector<Rect> corner_cuts;
};

struct Disk {
  Circle circle;
};

using ShapeSpec = std::variant<FullRectangle, HalfPlaneSubstrate, SinusoidalSubstrate, CSGPolygon, Disk>;

/// Negative inside the embedded domain, positive outside, zero on its boundary.
double signed_distance(const ShapeSpec& shape, double x, double y);

/// Projection of p onto the zero level set of the signed distance.
Point nearest_boundary_point(const ShapeSpec& shape, Point p);

/// Bounding box of the embedded domain, if it is bounded.
std::optional<Rect> bounding_box(const ShapeSpec& shape);

/// Throws ParameterError if the embedded domain comes closer than 3 eps to
/// the edge of the computational rectangle (bounded shapes only).
void check_clearance(const ShapeSpec& shape, const GridSpec& grid, double eps);

/// Floor of the regularised reciprocal: chi = 1 / (psi + (1 - psi) * floor).
inline constexpr double kChiFloor = 1e-6;

/// psi at signed distance r; saturates instead of overflowing.
double psi_profile(double r, double eps);

CellField build_psi(const ShapeSpec& shape, const GridSpec& grid, double eps);
CellField build_chi(const CellField& psi);
FaceField build_grad_psi_abs(const CellField& psi);

struct EmbeddingField {
  CellField psi;
  CellField chi;
  FaceField grad_psi_abs;

  const GridSpec& grid() const { return psi.grid(); }
};

EmbeddingField make_embedding(const ShapeSpec& shape, const GridSpec& grid, double eps);
/// Embedding from an already sampled psi field.
EmbeddingField make_embedding(CellField psi);
/// psi == 1 everywhere: no diffuse boundary inside the grid.
EmbeddingField uniform_embedding(const GridSpec& grid);

/// Boundary data h(x, y), evaluated on the embedded boundary.
using BoundaryProfile = std::function<double(double x, double y)>;

/// Each cell takes the value of h at its nearest boundary point.
CellField boundary_data_field(const BoundaryProfile& hspec, const ShapeSpec& shape, const GridSpec& grid);
CellField boundary_data_field(double value, const GridSpec& grid);

}  // namespace opbde
