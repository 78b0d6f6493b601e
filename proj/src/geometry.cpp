#include "opbde/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "opbde/errors.hpp"

namespace opbde {
namespace {

double rect_sdf(const Rect& r, double x, double y) {
  const double cx = 0.5 * (r.x_min + r.x_max);
  const double cy = 0.5 * (r.y_min + r.y_max);
  const double qx = std::abs(x - cx) - 0.5 * (r.x_max - r.x_min);
  const double qy = std::abs(y - cy) - 0.5 * (r.y_max - r.y_min);
  const double ox = std::max(qx, 0.0);
  const double oy = std::max(qy, 0.0);
  return std::hypot(ox, oy) + std::min(std::max(qx, qy), 0.0);
}

double circle_sdf(const Circle& c, double x, double y) { return std::hypot(x - c.cx, y - c.cy) - c.radius; }

// CSG on signed distances: intersection = max, subtraction = max(a, -b).
double clipped(double r, const std::optional<Rect>& clip, double x, double y) {
  return clip ? std::max(r, rect_sdf(*clip, x, y)) : r;
}

struct SdfVisitor {
  double x;
  double y;

  double operator()(const FullRectangle& s) const { return rect_sdf(s.extent, x, y); }
  double operator()(const HalfPlaneSubstrate& s) const { return clipped(s.y0 - y, s.clip, x, y); }
  double operator()(const SinusoidalSubstrate& s) const { return clipped(s.height(x) - y, s.clip, x, y); }
  double operator()(const CSGPolygon& s) const {
    double r = rect_sdf(s.extent, x, y);
    for (const Circle& h : s.holes) r = std::max(r, -circle_sdf(h, x, y));
    for (const Rect& c : s.corner_cuts) r = std::max(r, -rect_sdf(c, x, y));
    return r;
  }
  double operator()(const Disk& s) const { return circle_sdf(s.circle, x, y); }
};

struct BoxVisitor {
  std::optional<Rect> operator()(const FullRectangle& s) const { return s.extent; }
  std::optional<Rect> operator()(const HalfPlaneSubstrate& s) const { return s.clip; }
  std::optional<Rect> operator()(const SinusoidalSubstrate& s) const { return s.clip; }
  std::optional<Rect> operator()(const CSGPolygon& s) const { return s.extent; }
  std::optional<Rect> operator()(const Disk& s) const {
    const Circle& c = s.circle;
    return Rect{c.cx - c.radius, c.cx + c.radius, c.cy - c.radius, c.cy + c.radius};
  }
};

}  // namespace

double SinusoidalSubstrate::height(double x) const {
  return y0 + amplitude * std::cos(2.0 * std::numbers::pi * x / wavelength);
}

double SinusoidalSubstrate::slope(double x) const {
  const double k = 2.0 * std::numbers::pi / wavelength;
  return -amplitude * k * std::sin(k * x);
}

double signed_distance(const ShapeSpec& shape, double x, double y) { return std::visit(SdfVisitor{x, y}, shape); }

Point nearest_boundary_point(const ShapeSpec& shape, Point p) {
  // Newton projection along the distance gradient; exact in one step where
  // the signed distance is exact, a few steps near CSG seams.
  const double h = 1e-7;
  for (int it = 0; it < 8; ++it) {
    const double r = signed_distance(shape, p.x, p.y);
    if (std::abs(r) < 1e-13) break;
    double gx = (signed_distance(shape, p.x + h, p.y) - signed_distance(shape, p.x - h, p.y)) / (2 * h);
    double gy = (signed_distance(shape, p.x, p.y + h) - signed_distance(shape, p.x, p.y - h)) / (2 * h);
    const double n2 = gx * gx + gy * gy;
    if (n2 < 1e-20) break;
    p.x -= r * gx / n2;
    p.y -= r * gy / n2;
  }
  return p;
}

std::optional<Rect> bounding_box(const ShapeSpec& shape) { return std::visit(BoxVisitor{}, shape); }

void check_clearance(const ShapeSpec& shape, const GridSpec& grid, double eps) {
  const auto box = bounding_box(shape);
  if (!box) return;
  const double clearance = std::min({box->x_min - grid.x_min, grid.x_max() - box->x_max, box->y_min - grid.y_min,
                                     grid.y_max() - box->y_max});
  if (clearance < 3.0 * eps) {
    std::ostringstream os;
    os << "embedded domain clearance " << clearance << " is below 3*eps = " << 3.0 * eps;
    throw ParameterError(os.str());
  }
}

double psi_profile(double r, double eps) {
  const double z = 6.0 * r / eps;
  if (z > 700.0) return std::numeric_limits<double>::min();
  const double psi = 1.0 / (std::exp(z) + 1.0);
  return std::max(psi, std::numeric_limits<double>::min());
}

CellField build_psi(const ShapeSpec& shape, const GridSpec& grid, double eps) {
  if (!(eps > 0.0)) throw ParameterError("eps must be positive");
  CellField psi(grid);
  for (int j = 0; j < grid.Ny; ++j) {
    for (int i = 0; i < grid.Nx; ++i) psi(i, j) = psi_profile(signed_distance(shape, grid.x(i), grid.y(j)), eps);
  }
  return psi;
}

CellField build_chi(const CellField& psi) {
  CellField chi(psi.grid());
  for (std::size_t k = 0; k < psi.size(); ++k) chi[k] = 1.0 / (psi[k] + (1.0 - psi[k]) * kChiFloor);
  return chi;
}

FaceField build_grad_psi_abs(const CellField& psi) {
  FaceField out{diff_x(psi), diff_y(psi)};
  for (double& v : out.x.values()) v = std::abs(v);
  for (double& v : out.y.values()) v = std::abs(v);
  return out;
}

EmbeddingField make_embedding(const ShapeSpec& shape, const GridSpec& grid, double eps) {
  return make_embedding(build_psi(shape, grid, eps));
}

EmbeddingField make_embedding(CellField psi) {
  for (std::size_t k = 0; k < psi.size(); ++k) {
    if (!(psi[k] > 0.0 && psi[k] <= 1.0)) throw ParameterError("psi must lie in (0, 1]");
  }
  CellField chi = build_chi(psi);
  FaceField grad = build_grad_psi_abs(psi);
  return EmbeddingField{std::move(psi), std::move(chi), std::move(grad)};
}

EmbeddingField uniform_embedding(const GridSpec& grid) { return make_embedding(CellField(grid, 1.0)); }

CellField boundary_data_field(const BoundaryProfile& hspec, const ShapeSpec& shape, const GridSpec& grid) {
  CellField out(grid);
  for (int j = 0; j < grid.Ny; ++j) {
    for (int i = 0; i < grid.Nx; ++i) {
      const Point b = nearest_boundary_point(shape, {grid.x(i), grid.y(j)});
      out(i, j) = hspec(b.x, b.y);
    }
  }
  return out;
}

CellField boundary_data_field(double value, const GridSpec& grid) { return CellField(grid, value); }

}  // namespace opbde
