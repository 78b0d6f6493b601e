#include "opbde/verify.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "opbde/errors.hpp"

namespace opbde {
namespace {

struct Offset {
  int di;
  int dj;
};

Offset aligned_offset(const GridSpec& sub, const GridSpec& target) {
  const double rdx = std::abs(sub.dx() - target.dx()) / target.dx();
  const double rdy = std::abs(sub.dy() - target.dy()) / target.dy();
  if (rdx > 1e-9 || rdy > 1e-9) throw DimensionError("grids are not aligned: cell sizes differ");
  const double ox = (sub.x_min - target.x_min) / target.dx();
  const double oy = (sub.y_min - target.y_min) / target.dy();
  const double rx = std::round(ox);
  const double ry = std::round(oy);
  if (std::abs(ox - rx) > 1e-6 || std::abs(oy - ry) > 1e-6) {
    throw DimensionError("grids are not aligned: origin offset is not a whole number of cells");
  }
  const Offset off{static_cast<int>(rx), static_cast<int>(ry)};
  if (off.di < 0 || off.dj < 0 || off.di + sub.Nx > target.Nx || off.dj + sub.Ny > target.Ny) {
    throw DimensionError("grids are not aligned: sub-grid extends past the target grid");
  }
  return off;
}

double deg(double rad) { return rad * 180.0 / std::numbers::pi; }

}  // namespace

double l2_error_restricted(const CellField& phi_ext, const CellField& phi_ref, const CellField& psi,
                           double threshold) {
  require_same_grid(phi_ext.grid(), phi_ref.grid(), "l2_error_restricted");
  require_same_grid(phi_ext.grid(), psi.grid(), "l2_error_restricted");
  double s = 0.0;
  for (std::size_t k = 0; k < psi.size(); ++k) {
    if (psi[k] >= threshold) {
      const double d = phi_ext[k] - phi_ref[k];
      s += d * d;
    }
  }
  return std::sqrt(s * psi.grid().cell_area());
}

CellField embed_aligned(const CellField& sub, const GridSpec& target, double fill) {
  const GridSpec& sg = sub.grid();
  const Offset off = aligned_offset(sg, target);
  CellField out(target, fill);
  for (int j = 0; j < sg.Ny; ++j) {
    for (int i = 0; i < sg.Nx; ++i) out(i + off.di, j + off.dj) = sub(i, j);
  }
  return out;
}

CellField restrict_aligned(const CellField& field, const GridSpec& sub_grid) {
  const Offset off = aligned_offset(sub_grid, field.grid());
  CellField out(sub_grid);
  for (int j = 0; j < sub_grid.Ny; ++j) {
    for (int i = 0; i < sub_grid.Nx; ++i) out(i, j) = field(i + off.di, j + off.dj);
  }
  return out;
}

EnergyLawTerms energy_law_terms(const StepAudit& audit, const EmbeddingField& embedding, const PhysParams& params,
                                const BoundaryData& bdata) {
  EnergyLawTerms t;
  t.energy_old = discrete_energy(audit.phi_old, audit.q_old, embedding, params, bdata);
  t.energy_new = discrete_energy(audit.phi_new, audit.q_new, embedding, params, bdata);
  t.lhs = (t.energy_new - t.energy_old) / audit.dt;

  const CellField chi_mu = hadamard(embedding.chi, audit.mu_star);
  const CellField psi_m = audit.M_bar * embedding.psi;
  for (const Axis axis : {Axis::x, Axis::y}) {
    const FaceArray d = axis == Axis::x ? diff_x(chi_mu) : diff_y(chi_mu);
    FaceArray flux = axis == Axis::x ? avg_x(psi_m) : avg_y(psi_m);
    flux *= d;
    t.bulk_dissipation += face_inner(d, flux);
  }

  CellField rate = audit.phi_new - audit.phi_old;
  rate *= 1.0 / audit.dt;
  if (audit.gamma_inv_bar != 0.0) {
    for (const Axis axis : {Axis::x, Axis::y}) {
      FaceArray a = axis == Axis::x ? avg_x(rate) : avg_y(rate);
      const FaceArray& w = axis == Axis::x ? embedding.grad_psi_abs.x : embedding.grad_psi_abs.y;
      FaceArray wa = a;
      wa *= w;
      t.wall_dissipation += audit.gamma_inv_bar * face_inner(wa, a);
    }
  }

  t.pumped_power = pumped_power(audit.mu_star, embedding.chi, embedding.grad_psi_abs, bdata.h3);
  t.rhs = -t.bulk_dissipation - t.wall_dissipation - t.pumped_power;
  t.residual = std::abs(t.lhs - t.rhs);
  return t;
}

double Substrate::height(double x) const {
  return y0 + amplitude * std::cos(2.0 * std::numbers::pi * x / wavelength);
}

double Substrate::slope(double x) const {
  const double k = 2.0 * std::numbers::pi / wavelength;
  return -amplitude * k * std::sin(k * x);
}

std::vector<Point> zero_contour_points(const CellField& phi) {
  const GridSpec& g = phi.grid();
  std::vector<Point> pts;
  auto crossing = [](double a, double b) { return (a < 0.0 && b >= 0.0) || (a >= 0.0 && b < 0.0); };
  for (int j = 0; j < g.Ny; ++j) {
    for (int i = 0; i + 1 < g.Nx; ++i) {
      const double a = phi(i, j);
      const double b = phi(i + 1, j);
      if (crossing(a, b)) pts.push_back({g.x(i) + g.dx() * a / (a - b), g.y(j)});
    }
  }
  for (int j = 0; j + 1 < g.Ny; ++j) {
    for (int i = 0; i < g.Nx; ++i) {
      const double a = phi(i, j);
      const double b = phi(i, j + 1);
      if (crossing(a, b)) pts.push_back({g.x(i), g.y(j) + g.dy() * a / (a - b)});
    }
  }
  return pts;
}

CircleFit fit_circle(const std::vector<Point>& points) {
  if (points.size() < 3) throw MeasurementError("circle fit needs at least 3 points");
  // x^2 + y^2 + D x + E y + F = 0, solved in the least-squares sense about the centroid.
  double mx = 0.0, my = 0.0;
  for (const Point& p : points) {
    mx += p.x;
    my += p.y;
  }
  mx /= static_cast<double>(points.size());
  my /= static_cast<double>(points.size());
  Eigen::MatrixXd A(static_cast<Eigen::Index>(points.size()), 3);
  Eigen::VectorXd b(static_cast<Eigen::Index>(points.size()));
  for (std::size_t k = 0; k < points.size(); ++k) {
    const double x = points[k].x - mx;
    const double y = points[k].y - my;
    A(static_cast<Eigen::Index>(k), 0) = x;
    A(static_cast<Eigen::Index>(k), 1) = y;
    A(static_cast<Eigen::Index>(k), 2) = 1.0;
    b[static_cast<Eigen::Index>(k)] = -(x * x + y * y);
  }
  const Eigen::Vector3d s = A.colPivHouseholderQr().solve(b);
  CircleFit fit;
  fit.cx = -0.5 * s[0] + mx;
  fit.cy = -0.5 * s[1] + my;
  const double r2 = 0.25 * (s[0] * s[0] + s[1] * s[1]) - s[2];
  if (!(r2 > 0.0)) throw MeasurementError("circle fit degenerated");
  fit.radius = std::sqrt(r2);
  fit.points = points.size();
  return fit;
}

ContactAngle contact_angle(const CellField& phi, const Substrate& substrate, double band_min, double band_max) {
  std::vector<Point> band;
  for (const Point& p : zero_contour_points(phi)) {
    const double h = p.y - substrate.height(p.x);
    if (h >= band_min && h <= band_max) band.push_back(p);
  }
  if (band.size() < 3) throw MeasurementError("no droplet interface found near the substrate");
  ContactAngle out;
  out.circle = fit_circle(band);
  const CircleFit& c = out.circle;

  // Roots of (x - cx)^2 + (s(x) - cy)^2 - R^2 on the substrate.
  auto F = [&](double x) {
    const double dy = substrate.height(x) - c.cy;
    return (x - c.cx) * (x - c.cx) + dy * dy - c.radius * c.radius;
  };
  const int samples = 4000;
  const double x0 = c.cx - 1.05 * c.radius;
  const double x1 = c.cx + 1.05 * c.radius;
  std::vector<double> roots;
  double xa = x0;
  double fa = F(xa);
  for (int k = 1; k <= samples; ++k) {
    const double xb = x0 + (x1 - x0) * k / samples;
    const double fb = F(xb);
    if ((fa < 0.0) != (fb < 0.0)) {
      double lo = xa, hi = xb, flo = fa;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = F(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    xa = xb;
    fa = fb;
  }
  if (roots.size() < 2) throw MeasurementError("fitted droplet circle does not intersect the substrate");

  auto angle_at = [&](double xp, bool right) {
    const double yp = substrate.height(xp);
    const double sl = substrate.slope(xp);
    const double tn = std::hypot(1.0, sl);
    const double tx = (right ? -1.0 : 1.0) / tn;
    const double ty = (right ? -sl : sl) / tn;
    const double nx = -sl / tn;
    const double ny = 1.0 / tn;
    double cxr = -(yp - c.cy) / c.radius;
    double cyr = (xp - c.cx) / c.radius;
    if (cxr * nx + cyr * ny < 0.0) {
      cxr = -cxr;
      cyr = -cyr;
    }
    return deg(std::acos(std::clamp(tx * cxr + ty * cyr, -1.0, 1.0)));
  };
  out.left_degrees = angle_at(roots.front(), false);
  out.right_degrees = angle_at(roots.back(), true);
  out.degrees = 0.5 * (out.left_degrees + out.right_degrees);
  return out;
}

}  // namespace opbde
