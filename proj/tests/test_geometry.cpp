#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "opbde/errors.hpp"
#include "opbde/geometry.hpp"

using namespace opbde;

namespace {

// Distance from p to a polyline sampled densely along a closed boundary.
double polyline_distance(const std::vector<Point>& poly, Point p) {
  double best = 1e300;
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const Point a = poly[k];
    const Point b = poly[(k + 1) % poly.size()];
    const double vx = b.x - a.x, vy = b.y - a.y;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    best = std::min(best, std::hypot(p.x - a.x - t * vx, p.y - a.y - t * vy));
  }
  return best;
}

std::vector<Point> square_outline(double h, int per_side) {
  std::vector<Point> pts;
  for (int k = 0; k < per_side; ++k) pts.push_back({-h + 2 * h * k / per_side, -h});
  for (int k = 0; k < per_side; ++k) pts.push_back({h, -h + 2 * h * k / per_side});
  for (int k = 0; k < per_side; ++k) pts.push_back({h - 2 * h * k / per_side, h});
  for (int k = 0; k < per_side; ++k) pts.push_back({-h, h - 2 * h * k / per_side});
  return pts;
}

std::vector<Point> circle_outline(Circle c, int n) {
  std::vector<Point> pts;
  for (int k = 0; k < n; ++k) {
    const double t = 2.0 * std::numbers::pi * k / n;
    pts.push_back({c.cx + c.radius * std::cos(t), c.cy + c.radius * std::sin(t)});
  }
  return pts;
}

}  // namespace

TEST_CASE("signed distance of the basic shapes") {
  CHECK(signed_distance(HalfPlaneSubstrate{0.0, {}}, 0.3, 0.2) == doctest::Approx(-0.2));
  CHECK(signed_distance(FullRectangle{Rect{-0.5, 0.5, -0.5, 0.5}}, 0.0, 0.7) == doctest::Approx(0.2));
  CHECK(signed_distance(FullRectangle{Rect{-0.5, 0.5, -0.5, 0.5}}, 0.1, 0.0) == doctest::Approx(-0.4));
  CHECK(signed_distance(Disk{Circle{0.0, 0.0, 0.3}}, 0.0, 0.1) == doctest::Approx(-0.2));
  const SinusoidalSubstrate s{0.0, 0.05, 0.5, {}};
  CHECK(signed_distance(s, 0.0, 0.2) == doctest::Approx(-0.15));
}

TEST_CASE("csg signed distance against a polyline oracle") {
  const Circle hole{0.0, 0.0, 0.1};
  const CSGPolygon shape{Rect{-0.5, 0.5, -0.5, 0.5}, {hole}, {}};
  // Inside the hole is outside the domain.
  CHECK(signed_distance(shape, 0.05, 0.0) == doctest::Approx(0.05));
  const auto outer = square_outline(0.5, 400);
  const auto inner = circle_outline(hole, 2000);
  for (double x = -0.45; x <= 0.45; x += 0.07) {
    for (double y = -0.45; y <= 0.45; y += 0.09) {
      const double d = std::min(polyline_distance(outer, {x, y}), polyline_distance(inner, {x, y}));
      const bool inside = std::hypot(x, y) > 0.1;
      const double r = signed_distance(shape, x, y);
      CHECK((r < 0.0) == inside);
      CHECK(std::abs(r) == doctest::Approx(d).epsilon(1e-4));
    }
  }
}

TEST_CASE("psi and chi closed forms") {
  const double eps = 0.01;
  CHECK(psi_profile(0.0, eps) == doctest::Approx(0.5));
  CHECK(psi_profile(-eps, eps) == doctest::Approx(0.997527376843365).epsilon(1e-12));
  CHECK(psi_profile(eps, eps) == doctest::Approx(0.002472623156635).epsilon(1e-10));
  CHECK(psi_profile(eps, eps) + psi_profile(-eps, eps) == doctest::Approx(1.0));
  CHECK(psi_profile(10.0, eps) > 0.0);

  const GridSpec g = GridSpec::centered(1.0, 1.0, 2, 2);
  const CellField chi = build_chi(CellField(g, {1.0, 0.5, 1e-300, 0.25}));
  CHECK(chi[0] == 1.0);
  CHECK(chi[1] == doctest::Approx(1.0 / (0.5 + 0.5e-6)));
  CHECK(chi[1] == doctest::Approx(1.999998).epsilon(1e-6));
  CHECK(chi[2] == doctest::Approx(1e6));
}

TEST_CASE("embedding invariants") {
  const GridSpec g = GridSpec::centered(1.25, 1.25, 40, 40);
  const EmbeddingField e = make_embedding(CSGPolygon{Rect{-0.5, 0.5, -0.5, 0.5}, {Circle{0.1, 0.1, 0.15}},
                                                     {Rect{0.3, 0.6, 0.3, 0.6}}},
                                          g, 0.02);
  for (std::size_t k = 0; k < e.psi.size(); ++k) {
    CHECK(e.psi[k] > 0.0);
    CHECK(e.psi[k] <= 1.0);
    CHECK(e.chi[k] >= 1.0);
    CHECK(e.chi[k] * (e.psi[k] + (1.0 - e.psi[k]) * kChiFloor) == doctest::Approx(1.0).epsilon(1e-14));
  }
  for (double v : e.grad_psi_abs.x.values()) CHECK(v >= 0.0);
  for (double v : e.grad_psi_abs.y.values()) CHECK(v >= 0.0);
}

TEST_CASE("grad psi magnitude") {
  const GridSpec g = GridSpec::centered(1.0, 1.0, 4, 2);
  const FaceField flat = build_grad_psi_abs(CellField(g, 1.0));
  for (double v : flat.x.values()) CHECK(v == 0.0);
  CellField step(g);
  for (int j = 0; j < 2; ++j) {
    step(0, j) = 1.0;
    step(1, j) = 1.0;
  }
  const FaceField d = build_grad_psi_abs(step);
  for (int j = 0; j < 2; ++j) {
    for (int k = 0; k <= 4; ++k) CHECK(d.x(k, j) == doctest::Approx(k == 2 ? 1.0 / g.dx() : 0.0));
  }
}

TEST_CASE("delta layer has unit mass") {
  const GridSpec g = GridSpec::centered(1.0, 0.1, 64, 2);
  CellField psi(g);
  for (int j = 0; j < g.Ny; ++j)
    for (int i = 0; i < g.Nx; ++i) psi(i, j) = psi_profile(g.x(i), 0.1);
  const FaceField d = build_grad_psi_abs(psi);
  double mass = 0.0;
  for (int k = 0; k <= g.Nx; ++k) mass += d.x(k, 0) * g.dx();
  CHECK(mass == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("psi transition width scales with eps") {
  auto width = [](double eps) {
    const GridSpec g = GridSpec::centered(1.0, 0.1, 1000, 2);
    double lo = 0.0, hi = 0.0;
    for (int i = 0; i < g.Nx; ++i) {
      const double p = psi_profile(g.x(i), eps);
      if (p >= 0.95) lo = g.x(i);
      if (p >= 0.05) hi = g.x(i);
    }
    return hi - lo;
  };
  CHECK(std::abs(width(0.05) - 2.0 * width(0.025)) <= 2.0 * 0.001);
}

TEST_CASE("boundary data") {
  const GridSpec g = GridSpec::centered(1.0, 1.0, 16, 16);
  const Disk disk{Circle{0.0, 0.0, 0.3}};
  const CellField zero = boundary_data_field(0.0, g);
  const CellField c = boundary_data_field(2.5, g);
  for (double v : zero.values()) CHECK(v == 0.0);
  for (double v : c.values()) CHECK(v == 2.5);

  auto h = [](double x, double y) { return std::atan2(y, x); };
  const CellField f = boundary_data_field(h, disk, g);
  for (int j = 0; j < g.Ny; ++j) {
    for (int i = 0; i < g.Nx; ++i) {
      // Dense angular sampling of the circle for the nearest point.
      double best = 1e300, angle = 0.0;
      for (int k = 0; k < 20000; ++k) {
        const double t = -std::numbers::pi + 2.0 * std::numbers::pi * k / 20000;
        const double d = std::hypot(g.x(i) - 0.3 * std::cos(t), g.y(j) - 0.3 * std::sin(t));
        if (d < best) {
          best = d;
          angle = t;
        }
      }
      // Skip the centre, where the nearest point is ambiguous, and the
      // branch cut of atan2.
      if (std::hypot(g.x(i), g.y(j)) < 0.05 || std::abs(angle) > 3.0) continue;
      CHECK(std::abs(f(i, j) - angle) < 2e-3);
    }
  }
}

TEST_CASE("clearance check") {
  const GridSpec g = GridSpec::centered(1.25, 1.25, 20, 20);
  CHECK_NOTHROW(check_clearance(FullRectangle{Rect{-0.5, 0.5, -0.5, 0.5}}, g, 0.01));
  CHECK_THROWS_AS(check_clearance(FullRectangle{Rect{-0.6, 0.5, -0.5, 0.5}}, g, 0.01), ParameterError);
}
