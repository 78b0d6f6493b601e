#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "opbde/errors.hpp"
#include "opbde/grid.hpp"
#include "support.hpp"

using namespace opbde;
using testing_support::random_field;

TEST_CASE("grid spec geometry") {
  const GridSpec g = GridSpec::centered(1.0, 2.0, 4, 8);
  CHECK(g.dx() == doctest::Approx(0.25));
  CHECK(g.dy() == doctest::Approx(0.25));
  CHECK(g.x(0) == doctest::Approx(-0.375));
  CHECK(g.y(7) == doctest::Approx(0.875));
  CHECK(g.index(1, 2) == 9u);
  CHECK_THROWS_AS(GridSpec::centered(1.0, 1.0, 1, 4).validate(), ParameterError);
  CHECK_THROWS_AS(CellField(g) + CellField(GridSpec::centered(1.0, 1.0, 4, 4)), DimensionError);
}

TEST_CASE("averages and differences") {
  const GridSpec g = GridSpec::centered(1.0, 1.0, 4, 4);
  SUBCASE("constants") {
    const CellField c(g, 3.5);
    const FaceArray ax = avg_x(c), ay = avg_y(c), dx = diff_x(c), dy = diff_y(c);
    for (double v : ax.values()) CHECK(v == 3.5);
    for (double v : ay.values()) CHECK(v == 3.5);
    for (double v : dx.values()) CHECK(v == 0.0);
    for (double v : dy.values()) CHECK(v == 0.0);
  }
  SUBCASE("linear in x") {
    CellField f(g);
    for (int j = 0; j < g.Ny; ++j)
      for (int i = 0; i < g.Nx; ++i) f(i, j) = 2.0 * g.x(i);
    const FaceArray a = avg_x(f);
    const FaceArray d = diff_x(f);
    for (int j = 0; j < g.Ny; ++j) {
      for (int k = 1; k < g.Nx; ++k) {
        CHECK(a(k, j) == doctest::Approx(2.0 * (g.x_min + k * g.dx())));
        CHECK(d(k, j) == doctest::Approx(2.0));
      }
      CHECK(d(0, j) == 0.0);
      CHECK(d(g.Nx, j) == 0.0);
    }
  }
  SUBCASE("random field against loop oracle") {
    std::mt19937_64 rng(7);
    const CellField f = random_field(g, rng);
    const FaceArray ax = avg_x(f), dx = diff_x(f), ay = avg_y(f), dy = diff_y(f);
    for (int j = 0; j < g.Ny; ++j) {
      for (int k = 0; k <= g.Nx; ++k) {
        const double l = testing_support::ghost(f, k - 1, j);
        const double r = testing_support::ghost(f, k, j);
        CHECK(ax(k, j) == doctest::Approx(0.5 * (l + r)));
        CHECK(dx(k, j) == doctest::Approx((r - l) / g.dx()));
      }
    }
    for (int k = 0; k <= g.Ny; ++k) {
      for (int i = 0; i < g.Nx; ++i) {
        const double l = testing_support::ghost(f, i, k - 1);
        const double r = testing_support::ghost(f, i, k);
        CHECK(ay(i, k) == doctest::Approx(0.5 * (l + r)));
        CHECK(dy(i, k) == doctest::Approx((r - l) / g.dy()));
      }
    }
  }
}

TEST_CASE("neumann ghosts mirror the first interior cell") {
  const GridSpec g = GridSpec::centered(1.0, 3.0, 2, 3);
  CellField f(g);
  for (int j = 0; j < 3; ++j) {
    f(0, j) = j + 1.0;
    f(1, j) = 10.0 * (j + 1.0);
  }
  const NeumannGhosts e = extend_ghost_neumann(f);
  CHECK(e(0, -1) == 1.0);
  CHECK(e(0, 3) == 3.0);
  CHECK(e(-1, 1) == 2.0);
  CHECK(e(2, 1) == 20.0);
}

TEST_CASE("weighted divergence") {
  SUBCASE("unit weight on a quadratic gives 2 in the interior") {
    const GridSpec g = GridSpec::centered(1.0, 1.0, 8, 8);
    CellField b(g);
    for (int j = 0; j < g.Ny; ++j)
      for (int i = 0; i < g.Nx; ++i) b(i, j) = g.x(i) * g.x(i);
    const CellField d = weighted_div(CellField(g, 1.0), b);
    for (int j = 0; j < g.Ny; ++j)
      for (int i = 1; i + 1 < g.Nx; ++i) CHECK(d(i, j) == doctest::Approx(2.0));
  }
  SUBCASE("zero weight") {
    const GridSpec g = GridSpec::centered(1.0, 1.0, 4, 4);
    std::mt19937_64 rng(1);
    const CellField d = weighted_div(CellField(g), random_field(g, rng));
    for (double v : d.values()) CHECK(v == 0.0);
  }
  SUBCASE("dense matrix oracle on 5x5") {
    const GridSpec g = GridSpec::centered(1.0, 1.5, 5, 5);
    std::mt19937_64 rng(11);
    const CellField a = random_field(g, rng, 0.1, 1.0);
    const CellField b = random_field(g, rng);
    const int n = static_cast<int>(g.cells());
    // Column c of the matrix is D_h(a, e_c), evaluated by the longhand stencil.
    Eigen::MatrixXd L(n, n);
    for (int c = 0; c < n; ++c) {
      CellField e(g);
      e[static_cast<std::size_t>(c)] = 1.0;
      for (int j = 0; j < g.Ny; ++j)
        for (int i = 0; i < g.Nx; ++i)
          L(static_cast<int>(g.index(i, j)), c) = testing_support::weighted_div_at(a, e, i, j);
    }
    Eigen::VectorXd bv(n);
    for (int k = 0; k < n; ++k) bv[k] = b[static_cast<std::size_t>(k)];
    const Eigen::VectorXd expect = L * bv;
    const CellField got = weighted_div(a, b);
    for (int k = 0; k < n; ++k) CHECK(got[static_cast<std::size_t>(k)] == doctest::Approx(expect[k]).epsilon(1e-12));
  }
}

TEST_CASE("inner product") {
  const GridSpec g = GridSpec::centered(1.0, 1.0, 6, 6);
  CHECK(inner(CellField(g, 1.0), CellField(g, 1.0)) == doctest::Approx(1.0));
  std::mt19937_64 rng(3);
  const CellField u = random_field(GridSpec::centered(1.0, 1.0, 3, 3), rng);
  double s = 0.0;
  for (double v : u.values()) s += v * v;
  CHECK(inner(u, u) == doctest::Approx(s / 9.0));
  CHECK(inner(CellField(g), random_field(g, rng)) == 0.0);
}
