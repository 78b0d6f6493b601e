#include <doctest.h>

#include <cmath>
#include <random>

#include "opbde/errors.hpp"
#include "opbde/reference.hpp"
#include "opbde/scheme.hpp"
#include "support.hpp"

using namespace opbde;
using testing_support::random_field;

TEST_CASE("reference and extended steppers agree when psi is one") {
  const GridSpec g = GridSpec::centered(1.0, 1.0, 8, 8);
  std::mt19937_64 rng(101);
  PhysParams p;
  p.K = 1e-3;
  const BoundaryData bd = BoundaryData::zero(g);
  const CellField phi0 = random_field(g, rng, -0.5, 0.5);
  SolverOptions o;
  o.method = SolverMethod::direct;
  Stepper ext(p, uniform_embedding(g), bd, 1e-3, o);
  SimState es = initial_state(phi0, p);
  ReferenceState rs = reference_initial_state(phi0, p, ReferenceBoundary::neumann);
  for (int n = 0; n < 20; ++n) {
    es = ext.advance(es).state;
    rs = reference_step(rs, p, bd, ReferenceBoundary::neumann, 1e-3, o).state;
    for (std::size_t k = 0; k < g.cells(); ++k) CHECK(std::abs(es.phi[k] - rs.base.phi[k]) <= 1e-9);
  }
}

TEST_CASE("dynamic wall without relaxation keeps the Neumann stencil") {
  const GridSpec g = GridSpec::box(-0.5, 0.5, 0.0, 0.5, 8, 4);
  std::mt19937_64 rng(103);
  PhysParams p;
  p.K = 1e-3;
  const BoundaryData bd = BoundaryData::zero(g);
  const CellField phi0 = random_field(g, rng, -0.5, 0.5);
  SolverOptions o;
  o.method = SolverMethod::direct;
  ReferenceState a = reference_initial_state(phi0, p, ReferenceBoundary::neumann);
  ReferenceState b = reference_initial_state(phi0, p, ReferenceBoundary::dynamic_bottom);
  for (int n = 0; n < 10; ++n) {
    a = reference_step(a, p, bd, ReferenceBoundary::neumann, 1e-3, o).state;
    b = reference_step(b, p, bd, ReferenceBoundary::dynamic_bottom, 1e-3, o).state;
  }
  for (std::size_t k = 0; k < g.cells(); ++k) CHECK(std::abs(a.base.phi[k] - b.base.phi[k]) <= 1e-10);
  for (int i = 0; i < g.Nx; ++i) CHECK(std::abs(b.ghost_bottom[static_cast<std::size_t>(i)] - b.base.phi(i, 0)) <= 1e-10);
}

TEST_CASE("reference equilibrium and volume") {
  const GridSpec g = GridSpec::box(-0.5, 0.5, 0.0, 0.5, 8, 4);
  PhysParams p;
  p.gamma_inv = 0.1;
  const BoundaryData bd = BoundaryData::zero(g);
  ReferenceState s = reference_initial_state(CellField(g, 1.0), p, ReferenceBoundary::dynamic_bottom);
  s = reference_step(s, p, bd, ReferenceBoundary::dynamic_bottom, 1e-2, SolverOptions{}).state;
  for (double v : s.base.phi.values()) CHECK(std::abs(v - 1.0) < 1e-12);

  std::mt19937_64 rng(107);
  const CellField phi0 = random_field(g, rng, -0.5, 0.5);
  ReferenceState r = reference_initial_state(phi0, p, ReferenceBoundary::dynamic_bottom);
  const double e0 = reference_energy(r, p, bd);
  double v0 = 0.0;
  for (double v : phi0.values()) v0 += v;
  for (int n = 0; n < 5; ++n) r = reference_step(r, p, bd, ReferenceBoundary::dynamic_bottom, 1e-3, SolverOptions{}).state;
  double v1 = 0.0;
  for (double v : r.base.phi.values()) v1 += v;
  CHECK(std::abs(v1 - v0) < 1e-10);
  CHECK(reference_energy(r, p, bd) < e0);
}

TEST_CASE("reference input checks") {
  const GridSpec g = GridSpec::centered(1.0, 1.0, 4, 4);
  PhysParams p;
  const ReferenceState s = reference_initial_state(CellField(g), p, ReferenceBoundary::neumann);
  CHECK_THROWS_AS(reference_step(s, p, BoundaryData::constant(g, 0, 0, 1.0), ReferenceBoundary::neumann, 1e-3, {}),
                  ParameterError);
  CHECK_THROWS_AS(reference_step(s, p, BoundaryData::zero(g), ReferenceBoundary::dynamic_bottom, 1e-3, {}),
                  DimensionError);
  CHECK_THROWS_AS(reference_step(s, p, BoundaryData::zero(g), ReferenceBoundary::neumann, -1.0, {}), ParameterError);
}
