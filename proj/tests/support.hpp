#pragma once

// Shared helpers for the unit tests: a small seeded generator for random
// fields and brute-force stencil oracles that do not go through the library's
// face operators.

#include <cmath>
#include <random>
#include <vector>

#include "opbde/grid.hpp"

namespace testing_support {

using opbde::CellField;
using opbde::GridSpec;

inline CellField random_field(const GridSpec& g, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  CellField f(g);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = u(rng);
  return f;
}

// Mirror ghost lookup written out longhand.
inline double ghost(const CellField& f, int i, int j) {
  const GridSpec& g = f.grid();
  if (i < 0) i = 0;
  if (i >= g.Nx) i = g.Nx - 1;
  if (j < 0) j = 0;
  if (j >= g.Ny) j = g.Ny - 1;
  return f(i, j);
}

// D_h(a, b) at one cell, from the face formula with ghost mirrors.
inline double weighted_div_at(const CellField& a, const CellField& b, int i, int j) {
  const GridSpec& g = a.grid();
  const double dx = g.dx(), dy = g.dy();
  auto fx = [&](int il, int ir) {  // flux across the face between columns il and ir
    return 0.5 * (ghost(a, il, j) + ghost(a, ir, j)) * (ghost(b, ir, j) - ghost(b, il, j)) / dx;
  };
  auto fy = [&](int jl, int jr) {
    return 0.5 * (ghost(a, i, jl) + ghost(a, i, jr)) * (ghost(b, i, jr) - ghost(b, i, jl)) / dy;
  };
  return (fx(i, i + 1) - fx(i - 1, i)) / dx + (fy(j, j + 1) - fy(j - 1, j)) / dy;
}

}  // namespace testing_support
