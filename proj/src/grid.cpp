#include "opbde/grid.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "opbde/errors.hpp"

namespace opbde {

GridSpec GridSpec::centered(double Lx, double Ly, int Nx, int Ny) {
  GridSpec g{Lx, Ly, Nx, Ny, -0.5 * Lx, -0.5 * Ly};
  g.validate();
  return g;
}

GridSpec GridSpec::box(double x_min, double x_max, double y_min, double y_max, int Nx, int Ny) {
  GridSpec g{x_max - x_min, y_max - y_min, Nx, Ny, x_min, y_min};
  g.validate();
  return g;
}

void GridSpec::validate() const {
  if (Nx < 2 || Ny < 2) {
    throw ParameterError("grid needs at least 2 cells per direction, got " + std::to_string(Nx) +
                         "x" + std::to_string(Ny));
  }
  if (!(Lx > 0.0) || !(Ly > 0.0) || !std::isfinite(Lx) || !std::isfinite(Ly)) {
    throw ParameterError("grid extents must be positive and finite");
  }
  if (!std::isfinite(x_min) || !std::isfinite(y_min)) {
    throw ParameterError("grid origin must be finite");
  }
}

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!(a == b)) {
    std::ostringstream os;
    os << what << ": grid mismatch (" << a.Nx << "x" << a.Ny << " vs " << b.Nx << "x" << b.Ny << ")";
    throw DimensionError(os.str());
  }
}

CellField::CellField(const GridSpec& grid, double value) : grid_(grid), values_(grid.cells(), value) {}

CellField::CellField(const GridSpec& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.cells()) {
    throw DimensionError("cell field has " + std::to_string(values_.size()) + " values, grid has " +
                         std::to_string(grid_.cells()) + " cells");
  }
}

bool CellField::all_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

CellField& CellField::operator+=(const CellField& other) {
  require_same_grid(grid_, other.grid_, "CellField +=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  return *this;
}

CellField& CellField::operator-=(const CellField& other) {
  require_same_grid(grid_, other.grid_, "CellField -=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
  return *this;
}

CellField& CellField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

CellField operator+(CellField a, const CellField& b) { return a += b; }
CellField operator-(CellField a, const CellField& b) { return a -= b; }
CellField operator*(double s, CellField a) { return a *= s; }

CellField hadamard(const CellField& a, const CellField& b) {
  require_same_grid(a.grid(), b.grid(), "hadamard");
  CellField out(a.grid());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = a[k] * b[k];
  return out;
}

FaceArray::FaceArray(const GridSpec& grid, Axis axis, double value) : grid_(grid), axis_(axis) {
  values_.assign(static_cast<std::size_t>(nx()) * static_cast<std::size_t>(ny()), value);
}

FaceArray& FaceArray::operator*=(const FaceArray& other) {
  require_same_grid(grid_, other.grid_, "FaceArray *=");
  if (axis_ != other.axis_) throw DimensionError("FaceArray *=: x-faces combined with y-faces");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] *= other.values_[k];
  return *this;
}

double NeumannGhosts::operator()(int i, int j) const {
  const GridSpec& g = field_->grid();
  if (i < 0) i = 0;
  if (i >= g.Nx) i = g.Nx - 1;
  if (j < 0) j = 0;
  if (j >= g.Ny) j = g.Ny - 1;
  return (*field_)(i, j);
}

NeumannGhosts extend_ghost_neumann(const CellField& f) { return NeumannGhosts(f); }

FaceArray avg_x(const CellField& f) {
  const GridSpec& g = f.grid();
  const NeumannGhosts ext(f);
  FaceArray out(g, Axis::x);
  for (int j = 0; j < g.Ny; ++j) {
    for (int k = 0; k <= g.Nx; ++k) out(k, j) = 0.5 * (ext(k, j) + ext(k - 1, j));
  }
  return out;
}

FaceArray avg_y(const CellField& f) {
  const GridSpec& g = f.grid();
  const NeumannGhosts ext(f);
  FaceArray out(g, Axis::y);
  for (int k = 0; k <= g.Ny; ++k) {
    for (int i = 0; i < g.Nx; ++i) out(i, k) = 0.5 * (ext(i, k) + ext(i, k - 1));
  }
  return out;
}

FaceArray diff_x(const CellField& f) {
  const GridSpec& g = f.grid();
  const NeumannGhosts ext(f);
  const double inv = 1.0 / g.dx();
  FaceArray out(g, Axis::x);
  for (int j = 0; j < g.Ny; ++j) {
    for (int k = 0; k <= g.Nx; ++k) out(k, j) = (ext(k, j) - ext(k - 1, j)) * inv;
  }
  return out;
}

FaceArray diff_y(const CellField& f) {
  const GridSpec& g = f.grid();
  const NeumannGhosts ext(f);
  const double inv = 1.0 / g.dy();
  FaceArray out(g, Axis::y);
  for (int k = 0; k <= g.Ny; ++k) {
    for (int i = 0; i < g.Nx; ++i) out(i, k) = (ext(i, k) - ext(i, k - 1)) * inv;
  }
  return out;
}

CellField weighted_div(const CellField& a, const CellField& b) {
  require_same_grid(a.grid(), b.grid(), "weighted_div");
  const GridSpec& g = a.grid();
  FaceArray fx = avg_x(a);
  fx *= diff_x(b);
  FaceArray fy = avg_y(a);
  fy *= diff_y(b);
  const double idx = 1.0 / g.dx();
  const double idy = 1.0 / g.dy();
  CellField out(g);
  for (int j = 0; j < g.Ny; ++j) {
    for (int i = 0; i < g.Nx; ++i) {
      out(i, j) = (fx(i + 1, j) - fx(i, j)) * idx + (fy(i, j + 1) - fy(i, j)) * idy;
    }
  }
  return out;
}

double inner(const CellField& u, const CellField& v) {
  require_same_grid(u.grid(), v.grid(), "inner");
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) s += u[k] * v[k];
  return s * u.grid().cell_area();
}

double face_inner(const FaceArray& u, const FaceArray& v) {
  require_same_grid(u.grid(), v.grid(), "face_inner");
  if (u.axis() != v.axis()) throw DimensionError("face_inner: x-faces combined with y-faces");
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) s += u.values()[k] * v.values()[k];
  return s * u.grid().cell_area();
}

}  // namespace opbde
