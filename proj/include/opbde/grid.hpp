#pragma once

// Cell-centred rectangular mesh and the discrete calculus the stepper is
// written in: face averages A_x/A_y, face differences D_x/D_y, the weighted
// divergence D_h(a, b) = D_x[A_x(a) D_x(b)] + D_y[A_y(a) D_y(b)] and the
// discrete inner product.
//
// Index mapping: cells are 0-based internally, (i, j) with i in [0, Nx) and
// j in [0, Ny); the 1-based cell (i+1, j+1) of the mathematical notation is
// cell (i, j) here. x-face k in [0, Nx] lies between cells k-1 and k, so
// face 0 is the left boundary and face Nx the right one (k <-> k+1/2 - 1 in
// 1-based half-integer notation). Storage is row-major with j the slow index,
// which matches the snapshot file layout.

#include <cstddef>
#include <span>
#include <vector>

namespace opbde {

struct GridSpec {
  double Lx = 1.0;
  double Ly = 1.0;
  int Nx = 2;
  int Ny = 2;
  double x_min = -0.5;
  double y_min = -0.5;

  /// Grid on [-Lx/2, Lx/2] x [-Ly/2, Ly/2].
  static GridSpec centered(double Lx, double Ly, int Nx, int Ny);
  /// Grid on [x_min, x_max] x [y_min, y_max].
  static GridSpec box(double x_min, double x_max, double y_min, double y_max, int Nx, int Ny);

  /// Throws ParameterError unless Nx, Ny >= 2 and the extents are positive.
  void validate() const;

  double dx() const { return Lx / Nx; }
  double dy() const { return Ly / Ny; }
  double x_max() const { return x_min + Lx; }
  double y_max() const { return y_min + Ly; }
  double x(int i) const { return x_min + (i + 0.5) * dx(); }
  double y(int j) const { return y_min + (j + 0.5) * dy(); }
  std::size_t cells() const { return static_cast<std::size_t>(Nx) * static_cast<std::size_t>(Ny); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(Nx) + static_cast<std::size_t>(i);
  }
  double cell_area() const { return dx() * dy(); }

  bool operator==(const GridSpec&) const = default;
};

/// Scalar field sampled at cell centres.
class CellField {
 public:
  CellField() = default;
  explicit CellField(const GridSpec& grid, double value = 0.0);
  CellField(const GridSpec& grid, std::vector<double> values);

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  double& operator()(int i, int j) { return values_[grid_.index(i, j)]; }
  double operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  bool all_finite() const;

  CellField& operator+=(const CellField& other);
  CellField& operator-=(const CellField& other);
  CellField& operator*=(double s);

 private:
  GridSpec grid_{};
  std::vector<double> values_;
};

CellField operator+(CellField a, const CellField& b);
CellField operator-(CellField a, const CellField& b);
CellField operator*(double s, CellField a);
/// Pointwise product.
CellField hadamard(const CellField& a, const CellField& b);

enum class Axis { x, y };

/// Values on one family of faces: x-faces are (Nx+1) x Ny, y-faces Nx x (Ny+1).
class FaceArray {
 public:
  FaceArray() = default;
  FaceArray(const GridSpec& grid, Axis axis, double value = 0.0);

  const GridSpec& grid() const { return grid_; }
  Axis axis() const { return axis_; }
  int nx() const { return axis_ == Axis::x ? grid_.Nx + 1 : grid_.Nx; }
  int ny() const { return axis_ == Axis::y ? grid_.Ny + 1 : grid_.Ny; }
  std::size_t size() const { return values_.size(); }

  double& operator()(int i, int j) { return values_[static_cast<std::size_t>(j) * nx() + i]; }
  double operator()(int i, int j) const { return values_[static_cast<std::size_t>(j) * nx() + i]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  FaceArray& operator*=(const FaceArray& other);

 private:
  GridSpec grid_{};
  Axis axis_ = Axis::x;
  std::vector<double> values_;
};

struct FaceField {
  FaceArray x;
  FaceArray y;
};

/// Read-only view of a cell field extended by one layer of ghost cells that
/// mirror the adjacent interior cell on all four sides (zero normal
/// difference). Valid indices: i in [-1, Nx], j in [-1, Ny], not both outside.
class NeumannGhosts {
 public:
  explicit NeumannGhosts(const CellField& field) : field_(&field) {}

  double operator()(int i, int j) const;
  const GridSpec& grid() const { return field_->grid(); }

 private:
  const CellField* field_;
};

NeumannGhosts extend_ghost_neumann(const CellField& f);

FaceArray avg_x(const CellField& f);
FaceArray avg_y(const CellField& f);
FaceArray diff_x(const CellField& f);
FaceArray diff_y(const CellField& f);

/// D_h(a, b) with Neumann ghost closure for both arguments.
CellField weighted_div(const CellField& a, const CellField& b);

/// dx * dy * sum_ij u_ij v_ij.
double inner(const CellField& u, const CellField& v);

/// dx * dy * sum over the faces of the given family of u * v.
double face_inner(const FaceArray& u, const FaceArray& v);

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what);

}  // namespace opbde
