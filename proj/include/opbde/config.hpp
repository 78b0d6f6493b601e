#pragma once

// Run configuration: a flat, sectioned key-value file.
//
//   [experiment]  kind, solver, seed, output_dir
//   [grid]        Lx, Ly, Nx, Ny, x_min, y_min
//   [physics]     K, M, gamma (number or "inf"), alpha, A, eps
//   [boundary]    h1, h2, h3, reference_wall
//   [time]        dt, t_final, diagnostics_every, snapshot_every
//   [shape]       type and its parameters
//   [initial]     type and its parameters
//   [solver]      method, rel_tol, abs_tol, max_iterations, ilut_droptol, ilut_fill
//
// Experiment kinds preset every key; any key given in the file overrides the
// preset. Unknown sections or keys are rejected.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "opbde/geometry.hpp"
#include "opbde/model.hpp"
#include "opbde/reference.hpp"
#include "opbde/solver.hpp"

namespace opbde {

enum class ExperimentKind { coarsening, droplet_flat, droplet_curved, custom };
enum class SolverKind { extended, reference };
enum class InitialKind { random, droplet, cosine, constant };

/// Boundary data value: a constant, or "sinx <amplitude> <wavelength>" giving
/// amplitude * sin(2 pi x / wavelength) at the nearest boundary point.
struct ProfileSpec {
  double constant = 0.0;
  bool sinx = false;
  double amplitude = 0.0;
  double wavelength = 1.0;

  std::string to_string() const;
};

struct InitialSpec {
  InitialKind kind = InitialKind::random;
  double amplitude = 1e-3;
  double cx = 0.0;
  double cy = 0.2;
  double radius = 0.2;
  double width = 0.01;
  double wavelength = 1.0;
};

struct RunConfig {
  ExperimentKind experiment = ExperimentKind::custom;
  SolverKind solver_kind = SolverKind::extended;
  std::uint64_t seed = 12345;
  std::string output_dir = "out";

  GridSpec grid = GridSpec::centered(1.25, 1.25, 160, 160);
  PhysParams physics;
  ProfileSpec h1, h2, h3;
  ReferenceBoundary reference_wall = ReferenceBoundary::neumann;

  double dt = 1e-5;
  double t_final = 0.01;
  long diagnostics_every = 1;
  long snapshot_every = 0;

  ShapeSpec shape = FullRectangle{Rect{-0.5, 0.5, -0.5, 0.5}};
  InitialSpec initial;
  SolverOptions solver;

  long steps() const;
  /// Throws ConfigError naming the offending key.
  void validate() const;
};

/// Preset for an experiment kind (paper parameters, full resolution).
RunConfig preset(ExperimentKind kind);

RunConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");
RunConfig parse_config(const std::string& path);

/// Canonical text form; parse_config_text(to_text(c)) reproduces c.
std::string to_text(const RunConfig& config);

/// FNV-1a digest of the canonical text, as 16 hex digits.
std::string config_digest(const RunConfig& config);

std::string to_string(ExperimentKind k);
std::string to_string(SolverKind k);
std::string to_string(ReferenceBoundary b);
std::string to_string(SolverMethod m);

}  // namespace opbde
