#pragma once

// Experiment orchestration on top of a RunConfig: building the problem,
// stepping it with either solver, per-step diagnostics, file outputs, and the
// run / compare / sweep commands.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "opbde/config.hpp"
#include "opbde/verify.hpp"

namespace opbde {

/// Uniform value in [-1, 1) keyed by seed and a global integer cell position,
/// so that aligned grids draw identical values for coinciding cells.
double seeded_uniform(std::uint64_t seed, long kx, long ky);

/// The grid a run actually steps: the configured grid for the extended
/// solver, the cells of the configured grid covering the rectangle shape for
/// the reference solver. Throws ConfigError if the rectangle is not aligned
/// with the cell faces.
GridSpec run_grid(const RunConfig& config);

/// Initial phi on run_grid(config). Extended runs take psi times the field
/// inside the embedded domain and zero outside.
CellField initial_field(const RunConfig& config, const GridSpec& grid, const CellField* psi);

struct Problem {
  RunConfig config;
  GridSpec grid;
  /// Present for extended runs.
  std::optional<EmbeddingField> embedding;
  BoundaryData bdata;
  CellField phi0;
};

Problem build_problem(const RunConfig& config);

struct Diagnostics {
  long step = 0;
  double t = 0.0;
  double energy = 0.0;
  double volume = 0.0;
  double volume_drift = 0.0;
  /// |lhs - rhs| of the discrete energy law for the step just taken; NaN for
  /// the reference solver, which has no exact law in this form.
  double energy_law_residual = 0.0;
  double pumped_power = 0.0;
  int solver_iters = 0;
  double solver_residual = 0.0;
};

/// Called at step 0 and after every step.
using StepObserver = std::function<void(const CellField& phi, const Diagnostics& d)>;

struct RunSummary {
  CellField final_phi;
  double final_t = 0.0;
  long steps = 0;
  /// Every diagnostics_every steps, plus the first and the last.
  std::vector<Diagnostics> records;
  double max_abs_volume_drift = 0.0;
  double max_energy_law_residual = 0.0;
  /// Largest energy-law residual divided by max(1, |F^n|).
  double max_relative_energy_law_residual = 0.0;
  std::size_t g_floor_hits = 0;
};

/// Throws SolveError / AssemblyError on solver failure.
RunSummary run(const RunConfig& config, const StepObserver& observer = {});

void write_snapshot(std::ostream& out, const CellField& phi, double t);
void write_snapshot(const std::string& path, const CellField& phi, double t);
CellField read_snapshot(const std::string& path, double* t = nullptr);

const char* diagnostics_header();
std::string diagnostics_row(const Diagnostics& d);

/// OPBDE_OUTPUT_ROOT, when set, is prepended to relative output directories.
std::string resolve_output_dir(const RunConfig& config);

/// Runs the configuration and writes resolved_config.ini, diagnostics.csv and
/// snapshot_<step>.txt files. Returns 0 on success, 2 on solver failure
/// (files written so far are flushed).
int cmd_run(const RunConfig& config, std::ostream& log);

/// Maps each time to a step index of config; throws ConfigError if a time is
/// not a whole number of steps.
std::vector<long> steps_for_times(const RunConfig& config, const std::vector<double>& times);

/// Runs both configurations to max(times) and reports the restricted L2
/// error at each time. ref may use either solver; ext must be extended.
/// Throws ConfigError on differing seeds or misaligned grids.
ComparisonReport compare(const RunConfig& ref, const RunConfig& ext, const std::vector<double>& times,
                         double mask_threshold = 0.5);

/// compare() plus comparison.csv and both resolved configs in ext's output dir.
int cmd_compare(const RunConfig& ref, const RunConfig& ext, const std::vector<double>& times, std::ostream& log,
                double mask_threshold = 0.5);

/// One report per eps; the reference run is shared.
std::vector<ComparisonReport> eps_sweep(const RunConfig& ref, const RunConfig& ext, const std::vector<double>& eps_list,
                                        const std::vector<double>& times, double mask_threshold = 0.5);

/// True if the error at every time is strictly smaller for each successive
/// (smaller) eps in the list.
bool errors_decrease(const std::vector<ComparisonReport>& reports);

struct GammaSweepReport {
  /// Gamma values in config order; infinity encodes gamma_inv = 0.
  std::vector<double> gammas;
  std::vector<double> times;
  /// energies[k][m]: member k at times[m].
  std::vector<std::vector<double>> energies;
  std::vector<CellField> final_phi;
  bool ordered = true;
  /// Largest E_larger_gamma - E_smaller_gamma over shared times.
  double worst_violation = 0.0;
};

GammaSweepReport gamma_sweep(const RunConfig& config, const std::vector<double>& gammas, double slack = 1e-6);

enum class SweepKey { eps, gamma, dt };

struct SweepRow {
  double value = 0.0;
  long steps = 0;
  double final_energy = 0.0;
  double max_energy_law_residual = 0.0;
  double max_abs_volume_drift = 0.0;
  /// Versus the reference config when given; for dt sweeps without one,
  /// versus the same run at dt / 2 (self-convergence).
  double l2_error = 0.0;
  /// l2_error of this member over that of the member with half its dt.
  double error_ratio = 0.0;
};

std::vector<SweepRow> sweep(const RunConfig& config, SweepKey key, const std::vector<double>& values,
                            const std::optional<RunConfig>& reference = std::nullopt, double mask_threshold = 0.5);

int cmd_sweep(const RunConfig& config, SweepKey key, const std::vector<double>& values,
              const std::optional<RunConfig>& reference, std::ostream& log);

}  // namespace opbde
