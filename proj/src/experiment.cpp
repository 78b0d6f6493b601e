#include "opbde/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "opbde/errors.hpp"
#include "opbde/reference.hpp"
#include "opbde/scheme.hpp"

namespace opbde {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool is_record_step(long step, long every, long last) { return step % every == 0 || step == last; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

std::filesystem::path prepare_dir(const RunConfig& config) {
  const std::filesystem::path dir = resolve_output_dir(config);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

// Mask used for restricted errors: psi for extended runs, all ones otherwise.
CellField mask_field(const RunConfig& config, const GridSpec& grid) {
  if (config.solver_kind == SolverKind::reference) return CellField(grid, 1.0);
  return build_psi(config.shape, grid, config.physics.eps);
}

struct Captured {
  GridSpec grid;
  std::vector<CellField> fields;
  RunSummary summary;
};

// Runs config to the last requested step and keeps phi at each of them.
Captured capture(RunConfig config, const std::vector<long>& steps) {
  long last = 0;
  for (long s : steps) last = std::max(last, s);
  config.t_final = static_cast<double>(last) * config.dt;
  Captured out;
  out.grid = run_grid(config);
  std::map<long, CellField> kept;
  out.summary = run(config, [&](const CellField& phi, const Diagnostics& d) {
    if (std::find(steps.begin(), steps.end(), d.step) != steps.end()) kept[d.step] = phi;
  });
  for (long s : steps) out.fields.push_back(kept.at(s));
  return out;
}

double restricted_error(const CellField& ref_phi, const CellField& ext_phi, const CellField& mask, double threshold) {
  const GridSpec& target = ext_phi.grid();
  CellField ref_on_target;
  try {
    ref_on_target = ref_phi.grid() == target ? ref_phi : embed_aligned(ref_phi, target, kNaN);
  } catch (const DimensionError& e) {
    throw ConfigError(std::string("compare: ") + e.what());
  }
  for (std::size_t k = 0; k < mask.size(); ++k) {
    if (mask[k] >= threshold && std::isnan(ref_on_target[k])) {
      throw ConfigError("compare: reference grid does not cover the compared region");
    }
  }
  return l2_error_restricted(ext_phi, ref_on_target, mask, threshold);
}

void check_pair(const RunConfig& ref, const RunConfig& ext) {
  if (ext.solver_kind != SolverKind::extended) throw ConfigError("compare: the second configuration must use the extended solver");
  if (ref.seed != ext.seed) throw ConfigError("compare: configurations use different seeds");
}

RunConfig with_key(RunConfig c, SweepKey key, double v) {
  switch (key) {
    case SweepKey::eps: c.physics.eps = v; break;
    case SweepKey::gamma: c.physics.gamma_inv = std::isinf(v) ? 0.0 : 1.0 / v; break;
    case SweepKey::dt: c.dt = v; break;
  }
  c.validate();
  return c;
}

const char* key_name(SweepKey key) {
  switch (key) {
    case SweepKey::eps: return "eps";
    case SweepKey::gamma: return "gamma";
    case SweepKey::dt: return "dt";
  }
  return "eps";
}

}  // namespace

double seeded_uniform(std::uint64_t seed, long kx, long ky) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(kx));
  h = splitmix64(h ^ (static_cast<std::uint64_t>(ky) * 0xd1b54a32d192ed03ull));
  return 2.0 * static_cast<double>(h >> 11) * 0x1.0p-53 - 1.0;
}

GridSpec run_grid(const RunConfig& config) {
  if (config.solver_kind == SolverKind::extended) return config.grid;
  const auto* rect = std::get_if<FullRectangle>(&config.shape);
  if (!rect) throw ConfigError("experiment.solver: the reference solver needs shape.type = rectangle");
  const Rect& r = rect->extent;
  const GridSpec& g = config.grid;
  auto cells = [](double a, double b, double h, const char* what) {
    const double n = (b - a) / h;
    if (std::abs(n - std::round(n)) > 1e-6) {
      throw ConfigError(std::string("shape: rectangle ") + what + " is not aligned with the grid");
    }
    return static_cast<long>(std::round(n));
  };
  cells(g.x_min, r.x_min, g.dx(), "x_min");
  cells(g.y_min, r.y_min, g.dy(), "y_min");
  const long nx = cells(r.x_min, r.x_max, g.dx(), "width");
  const long ny = cells(r.y_min, r.y_max, g.dy(), "height");
  return GridSpec::box(r.x_min, r.x_max, r.y_min, r.y_max, static_cast<int>(nx), static_cast<int>(ny));
}

CellField initial_field(const RunConfig& config, const GridSpec& grid, const CellField* psi) {
  const InitialSpec& ic = config.initial;
  const bool extended = config.solver_kind == SolverKind::extended;
  if (extended && !psi) throw ParameterError("initial_field: extended runs need psi");
  CellField phi(grid);
  for (int j = 0; j < grid.Ny; ++j) {
    for (int i = 0; i < grid.Nx; ++i) {
      const double x = grid.x(i);
      const double y = grid.y(j);
      double v = 0.0;
      switch (ic.kind) {
        case InitialKind::random: {
          const long kx = std::lround(x / grid.dx() - 0.5);
          const long ky = std::lround(y / grid.dy() - 0.5);
          v = ic.amplitude * seeded_uniform(config.seed, kx, ky);
          break;
        }
        case InitialKind::droplet:
          v = std::tanh((ic.radius - std::hypot(x - ic.cx, y - ic.cy)) / ic.width);
          break;
        case InitialKind::cosine: {
          const double k = 2.0 * std::numbers::pi / ic.wavelength;
          v = ic.amplitude * std::cos(k * x) * std::cos(k * y);
          break;
        }
        case InitialKind::constant:
          v = ic.amplitude;
          break;
      }
      if (extended) v = signed_distance(config.shape, x, y) < 0.0 ? (*psi)(i, j) * v : 0.0;
      phi(i, j) = v;
    }
  }
  return phi;
}

Problem build_problem(const RunConfig& config) {
  config.validate();
  Problem p;
  p.config = config;
  p.grid = run_grid(config);
  if (config.solver_kind == SolverKind::extended) {
    p.embedding = make_embedding(config.shape, p.grid, config.physics.eps);
    auto field = [&](const ProfileSpec& h) {
      if (!h.sinx) return boundary_data_field(h.constant, p.grid);
      const double a = h.amplitude;
      const double k = 2.0 * std::numbers::pi / h.wavelength;
      return boundary_data_field([a, k](double x, double) { return a * std::sin(k * x); }, config.shape, p.grid);
    };
    p.bdata = BoundaryData{field(config.h1), field(config.h2), field(config.h3)};
    p.phi0 = initial_field(config, p.grid, &p.embedding->psi);
  } else {
    p.bdata = BoundaryData::constant(p.grid, config.h1.constant, config.h2.constant, 0.0);
    p.phi0 = initial_field(config, p.grid, nullptr);
  }
  return p;
}

RunSummary run(const RunConfig& config, const StepObserver& observer) {
  Problem p = build_problem(config);
  const long last = config.steps();
  const double dt = config.dt;
  RunSummary out;
  out.steps = last;

  auto record = [&](const CellField& phi, const Diagnostics& d) {
    if (observer) observer(phi, d);
    if (is_record_step(d.step, config.diagnostics_every, last)) out.records.push_back(d);
    out.max_abs_volume_drift = std::max(out.max_abs_volume_drift, std::abs(d.volume_drift));
  };

  if (p.embedding) {
    const EmbeddingField& emb = *p.embedding;
    SimState state = initial_state(p.phi0, config.physics);
    Diagnostics d;
    d.energy = discrete_energy(state.phi, state.q, emb, config.physics, p.bdata);
    d.volume = discrete_volume(state.phi, emb.psi);
    const double volume0 = d.volume;
    record(state.phi, d);
    Stepper stepper(config.physics, emb, p.bdata, dt, config.solver);
    for (long n = 0; n < last; ++n) {
      StepResult r = stepper.advance(state);
      const EnergyLawTerms terms = energy_law_terms(r.audit, emb, config.physics, p.bdata);
      state = std::move(r.state);
      d.step = n + 1;
      d.t = static_cast<double>(n + 1) * dt;
      d.energy = terms.energy_new;
      d.volume = discrete_volume(state.phi, emb.psi);
      d.volume_drift = d.volume - volume0;
      d.energy_law_residual = terms.residual;
      d.pumped_power = terms.pumped_power;
      d.solver_iters = r.report.iterations;
      d.solver_residual = r.report.residual;
      out.g_floor_hits += r.report.g_floor_hits;
      out.max_energy_law_residual = std::max(out.max_energy_law_residual, terms.residual);
      out.max_relative_energy_law_residual = std::max(out.max_relative_energy_law_residual,
                                                      terms.residual / std::max(1.0, std::abs(terms.energy_old)));
      record(state.phi, d);
    }
    out.final_phi = std::move(state.phi);
  } else {
    const CellField ones(p.grid, 1.0);
    ReferenceState state = reference_initial_state(p.phi0, config.physics, config.reference_wall);
    Diagnostics d;
    d.energy = reference_energy(state, config.physics, p.bdata);
    d.volume = discrete_volume(state.base.phi, ones);
    const double volume0 = d.volume;
    record(state.base.phi, d);
    LinearSolver solver;
    for (long n = 0; n < last; ++n) {
      ReferenceStepResult r =
          reference_step(state, config.physics, p.bdata, config.reference_wall, dt, config.solver, solver);
      state = std::move(r.state);
      d.step = n + 1;
      d.t = static_cast<double>(n + 1) * dt;
      d.energy = reference_energy(state, config.physics, p.bdata);
      d.volume = discrete_volume(state.base.phi, ones);
      d.volume_drift = d.volume - volume0;
      d.energy_law_residual = kNaN;
      d.pumped_power = 0.0;
      d.solver_iters = r.report.iterations;
      d.solver_residual = r.report.residual;
      out.g_floor_hits += r.report.g_floor_hits;
      record(state.base.phi, d);
    }
    out.max_energy_law_residual = kNaN;
    out.max_relative_energy_law_residual = kNaN;
    out.final_phi = std::move(state.base.phi);
  }
  out.final_t = static_cast<double>(last) * dt;
  return out;
}

void write_snapshot(std::ostream& out, const CellField& phi, double t) {
  const GridSpec& g = phi.grid();
  out << g.Nx << ' ' << g.Ny << ' ' << fmt(g.Lx) << ' ' << fmt(g.Ly) << ' ' << fmt(t) << '\n';
  for (int j = 0; j < g.Ny; ++j) {
    for (int i = 0; i < g.Nx; ++i) out << (i ? " " : "") << fmt(phi(i, j));
    out << '\n';
  }
}

void write_snapshot(const std::string& path, const CellField& phi, double t) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  write_snapshot(out, phi, t);
}

CellField read_snapshot(const std::string& path, double* t) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  int nx = 0, ny = 0;
  double lx = 0.0, ly = 0.0, time = 0.0;
  if (!(in >> nx >> ny >> lx >> ly >> time)) throw ConfigError(path + ": malformed snapshot header");
  const GridSpec g = GridSpec::centered(lx, ly, nx, ny);
  g.validate();
  CellField phi(g);
  for (std::size_t k = 0; k < phi.size(); ++k) {
    if (!(in >> phi[k])) throw ConfigError(path + ": snapshot has too few values");
  }
  if (t) *t = time;
  return phi;
}

const char* diagnostics_header() {
  return "step,t,energy,volume,volume_drift,energy_law_residual,pumped_power,solver_iters,solver_residual";
}

std::string diagnostics_row(const Diagnostics& d) {
  std::ostringstream o;
  o << d.step << ',' << fmt(d.t) << ',' << fmt(d.energy) << ',' << fmt(d.volume) << ',' << fmt(d.volume_drift) << ','
    << fmt(d.energy_law_residual) << ',' << fmt(d.pumped_power) << ',' << d.solver_iters << ','
    << fmt(d.solver_residual);
  return o.str();
}

std::string resolve_output_dir(const RunConfig& config) {
  const std::filesystem::path dir(config.output_dir);
  const char* root = std::getenv("OPBDE_OUTPUT_ROOT");
  if (root && *root && dir.is_relative()) return (std::filesystem::path(root) / dir).string();
  return dir.string();
}

int cmd_run(const RunConfig& config, std::ostream& log) {
  try {
    config.validate();
    const std::filesystem::path dir = prepare_dir(config);
    write_text(dir / "resolved_config.ini", to_text(config));
    std::ofstream csv(dir / "diagnostics.csv");
    if (!csv) throw ConfigError("cannot write " + (dir / "diagnostics.csv").string());
    csv << diagnostics_header() << '\n';
    const long last = config.steps();
    try {
      run(config, [&](const CellField& phi, const Diagnostics& d) {
        if (is_record_step(d.step, config.diagnostics_every, last)) csv << diagnostics_row(d) << '\n' << std::flush;
        const bool snap = d.step == last || (config.snapshot_every > 0 && d.step % config.snapshot_every == 0);
        if (snap) {
          char name[40];
          std::snprintf(name, sizeof name, "snapshot_%08ld.txt", d.step);
          write_snapshot((dir / name).string(), phi, d.t);
        }
      });
    } catch (const SolveError& e) {
      csv.flush();
      log << "solver failure: " << e.what() << '\n';
      return 2;
    } catch (const AssemblyError& e) {
      csv.flush();
      log << "solver failure: " << e.what() << '\n';
      return 2;
    }
    log << "wrote " << dir.string() << '\n';
    return 0;
  } catch (const ConfigError& e) {
    log << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    log << "configuration error: " << e.what() << '\n';
    return 1;
  }
}

std::vector<long> steps_for_times(const RunConfig& config, const std::vector<double>& times) {
  std::vector<long> steps;
  for (double t : times) {
    if (!(t >= 0.0)) throw ConfigError("compare: times must be non-negative");
    const long s = std::lround(t / config.dt);
    if (std::abs(static_cast<double>(s) * config.dt - t) > 1e-9 * std::max(1.0, t)) {
      throw ConfigError("compare: time " + fmt(t) + " is not a whole number of steps of dt = " + fmt(config.dt));
    }
    steps.push_back(s);
  }
  return steps;
}

ComparisonReport compare(const RunConfig& ref, const RunConfig& ext, const std::vector<double>& times,
                         double mask_threshold) {
  check_pair(ref, ext);
  if (times.empty()) throw ConfigError("compare: no comparison times given");
  const Captured r = capture(ref, steps_for_times(ref, times));
  const Captured e = capture(ext, steps_for_times(ext, times));
  const CellField mask = mask_field(ext, e.grid);
  ComparisonReport report;
  report.times = times;
  report.eps = ext.physics.eps;
  report.config_digest = config_digest(ext) + ":" + config_digest(ref);
  for (std::size_t k = 0; k < times.size(); ++k) {
    report.l2_errors.push_back(restricted_error(r.fields[k], e.fields[k], mask, mask_threshold));
  }
  return report;
}

int cmd_compare(const RunConfig& ref, const RunConfig& ext, const std::vector<double>& times, std::ostream& log,
                double mask_threshold) {
  try {
    ref.validate();
    ext.validate();
    const ComparisonReport report = compare(ref, ext, times, mask_threshold);
    const std::filesystem::path dir = prepare_dir(ext);
    write_text(dir / "resolved_config.ini", to_text(ext));
    write_text(dir / "resolved_reference_config.ini", to_text(ref));
    std::ofstream csv(dir / "comparison.csv");
    csv << "t,l2_error,eps,digest\n";
    for (std::size_t k = 0; k < report.times.size(); ++k) {
      csv << fmt(report.times[k]) << ',' << fmt(report.l2_errors[k]) << ',' << fmt(report.eps) << ','
          << report.config_digest << '\n';
    }
    log << "wrote " << (dir / "comparison.csv").string() << '\n';
    return 0;
  } catch (const SolveError& e) {
    log << "solver failure: " << e.what() << '\n';
    return 2;
  } catch (const AssemblyError& e) {
    log << "solver failure: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    log << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    log << "configuration error: " << e.what() << '\n';
    return 1;
  }
}

std::vector<ComparisonReport> eps_sweep(const RunConfig& ref, const RunConfig& ext, const std::vector<double>& eps_list,
                                        const std::vector<double>& times, double mask_threshold) {
  check_pair(ref, ext);
  if (eps_list.empty()) throw ConfigError("eps_sweep: empty eps list");
  const Captured r = capture(ref, steps_for_times(ref, times));
  std::vector<ComparisonReport> reports;
  for (double eps : eps_list) {
    const RunConfig member = with_key(ext, SweepKey::eps, eps);
    const Captured e = capture(member, steps_for_times(member, times));
    const CellField mask = mask_field(member, e.grid);
    ComparisonReport rep;
    rep.times = times;
    rep.eps = eps;
    rep.config_digest = config_digest(member) + ":" + config_digest(ref);
    for (std::size_t k = 0; k < times.size(); ++k) {
      rep.l2_errors.push_back(restricted_error(r.fields[k], e.fields[k], mask, mask_threshold));
    }
    reports.push_back(std::move(rep));
  }
  return reports;
}

bool errors_decrease(const std::vector<ComparisonReport>& reports) {
  for (std::size_t k = 1; k < reports.size(); ++k) {
    const auto& a = reports[k - 1].l2_errors;
    const auto& b = reports[k].l2_errors;
    if (a.size() != b.size()) return false;
    for (std::size_t m = 0; m < a.size(); ++m) {
      if (!(b[m] < a[m])) return false;
    }
  }
  return true;
}

GammaSweepReport gamma_sweep(const RunConfig& config, const std::vector<double>& gammas, double slack) {
  if (gammas.empty()) throw ConfigError("gamma_sweep: empty gamma list");
  GammaSweepReport rep;
  rep.gammas = gammas;
  for (double g : gammas) {
    if (!(g > 0.0)) throw ConfigError("gamma_sweep: gamma must be positive or inf");
    RunSummary s = run(with_key(config, SweepKey::gamma, g));
    std::vector<double> times, energies;
    for (const Diagnostics& d : s.records) {
      times.push_back(d.t);
      energies.push_back(d.energy);
    }
    if (rep.times.empty()) rep.times = times;
    rep.energies.push_back(std::move(energies));
    rep.final_phi.push_back(std::move(s.final_phi));
  }
  for (std::size_t a = 0; a < gammas.size(); ++a) {
    for (std::size_t b = 0; b < gammas.size(); ++b) {
      if (!(gammas[b] > gammas[a])) continue;
      for (std::size_t m = 0; m < rep.times.size(); ++m) {
        rep.worst_violation = std::max(rep.worst_violation, rep.energies[b][m] - rep.energies[a][m]);
      }
    }
  }
  rep.ordered = rep.worst_violation <= slack;
  return rep;
}

std::vector<SweepRow> sweep(const RunConfig& config, SweepKey key, const std::vector<double>& values,
                            const std::optional<RunConfig>& reference, double mask_threshold) {
  if (values.empty()) throw ConfigError("sweep: empty value list");
  std::vector<SweepRow> rows;
  std::vector<CellField> finals;
  for (double v : values) {
    const RunConfig member = with_key(config, key, v);
    RunSummary s = run(member);
    SweepRow row;
    row.value = v;
    row.steps = s.steps;
    row.final_energy = s.records.back().energy;
    row.max_energy_law_residual = s.max_energy_law_residual;
    row.max_abs_volume_drift = s.max_abs_volume_drift;
    row.l2_error = kNaN;
    row.error_ratio = kNaN;
    const CellField mask = mask_field(member, s.final_phi.grid());
    if (reference) {
      const RunConfig ref = with_key(*reference, key, v);
      check_pair(ref, member);
      const RunSummary r = run(ref);
      row.l2_error = restricted_error(r.final_phi, s.final_phi, mask, mask_threshold);
    } else if (key == SweepKey::dt) {
      const RunSummary half = run(with_key(config, key, 0.5 * v));
      row.l2_error = l2_error_restricted(s.final_phi, half.final_phi, mask, mask_threshold);
    }
    rows.push_back(row);
  }
  if (key == SweepKey::dt) {
    for (SweepRow& row : rows) {
      for (const SweepRow& other : rows) {
        if (std::abs(other.value - 0.5 * row.value) <= 1e-12 * row.value) row.error_ratio = row.l2_error / other.l2_error;
      }
    }
  }
  return rows;
}

int cmd_sweep(const RunConfig& config, SweepKey key, const std::vector<double>& values,
              const std::optional<RunConfig>& reference, std::ostream& log) {
  try {
    config.validate();
    const std::vector<SweepRow> rows = sweep(config, key, values, reference);
    const std::filesystem::path dir = prepare_dir(config);
    write_text(dir / "resolved_config.ini", to_text(config));
    if (reference) write_text(dir / "resolved_reference_config.ini", to_text(*reference));
    std::ofstream csv(dir / "sweep.csv");
    csv << "key,value,steps,final_energy,max_energy_law_residual,max_abs_volume_drift,l2_error,error_ratio\n";
    for (const SweepRow& r : rows) {
      csv << key_name(key) << ',' << fmt(r.value) << ',' << r.steps << ',' << fmt(r.final_energy) << ','
          << fmt(r.max_energy_law_residual) << ',' << fmt(r.max_abs_volume_drift) << ',' << fmt(r.l2_error) << ','
          << fmt(r.error_ratio) << '\n';
    }
    log << "wrote " << (dir / "sweep.csv").string() << '\n';
    return 0;
  } catch (const SolveError& e) {
    log << "solver failure: " << e.what() << '\n';
    return 2;
  } catch (const AssemblyError& e) {
    log << "solver failure: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    log << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    log << "configuration error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace opbde
