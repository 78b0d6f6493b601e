#include "opbde/config.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "opbde/errors.hpp"

namespace opbde {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  if (t == "inf" || t == "Inf" || t == "infinity") return std::numeric_limits<double>::infinity();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || std::isnan(v)) {
    throw ConfigError(what + ": expected a number, got '" + t + "'");
  }
  return v;
}

long parse_long(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  long v = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || p != t.data() + t.size()) {
    throw ConfigError(what + ": expected an integer, got '" + t + "'");
  }
  return v;
}

std::vector<double> parse_numbers(const std::string& s, std::size_t n, const std::string& what) {
  const auto w = words(s);
  if (w.size() != n) throw ConfigError(what + ": expected " + std::to_string(n) + " numbers");
  std::vector<double> out;
  for (const auto& x : w) out.push_back(parse_double(x, what));
  return out;
}

Rect parse_rect(const std::string& s, const std::string& what) {
  const auto v = parse_numbers(s, 4, what);
  return Rect{v[0], v[1], v[2], v[3]};
}

std::string rect_text(const Rect& r) {
  return fmt(r.x_min) + " " + fmt(r.x_max) + " " + fmt(r.y_min) + " " + fmt(r.y_max);
}

ProfileSpec parse_profile(const std::string& s, const std::string& what) {
  const auto w = words(s);
  ProfileSpec p;
  if (!w.empty() && w[0] == "sinx") {
    if (w.size() != 3) throw ConfigError(what + ": expected 'sinx <amplitude> <wavelength>'");
    p.sinx = true;
    p.amplitude = parse_double(w[1], what);
    p.wavelength = parse_double(w[2], what);
    if (!(p.wavelength > 0.0)) throw ConfigError(what + ": wavelength must be positive");
    return p;
  }
  p.constant = parse_double(s, what);
  return p;
}

// Flat view of the shape section, so presets and overrides can be merged key
// by key before the variant is built.
struct ShapeParams {
  std::string type = "rectangle";
  Rect box{-0.5, 0.5, -0.5, 0.5};
  double y0 = 0.0;
  double amplitude = 0.0;
  double wavelength = 1.0;
  std::optional<Rect> clip;
  std::vector<Circle> holes;
  std::vector<Rect> cuts;
  Circle disk{0.0, 0.0, 0.25};
};

ShapeParams flatten(const ShapeSpec& shape) {
  ShapeParams p;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FullRectangle>) {
          p.type = "rectangle";
          p.box = s.extent;
        } else if constexpr (std::is_same_v<T, HalfPlaneSubstrate>) {
          p.type = "half_plane";
          p.y0 = s.y0;
          p.clip = s.clip;
        } else if constexpr (std::is_same_v<T, SinusoidalSubstrate>) {
          p.type = "sinusoidal";
          p.y0 = s.y0;
          p.amplitude = s.amplitude;
          p.wavelength = s.wavelength;
          p.clip = s.clip;
        } else if constexpr (std::is_same_v<T, CSGPolygon>) {
          p.type = "csg";
          p.box = s.extent;
          p.holes = s.holes;
          p.cuts = s.corner_cuts;
        } else {
          p.type = "disk";
          p.disk = s.circle;
        }
      },
      shape);
  return p;
}

ShapeSpec build_shape(const ShapeParams& p) {
  if (p.type == "rectangle") return FullRectangle{p.box};
  if (p.type == "half_plane") return HalfPlaneSubstrate{p.y0, p.clip};
  if (p.type == "sinusoidal") return SinusoidalSubstrate{p.y0, p.amplitude, p.wavelength, p.clip};
  if (p.type == "csg") return CSGPolygon{p.box, p.holes, p.cuts};
  if (p.type == "disk") return Disk{p.disk};
  throw ConfigError("shape.type: unknown shape '" + p.type + "'");
}

struct Entry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

ExperimentKind parse_kind(const std::string& s) {
  if (s == "coarsening") return ExperimentKind::coarsening;
  if (s == "droplet_flat") return ExperimentKind::droplet_flat;
  if (s == "droplet_curved") return ExperimentKind::droplet_curved;
  if (s == "custom") return ExperimentKind::custom;
  throw ConfigError("experiment.kind: unknown experiment '" + s + "'");
}

SolverMethod parse_method(const std::string& s) {
  if (s == "auto") return SolverMethod::automatic;
  if (s == "direct") return SolverMethod::direct;
  if (s == "krylov") return SolverMethod::krylov;
  if (s == "krylov_ilut") return SolverMethod::krylov_ilut;
  if (s == "richardson") return SolverMethod::richardson;
  throw ConfigError("solver.method: unknown method '" + s + "'");
}

InitialKind parse_initial(const std::string& s) {
  if (s == "random") return InitialKind::random;
  if (s == "droplet") return InitialKind::droplet;
  if (s == "cosine") return InitialKind::cosine;
  if (s == "constant") return InitialKind::constant;
  throw ConfigError("initial.type: unknown initial condition '" + s + "'");
}

std::string to_string(InitialKind k) {
  switch (k) {
    case InitialKind::random: return "random";
    case InitialKind::droplet: return "droplet";
    case InitialKind::cosine: return "cosine";
    case InitialKind::constant: return "constant";
  }
  return "random";
}

class Applier {
 public:
  Applier(RunConfig& c, ShapeParams& s) : c_(c), s_(s) {}

  bool x_min_set = false;
  bool y_min_set = false;

  void apply(const Entry& e) {
    const std::string name = e.section + "." + e.key;
    const std::string& v = e.value;
    if (e.section == "experiment") {
      if (e.key == "kind") return;  // handled up front
      if (e.key == "solver") {
        if (v == "extended") c_.solver_kind = SolverKind::extended;
        else if (v == "reference") c_.solver_kind = SolverKind::reference;
        else throw ConfigError(name + ": expected 'extended' or 'reference'");
        return;
      }
      if (e.key == "seed") {
        const long s = parse_long(v, name);
        if (s < 0) throw ConfigError(name + ": must be non-negative");
        c_.seed = static_cast<std::uint64_t>(s);
        return;
      }
      if (e.key == "output_dir") {
        c_.output_dir = v;
        return;
      }
    } else if (e.section == "grid") {
      if (e.key == "Lx") return void(c_.grid.Lx = parse_double(v, name));
      if (e.key == "Ly") return void(c_.grid.Ly = parse_double(v, name));
      if (e.key == "Nx") return void(c_.grid.Nx = static_cast<int>(parse_long(v, name)));
      if (e.key == "Ny") return void(c_.grid.Ny = static_cast<int>(parse_long(v, name)));
      if (e.key == "x_min") {
        x_min_set = true;
        return void(c_.grid.x_min = parse_double(v, name));
      }
      if (e.key == "y_min") {
        y_min_set = true;
        return void(c_.grid.y_min = parse_double(v, name));
      }
    } else if (e.section == "physics") {
      PhysParams& p = c_.physics;
      if (e.key == "K") return void(p.K = parse_double(v, name));
      if (e.key == "M") return void(p.M = parse_double(v, name));
      if (e.key == "alpha") return void(p.alpha = parse_double(v, name));
      if (e.key == "A") return void(p.A = parse_double(v, name));
      if (e.key == "eps") return void(p.eps = parse_double(v, name));
      if (e.key == "gamma_inv") return void(p.gamma_inv = parse_double(v, name));
      if (e.key == "gamma") {
        const double g = parse_double(v, name);
        if (!(g > 0.0)) throw ConfigError(name + ": must be positive or 'inf'");
        p.gamma_inv = std::isinf(g) ? 0.0 : 1.0 / g;
        return;
      }
    } else if (e.section == "boundary") {
      if (e.key == "h1") return void(c_.h1 = parse_profile(v, name));
      if (e.key == "h2") return void(c_.h2 = parse_profile(v, name));
      if (e.key == "h3") return void(c_.h3 = parse_profile(v, name));
      if (e.key == "reference_wall") {
        if (v == "neumann") c_.reference_wall = ReferenceBoundary::neumann;
        else if (v == "dynamic_bottom") c_.reference_wall = ReferenceBoundary::dynamic_bottom;
        else throw ConfigError(name + ": expected 'neumann' or 'dynamic_bottom'");
        return;
      }
    } else if (e.section == "time") {
      if (e.key == "dt") return void(c_.dt = parse_double(v, name));
      if (e.key == "t_final") return void(c_.t_final = parse_double(v, name));
      if (e.key == "diagnostics_every") return void(c_.diagnostics_every = parse_long(v, name));
      if (e.key == "snapshot_every") return void(c_.snapshot_every = parse_long(v, name));
    } else if (e.section == "shape") {
      if (e.key == "type") return void(s_.type = v);
      if (e.key == "x_min") return void(s_.box.x_min = parse_double(v, name));
      if (e.key == "x_max") return void(s_.box.x_max = parse_double(v, name));
      if (e.key == "y_min") return void(s_.box.y_min = parse_double(v, name));
      if (e.key == "y_max") return void(s_.box.y_max = parse_double(v, name));
      if (e.key == "y0") return void(s_.y0 = parse_double(v, name));
      if (e.key == "amplitude") return void(s_.amplitude = parse_double(v, name));
      if (e.key == "wavelength") return void(s_.wavelength = parse_double(v, name));
      if (e.key == "cx") return void(s_.disk.cx = parse_double(v, name));
      if (e.key == "cy") return void(s_.disk.cy = parse_double(v, name));
      if (e.key == "radius") return void(s_.disk.radius = parse_double(v, name));
      if (e.key == "clip") {
        if (v == "none") s_.clip.reset();
        else s_.clip = parse_rect(v, name);
        return;
      }
      if (e.key == "holes") {
        s_.holes.clear();
        for (const auto& h : split(v, ';')) {
          const auto n = parse_numbers(h, 3, name);
          s_.holes.push_back(Circle{n[0], n[1], n[2]});
        }
        return;
      }
      if (e.key == "cuts") {
        s_.cuts.clear();
        for (const auto& r : split(v, ';')) s_.cuts.push_back(parse_rect(r, name));
        return;
      }
    } else if (e.section == "initial") {
      InitialSpec& ic = c_.initial;
      if (e.key == "type") return void(ic.kind = parse_initial(v));
      if (e.key == "amplitude") return void(ic.amplitude = parse_double(v, name));
      if (e.key == "cx") return void(ic.cx = parse_double(v, name));
      if (e.key == "cy") return void(ic.cy = parse_double(v, name));
      if (e.key == "radius") return void(ic.radius = parse_double(v, name));
      if (e.key == "width") return void(ic.width = parse_double(v, name));
      if (e.key == "wavelength") return void(ic.wavelength = parse_double(v, name));
    } else if (e.section == "solver") {
      SolverOptions& o = c_.solver;
      if (e.key == "method") return void(o.method = parse_method(v));
      if (e.key == "rel_tol") return void(o.rel_tol = parse_double(v, name));
      if (e.key == "abs_tol") return void(o.abs_tol = parse_double(v, name));
      if (e.key == "max_iterations") return void(o.max_iterations = static_cast<int>(parse_long(v, name)));
      if (e.key == "direct_threshold") {
        const long t = parse_long(v, name);
        if (t < 0) throw ConfigError(name + ": must be non-negative");
        return void(o.direct_threshold = static_cast<std::size_t>(t));
      }
      if (e.key == "refresh_iterations") return void(o.refresh_iterations = static_cast<int>(parse_long(v, name)));
      if (e.key == "ilut_droptol") return void(o.ilut_droptol = parse_double(v, name));
      if (e.key == "ilut_fill") return void(o.ilut_fill = static_cast<int>(parse_long(v, name)));
    } else {
      throw ConfigError("unknown section [" + e.section + "]");
    }
    throw ConfigError("unknown key '" + e.key + "' in [" + e.section + "]");
  }

 private:
  RunConfig& c_;
  ShapeParams& s_;
};

std::string with_line(const std::string& origin, int line, const std::string& msg) {
  return origin + ":" + std::to_string(line) + ": " + msg;
}

}  // namespace

std::string ProfileSpec::to_string() const {
  if (sinx) return "sinx " + fmt(amplitude) + " " + fmt(wavelength);
  return fmt(constant);
}

long RunConfig::steps() const { return std::lround(t_final / dt); }

void RunConfig::validate() const {
  auto need = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  need(grid.Lx > 0.0 && std::isfinite(grid.Lx), "grid.Lx: must be positive");
  need(grid.Ly > 0.0 && std::isfinite(grid.Ly), "grid.Ly: must be positive");
  need(grid.Nx >= 2, "grid.Nx: need at least 2 cells");
  need(grid.Ny >= 2, "grid.Ny: need at least 2 cells");
  need(physics.K > 0.0 && std::isfinite(physics.K), "physics.K: must be positive");
  need(physics.M > 0.0 && std::isfinite(physics.M), "physics.M: must be positive");
  need(physics.gamma_inv >= 0.0 && std::isfinite(physics.gamma_inv), "physics.gamma: must be positive or 'inf'");
  need(physics.alpha >= 0.0 && std::isfinite(physics.alpha), "physics.alpha: must be non-negative");
  need(physics.A >= 0.0 && std::isfinite(physics.A), "physics.A: must be non-negative");
  need(physics.eps > 0.0 && std::isfinite(physics.eps), "physics.eps: must be positive");
  need(dt > 0.0 && std::isfinite(dt), "time.dt: must be positive");
  need(t_final >= 0.0 && std::isfinite(t_final), "time.t_final: must be non-negative");
  need(std::abs(static_cast<double>(steps()) * dt - t_final) <= 1e-9 * std::max(1.0, t_final),
       "time.t_final: must be a whole number of time steps");
  need(diagnostics_every >= 1, "time.diagnostics_every: must be at least 1");
  need(snapshot_every >= 0, "time.snapshot_every: must be non-negative");
  need(snapshot_every % diagnostics_every == 0, "time.snapshot_every: must be a multiple of diagnostics_every");
  need(solver.rel_tol > 0.0, "solver.rel_tol: must be positive");
  need(solver.abs_tol >= 0.0, "solver.abs_tol: must be non-negative");
  need(solver.max_iterations >= 1, "solver.max_iterations: must be at least 1");
  need(solver.refresh_iterations >= 1, "solver.refresh_iterations: must be at least 1");
  need(solver.ilut_droptol >= 0.0, "solver.ilut_droptol: must be non-negative");
  need(solver.ilut_fill >= 1, "solver.ilut_fill: must be at least 1");
  need(initial.width > 0.0, "initial.width: must be positive");
  need(initial.wavelength > 0.0, "initial.wavelength: must be positive");
  need(!output_dir.empty(), "experiment.output_dir: must not be empty");

  const ShapeParams sp = flatten(shape);
  if (sp.type == "sinusoidal") need(sp.wavelength > 0.0, "shape.wavelength: must be positive");
  if (sp.type == "disk") need(sp.disk.radius > 0.0, "shape.radius: must be positive");
  if (sp.type == "rectangle" || sp.type == "csg") {
    need(sp.box.x_max > sp.box.x_min, "shape.x_max: must exceed shape.x_min");
    need(sp.box.y_max > sp.box.y_min, "shape.y_max: must exceed shape.y_min");
  }

  if (solver_kind == SolverKind::reference) {
    need(std::holds_alternative<FullRectangle>(shape), "experiment.solver: the reference solver needs shape.type = rectangle");
    need(!h3.sinx && h3.constant == 0.0, "boundary.h3: the reference solver supports only h3 = 0");
    if (reference_wall == ReferenceBoundary::dynamic_bottom) {
      need(!h1.sinx && !h2.sinx, "boundary.h1: the reference solver takes constant wall data only");
    }
  } else {
    try {
      check_clearance(shape, grid, physics.eps);
    } catch (const ParameterError& e) {
      throw ConfigError(std::string("shape: ") + e.what());
    }
  }
}

RunConfig preset(ExperimentKind kind) {
  RunConfig c;
  c.experiment = kind;
  switch (kind) {
    case ExperimentKind::custom:
      break;
    case ExperimentKind::coarsening:
      c.output_dir = "out/coarsening";
      c.grid = GridSpec::centered(1.25, 1.25, 160, 160);
      c.physics.eps = 1e-2;
      c.dt = 1e-5;
      c.t_final = 0.01;
      c.diagnostics_every = 10;
      c.snapshot_every = 500;
      c.shape = FullRectangle{Rect{-0.5, 0.5, -0.5, 0.5}};
      c.initial.kind = InitialKind::random;
      c.initial.amplitude = 1e-3;
      c.reference_wall = ReferenceBoundary::neumann;
      break;
    case ExperimentKind::droplet_flat:
    case ExperimentKind::droplet_curved:
      c.output_dir = kind == ExperimentKind::droplet_flat ? "out/droplet_flat" : "out/droplet_curved";
      c.grid = GridSpec::centered(1.25, 1.25, 160, 160);
      c.physics.eps = 2e-3;
      c.physics.gamma_inv = 1.0 / 10.0;
      c.dt = 1e-3;
      c.t_final = 10.0;
      c.diagnostics_every = 100;
      c.snapshot_every = 1000;
      c.initial.kind = InitialKind::droplet;
      c.initial.cx = 0.0;
      c.initial.cy = 0.2;
      c.initial.radius = 0.2;
      c.initial.width = 0.01;
      c.reference_wall = ReferenceBoundary::dynamic_bottom;
      if (kind == ExperimentKind::droplet_flat) {
        c.shape = FullRectangle{Rect{-0.5, 0.5, 0.0, 0.5}};
      } else {
        c.shape = SinusoidalSubstrate{0.0, 0.05, 0.5, Rect{-0.5, 0.5, -0.1, 0.5}};
        c.initial.cx = 0.05;
        c.initial.cy = 0.25;
        c.physics.gamma_inv = 1.0 / 20.0;
      }
      break;
  }
  // Krylov with a reused LU preconditioner is much cheaper per step than
  // refactorising; the residual contract is the same.
  c.solver.method = SolverMethod::krylov;
  return c;
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  std::vector<Entry> entries;
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    // '#' starts a comment anywhere; ';' only at the start of a line, since it
    // also separates list items in values.
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty() || s.front() == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(with_line(origin, line, "malformed section header"));
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(with_line(origin, line, "expected 'key = value'"));
    if (section.empty()) throw ConfigError(with_line(origin, line, "key outside of any section"));
    Entry e{section, trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line};
    const std::string full = e.section + "." + e.key;
    if (seen.count(full)) throw ConfigError(with_line(origin, line, "duplicate key '" + full + "'"));
    seen[full] = line;
    entries.push_back(std::move(e));
  }

  ExperimentKind kind = ExperimentKind::custom;
  for (const Entry& e : entries) {
    if (e.section == "experiment" && e.key == "kind") {
      try {
        kind = parse_kind(e.value);
      } catch (const ConfigError& err) {
        throw ConfigError(with_line(origin, e.line, err.what()));
      }
    }
  }

  RunConfig c = preset(kind);
  ShapeParams sp = flatten(c.shape);
  Applier applier(c, sp);
  for (const Entry& e : entries) {
    try {
      applier.apply(e);
    } catch (const ConfigError& err) {
      throw ConfigError(with_line(origin, e.line, err.what()));
    }
  }
  if (!applier.x_min_set) c.grid.x_min = -0.5 * c.grid.Lx;
  if (!applier.y_min_set) c.grid.y_min = -0.5 * c.grid.Ly;

  auto line_of = [&](const std::string& msg) {
    const auto colon = msg.find(':');
    std::string key = colon == std::string::npos ? msg : msg.substr(0, colon);
    if (key == "time.t_final" && !seen.count(key) && seen.count("time.dt")) key = "time.dt";
    const auto it = seen.find(key);
    if (it != seen.end()) return with_line(origin, it->second, msg);
    return origin + ": " + msg;
  };
  try {
    c.shape = build_shape(sp);
    c.validate();
  } catch (const ConfigError& err) {
    throw ConfigError(line_of(err.what()));
  }
  return c;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open configuration file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

std::string to_text(const RunConfig& c) {
  std::ostringstream o;
  o << "[experiment]\n"
    << "kind = " << to_string(c.experiment) << "\n"
    << "solver = " << to_string(c.solver_kind) << "\n"
    << "seed = " << c.seed << "\n"
    << "output_dir = " << c.output_dir << "\n\n";
  o << "[grid]\n"
    << "Lx = " << fmt(c.grid.Lx) << "\nLy = " << fmt(c.grid.Ly) << "\n"
    << "Nx = " << c.grid.Nx << "\nNy = " << c.grid.Ny << "\n"
    << "x_min = " << fmt(c.grid.x_min) << "\ny_min = " << fmt(c.grid.y_min) << "\n\n";
  o << "[physics]\n"
    << "K = " << fmt(c.physics.K) << "\nM = " << fmt(c.physics.M) << "\n"
    << "gamma_inv = " << fmt(c.physics.gamma_inv) << "\n"
    << "alpha = " << fmt(c.physics.alpha) << "\nA = " << fmt(c.physics.A) << "\n"
    << "eps = " << fmt(c.physics.eps) << "\n\n";
  o << "[boundary]\n"
    << "h1 = " << c.h1.to_string() << "\nh2 = " << c.h2.to_string() << "\nh3 = " << c.h3.to_string() << "\n"
    << "reference_wall = " << to_string(c.reference_wall) << "\n\n";
  o << "[time]\n"
    << "dt = " << fmt(c.dt) << "\nt_final = " << fmt(c.t_final) << "\n"
    << "diagnostics_every = " << c.diagnostics_every << "\nsnapshot_every = " << c.snapshot_every << "\n\n";

  const ShapeParams sp = flatten(c.shape);
  o << "[shape]\ntype = " << sp.type << "\n";
  if (sp.type == "rectangle" || sp.type == "csg") {
    o << "x_min = " << fmt(sp.box.x_min) << "\nx_max = " << fmt(sp.box.x_max) << "\n"
      << "y_min = " << fmt(sp.box.y_min) << "\ny_max = " << fmt(sp.box.y_max) << "\n";
  }
  if (sp.type == "csg") {
    std::string holes, cuts;
    for (const Circle& h : sp.holes) {
      holes += (holes.empty() ? "" : "; ") + fmt(h.cx) + " " + fmt(h.cy) + " " + fmt(h.radius);
    }
    for (const Rect& r : sp.cuts) cuts += (cuts.empty() ? "" : "; ") + rect_text(r);
    o << "holes = " << holes << "\ncuts = " << cuts << "\n";
  }
  if (sp.type == "half_plane" || sp.type == "sinusoidal") {
    o << "y0 = " << fmt(sp.y0) << "\n";
    if (sp.type == "sinusoidal") {
      o << "amplitude = " << fmt(sp.amplitude) << "\nwavelength = " << fmt(sp.wavelength) << "\n";
    }
    o << "clip = " << (sp.clip ? rect_text(*sp.clip) : std::string("none")) << "\n";
  }
  if (sp.type == "disk") {
    o << "cx = " << fmt(sp.disk.cx) << "\ncy = " << fmt(sp.disk.cy) << "\nradius = " << fmt(sp.disk.radius) << "\n";
  }
  o << "\n[initial]\n"
    << "type = " << to_string(c.initial.kind) << "\n"
    << "amplitude = " << fmt(c.initial.amplitude) << "\n"
    << "cx = " << fmt(c.initial.cx) << "\ncy = " << fmt(c.initial.cy) << "\n"
    << "radius = " << fmt(c.initial.radius) << "\nwidth = " << fmt(c.initial.width) << "\n"
    << "wavelength = " << fmt(c.initial.wavelength) << "\n\n";
  o << "[solver]\n"
    << "method = " << to_string(c.solver.method) << "\n"
    << "rel_tol = " << fmt(c.solver.rel_tol) << "\nabs_tol = " << fmt(c.solver.abs_tol) << "\n"
    << "max_iterations = " << c.solver.max_iterations << "\n"
    << "direct_threshold = " << c.solver.direct_threshold << "\n"
    << "refresh_iterations = " << c.solver.refresh_iterations << "\n"
    << "ilut_droptol = " << fmt(c.solver.ilut_droptol) << "\n"
    << "ilut_fill = " << c.solver.ilut_fill << "\n";
  return o.str();
}

std::string config_digest(const RunConfig& config) {
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char ch : to_text(config)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::coarsening: return "coarsening";
    case ExperimentKind::droplet_flat: return "droplet_flat";
    case ExperimentKind::droplet_curved: return "droplet_curved";
    case ExperimentKind::custom: return "custom";
  }
  return "custom";
}

std::string to_string(SolverKind k) { return k == SolverKind::reference ? "reference" : "extended"; }

std::string to_string(ReferenceBoundary b) {
  return b == ReferenceBoundary::dynamic_bottom ? "dynamic_bottom" : "neumann";
}

std::string to_string(SolverMethod m) {
  switch (m) {
    case SolverMethod::automatic: return "auto";
    case SolverMethod::direct: return "direct";
    case SolverMethod::krylov: return "krylov";
    case SolverMethod::krylov_ilut: return "krylov_ilut";
    case SolverMethod::richardson: return "richardson";
  }
  return "auto";
}

}  // namespace opbde
