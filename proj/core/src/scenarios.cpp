#include "tetra/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "tetra/errors.hpp"
#include "tetra/parallel.hpp"

namespace tetra {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// C^2 quintic step on [0, 1]
double step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
}

double step_d(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return 30.0 * x * x * (1.0 - x) * (1.0 - x);
}

// C^infinity bump of r2 = |x|^2 / rho^2, equal to 1 at 0 and 0 for r2 >= 1
double bump(double r2) { return r2 >= 1.0 ? 0.0 : std::exp(1.0 - 1.0 / (1.0 - r2)); }
double bump_d(double r2) {
  if (r2 >= 1.0) return 0.0;
  const double d = 1.0 - r2;
  return -bump(r2) / (d * d);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

std::string to_string(ScenarioId id) {
  switch (id) {
    case ScenarioId::kSuperconductivity: return "superconductivity";
    case ScenarioId::kUnstableEquilibrium: return "unstable_equilibrium";
    case ScenarioId::kMechanical: return "mechanical";
    case ScenarioId::kReebChord: return "reeb_chord";
  }
  return "?";
}

ScenarioId scenario_from_string(const std::string& name) {
  for (auto id : {ScenarioId::kSuperconductivity, ScenarioId::kUnstableEquilibrium,
                  ScenarioId::kMechanical, ScenarioId::kReebChord})
    if (to_string(id) == name) return id;
  throw ConfigError("unknown scenario '" + name +
                    "' (expected superconductivity, unstable_equilibrium, mechanical, reeb_chord)");
}

std::string to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::kBump: return "bump";
    case PotentialKind::kZero: return "zero";
    case PotentialKind::kPeriodicBump: return "periodic_bump";
  }
  return "?";
}

PotentialKind potential_from_string(const std::string& name) {
  for (auto k : {PotentialKind::kBump, PotentialKind::kZero, PotentialKind::kPeriodicBump})
    if (to_string(k) == name) return k;
  throw ConfigError("unknown potential '" + name + "' (expected bump, zero, periodic_bump)");
}

ScenarioConfig default_scenario_config(ScenarioId id) {
  ScenarioConfig c;
  c.id = id;
  switch (id) {
    case ScenarioId::kSuperconductivity:
      c.T = 0.25;
      break;
    case ScenarioId::kUnstableEquilibrium:
    case ScenarioId::kMechanical:
      c.T = std::numbers::pi / 4.0;
      break;
    case ScenarioId::kReebChord:
      c.T = std::numbers::pi / 4.0;
      c.reeb_model = ReebModel::kSphere;
      break;
  }
  return c;
}

HamiltonianSpec cosine_potential(const ContactModel& model, double shift) {
  const auto chart = model.ambient_chart();
  const auto n = static_cast<std::size_t>(chart.dim_pairs());
  auto value = [n, shift](std::span<const double> x, double) {
    double v = 1.0;
    for (std::size_t i = 0; i < n; ++i) v *= std::cos(kTwoPi * x[n + i]);
    return v + shift;
  };
  auto gradient = [n](std::span<const double> x, double, std::span<double> g) {
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = 0.0;
      double v = -kTwoPi * std::sin(kTwoPi * x[n + i]);
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) v *= std::cos(kTwoPi * x[n + j]);
      g[n + i] = v;
    }
  };
  return HamiltonianSpec(chart, value, gradient, TimeDependence::kAutonomous, "cosine_potential");
}

HamiltonianSpec saddle_hamiltonian(const PhaseChart& chart) {
  const auto n = static_cast<std::size_t>(chart.dim_pairs());
  auto value = [n](std::span<const double> x, double) {
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) v += x[i] * x[i] - x[n + i] * x[n + i];
    return 0.5 * v;
  };
  auto gradient = [n](std::span<const double> x, double, std::span<double> g) {
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = x[i];
      g[n + i] = -x[n + i];
    }
  };
  return HamiltonianSpec(chart, value, gradient, TimeDependence::kAutonomous, "saddle");
}

HamiltonianSpec mechanical_potential(const PhaseChart& chart, double depth, double R0,
                                     PotentialKind kind, double modulation) {
  const auto n = static_cast<std::size_t>(chart.dim_pairs());
  if (kind == PotentialKind::kZero) {
    auto value = [](std::span<const double>, double) { return 0.0; };
    auto gradient = [](std::span<const double>, double, std::span<double> g) {
      std::fill(g.begin(), g.end(), 0.0);
    };
    return HamiltonianSpec(chart, value, gradient, TimeDependence::kAutonomous, "zero_potential");
  }
  // phi(r) = 0 for r <= r_a, 1 for r >= sqrt(R0): constant on the whole wall shell
  const double rb = std::sqrt(R0), ra = 0.5 * rb;
  const double mod = kind == PotentialKind::kPeriodicBump ? modulation : 0.0;
  auto radius = [n](std::span<const double> x) {
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) r2 += x[n + i] * x[n + i];
    return std::sqrt(r2);
  };
  auto value = [=](std::span<const double> x, double t) {
    const double m = 1.0 + mod * std::sin(kTwoPi * t);
    return -depth * m * step((radius(x) - ra) / (rb - ra));
  };
  auto gradient = [=](std::span<const double> x, double t, std::span<double> g) {
    const double m = 1.0 + mod * std::sin(kTwoPi * t);
    const double r = radius(x);
    const double d = r > 0.0 ? -depth * m * step_d((r - ra) / (rb - ra)) / (rb - ra) / r : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = 0.0;
      g[n + i] = d * x[n + i];
    }
  };
  const auto time = mod != 0.0 ? TimeDependence::kPeriodic : TimeDependence::kAutonomous;
  HamiltonianSpec u(chart, value, gradient, time, "bump_potential");
  if (mod != 0.0) {
    auto dt = [=](std::span<const double> x, double t) {
      return -depth * mod * kTwoPi * std::cos(kTwoPi * t) * step((radius(x) - ra) / (rb - ra));
    };
    u = u.with_time_derivative(dt);
  }
  return u;
}

HamiltonianSpec mechanical_hamiltonian(const PhaseChart& chart, double depth, double R0,
                                       PotentialKind kind, double modulation) {
  const auto n = static_cast<std::size_t>(chart.dim_pairs());
  auto kinetic_value = [n](std::span<const double> x, double) {
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) v += x[i] * x[i];
    return 0.5 * v;
  };
  auto kinetic_gradient = [n](std::span<const double> x, double, std::span<double> g) {
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = x[i];
      g[n + i] = 0.0;
    }
  };
  HamiltonianSpec kinetic(chart, kinetic_value, kinetic_gradient, TimeDependence::kAutonomous,
                          "kinetic");
  return sum(kinetic, mechanical_potential(chart, depth, R0, kind, modulation))
      .renamed("mechanical");
}

namespace {

// smooth bump of the squared chart distance to a region
struct RegionBump {
  RegionPtr region;
  double radius;

  double value(std::span<const double> x) const {
    const auto cp = region->closest_point(x);
    const auto& chart = region->chart();
    double d2 = 0.0;
    for (int i = 0; i < chart.dim(); ++i) {
      const double d = chart.difference(i, x[static_cast<std::size_t>(i)], cp[static_cast<std::size_t>(i)]);
      d2 += d * d;
    }
    return bump(d2 / (radius * radius));
  }

  void add_gradient(std::span<const double> x, double scale, std::span<double> g) const {
    const auto cp = region->closest_point(x);
    const auto& chart = region->chart();
    std::vector<double> diff(static_cast<std::size_t>(chart.dim()));
    double d2 = 0.0;
    for (int i = 0; i < chart.dim(); ++i) {
      const auto k = static_cast<std::size_t>(i);
      diff[k] = chart.difference(i, x[k], cp[k]);
      d2 += diff[k] * diff[k];
    }
    const double r2 = d2 / (radius * radius);
    if (r2 >= 1.0) return;
    const double c = scale * bump_d(r2) * 2.0 / (radius * radius);
    for (std::size_t k = 0; k < diff.size(); ++k) g[k] += c * diff[k];
  }
};

struct PointBump {
  std::vector<double> center;
  double radius;
  PhaseChart chart;

  double r2(std::span<const double> x) const {
    double d2 = 0.0;
    for (int i = 0; i < chart.dim(); ++i) {
      const auto k = static_cast<std::size_t>(i);
      const double d = chart.difference(i, x[k], center[k]);
      d2 += d * d;
    }
    return d2 / (radius * radius);
  }
};

}  // namespace

HamiltonianSpec wall_bump_perturbation(const Tetragon& tet, double amplitude,
                                       const PerturbationSpec& spec) {
  if (!(spec.tube_radius > 0.0)) throw ConfigError("perturbation tube_radius must be positive");
  if (spec.far_factor < 0.0) throw ConfigError("perturbation far_factor must be non-negative");
  if (std::abs(spec.modulation) >= 1.0)
    throw ConfigError("perturbation modulation must satisfy |modulation| < 1");
  const auto& model = tet.model();
  const auto chart = model.ambient_chart();
  RegionBump low{tet.region_ptr(RegionKind::kLowWall), spec.tube_radius};
  RegionBump high{tet.region_ptr(RegionKind::kHighWall), spec.tube_radius};

  // each wall bump must vanish on the opposite wall
  for (const auto& [wall, other] : {std::pair{&low, &high}, std::pair{&high, &low}}) {
    for (const auto& p : other->region->seed_params(256)) {
      if (wall->value(other->region->point_at(p)) != 0.0)
        throw ConfigError("perturbation tube_radius " + fmt(spec.tube_radius) +
                          " is too large: the wall bumps overlap the opposite wall");
    }
  }

  // far bump in the middle of the tetragon, clear of both walls
  std::vector<double> mid_params(1 + static_cast<std::size_t>(model.legendrian_param_dim()), 0.0);
  const auto x0 = model.legendrian_point(std::span<const double>(mid_params).subspan(1));
  PointBump far{model.embed(model.reeb_flow(x0, 0.5 * tet.T()), 0.5 * (tet.R0() + tet.R1())), 1.0,
                chart};
  far.radius = 0.5 * std::min(low.region->distance(far.center), high.region->distance(far.center));

  const double a = amplitude, mod = spec.modulation, ff = spec.far_factor;
  auto value = [=](std::span<const double> x, double t) {
    const double m = 1.0 + mod * std::sin(kTwoPi * t);
    double v = a * m * (low.value(x) - high.value(x));
    if (ff != 0.0) v += ff * a * bump(far.r2(x));
    return v;
  };
  auto gradient = [=](std::span<const double> x, double t, std::span<double> g) {
    std::fill(g.begin(), g.end(), 0.0);
    const double m = 1.0 + mod * std::sin(kTwoPi * t);
    low.add_gradient(x, a * m, g);
    high.add_gradient(x, -a * m, g);
    if (ff != 0.0) {
      const double r2 = far.r2(x);
      if (r2 < 1.0) {
        const double c = ff * a * bump_d(r2) * 2.0 / (far.radius * far.radius);
        for (int i = 0; i < far.chart.dim(); ++i) {
          const auto k = static_cast<std::size_t>(i);
          g[k] += c * far.chart.difference(i, x[k], far.center[k]);
        }
      }
    }
  };
  const auto time = mod != 0.0 ? TimeDependence::kPeriodic : TimeDependence::kAutonomous;
  HamiltonianSpec f(chart, value, gradient, time, "wall_bump");
  if (mod != 0.0) {
    auto dt = [=](std::span<const double> x, double t) {
      return a * mod * kTwoPi * std::cos(kTwoPi * t) * (low.value(x) - high.value(x));
    };
    f = f.with_time_derivative(dt);
  }
  return f;
}

CalibratedPerturbation calibrate_perturbation(const Tetragon& tet, const PerturbationSpec& spec,
                                              const SeparationConfig& separation_config) {
  CalibratedPerturbation out;
  if (!(spec.delta > 0.0)) return out;
  auto measure = [&](double a) {
    const auto f = wall_bump_perturbation(tet, a, spec);
    return std::abs(separation(f, tet.low_wall(), tet.high_wall(), separation_config).delta);
  };
  double lo = 0.0, hi = spec.delta;
  double m_hi = measure(hi);
  for (int i = 0; i < 60 && m_hi < spec.delta; ++i) {
    lo = hi;
    hi *= 2.0;
    m_hi = measure(hi);
  }
  if (m_hi < spec.delta) throw ConfigError("perturbation calibration could not reach delta");
  double a = hi, m_a = m_hi;
  for (int it = 0; it < 60; ++it) {
    ++out.iterations;
    if (std::abs(m_a - spec.delta) <= 1e-12 * spec.delta) break;
    const double mid = 0.5 * (lo + hi);
    const double m_mid = measure(mid);
    a = mid;
    m_a = m_mid;
    if (m_mid < spec.delta)
      lo = mid;
    else
      hi = mid;
  }
  out.amplitude = a;
  out.measured_delta = m_a;
  return out;
}

double conformal_factor(const ContactModel& model, std::span<const double> sigma, double base,
                        double amplitude) {
  switch (model.kind()) {
    case ModelKind::kCircle:
      return base + amplitude * std::sin(kTwoPi * sigma[0]);
    case ModelKind::kContactSphere:
      if (model.k() == 1) return base + amplitude * sigma[1];  // sin(arg z) on the unit circle
      break;
    case ModelKind::kUnitCotangentTorus:
      break;
  }
  throw ConfigError("conformal factors are supported on the circle and ContactSphere(1) only");
}

HamiltonianSpec conformal_reeb_hamiltonian(const ContactModel& model, double base,
                                           double amplitude) {
  const auto chart = model.ambient_chart();
  if (model.kind() == ModelKind::kCircle) {
    auto value = [=](std::span<const double> x, double) {
      return x[0] * (base + amplitude * std::sin(kTwoPi * x[1]));
    };
    auto gradient = [=](std::span<const double> x, double, std::span<double> g) {
      g[0] = base + amplitude * std::sin(kTwoPi * x[1]);
      g[1] = x[0] * amplitude * kTwoPi * std::cos(kTwoPi * x[1]);
    };
    return HamiltonianSpec(chart, value, gradient, TimeDependence::kAutonomous, "conformal_reeb");
  }
  if (model.kind() == ModelKind::kContactSphere && model.k() == 1) {
    // s f = base |z|^2 + amplitude |z| q
    auto value = [=](std::span<const double> x, double) {
      const double r = std::hypot(x[0], x[1]);
      return base * r * r + amplitude * r * x[1];
    };
    auto gradient = [=](std::span<const double> x, double, std::span<double> g) {
      const double r = std::hypot(x[0], x[1]);
      if (r == 0.0) throw EvaluationError("conformal Reeb Hamiltonian is singular at 0", {x.begin(), x.end()}, 0.0);
      g[0] = 2.0 * base * x[0] + amplitude * x[1] * x[0] / r;
      g[1] = 2.0 * base * x[1] + amplitude * (r + x[1] * x[1] / r);
    };
    return HamiltonianSpec(chart, value, gradient, TimeDependence::kAutonomous, "conformal_reeb");
  }
  throw ConfigError("Reeb chord runs support the circle and ContactSphere(1) only");
}

bool recompute_pass(const ScenarioReport& r) {
  if (!r.search.chord) return false;
  if (!(r.search.chord->time_length <= r.budget + r.time_tol)) return false;
  if (r.expected_increment) {
    if (!r.increment) return false;
    if (std::abs(*r.increment - *r.expected_increment) > r.increment_tol) return false;
  }
  return true;
}

namespace {

void check_common(const ScenarioConfig& c) {
  if (!(c.R0 > 0.0 && c.R1 > c.R0))
    throw ConfigError("need 0 < R0 < R1 (got R0=" + fmt(c.R0) + ", R1=" + fmt(c.R1) + ")");
  if (c.perturbation.delta < 0.0) throw ConfigError("perturbation delta must be non-negative");
  if (c.m < 0) throw ConfigError("stabilization m must be non-negative");
}

ChordSearchConfig search_config(const ScenarioConfig& c) {
  auto s = c.search;
  if (!std::isfinite(s.integrator.escape_bound)) s.integrator.escape_bound = default_escape_bound(c.R1);
  return s;
}

struct Separations {
  double gamma = 0.0;
  double delta = 0.0;
  double combined = 0.0;
  double amplitude = 0.0;
  std::optional<HamiltonianSpec> perturbation;
};

// gamma = Delta(G), delta = |Delta(F)| after calibration, combined = Delta(G + F)
Separations measure_separations(const HamiltonianSpec& g, const Tetragon& tet,
                                const ScenarioConfig& c) {
  Separations s;
  s.gamma = separation(g, tet.low_wall(), tet.high_wall(), c.separation).delta;
  if (!(s.gamma > 0.0))
    throw ConfigError("the Hamiltonian does not separate the walls: gamma=" + fmt(s.gamma));
  s.combined = s.gamma;
  if (c.perturbation.delta > 0.0) {
    if (c.perturbation.delta >= s.gamma)
      throw ConfigError("separation failure: requested delta=" + fmt(c.perturbation.delta) +
                        " >= gamma=" + fmt(s.gamma));
    const auto cal = calibrate_perturbation(tet, c.perturbation, c.separation);
    s.amplitude = cal.amplitude;
    s.delta = cal.measured_delta;
    if (s.delta >= s.gamma)
      throw ConfigError("separation failure: measured delta=" + fmt(s.delta) +
                        " >= gamma=" + fmt(s.gamma));
    s.perturbation = wall_bump_perturbation(tet, s.amplitude, c.perturbation);
    s.combined = separation(sum(g, *s.perturbation), tet.low_wall(), tet.high_wall(), c.separation).delta;
  }
  return s;
}

double norm_of(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

void fill_common(ScenarioReport& r, const ScenarioConfig& c, const Tetragon& tet,
                 const Separations& s) {
  r.id = c.id;
  r.model = tet.model().name();
  r.R0 = c.R0;
  r.R1 = c.R1;
  r.T = tet.T();
  r.kappa = tet.rectangle_area();
  r.gamma = s.gamma;
  r.delta = s.delta;
  r.combined_delta = s.combined;
  r.perturbation_amplitude = s.amplitude;
  r.budget = chord_budget(r.kappa, s.gamma, s.delta);
  r.separation_tol = c.separation.refine_tol;
}

}  // namespace

ScenarioReport run_superconductivity(const ScenarioConfig& c) {
  check_common(c);
  if (!(c.T > 0.0 && c.T < 0.5)) throw ConfigError("superconductivity needs 0 < r < 1/2 (got r=" + fmt(c.T) + ")");
  if (c.k < 1 || c.k > 2)
    throw ConfigError("superconductivity supports k = 1 or 2; k > 2 is rejected because the "
                      "target codimension makes desk-scale search unreliable");
  const auto model = c.k == 1 ? ContactModel::circle() : ContactModel::unit_cotangent_torus(c.k);
  const auto tet = build_tetragon(model, c.R0, c.R1, c.T);
  const auto u = cosine_potential(model, c.potential_shift);
  const auto s = measure_separations(u, tet, c);

  ScenarioReport r;
  fill_common(r, c, tet, s);
  HamiltonianSpec h = s.perturbation ? sum(u, *s.perturbation) : u;
  const auto cfg = search_config(c);
  const auto n = static_cast<std::size_t>(c.k);
  if (c.m == 0) {
    r.search = find_chord(h, tet.floor(), tet.ceiling(), r.budget + r.time_tol, cfg);
    if (c.k == 1 && c.perturbation.delta == 0.0)
      r.reference_time = (c.R1 - c.R0) / (kTwoPi * std::sin(kTwoPi * std::min(c.T, 0.25)));
  } else {
    // H = sum_i p_i h_i(p') + U(q) with h_i(p') = coupling |p'|^2 / 2
    const auto ext = h.chart().extended(c.m, true);
    const double coupling = c.coupling;
    const auto mm = static_cast<std::size_t>(c.m);
    auto value = [=](std::span<const double> x, double) {
      double pp = 0.0, sp = 0.0;
      for (std::size_t j = 0; j < mm; ++j) pp += x[n + j] * x[n + j];
      for (std::size_t i = 0; i < n; ++i) sp += x[i];
      return 0.5 * coupling * pp * sp;
    };
    auto gradient = [=](std::span<const double> x, double, std::span<double> g) {
      double pp = 0.0, sp = 0.0;
      for (std::size_t j = 0; j < mm; ++j) pp += x[n + j] * x[n + j];
      for (std::size_t i = 0; i < n; ++i) sp += x[i];
      std::fill(g.begin(), g.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) g[i] = 0.5 * coupling * pp;
      for (std::size_t j = 0; j < mm; ++j) g[n + j] = coupling * sp * x[n + j];
    };
    HamiltonianSpec channel(ext, value, gradient, TimeDependence::kAutonomous, "channel");
    const auto h_ext = sum(lift_to(h, ext), channel);
    const auto floor = stabilize(tet.region_ptr(RegionKind::kFloor), c.m, Stabilization::kZeroSection);
    const auto ceiling = stabilize(tet.region_ptr(RegionKind::kCeiling), c.m, Stabilization::kZeroSection);
    r.search = find_chord(h_ext, *floor, *ceiling, r.budget + r.time_tol, cfg);
    r.certified = false;
    r.notes.push_back("stabilized run (m >= 1): search, no certification");
  }
  r.expected_increment = c.R1 - c.R0;
  r.increment_tol = cfg.tol;
  if (r.search.chord) {
    const auto& ch = *r.search.chord;
    r.increment = norm_of(std::span<const double>(ch.end).first(n)) -
                  norm_of(std::span<const double>(ch.start).first(n));
  }
  r.pass = recompute_pass(r);
  return r;
}

namespace {

ScenarioReport sphere_run(const ScenarioConfig& c, const HamiltonianSpec& g, const Tetragon& tet,
                          const Separations& s) {
  ScenarioReport r;
  fill_common(r, c, tet, s);
  const auto cfg = search_config(c);
  const HamiltonianSpec h = s.perturbation ? sum(g, *s.perturbation) : g;
  r.search = find_chord(h, tet.floor(), tet.ceiling(), r.budget + r.time_tol, cfg);
  r.expected_increment = std::sqrt(c.R1) - std::sqrt(c.R0);
  r.increment_tol = cfg.tol;
  if (r.search.chord) r.increment = norm_of(r.search.chord->end) - norm_of(r.search.chord->start);
  return r;
}

ContactModel sphere_model(const ScenarioConfig& c) {
  if (c.k < 1 || c.k > 2)
    throw ConfigError("sphere scenarios support k = 1 or 2; k > 2 is rejected because the "
                      "target codimension makes desk-scale search unreliable");
  if (c.m != 0) throw ConfigError("stabilization m applies to the superconductivity scenario only");
  return ContactModel::contact_sphere(c.k);
}

}  // namespace

ScenarioReport run_unstable_equilibrium(const ScenarioConfig& c) {
  check_common(c);
  const auto model = sphere_model(c);
  const auto tet = build_tetragon(model, c.R0, c.R1, c.T);
  const auto g = saddle_hamiltonian(model.ambient_chart());
  if (c.perturbation.delta >= c.R0) {
    const double gamma = separation(g, tet.low_wall(), tet.high_wall(), c.separation).delta;
    throw ConfigError("separation failure: requested delta=" + fmt(c.perturbation.delta) +
                      " must stay below gamma=" + fmt(gamma) + " and R0=" + fmt(c.R0));
  }
  const auto s = measure_separations(g, tet, c);
  auto r = sphere_run(c, g, tet, s);
  if (c.perturbation.delta == 0.0 && c.T >= std::numbers::pi / 8.0)
    r.reference_time = 0.5 * std::log(c.R1 / c.R0);
  r.pass = recompute_pass(r);
  return r;
}

ScenarioReport run_mechanical(const ScenarioConfig& c) {
  check_common(c);
  const auto model = sphere_model(c);
  if (c.beta < 0.0) throw ConfigError("mechanical scenario needs beta >= 0");
  const auto tet = build_tetragon(model, c.R0, c.R1, c.T);
  const auto chart = model.ambient_chart();
  const auto u = mechanical_potential(chart, c.potential_depth, c.R0, c.potential, c.potential_modulation);

  // U(0, t) = 0 over the period
  std::vector<double> origin(static_cast<std::size_t>(chart.dim()), 0.0);
  for (int j = 0; j < 64; ++j) {
    const double t = j / 64.0;
    if (std::abs(u.value(origin, t)) > 1e-12)
      throw ConfigError("mechanical potential must vanish at q = 0 for all t");
  }
  // max of U over the q-shell (the low wall) and the period must equal -beta
  const double shell_max = separation(u, tet.low_wall(), tet.low_wall(), c.separation).max_y0.value;
  if (std::abs(shell_max + c.beta) > 1e-9 * std::max(1.0, c.beta))
    throw ConfigError("shell-max condition violated: max of U over the shell and period is " +
                      fmt(shell_max) + " but beta=" + fmt(c.beta) + " declares " + fmt(-c.beta));
  const auto g = mechanical_hamiltonian(chart, c.potential_depth, c.R0, c.potential, c.potential_modulation);
  const auto s = measure_separations(g, tet, c);
  auto r = sphere_run(c, g, tet, s);
  r.notes.push_back("expected separation R0/2 + beta = " + fmt(0.5 * c.R0 + c.beta));
  r.pass = recompute_pass(r);
  return r;
}

ScenarioReport run_reeb_chord(const ScenarioConfig& c) {
  if (c.k != 1) throw ConfigError("Reeb chord runs support k = 1 (circle or ContactSphere(1)) only");
  if (c.m != 0) throw ConfigError("stabilization m applies to the superconductivity scenario only");
  const auto model = c.reeb_model == ReebModel::kCircle ? ContactModel::circle()
                                                        : ContactModel::contact_sphere(1);
  const double base = c.conformal_base, amp = c.conformal_amplitude;
  // f must be positive on Sigma
  double f_min = std::numeric_limits<double>::infinity(), f_max = 0.0;
  const int samples = 4096;
  for (int j = 0; j < samples; ++j) {
    const double th = static_cast<double>(j) / samples;
    std::vector<double> sigma = model.kind() == ModelKind::kCircle
                                    ? std::vector<double>{th}
                                    : std::vector<double>{std::cos(kTwoPi * th), std::sin(kTwoPi * th)};
    const double f = conformal_factor(model, sigma, base, amp);
    f_min = std::min(f_min, f);
    f_max = std::max(f_max, f);
  }
  if (!(f_min > 0.0))
    throw ConfigError("conformal factor f = " + fmt(base) + " + " + fmt(amp) +
                      " sin must be positive on Sigma (sampled min " + fmt(f_min) + ")");
  // the level set {s f = 1} lies in s in [1/f_max, 1/f_min]
  const double r0 = 0.5 / f_max, r1 = 2.0 / f_min;
  const auto tet = build_tetragon(model, r0, r1, c.T);
  const auto h = conformal_reeb_hamiltonian(model, base, amp);

  // C = min of f over the swept region {psi_t(L) : t in [0, T]}
  const int leg_levels = model.legendrian_param_dim() == 0 ? 1 : 2;
  double c_min = std::numeric_limits<double>::infinity();
  ChordSearchConfig cfg = c.search;
  cfg.explicit_seeds.clear();
  for (int l = 0; l < leg_levels; ++l) {
    std::vector<double> leg;
    if (model.legendrian_param_dim() > 0) leg.push_back(static_cast<double>(l) / leg_levels);
    const auto x = model.legendrian_point(leg);
    for (int j = 0; j <= samples; ++j)
      c_min = std::min(c_min, conformal_factor(model, model.reeb_flow(x, c.T * j / samples), base, amp));
    // seed on the level set s = 1 / f(x), expressed as the high-wall parameter
    const double s = 1.0 / conformal_factor(model, x, base, amp);
    std::vector<double> params{(s - r0) / (r1 - r0)};
    params.insert(params.end(), leg.begin(), leg.end());
    cfg.explicit_seeds.push_back(params);
  }
  // any parameter refinement would leave the level set {H = 1}
  cfg.refine_evaluations = 0;
  cfg.minimize_time = false;
  if (!std::isfinite(cfg.integrator.escape_bound)) cfg.integrator.escape_bound = default_escape_bound(r1);

  ScenarioReport r;
  r.id = c.id;
  r.model = model.name();
  r.R0 = r0;
  r.R1 = r1;
  r.T = c.T;
  r.kappa = c.T;
  r.gamma = c_min;
  r.budget = c.T / c_min;
  r.search = find_chord(h, tet.high_wall(), tet.low_wall(), r.budget + r.time_tol, cfg);
  if (amp == 0.0) r.reference_time = c.T / base;
  r.notes.push_back("lambda = lambda0 / f; budget T / min f over the swept region");
  r.pass = recompute_pass(r);
  return r;
}

ScenarioReport run_scenario(const ScenarioConfig& c) {
  switch (c.id) {
    case ScenarioId::kSuperconductivity: return run_superconductivity(c);
    case ScenarioId::kUnstableEquilibrium: return run_unstable_equilibrium(c);
    case ScenarioId::kMechanical: return run_mechanical(c);
    case ScenarioId::kReebChord: return run_reeb_chord(c);
  }
  throw ConfigError("unknown scenario");
}

std::vector<ScenarioReport> run_batch(const std::vector<ScenarioConfig>& configs, int threads) {
  std::vector<ScenarioReport> out(configs.size());
  parallel_for(configs.size(), threads, [&](std::size_t i) { out[i] = run_scenario(configs[i]); });
  return out;
}

}  // namespace tetra
