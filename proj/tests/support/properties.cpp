#include "properties.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "oracles.hpp"
#include "tetra/dynamics.hpp"
#include "tetra/scenarios.hpp"
#include "tetra/tetragon.hpp"

namespace tetra::props {

namespace {

struct Term {
  double c;
  std::vector<int> vars;  // monomial as a list of coordinate indices (with repetition)
};

}  // namespace

HamiltonianSpec random_polynomial(const PhaseChart& chart, std::mt19937_64& rng, const char* name) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_int_distribution<int> var(0, chart.dim() - 1);
  std::vector<Term> terms;
  for (int i = 0; i < chart.dim(); ++i) terms.push_back({coef(rng), {i}});
  for (int k = 0; k < 6; ++k) terms.push_back({coef(rng), {var(rng), var(rng)}});
  for (int k = 0; k < 6; ++k) terms.push_back({coef(rng), {var(rng), var(rng), var(rng)}});
  auto value = [terms](std::span<const double> x, double) {
    double acc = 0.0;
    for (const auto& t : terms) {
      double m = t.c;
      for (int v : t.vars) m *= x[static_cast<std::size_t>(v)];
      acc += m;
    }
    return acc;
  };
  auto gradient = [terms](std::span<const double> x, double, std::span<double> g) {
    std::fill(g.begin(), g.end(), 0.0);
    for (const auto& t : terms)
      for (std::size_t k = 0; k < t.vars.size(); ++k) {
        double m = t.c;
        for (std::size_t l = 0; l < t.vars.size(); ++l)
          if (l != k) m *= x[static_cast<std::size_t>(t.vars[l])];
        g[static_cast<std::size_t>(t.vars[k])] += m;
      }
  };
  return HamiltonianSpec(chart, value, gradient, TimeDependence::kAutonomous, name);
}

BracketProbe bracket_identities(int points, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const PhaseChart chart(2);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  BracketProbe out;
  for (int k = 0; k < points; ++k) {
    const auto f = random_polynomial(chart, rng, "F");
    const auto g = random_polynomial(chart, rng, "G");
    const auto h = random_polynomial(chart, rng, "H");
    std::vector<double> x(4);
    for (auto& v : x) v = unit(rng);

    out.antisymmetry = std::max(out.antisymmetry,
                                std::abs(poisson_bracket(f, g, x, 0.0) + poisson_bracket(g, f, x, 0.0)));

    // {A,{B,C}} with the inner bracket analytic and its gradient by finite differences
    auto outer = [&](const HamiltonianSpec& a, const HamiltonianSpec& b, const HamiltonianSpec& c) {
      const auto inner = oracle::fd_gradient(
          [&](std::span<const double> y) { return poisson_bracket(b, c, y, 0.0); }, x);
      return oracle::bracket_from_gradients(a.gradient(x, 0.0), inner);
    };
    out.jacobi = std::max(out.jacobi, std::abs(outer(f, g, h) + outer(g, h, f) + outer(h, f, g)));

    const double lhs = poisson_bracket(product(f, g), h, x, 0.0);
    const double rhs = f.value(x, 0.0) * poisson_bracket(g, h, x, 0.0) +
                       g.value(x, 0.0) * poisson_bracket(f, h, x, 0.0);
    out.leibniz = std::max(out.leibniz, std::abs(lhs - rhs));
  }
  return out;
}

double volume_factor_gap(int points, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const PhaseChart chart(2);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < points; ++k) {
    const auto f = random_polynomial(chart, rng, "F");
    const auto g = random_polynomial(chart, rng, "G");
    std::vector<double> x(4);
    for (auto& v : x) v = unit(rng);
    const double tau = 0.5 * unit(rng);
    const auto vf = volume_factor(f, g, tau, x);
    worst = std::max(worst, std::abs(vf.determinant_ratio - vf.analytic));
  }
  return worst;
}

double energy_drift(double t_end) {
  std::vector<std::pair<HamiltonianSpec, std::vector<double>>> systems;
  {
    const PhaseChart chart(1, {true});
    const double w = 2.0 * std::numbers::pi;
    HamiltonianSpec pendulum(
        chart, [w](std::span<const double> x, double) { return 0.5 * x[0] * x[0] - 0.5 * std::cos(w * x[1]); },
        [w](std::span<const double> x, double, std::span<double> g) {
          g[0] = x[0];
          g[1] = 0.5 * w * std::sin(w * x[1]);
        },
        TimeDependence::kAutonomous, "pendulum");
    systems.emplace_back(pendulum, std::vector<double>{0.7, 0.1});
  }
  {
    const PhaseChart chart(2);
    HamiltonianSpec coupled(
        chart,
        [](std::span<const double> x, double) {
          return 0.5 * (x[0] * x[0] + x[1] * x[1]) + 0.5 * (x[2] * x[2] + 4.0 * x[3] * x[3]) +
                 0.1 * x[2] * x[2] * x[3] * x[3];
        },
        [](std::span<const double> x, double, std::span<double> g) {
          g[0] = x[0];
          g[1] = x[1];
          g[2] = x[2] + 0.2 * x[2] * x[3] * x[3];
          g[3] = 4.0 * x[3] + 0.2 * x[2] * x[2] * x[3];
        },
        TimeDependence::kAutonomous, "coupled_oscillator");
    systems.emplace_back(coupled, std::vector<double>{0.3, -0.2, 1.0, 0.5});
  }
  {
    const auto model = ContactModel::contact_sphere(1);
    systems.emplace_back(mechanical_hamiltonian(model.ambient_chart(), 0.5, 1.0, PotentialKind::kBump, 0.0),
                         std::vector<double>{0.4, 0.9});
  }
  double worst = 0.0;
  for (const auto& [h, x0] : systems) {
    const auto tr = integrate(h, x0, 0.0, t_end);
    const double e0 = h.value(tr.state(0), 0.0);
    for (std::size_t i = 0; i < tr.size(); ++i)
      worst = std::max(worst, std::abs(h.value(tr.state(i), tr.time(i)) - e0) / std::max(1.0, std::abs(e0)));
  }
  return worst;
}

double lagrangian_residual(int samples) {
  double worst = 0.0;
  const std::pair<ContactModel, double> cases[] = {
      {ContactModel::circle(), 0.25},
      {ContactModel::unit_cotangent_torus(2), 0.4},
      {ContactModel::contact_sphere(2), std::numbers::pi / 4.0}};
  for (const auto& [model, T] : cases) {
    const auto sm = smooth_tetragon(build_tetragon(model, 1.0, 2.0, T), 0.05);
    worst = std::max(worst, sm.residual(samples).max_abs);
  }
  return worst;
}

double symplecticity_gap() {
  const PhaseChart chart(1);
  const double w = 2.0 * std::numbers::pi;
  HamiltonianSpec pendulum(
      chart, [w](std::span<const double> x, double) { return 0.5 * x[0] * x[0] - 0.3 * std::cos(w * x[1]); },
      [w](std::span<const double> x, double, std::span<double> g) {
        g[0] = x[0];
        g[1] = 0.3 * w * std::sin(w * x[1]);
      },
      TimeDependence::kAutonomous, "pendulum");
  IntegratorConfig cfg;
  cfg.tol = 1e-12;
  auto flow = [&](std::vector<double> x) {
    const auto tr = integrate(pendulum, x, 0.0, 1.0, cfg);
    return tr.state(tr.size() - 1);
  };
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const std::vector<double> x{unit(rng), 0.5 * unit(rng)};
    // central differences at h and h/2, Richardson-combined to cancel the h^2 term
    auto column = [&](int c, double h) {
      auto xp = x, xm = x;
      xp[static_cast<std::size_t>(c)] += h;
      xm[static_cast<std::size_t>(c)] -= h;
      const auto fp = flow(xp), fm = flow(xm);
      return std::array<double, 2>{(fp[0] - fm[0]) / (2.0 * h), (fp[1] - fm[1]) / (2.0 * h)};
    };
    double jac[2][2];
    const double h = 1e-4;
    for (int c = 0; c < 2; ++c) {
      const auto coarse = column(c, h), fine = column(c, 0.5 * h);
      for (int r = 0; r < 2; ++r)
        jac[r][c] = (4.0 * fine[static_cast<std::size_t>(r)] - coarse[static_cast<std::size_t>(r)]) / 3.0;
    }
    worst = std::max(worst, std::abs(jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0] - 1.0));
  }
  return worst;
}

Pb4Problem shrunk_problem(const Pb4Problem& problem, int trim) {
  std::array<NodeMask, 4> raw;
  for (int m = 0; m < 4; ++m) {
    const auto& src = problem.raw_mask(static_cast<MaskId>(m));
    int i0 = src.nu(), i1 = -1, j0 = src.ns(), j1 = -1;
    for (int j = 0; j < src.ns(); ++j)
      for (int i = 0; i < src.nu(); ++i)
        if (src(i, j)) {
          i0 = std::min(i0, i);
          i1 = std::max(i1, i);
          j0 = std::min(j0, j);
          j1 = std::max(j1, j);
        }
    const bool along_u = (i1 - i0) >= (j1 - j0);
    NodeMask out(src.nu(), src.ns());
    for (int j = 0; j < src.ns(); ++j)
      for (int i = 0; i < src.nu(); ++i) {
        if (!src(i, j)) continue;
        const bool keep = along_u ? (i >= i0 + trim && i <= i1 - trim) : (j >= j0 + trim && j <= j1 - trim);
        if (keep) out.set(i, j);
      }
    raw[static_cast<std::size_t>(m)] = out;
  }
  return problem.with_masks(raw, problem.thickening());
}

Pb4Properties pb4_properties(int cells, int threads) {
  Pb4Properties out;
  const auto problem = prototype_problem(1.0, 2.0, 0.25, cells);
  Pb4OptimizerConfig cfg;
  cfg.threads = threads;

  const auto plus = estimate_pb4_plus(problem, cfg);
  const auto minus = estimate_pb4_minus(problem, cfg);
  const auto swapped = estimate_pb4_plus(problem.swapped_x(), cfg);
  out.antisymmetry_rel = std::abs(minus.estimate - swapped.estimate) / swapped.estimate;
  const auto relabeled = estimate_pb4_plus(problem.relabeled(), cfg);
  out.relabel_rel = std::abs(relabeled.estimate - plus.estimate) / plus.estimate;

  // shrinking every mask only enlarges the feasible set
  const auto small = shrunk_problem(problem, 3);
  out.big = plus.estimate;
  out.shrunk_warm_exact = feasible_pair_value(small, plus.f, plus.g) == plus.estimate;
  auto warm = cfg;
  warm.warm_start = std::make_pair(plus.f, plus.g);
  out.shrunk = estimate_pb4_plus(small, warm).estimate;

  // dilating every mask by one cell only shrinks it
  std::array<NodeMask, 4> dil;
  for (int m = 0; m < 4; ++m)
    dil[static_cast<std::size_t>(m)] = problem.raw_mask(static_cast<MaskId>(m)).dilated(1, false);
  const auto dilated = estimate_pb4_plus(problem.with_masks(dil, problem.thickening()), cfg);
  out.dilated = dilated.estimate;
  auto warm_d = cfg;
  warm_d.warm_start = std::make_pair(dilated.f, dilated.g);
  out.base = estimate_pb4_plus(problem, warm_d).estimate;
  return out;
}

MeanValue mean_value_property(int threads) {
  const double R0 = 1.0, R1 = 2.0, T = 0.25;
  const auto pair = prototype_smooth_pair(R0, R1, T);
  const auto tet = build_tetragon(ContactModel::circle(), R0, R1, T);
  MeanValue out;
  out.worst_margin = std::numeric_limits<double>::infinity();
  const auto seeds = tet.floor().seed_params(16);
  for (const auto& s : seeds) {
    ChordSearchConfig cfg;
    cfg.explicit_seeds = {s};
    cfg.refine_evaluations = 0;
    cfg.threads = threads;
    const auto rep = find_chord(pair.g, tet.floor(), tet.ceiling(), 5.0, cfg);
    if (!rep.chord) continue;
    const auto& ch = *rep.chord;
    double peak = -std::numeric_limits<double>::infinity();
    const int samples = 4000;
    for (int k = 0; k <= samples; ++k) {
      const double t = ch.t0 + (ch.t1 - ch.t0) * k / samples;
      peak = std::max(peak, poisson_bracket(pair.f, pair.g, ch.segment.at(t), t));
    }
    ++out.chords;
    out.worst_margin = std::min(out.worst_margin, peak - 1.0 / ch.time_length);
  }
  return out;
}

double robustness_margin(int trials, std::uint64_t seed) {
  const auto model = ContactModel::contact_sphere(1);
  const auto tet = build_tetragon(model, 1.0, 2.0, std::numbers::pi / 4.0);
  const auto g = saddle_hamiltonian(model.ambient_chart());
  const double dg = separation(g, tet.low_wall(), tet.high_wall()).delta;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < trials; ++k) {
    std::optional<HamiltonianSpec> f;
    if (k % 2 == 0) {
      PerturbationSpec spec;
      spec.tube_radius = 0.05 + 0.15 * unit(rng);
      spec.far_factor = 10.0 * unit(rng);
      spec.modulation = 1.8 * unit(rng) - 0.9;
      f = wall_bump_perturbation(tet, 2.0 * unit(rng) - 1.0, spec);
    } else {
      f = scaled(random_polynomial(model.ambient_chart(), rng, "F"), 0.5);
    }
    const double df = separation(*f, tet.low_wall(), tet.high_wall()).delta;
    const double dgf = separation(sum(g, *f), tet.low_wall(), tet.high_wall()).delta;
    worst = std::min(worst, dgf - (dg - std::abs(df)));
  }
  return worst;
}

int search_monotonicity_violations(int threads) {
  int violations = 0;
  const double budgets[] = {0.1, 0.2, 0.3, 0.35, 0.4, 0.6, 0.8};
  auto check = [&](const HamiltonianSpec& h, const Tetragon& tet) {
    bool seen = false;
    for (double b : budgets) {
      ChordSearchConfig cfg;
      cfg.seeds = 16;
      cfg.threads = threads;
      cfg.integrator.escape_bound = default_escape_bound(tet.R1());
      const bool found = find_chord(h, tet.floor(), tet.ceiling(), b, cfg).found();
      if (seen && !found) ++violations;
      seen = seen || found;
    }
  };
  const auto sphere = ContactModel::contact_sphere(1);
  check(saddle_hamiltonian(sphere.ambient_chart()), build_tetragon(sphere, 1.0, 2.0, std::numbers::pi / 4.0));
  const auto circle = ContactModel::circle();
  check(cosine_potential(circle), build_tetragon(circle, 1.0, 2.0, 0.25));
  return violations;
}

}  // namespace tetra::props
