#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "tetra/errors.hpp"
#include "tetra/parallel.hpp"
#include "tetra/pb4.hpp"

namespace tetra {

namespace {

// Smoothed objective tau * log sum exp(J+/tau) of the signed discrete
// bracket, with its gradient with respect to both fields.
class SmoothedMax {
 public:
  SmoothedMax(const GridWindow& w, double sign)
      : nu_(w.nodes_u()), ns_(w.nodes_s()), sign_(sign),
        c_(1.0 / (4.0 * w.hu() * w.hs())), periodic_(w.kind == WindowKind::kCylinder) {
    j_.assign(static_cast<std::size_t>(nu_ * ns_), 0.0);
  }

  // returns the smoothed value; writes the hard max of sign*J into `hard`
  double value(const GridField& f, const GridField& g, double tau, double& hard) {
    fill_bracket(f, g);
    hard = -std::numeric_limits<double>::infinity();
    double m = 0.0;
    for_interior([&](int i, int j) {
      const double v = j_[idx(i, j)];
      hard = std::max(hard, v);
      m = std::max(m, v);
    });
    double z = 0.0;
    for_interior([&](int i, int j) { z += std::exp((std::max(j_[idx(i, j)], 0.0) - m) / tau); });
    max_ = m;
    z_ = z;
    return m + tau * std::log(z);
  }

  // gradient at the fields last passed to value()
  void gradient(const GridField& f, const GridField& g, double tau, GridField& df, GridField& dg) const {
    std::fill(df.data().begin(), df.data().end(), 0.0);
    std::fill(dg.data().begin(), dg.data().end(), 0.0);
    for_interior([&](int i, int j) {
      const double jv = j_[idx(i, j)];
      if (jv <= 0.0) return;
      const double wgt = std::exp((jv - max_) / tau) / z_;
      if (wgt < 1e-300) return;
      const double a = sign_ * c_ * wgt;
      const int e = east(i), wv = west(i);
      const double gs = g(i, j + 1) - g(i, j - 1), gu = g(e, j) - g(wv, j);
      const double fs = f(i, j + 1) - f(i, j - 1), fu = f(e, j) - f(wv, j);
      // J = c (fu gs - fs gu)
      df(e, j) += a * gs;
      df(wv, j) -= a * gs;
      df(i, j + 1) -= a * gu;
      df(i, j - 1) += a * gu;
      dg(i, j + 1) += a * fu;
      dg(i, j - 1) -= a * fu;
      dg(e, j) -= a * fs;
      dg(wv, j) += a * fs;
    });
  }

 private:
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j * nu_ + i); }
  int east(int i) const { return periodic_ ? (i + 1) % nu_ : i + 1; }
  int west(int i) const { return periodic_ ? (i + nu_ - 1) % nu_ : i - 1; }

  template <class Fn>
  void for_interior(Fn&& fn) const {
    const int i0 = periodic_ ? 0 : 1, i1 = periodic_ ? nu_ : nu_ - 1;
    for (int j = 1; j < ns_ - 1; ++j)
      for (int i = i0; i < i1; ++i) fn(i, j);
  }

  void fill_bracket(const GridField& f, const GridField& g) {
    for_interior([&](int i, int j) {
      const int e = east(i), wv = west(i);
      const double fu = f(e, j) - f(wv, j), fs = f(i, j + 1) - f(i, j - 1);
      const double gu = g(e, j) - g(wv, j), gs = g(i, j + 1) - g(i, j - 1);
      j_[idx(i, j)] = sign_ * c_ * (fu * gs - fs * gu);
    });
  }

  int nu_, ns_;
  double sign_, c_;
  bool periodic_;
  std::vector<double> j_;
  double max_ = 0.0, z_ = 1.0;
};

std::vector<double> schedule(const Pb4OptimizerConfig& c) {
  if (!(c.temperature_start > 0.0) || !(c.temperature_end > 0.0) ||
      c.temperature_end > c.temperature_start)
    throw ParameterError("pb4 temperatures must satisfy 0 < end <= start");
  if (!(c.temperature_factor > 0.0 && c.temperature_factor < 1.0))
    throw ParameterError("pb4 temperature factor must lie in (0,1)");
  std::vector<double> taus;
  for (double tau = c.temperature_start; tau > c.temperature_end * (1.0 + 1e-12);
       tau *= c.temperature_factor)
    taus.push_back(tau);
  taus.push_back(c.temperature_end);
  return taus;
}

// smooth random perturbation: a few Gaussian bumps of amplitude <= `amp`
void perturb(const GridWindow& w, GridField& field, double amp, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int bumps = 6;
  for (int b = 0; b < bumps; ++b) {
    const double cu = unit(rng) * (w.nodes_u() - 1), cs = unit(rng) * (w.nodes_s() - 1);
    const double width = 0.05 + 0.1 * unit(rng);
    const double ru = width * w.nodes_u(), rs = width * w.nodes_s();
    const double a = amp * (2.0 * unit(rng) - 1.0);
    for (int j = 0; j < w.nodes_s(); ++j)
      for (int i = 0; i < w.nodes_u(); ++i) {
        const double du = (i - cu) / ru, ds = (j - cs) / rs;
        field(i, j) += a * std::exp(-0.5 * (du * du + ds * ds));
      }
  }
}

struct StartResult {
  Pb4StartTrace trace;
  GridField f, g;
  double best = std::numeric_limits<double>::infinity();
};

StartResult run_start(const Pb4Problem& problem, const Pb4OptimizerConfig& config,
                      const std::vector<double>& taus, GridField f, GridField g, int start,
                      bool warm) {
  const auto& w = problem.window();
  const double sign = config.sign == BracketSign::kPlus ? 1.0 : -1.0;
  project_feasible(problem, f, g);
  SmoothedMax objective(w, sign);
  StartResult out;
  out.trace.start = start;
  out.trace.warm = warm;

  double hard = 0.0;
  auto record = [&](const GridField& ff, const GridField& gg, double value) {
    if (value < out.best) {
      out.best = value;
      out.f = ff;
      out.g = gg;
    }
  };
  objective.value(f, g, taus.front(), hard);
  out.trace.initial_value = hard;
  record(f, g, hard);

  GridField df(f.nu(), f.ns()), dg(g.nu(), g.ns());
  GridField tf = f, tg = g;
  double step = 0.0;
  for (double tau : taus) {
    double phi = objective.value(f, g, tau, hard);
    ++out.trace.evaluations;
    for (int it = 0; it < config.iterations_per_level; ++it) {
      objective.gradient(f, g, tau, df, dg);
      double gnorm = 0.0;
      for (double v : df.data()) gnorm = std::max(gnorm, std::abs(v));
      for (double v : dg.data()) gnorm = std::max(gnorm, std::abs(v));
      if (gnorm == 0.0) break;
      if (step == 0.0) step = 0.01 / gnorm;
      bool accepted = false;
      for (int bt = 0; bt < 30; ++bt) {
        for (std::size_t k = 0; k < f.data().size(); ++k) {
          tf.data()[k] = f.data()[k] - step * df.data()[k];
          tg.data()[k] = g.data()[k] - step * dg.data()[k];
        }
        project_feasible(problem, tf, tg);
        double lin = 0.0, sq = 0.0;
        for (std::size_t k = 0; k < f.data().size(); ++k) {
          const double a = tf.data()[k] - f.data()[k], b = tg.data()[k] - g.data()[k];
          lin += df.data()[k] * a + dg.data()[k] * b;
          sq += a * a + b * b;
        }
        double trial_hard = 0.0;
        const double trial = objective.value(tf, tg, tau, trial_hard);
        ++out.trace.evaluations;
        if (sq == 0.0) break;
        if (trial <= phi + lin + sq / (2.0 * step)) {
          std::swap(f, tf);
          std::swap(g, tg);
          phi = trial;
          hard = trial_hard;
          record(f, g, hard);
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      ++out.trace.iterations;
      if (!accepted) break;
      step *= 1.5;  // the cached bracket now belongs to the accepted (f, g)
    }
    out.trace.level_best.push_back(out.best);
  }
  out.trace.final_value = hard;
  out.trace.best_value = out.best;
  out.trace.diverged = out.trace.final_value > out.trace.initial_value + 1e-12;
  return out;
}

Pb4Report estimate(const Pb4Problem& problem, const Pb4OptimizerConfig& config) {
  if (config.starts < 1) throw ParameterError("pb4 optimizer needs at least one start");
  if (config.iterations_per_level < 0) throw ParameterError("pb4 iterations must be non-negative");
  const auto taus = schedule(config);
  const auto& w = problem.window();
  auto [f0, g0] = indicator_interpolants(problem);

  struct Init {
    GridField f, g;
    bool warm;
  };
  std::vector<Init> inits;
  for (int s = 0; s < config.starts; ++s) {
    GridField f = f0, g = g0;
    if (s > 0) {
      std::mt19937_64 rng(config.seed * 1000003ULL + static_cast<std::uint64_t>(s));
      perturb(w, f, config.perturbation, rng);
      perturb(w, g, config.perturbation, rng);
    }
    inits.push_back({std::move(f), std::move(g), false});
  }
  if (config.warm_start) {
    const auto& [wf, wg] = *config.warm_start;
    if (wf.nu() != w.nodes_u() || wf.ns() != w.nodes_s() || wg.nu() != w.nodes_u() ||
        wg.ns() != w.nodes_s())
      throw ParameterError("pb4 warm start has the wrong resolution");
    inits.push_back({wf, wg, true});
  }

  std::vector<StartResult> results(inits.size());
  parallel_for(inits.size(), config.threads, [&](std::size_t k) {
    results[k] = run_start(problem, config, taus, inits[k].f, inits[k].g, static_cast<int>(k),
                           inits[k].warm);
  });

  Pb4Report report;
  report.sign = config.sign;
  report.temperatures = taus;
  report.cells_u = w.cells_u;
  report.cells_s = w.cells_s;
  std::size_t best = 0;
  for (std::size_t k = 0; k < results.size(); ++k) {
    report.traces.push_back(results[k].trace);
    if (results[k].best < results[best].best) best = k;
  }
  report.best_start = static_cast<int>(best);
  report.best_is_warm = inits[best].warm;
  // a start whose value rose across the whole schedule did not converge
  report.converged = !results[best].trace.diverged;
  report.f = std::move(results[best].f);
  report.g = std::move(results[best].g);
  // the reported number is always the validated evaluation of the reported pair
  report.estimate = feasible_pair_value(problem, report.f, report.g, config.sign);

  if (config.two_grid_cells > 0) {
    const int ref_u = config.two_grid_cells;
    const int ref_s = static_cast<int>(std::lround(static_cast<double>(config.two_grid_cells) *
                                                   w.cells_s / w.cells_u));
    auto ref_config = config;
    ref_config.two_grid_cells = 0;
    ref_config.warm_start.reset();
    const auto ref = estimate(problem.regrid(ref_u, ref_s), ref_config);
    report.reference_cells = ref_u;
    report.reference_estimate = ref.estimate;
    report.two_grid_difference = std::abs(report.estimate - ref.estimate);
  }
  return report;
}

}  // namespace

Pb4Report estimate_pb4_plus(const Pb4Problem& problem, const Pb4OptimizerConfig& config) {
  auto c = config;
  c.sign = BracketSign::kPlus;
  return estimate(problem, c);
}

Pb4Report estimate_pb4_minus(const Pb4Problem& problem, Pb4OptimizerConfig config) {
  config.sign = BracketSign::kMinus;
  return estimate(problem, config);
}

}  // namespace tetra
