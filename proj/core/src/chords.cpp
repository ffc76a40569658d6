#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pattern_search.hpp"
#include "tetra/dynamics.hpp"
#include "tetra/errors.hpp"
#include "tetra/parallel.hpp"

namespace tetra {

namespace {

bool opposite_signs(double a, double b) { return (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0); }

struct SeedTask {
  std::vector<double> params;
  double phase;
};

}  // namespace

ShotResult shoot(const HamiltonianSpec& h, std::span<const double> x0, double t0, double duration,
                 const Region& target, const ShotConfig& config) {
  ShotResult result;
  if (!(duration > 0.0)) throw ParameterError("shot duration must be positive");
  DormandPrince stepper(h, config.integrator);
  std::vector<double> x(x0.begin(), x0.end());
  h.chart().reduce(x);
  double t = t0;
  const double t_end = t0 + duration;
  if (config.record) {
    result.trajectory.emplace(h.chart());
    result.trajectory->append(t, x);
  }
  auto note_distance = [&](const std::vector<double>& y, double ty) {
    const double d = target.distance(y);
    if (d < result.best_distance) {
      result.best_distance = d;
      result.best_point = y;
      result.best_time = ty;
    }
    return d;
  };
  note_distance(x, t);
  double g_prev = target.level(x);
  long guard = 0;
  try {
    while (t < t_end) {
      const double t_start = t;
      const std::vector<double> x_start = x;
      DenseStep dense;
      stepper.advance(t, x, t_end, config.record ? &dense : nullptr);
      if (++guard > config.integrator.max_steps) throw StiffnessError("step budget exhausted", t);
      const double g_new = target.level(x);
      const bool crossed = opposite_signs(g_prev, g_new) || (g_new == 0.0 && g_prev != 0.0);
      if (crossed) {
        ++result.crossings;
        // bisect the crossing by re-stepping from the start of the accepted step
        double lo = 0.0, hi = t - t_start, g_lo = g_prev;
        std::vector<double> y_hi = x;
        while (hi - lo > config.event_time_tol) {
          const double mid = 0.5 * (lo + hi);
          auto y = stepper.single_step(t_start, x_start, mid);
          const double g_mid = target.level(y);
          if (g_mid == 0.0) {
            hi = lo = mid;
            y_hi = std::move(y);
            break;
          }
          if (opposite_signs(g_lo, g_mid)) {
            hi = mid;
            y_hi = std::move(y);
          } else {
            lo = mid;
            g_lo = g_mid;
          }
        }
        const double t_event = t_start + hi;
        const double d = note_distance(y_hi, t_event);
        if (d <= config.tol) {
          result.hit = true;
          result.hit_time = t_event;
          result.hit_state = y_hi;
          result.hit_distance = d;
          if (result.trajectory) {
            result.trajectory->add_dense(std::move(dense));
            result.trajectory->append(t_event, y_hi);
          }
          break;
        }
      } else {
        note_distance(x, t);
      }
      if (result.trajectory) {
        result.trajectory->add_dense(std::move(dense));
        result.trajectory->append(t, x);
      }
      g_prev = g_new == 0.0 ? g_prev : g_new;
    }
  } catch (const EscapeError& e) {
    result.failure = e.what();
  } catch (const StiffnessError& e) {
    result.failure = e.what();
  } catch (const EvaluationError& e) {
    result.failure = e.what();
  }
  result.stats = stepper.stats();
  if (result.trajectory) result.trajectory->set_stats(result.stats);
  return result;
}

ChordSearchReport find_chord(const HamiltonianSpec& g, const Region& x0, const Region& x1,
                             double time_budget, const ChordSearchConfig& config) {
  if (!(time_budget > 0.0)) throw ParameterError("find_chord needs a positive time budget");
  if (!(x0.chart() == g.chart()) || !(x1.chart() == g.chart()))
    throw ParameterError("regions and Hamiltonian live on different charts");

  const auto seeds =
      config.explicit_seeds.empty() ? x0.seed_params(config.seeds) : config.explicit_seeds;
  std::vector<double> phases{0.0};
  const bool time_dependent = !g.autonomous();
  if (time_dependent) {
    if (!config.explicit_phases.empty()) {
      phases = config.explicit_phases;
    } else {
      phases.clear();
      for (int j = 0; j < config.phases; ++j) phases.push_back(static_cast<double>(j) / config.phases);
    }
  }

  for (const auto& s : seeds) {
    const auto p = x0.point_at(s);
    if (x1.distance(p) <= config.tol)
      throw ParameterError("find_chord: source and target regions intersect");
  }

  ShotConfig shot_config;
  shot_config.integrator = config.integrator;
  shot_config.tol = config.tol;

  std::vector<SeedTask> tasks;
  for (const auto& s : seeds)
    for (double ph : phases) tasks.push_back({s, ph});

  std::vector<ShotResult> shots(tasks.size());
  parallel_for(tasks.size(), config.threads, [&](std::size_t i) {
    const auto start = x0.point_at(tasks[i].params);
    shots[i] = shoot(g, start, tasks[i].phase, time_budget, x1, shot_config);
  });

  ChordSearchReport report;
  report.time_budget = time_budget;
  report.tol = config.tol;
  report.shots = shots.size();
  std::optional<std::size_t> best_hit;
  for (std::size_t i = 0; i < shots.size(); ++i) {
    const auto& s = shots[i];
    report.steps += s.stats.steps;
    report.max_error_estimate = std::max(report.max_error_estimate, s.stats.max_error_estimate);
    if (s.failure) {
      ++report.failures;
      if (report.failure_messages.size() < 8) report.failure_messages.push_back(*s.failure);
    }
    if (s.hit) {
      ++report.hits;
      const double len = s.hit_time - tasks[i].phase;
      if (!best_hit || len < shots[*best_hit].hit_time - tasks[*best_hit].phase) best_hit = i;
    }
    if (s.best_distance < report.best_distance) {
      report.best_distance = s.best_distance;
      report.best_point = s.best_point;
    }
  }

  // search coordinates: region parameters, then the start phase
  const auto info = x0.params();
  std::vector<detail::Coord> kinds;
  std::vector<double> steps;
  const auto grid_steps = [&] {
    std::vector<double> st;
    const double per_axis = std::max(
        2.0, std::pow(static_cast<double>(std::max<std::size_t>(seeds.size(), 2)),
                      1.0 / std::max<std::size_t>(info.size(), 1)));
    for (const auto& p : info) {
      kinds.push_back(p.kind == ParamKind::kInterval   ? detail::Coord::kInterval
                      : p.kind == ParamKind::kPeriodic ? detail::Coord::kPeriodic
                                                       : detail::Coord::kFixed);
      st.push_back(1.0 / per_axis);
    }
    kinds.push_back(time_dependent ? detail::Coord::kPeriodic : detail::Coord::kFixed);
    st.push_back(time_dependent ? 1.0 / static_cast<double>(phases.size()) : 0.0);
    return st;
  };
  steps = grid_steps();

  auto pack = [&](const SeedTask& task) {
    auto v = task.params;
    v.push_back(task.phase);
    return v;
  };
  auto run = [&](const std::vector<double>& v, bool record = false) {
    std::vector<double> params(v.begin(), v.end() - 1);
    x0.normalize_params(params);
    auto cfg = shot_config;
    cfg.record = record;
    return shoot(g, x0.point_at(params), v.back(), time_budget, x1, cfg);
  };

  std::optional<std::vector<double>> chosen;
  std::size_t chosen_index = 0;
  bool refined = false;
  if (best_hit) {
    chosen = pack(tasks[*best_hit]);
    chosen_index = *best_hit;
  } else if (config.refine_evaluations > 0) {
    // shooting refinement of the closest near-misses
    std::vector<std::size_t> order(shots.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return shots[a].best_distance < shots[b].best_distance;
    });
    const auto candidates =
        std::min<std::size_t>(order.size(), static_cast<std::size_t>(config.refine_candidates));
    for (std::size_t c = 0; c < candidates && !chosen; ++c) {
      const auto idx = order[c];
      if (!std::isfinite(shots[idx].best_distance)) continue;
      auto objective = [&](const std::vector<double>& v) {
        const auto s = run(v);
        if (s.best_distance < report.best_distance) {
          report.best_distance = s.best_distance;
          report.best_point = s.best_point;
        }
        return s.hit ? -1.0 : s.best_distance;
      };
      const auto res = detail::pattern_search(objective, pack(tasks[idx]), shots[idx].best_distance,
                                              steps, kinds, config.refine_evaluations, 1e-10, -0.5);
      if (res.reached_target) {
        chosen = res.x;
        chosen_index = idx;
        refined = true;
      }
    }
  }
  if (!chosen) return report;

  if (config.minimize_time && config.refine_evaluations > 0) {
    auto objective = [&](const std::vector<double>& v) {
      const auto s = run(v);
      return s.hit ? s.hit_time - v.back() : std::numeric_limits<double>::infinity();
    };
    const double f0 = objective(*chosen);
    const auto res = detail::pattern_search(objective, *chosen, f0, steps, kinds,
                                            config.refine_evaluations, 1e-10);
    if (res.value < f0) {
      chosen = res.x;
      refined = true;
    }
  }

  auto final_shot = run(*chosen, true);
  if (!final_shot.hit) return report;  // cannot happen for a deterministic objective
  Chord chord;
  chord.seed_params.assign(chosen->begin(), chosen->end() - 1);
  x0.normalize_params(chord.seed_params);
  chord.t0 = chosen->back();
  chord.t1 = final_shot.hit_time;
  chord.time_length = chord.t1 - chord.t0;
  chord.start = x0.point_at(chord.seed_params);
  chord.end = final_shot.hit_state;
  chord.start_distance = x0.distance(chord.start);
  chord.end_distance = x1.distance(chord.end);
  chord.seed_index = chosen_index;
  chord.refined = refined;
  chord.segment = std::move(*final_shot.trajectory);
  report.chord = std::move(chord);
  return report;
}

bool validate_chord(const HamiltonianSpec& g, const Region& x0, const Region& x1,
                    const Chord& chord, double time_budget, double tol,
                    const IntegratorConfig& integrator) {
  if (!(chord.time_length > 0.0)) return false;
  if (chord.time_length > time_budget * (1.0 + 1e-12)) return false;
  if (x0.distance(chord.start) > tol) return false;
  if (x1.distance(chord.end) > tol) return false;
  const auto traj = integrate(g, chord.start, chord.t0, chord.t1, integrator);
  const auto& end = traj.state(traj.size() - 1);
  return chart_distance(g.chart(), end, chord.end) <= tol;
}

double chord_budget(double kappa, double separation_value, double perturbation) {
  if (!(separation_value - perturbation > 0.0)) {
    std::ostringstream os;
    os << "non-separating after perturbation: Delta=" << separation_value
       << " <= delta=" << perturbation;
    throw ParameterError(os.str());
  }
  return kappa / (separation_value - perturbation);
}

}  // namespace tetra
