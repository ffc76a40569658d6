#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <vector>

#include "tetra/phase_core.hpp"

namespace tetra::detail {

enum class Coord { kInterval, kPeriodic, kFixed };

struct PatternResult {
  std::vector<double> x;
  double value;
  int evaluations;
  bool reached_target;
};

// Derivative-free compass search.  Coordinates are clamped to [0,1]
// (interval), wrapped into [0,1) (periodic) or left alone (fixed).  Stops
// after max_evals evaluations, when all steps drop below min_step, or as
// soon as the objective reaches `target`.
inline PatternResult pattern_search(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> x, double fx, std::vector<double> steps,
                                    const std::vector<Coord>& kinds, int max_evals,
                                    double min_step = 1e-10,
                                    double target = -std::numeric_limits<double>::infinity()) {
  int evals = 0;
  auto normalize = [&](std::vector<double>& y) {
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (kinds[i] == Coord::kInterval) y[i] = std::clamp(y[i], 0.0, 1.0);
      if (kinds[i] == Coord::kPeriodic) y[i] = wrap_unit(y[i]);
    }
  };
  if (fx <= target) return {x, fx, evals, true};
  while (evals < max_evals) {
    bool improved = false;
    for (std::size_t i = 0; i < x.size() && evals < max_evals; ++i) {
      if (kinds[i] == Coord::kFixed || steps[i] < min_step) continue;
      for (double dir : {1.0, -1.0}) {
        if (evals >= max_evals) break;
        auto y = x;
        y[i] += dir * steps[i];
        normalize(y);
        if (y[i] == x[i]) continue;
        const double fy = f(y);
        ++evals;
        if (fy < fx) {
          x = std::move(y);
          fx = fy;
          improved = true;
          if (fx <= target) return {x, fx, evals, true};
          break;
        }
      }
    }
    if (!improved) {
      bool any = false;
      for (std::size_t i = 0; i < steps.size(); ++i) {
        if (kinds[i] == Coord::kFixed) continue;
        steps[i] *= 0.5;
        if (steps[i] >= min_step) any = true;
      }
      if (!any) break;
    }
  }
  return {x, fx, evals, fx <= target};
}

}  // namespace tetra::detail
