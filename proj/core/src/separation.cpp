#include <algorithm>
#include <cmath>
#include <numeric>

#include "sphere_search.hpp"
#include "tetra/dynamics.hpp"
#include "tetra/errors.hpp"

namespace tetra {

namespace {

struct Sample {
  std::vector<double> params;
  double time;
  double value;
};

// Extremum of sign * G over region x time: dense sampling, then cyclic
// coordinate descent (golden section on shrinking brackets) from the best samples.
Extremum extremize(const HamiltonianSpec& g, const Region& region, double sign,
                   const SeparationConfig& config, int& sample_count) {
  const auto seeds = region.seed_params(config.samples);
  std::vector<double> times{0.0};
  const bool periodic = !g.autonomous();
  if (periodic) {
    times.clear();
    for (int j = 0; j < config.time_samples; ++j)
      times.push_back(static_cast<double>(j) / config.time_samples);
  }
  std::vector<Sample> samples;
  for (const auto& s : seeds)
    for (double t : times) {
      const auto x = region.point_at(s);
      samples.push_back({s, t, sign * g.value(x, t)});
    }
  sample_count = static_cast<int>(samples.size());
  // smallest sign*G first, ties by sample order
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return samples[a].value < samples[b].value;
  });

  const auto info = region.params();
  const double per_axis =
      std::max(2.0, std::pow(static_cast<double>(seeds.size()), 1.0 / std::max<std::size_t>(info.size(), 1)));
  Sample best = samples[order.front()];
  const auto starts = std::min<std::size_t>(order.size(), static_cast<std::size_t>(config.refine_starts));
  for (std::size_t c = 0; c < starts; ++c) {
    Sample cur = samples[order[c]];
    auto eval = [&](const std::vector<double>& params, double t) {
      std::vector<double> p = params;
      region.normalize_params(p);
      return sign * g.value(region.point_at(p), t);
    };
    std::vector<double> widths(info.size(), 1.0 / per_axis);
    double time_width = periodic ? 1.0 / static_cast<double>(times.size()) : 0.0;
    for (int sweep = 0; sweep < config.max_sweeps; ++sweep) {
      const double before = cur.value;
      for (std::size_t i = 0; i < info.size(); ++i) {
        if (info[i].kind == ParamKind::kDiscrete) continue;
        const double c0 = cur.params[i];
        double lo = c0 - widths[i], hi = c0 + widths[i];
        if (info[i].kind == ParamKind::kInterval) {
          lo = std::max(lo, 0.0);
          hi = std::min(hi, 1.0);
        }
        auto line = [&](double v) {
          auto p = cur.params;
          p[i] = v;
          return eval(p, cur.time);
        };
        const double v = detail::golden_section(line, lo, hi, 60);
        const double fv = line(v);
        if (fv < cur.value) {
          cur.params[i] = v;
          region.normalize_params(cur.params);
          cur.value = fv;
        }
        widths[i] *= 0.5;
      }
      if (periodic) {
        auto line = [&](double t) { return eval(cur.params, t); };
        const double v = detail::golden_section(line, cur.time - time_width, cur.time + time_width, 60);
        const double fv = line(v);
        if (fv < cur.value) {
          cur.time = wrap_unit(v);
          cur.value = fv;
        }
        time_width *= 0.5;
      }
      if (before - cur.value <= config.refine_tol && sweep > 2) break;
    }
    if (cur.value < best.value) best = cur;
  }
  Extremum e;
  e.value = sign * best.value;
  e.params = best.params;
  e.point = region.point_at(best.params);
  e.time = best.time;
  return e;
}

}  // namespace

SeparationReport separation(const HamiltonianSpec& g, const Region& y0, const Region& y1,
                            const SeparationConfig& config) {
  if (config.samples < 1) throw ParameterError("separation needs at least one sample");
  SeparationReport report;
  report.max_y0 = extremize(g, y0, -1.0, config, report.samples_y0);
  report.min_y1 = extremize(g, y1, 1.0, config, report.samples_y1);
  report.delta = report.min_y1.value - report.max_y0.value;
  report.refine_tol = config.refine_tol;
  report.separating = report.delta > 0.0;
  return report;
}

}  // namespace tetra
