#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

namespace tetra::detail {

// Golden-section minimization of a unimodal function on [lo, hi].
inline double golden_section(const std::function<double(double)>& f, double lo, double hi,
                             int iterations = 80) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iterations && (b - a) > 1e-15; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? c : d;
}

// unit vector from hyperspherical angles (k >= 2): angles[0..k-3] in [0, pi], angles[k-2] periodic
inline std::vector<double> unit_from_angles(std::span<const double> angles, int k) {
  std::vector<double> x(static_cast<std::size_t>(k));
  double sin_prod = 1.0;
  for (int i = 0; i < k - 1; ++i) {
    const double a = angles[static_cast<std::size_t>(i)];
    x[static_cast<std::size_t>(i)] = sin_prod * std::cos(a);
    sin_prod *= std::sin(a);
  }
  x[static_cast<std::size_t>(k - 1)] = sin_prod;
  return x;
}

// Minimizes f over the unit sphere S^{k-1}.  Exhaustive for k = 1, angle
// grid plus golden section for k = 2, grid plus cyclic golden-section
// coordinate descent in hyperspherical angles for k >= 3.
inline std::vector<double> minimize_on_sphere(
    int k, const std::function<double(std::span<const double>)>& f) {
  if (k == 1) {
    const double plus[1] = {1.0};
    const double minus[1] = {-1.0};
    return f(plus) <= f(minus) ? std::vector<double>{1.0} : std::vector<double>{-1.0};
  }
  const double two_pi = 2.0 * std::numbers::pi;
  if (k == 2) {
    const int grid = 128;
    auto at = [&](double a) {
      const double x[2] = {std::cos(a), std::sin(a)};
      return f(x);
    };
    int best = 0;
    double best_val = at(0.0);
    for (int i = 1; i < grid; ++i) {
      const double v = at(two_pi * i / grid);
      if (v < best_val) {
        best_val = v;
        best = i;
      }
    }
    const double h = two_pi / grid;
    const double a = golden_section(at, two_pi * best / grid - h, two_pi * best / grid + h);
    const double a_val = at(a);
    const double g = two_pi * best / grid;
    const double chosen = a_val <= best_val ? a : g;
    return {std::cos(chosen), std::sin(chosen)};
  }
  const int m = k - 1;
  std::vector<double> ang(static_cast<std::size_t>(m), 0.0);
  auto eval = [&](const std::vector<double>& a) {
    auto x = unit_from_angles(a, k);
    return f(x);
  };
  // coarse grid over the angles
  const int per_axis = 10;
  std::vector<int> idx(static_cast<std::size_t>(m), 0);
  std::vector<double> best_ang = ang;
  double best_val = 1e300;
  for (;;) {
    for (int i = 0; i < m; ++i) {
      const bool last = i == m - 1;
      ang[static_cast<std::size_t>(i)] =
          last ? two_pi * idx[static_cast<std::size_t>(i)] / per_axis
               : std::numbers::pi * (idx[static_cast<std::size_t>(i)] + 0.5) / per_axis;
    }
    const double v = eval(ang);
    if (v < best_val) {
      best_val = v;
      best_ang = ang;
    }
    int j = 0;
    while (j < m && ++idx[static_cast<std::size_t>(j)] == per_axis) idx[static_cast<std::size_t>(j++)] = 0;
    if (j == m) break;
  }
  double width = std::numbers::pi / per_axis;
  for (int sweep = 0; sweep < 30; ++sweep) {
    for (int i = 0; i < m; ++i) {
      auto line = [&](double a) {
        auto trial = best_ang;
        trial[static_cast<std::size_t>(i)] = a;
        return eval(trial);
      };
      const double c = best_ang[static_cast<std::size_t>(i)];
      const double a = golden_section(line, c - width, c + width, 60);
      if (line(a) < best_val) {
        best_ang[static_cast<std::size_t>(i)] = a;
        best_val = line(a);
      }
    }
    width *= 0.5;
  }
  return unit_from_angles(best_ang, k);
}

}  // namespace tetra::detail
