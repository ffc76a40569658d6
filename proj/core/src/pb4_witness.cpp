#include <algorithm>
#include <cmath>
#include <sstream>

#include "tetra/errors.hpp"
#include "tetra/pb4.hpp"

namespace tetra {

namespace {

// quintic smoothstep with vanishing first and second derivatives at 0 and 1
struct Step {
  double v, d, dd;
};

Step smooth(double x) {
  if (x <= 0.0) return {0.0, 0.0, 0.0};
  if (x >= 1.0) return {1.0, 0.0, 0.0};
  const double x2 = x * x, x3 = x2 * x;
  return {x3 * (10.0 - 15.0 * x + 6.0 * x2), 30.0 * x2 * (1.0 - x) * (1.0 - x),
          60.0 * x * (1.0 - x) * (1.0 - 2.0 * x)};
}

// value and derivative of a profile
struct Jet {
  double v, d;
};

// 1 on [lo, hi], smooth decay to 0 over a width w on either side
Jet plateau(double x, double lo, double hi, double w) {
  if (x < lo) {
    const auto s = smooth((x - (lo - w)) / w);
    return {s.v, s.d / w};
  }
  if (x > hi) {
    const auto s = smooth((hi + w - x) / w);
    return {s.v, -s.d / w};
  }
  return {1.0, 0.0};
}

}  // namespace

WallWitness::WallWitness(double r0, double r1, double d1, double d2)
    : r0_(r0), r1_(r1), d1_(d1), d2_(d2) {
  sigma_ = 1.0 / (r1 - r0) + d2;
  a_ = r0 + d1;
  ell_ = r1 - a_;
  w_ = ell_ - 1.0 / sigma_;
}

double WallWitness::value(double s) const {
  if (s <= a_) return 0.0;
  if (s <= a_ + w_) {
    const double x = (s - a_) / w_;
    return sigma_ * w_ * (x * x * x - 0.5 * x * x * x * x);
  }
  if (s <= r1_ - w_) return 0.5 * sigma_ * w_ + sigma_ * (s - a_ - w_);
  if (s <= r1_) {
    const double y = (r1_ - s) / w_;
    return 1.0 - sigma_ * w_ * (y * y * y - 0.5 * y * y * y * y);
  }
  return 1.0 - smooth((s - r1_) / d1_).v;
}

double WallWitness::slope(double s) const {
  if (s <= a_) return 0.0;
  if (s <= a_ + w_) {
    const double x = (s - a_) / w_;
    return sigma_ * x * x * (3.0 - 2.0 * x);
  }
  if (s <= r1_ - w_) return sigma_;
  if (s <= r1_) {
    const double y = (r1_ - s) / w_;
    return sigma_ * y * y * (3.0 - 2.0 * y);
  }
  return -smooth((s - r1_) / d1_).d / d1_;
}

double WallWitness::curvature(double s) const {
  if (s <= a_) return 0.0;
  if (s <= a_ + w_) {
    const double x = (s - a_) / w_;
    return sigma_ * 6.0 * x * (1.0 - x) / w_;
  }
  if (s <= r1_ - w_) return 0.0;
  if (s <= r1_) {
    const double y = (r1_ - s) / w_;
    return -sigma_ * 6.0 * y * (1.0 - y) / w_;
  }
  return -smooth((s - r1_) / d1_).dd / (d1_ * d1_);
}

HamiltonianSpec WallWitness::hamiltonian(const ContactModel& model) const {
  const WallWitness self = *this;
  auto value = [self, model](std::span<const double> x, double) {
    return self.value(model.s_of(x));
  };
  auto gradient = [self, model](std::span<const double> x, double, std::span<double> grad) {
    model.s_gradient(x, grad);
    const double k = self.slope(model.s_of(x));
    for (auto& v : grad) v *= k;
  };
  return HamiltonianSpec(model.ambient_chart(), value, gradient, TimeDependence::kAutonomous,
                         "wall_witness");
}

WallWitness wall_witness(double R0, double R1, double delta1, double delta2) {
  if (!(R0 > 0.0 && R1 > R0)) throw ParameterError("wall witness needs 0 < R0 < R1");
  if (!(delta1 > 0.0) || !(delta2 > 0.0))
    throw ParameterError("wall witness needs positive delta1 and delta2");
  if (delta1 >= 0.5 * (R1 - R0)) throw ParameterError("wall witness delta1 must be below (R1-R0)/2");
  WallWitness w(R0, R1, delta1, delta2);
  // the transitions need room: 0 < w <= ell/2
  if (!(w.transition_width() > 0.0) || w.transition_width() > 0.5 * (R1 - R0 - delta1)) {
    std::ostringstream os;
    os << "wall witness cannot meet the slope bound " << w.max_slope() << " with delta1="
       << delta1 << ": need 1/(R1-R0-delta1) < 1/(R1-R0) + delta2 <= 2/(R1-R0-delta1)";
    throw ParameterError(os.str());
  }
  return w;
}

SmoothPair prototype_smooth_pair(double R0, double R1, double T) {
  if (!(R0 > 0.0 && R1 > R0)) throw ParameterError("smooth pair needs 0 < R0 < R1");
  if (!(T > 0.0 && T < 1.0)) throw ParameterError("smooth pair needs 0 < T < 1");
  const double m = std::min(0.1, (1.0 - T) / 5.0);
  const double ms = std::min(0.5 * R0, 0.1 * (R1 - R0));
  const double span = R1 - R0;
  // u measured on the circle around the middle of [0, T]
  auto unwrap = [T](double u) { return wrap_centered(u - 0.5 * T) + 0.5 * T; };
  // f(s): 0 below R0, quintic ramp to 1 at R1, then back to 0
  auto f_s = [=](double s) -> Jet {
    if (s <= R1) {
      const auto st = smooth((s - R0) / span);
      return {st.v, st.d / span};
    }
    const auto st = smooth((s - R1 - ms) / ms);
    return {1.0 - st.v, -st.d / ms};
  };
  // a(u): 1 on [0, T]
  auto a_u = [=](double u) { return plateau(unwrap(u), 0.0, T, m); };
  // g(u): 1 at the high wall (u = 0), 0 at the low wall (u = T)
  auto g_u = [=](double u) -> Jet {
    const double v = unwrap(u);
    if (v >= 0.0) {
      const auto st = smooth(v / T);
      return {1.0 - st.v, -st.d / T};
    }
    // 1 on [-m, 0], decay over [-2m, -m]
    const auto st = smooth((v + 2.0 * m) / m);
    return {st.v, st.d / m};
  };
  auto b_s = [=](double s) { return plateau(s, R0, R1, ms); };

  const PhaseChart chart(1, {true});
  // chart order (p, q) = (s, u)
  auto f_value = [=](std::span<const double> x, double) { return f_s(x[0]).v * a_u(x[1]).v; };
  auto f_grad = [=](std::span<const double> x, double, std::span<double> g) {
    const auto fs = f_s(x[0]);
    const auto au = a_u(x[1]);
    g[0] = fs.d * au.v;
    g[1] = fs.v * au.d;
  };
  auto g_value = [=](std::span<const double> x, double) { return g_u(x[1]).v * b_s(x[0]).v; };
  auto g_grad = [=](std::span<const double> x, double, std::span<double> g) {
    const auto gu = g_u(x[1]);
    const auto bs = b_s(x[0]);
    g[0] = gu.v * bs.d;
    g[1] = gu.d * bs.v;
  };
  return {HamiltonianSpec(chart, f_value, f_grad, TimeDependence::kAutonomous, "pair_F"),
          HamiltonianSpec(chart, g_value, g_grad, TimeDependence::kAutonomous, "pair_G")};
}

}  // namespace tetra
