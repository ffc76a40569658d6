#include "tetra/phase_core.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <sstream>
#include <utility>

#include "tetra/errors.hpp"

namespace tetra {

double wrap_unit(double v) {
  double r = v - std::floor(v);
  // floor can round x - floor(x) up to exactly 1 for tiny negative x
  if (r >= 1.0) r = 0.0;
  return r;
}

double wrap_centered(double v) {
  double r = wrap_unit(v + 0.5) - 0.5;
  return r;
}

PhaseChart::PhaseChart(int dim_pairs, std::vector<bool> periodic_q)
    : n_(dim_pairs), periodic_q_(std::move(periodic_q)) {
  if (n_ < 1) throw ParameterError("phase chart needs dim_pairs >= 1");
  if (periodic_q_.empty()) periodic_q_.assign(static_cast<std::size_t>(n_), false);
  if (static_cast<int>(periodic_q_.size()) != n_)
    throw ParameterError("periodicity mask must have one entry per q-coordinate");
}

bool PhaseChart::periodic(int coord) const {
  if (coord < n_) return false;
  return periodic_q_[static_cast<std::size_t>(coord - n_)];
}

std::string PhaseChart::label(int coord) const {
  std::ostringstream os;
  if (coord < n_)
    os << 'p' << coord + 1;
  else
    os << 'q' << coord - n_ + 1;
  return os.str();
}

void PhaseChart::reduce(std::span<double> x) const {
  for (int i = 0; i < n_; ++i)
    if (periodic_q_[static_cast<std::size_t>(i)]) {
      auto& v = x[static_cast<std::size_t>(n_ + i)];
      v = wrap_unit(v);
    }
}

double PhaseChart::difference(int coord, double a, double b) const {
  return periodic(coord) ? wrap_centered(a - b) : a - b;
}

PhaseChart PhaseChart::extended(int extra_pairs, bool extra_periodic) const {
  auto mask = periodic_q_;
  mask.insert(mask.end(), static_cast<std::size_t>(extra_pairs), extra_periodic);
  return PhaseChart(n_ + extra_pairs, std::move(mask));
}

PhasePoint::PhasePoint(PhaseChart chart, std::vector<double> coords)
    : chart_(std::move(chart)), coords_(std::move(coords)) {
  if (static_cast<int>(coords_.size()) != chart_.dim())
    throw ParameterError("phase point has wrong number of coordinates");
  chart_.reduce(coords_);
}

HamiltonianSpec::HamiltonianSpec(PhaseChart chart, ValueFn value, GradientFn gradient,
                                 TimeDependence time, std::string name)
    : chart_(std::move(chart)),
      value_(std::move(value)),
      gradient_(std::move(gradient)),
      time_(time),
      name_(std::move(name)) {
  if (!value_ || !gradient_) throw ParameterError("Hamiltonian needs value and gradient");
}

double HamiltonianSpec::value(std::span<const double> x, double t) const {
  const double v = value_(x, t);
  if (!std::isfinite(v))
    throw EvaluationError("non-finite Hamiltonian value", {x.begin(), x.end()}, t);
  return v;
}

void HamiltonianSpec::gradient(std::span<const double> x, double t,
                               std::span<double> grad) const {
  gradient_(x, t, grad);
  for (double g : grad)
    if (!std::isfinite(g))
      throw EvaluationError("non-finite Hamiltonian gradient", {x.begin(), x.end()}, t);
}

std::vector<double> HamiltonianSpec::gradient(std::span<const double> x, double t) const {
  std::vector<double> g(static_cast<std::size_t>(chart_.dim()));
  gradient(x, t, g);
  return g;
}

double HamiltonianSpec::time_derivative(std::span<const double> x, double t) const {
  if (dt_) {
    const double v = dt_(x, t);
    if (!std::isfinite(v))
      throw EvaluationError("non-finite time derivative", {x.begin(), x.end()}, t);
    return v;
  }
  if (autonomous()) return 0.0;
  throw ParameterError("Hamiltonian '" + name_ + "' has no analytic time derivative");
}

HamiltonianSpec HamiltonianSpec::with_time_derivative(ValueFn dt) const {
  auto copy = *this;
  copy.dt_ = std::move(dt);
  return copy;
}

HamiltonianSpec HamiltonianSpec::with_derived_time_derivative(const HamiltonianSpec& a,
                                                              const HamiltonianSpec& b,
                                                              ValueFn dt) const {
  if (autonomous() || !a.has_time_derivative() || !b.has_time_derivative()) return *this;
  return with_time_derivative(std::move(dt));
}

HamiltonianSpec HamiltonianSpec::renamed(std::string name) const {
  auto copy = *this;
  copy.name_ = std::move(name);
  return copy;
}

HamiltonianSpec HamiltonianSpec::with_time_dependence(TimeDependence time) const {
  auto copy = *this;
  copy.time_ = time;
  return copy;
}

void sgrad(const HamiltonianSpec& h, std::span<const double> x, double t, std::span<double> out) {
  const int n = h.chart().dim_pairs();
  h.gradient(x, t, out);
  for (int i = 0; i < n; ++i) {
    const double hp = out[static_cast<std::size_t>(i)];
    const double hq = out[static_cast<std::size_t>(n + i)];
    out[static_cast<std::size_t>(i)] = -hq;
    out[static_cast<std::size_t>(n + i)] = hp;
  }
}

std::vector<double> sgrad(const HamiltonianSpec& h, std::span<const double> x, double t) {
  std::vector<double> v(static_cast<std::size_t>(h.chart().dim()));
  sgrad(h, x, t, v);
  return v;
}

std::vector<double> sgrad(const HamiltonianSpec& h, const PhasePoint& x, double t) {
  return sgrad(h, x.coords(), t);
}

namespace {

double bracket_of_gradients(std::span<const double> df, std::span<const double> dg, int n) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto p = static_cast<std::size_t>(i);
    const auto q = static_cast<std::size_t>(n + i);
    acc += df[q] * dg[p] - df[p] * dg[q];
  }
  return acc;
}

void require_same_chart(const HamiltonianSpec& a, const HamiltonianSpec& b) {
  if (!(a.chart() == b.chart())) throw ParameterError("Hamiltonians live on different charts");
}

TimeDependence combine(TimeDependence a, TimeDependence b) {
  if (a == TimeDependence::kGeneral || b == TimeDependence::kGeneral)
    return TimeDependence::kGeneral;
  if (a == TimeDependence::kPeriodic || b == TimeDependence::kPeriodic)
    return TimeDependence::kPeriodic;
  return TimeDependence::kAutonomous;
}

}  // namespace

double poisson_bracket(const HamiltonianSpec& f, const HamiltonianSpec& g,
                       std::span<const double> x, double t) {
  require_same_chart(f, g);
  const auto df = f.gradient(x, t);
  const auto dg = g.gradient(x, t);
  return bracket_of_gradients(df, dg, f.chart().dim_pairs());
}

double poisson_bracket(const HamiltonianSpec& f, const HamiltonianSpec& g, const PhasePoint& x,
                       double t) {
  return poisson_bracket(f, g, x.coords(), t);
}

void project_to_base(std::span<const double> x, int base_pairs, std::span<double> base) {
  const auto n_ext = x.size() / 2;
  for (int i = 0; i < base_pairs; ++i) {
    base[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)];
    base[static_cast<std::size_t>(base_pairs + i)] = x[n_ext + static_cast<std::size_t>(i)];
  }
}

HamiltonianSpec autonomize(const HamiltonianSpec& g) {
  if (g.autonomous())
    throw ParameterError("autonomize: G is declared autonomous; force the periodic flag first");
  if (!g.time_periodic()) throw ParameterError("autonomize: G must be 1-periodic in time");
  if (!g.has_time_derivative())
    throw ParameterError("autonomize: G needs an analytic time derivative");
  const int n = g.chart().dim_pairs();
  auto chart = g.chart().extended(1, true);
  // extended layout: (p_1..p_n, r, q_1..q_n, theta)
  auto value = [g, n](std::span<const double> x, double) {
    std::vector<double> base(static_cast<std::size_t>(2 * n));
    project_to_base(x, n, base);
    return g.value(base, x[static_cast<std::size_t>(2 * n + 1)]) + x[static_cast<std::size_t>(n)];
  };
  auto gradient = [g, n](std::span<const double> x, double, std::span<double> out) {
    const auto theta = x[static_cast<std::size_t>(2 * n + 1)];
    std::vector<double> base(static_cast<std::size_t>(2 * n));
    project_to_base(x, n, base);
    std::vector<double> gb(static_cast<std::size_t>(2 * n));
    g.gradient(base, theta, gb);
    for (int i = 0; i < n; ++i) {
      out[static_cast<std::size_t>(i)] = gb[static_cast<std::size_t>(i)];
      out[static_cast<std::size_t>(n + 1 + i)] = gb[static_cast<std::size_t>(n + i)];
    }
    out[static_cast<std::size_t>(n)] = 1.0;
    out[static_cast<std::size_t>(2 * n + 1)] = g.time_derivative(base, theta);
  };
  return HamiltonianSpec(std::move(chart), value, gradient, TimeDependence::kAutonomous,
                         "autonomized(" + g.name() + ")");
}

double pfaffian(std::vector<double> a, int dim) {
  // Parlett-Reid elimination with pivoting: Pf(A) = a01 * Pf(S) where S is
  // the Schur complement C + (v u^T - u v^T) / a01 of the leading 2x2 block.
  if (dim % 2 != 0) return 0.0;
  const auto d = static_cast<std::size_t>(dim);
  auto at = [&](int i, int j) -> double& {
    return a[static_cast<std::size_t>(i) * d + static_cast<std::size_t>(j)];
  };
  double pf = 1.0;
  for (int k = 0; k < dim - 1; k += 2) {
    int piv = k + 1;
    double best = std::abs(at(k, k + 1));
    for (int j = k + 2; j < dim; ++j)
      if (std::abs(at(k, j)) > best) {
        best = std::abs(at(k, j));
        piv = j;
      }
    if (best == 0.0) return 0.0;
    if (piv != k + 1) {
      for (int i = 0; i < dim; ++i) std::swap(at(k + 1, i), at(piv, i));
      for (int i = 0; i < dim; ++i) std::swap(at(i, k + 1), at(i, piv));
      pf = -pf;
    }
    const double a01 = at(k, k + 1);
    pf *= a01;
    for (int i = k + 2; i < dim; ++i)
      for (int j = k + 2; j < dim; ++j)
        at(i, j) += (at(k + 1, i) * at(k, j) - at(k, i) * at(k + 1, j)) / a01;
  }
  return pf;
}

VolumeFactor volume_factor(const HamiltonianSpec& f, const HamiltonianSpec& g, double tau,
                           std::span<const double> x, double t) {
  require_same_chart(f, g);
  const int n = f.chart().dim_pairs();
  const int d = 2 * n;
  const auto df = f.gradient(x, t);
  const auto dg = g.gradient(x, t);
  // omega(a,b) = a^T W b with W = [[0, I], [-I, 0]] for dp∧dq
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < n; ++i) {
    w(i, n + i) = 1.0;
    w(n + i, i) = -1.0;
  }
  Eigen::MatrixXd wt = w;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      wt(i, j) += tau * (df[static_cast<std::size_t>(i)] * dg[static_cast<std::size_t>(j)] -
                         df[static_cast<std::size_t>(j)] * dg[static_cast<std::size_t>(i)]);
  const double ratio_det = wt.partialPivLu().determinant() / w.partialPivLu().determinant();
  std::vector<double> wt_flat(static_cast<std::size_t>(d * d));
  std::vector<double> w_flat(static_cast<std::size_t>(d * d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      wt_flat[static_cast<std::size_t>(i * d + j)] = wt(i, j);
      w_flat[static_cast<std::size_t>(i * d + j)] = w(i, j);
    }
  const double pf_ratio = pfaffian(wt_flat, d) / pfaffian(w_flat, d);
  const double magnitude = std::sqrt(std::max(ratio_det, 0.0));
  const double signed_ratio = pf_ratio < 0.0 ? -magnitude : magnitude;
  const double analytic = 1.0 - tau * bracket_of_gradients(df, dg, n);
  return {signed_ratio, analytic, analytic <= 0.0};
}

HamiltonianSpec zero_hamiltonian(const PhaseChart& chart) { return constant_hamiltonian(chart, 0.0); }

HamiltonianSpec constant_hamiltonian(const PhaseChart& chart, double c) {
  return HamiltonianSpec(
      chart, [c](std::span<const double>, double) { return c; },
      [](std::span<const double>, double, std::span<double> g) {
        for (auto& v : g) v = 0.0;
      },
      TimeDependence::kAutonomous, "constant");
}

HamiltonianSpec sum(const HamiltonianSpec& a, const HamiltonianSpec& b) {
  require_same_chart(a, b);
  return HamiltonianSpec(
      a.chart(), [a, b](std::span<const double> x, double t) { return a.value(x, t) + b.value(x, t); },
      [a, b](std::span<const double> x, double t, std::span<double> g) {
        a.gradient(x, t, g);
        std::vector<double> gb(g.size());
        b.gradient(x, t, gb);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += gb[i];
      },
      combine(a.time_dependence(), b.time_dependence()), a.name() + "+" + b.name())
      .with_derived_time_derivative(a, b, [a, b](std::span<const double> x, double t) {
        return a.time_derivative(x, t) + b.time_derivative(x, t);
      });
}

HamiltonianSpec product(const HamiltonianSpec& a, const HamiltonianSpec& b) {
  require_same_chart(a, b);
  return HamiltonianSpec(
      a.chart(), [a, b](std::span<const double> x, double t) { return a.value(x, t) * b.value(x, t); },
      [a, b](std::span<const double> x, double t, std::span<double> g) {
        const double va = a.value(x, t);
        const double vb = b.value(x, t);
        std::vector<double> ga(g.size());
        a.gradient(x, t, ga);
        b.gradient(x, t, g);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] = va * g[i] + vb * ga[i];
      },
      combine(a.time_dependence(), b.time_dependence()), a.name() + "*" + b.name())
      .with_derived_time_derivative(a, b, [a, b](std::span<const double> x, double t) {
        return a.time_derivative(x, t) * b.value(x, t) + a.value(x, t) * b.time_derivative(x, t);
      });
}

HamiltonianSpec scaled(const HamiltonianSpec& a, double c) {
  return HamiltonianSpec(
      a.chart(), [a, c](std::span<const double> x, double t) { return c * a.value(x, t); },
      [a, c](std::span<const double> x, double t, std::span<double> g) {
        a.gradient(x, t, g);
        for (auto& v : g) v *= c;
      },
      a.time_dependence(), a.name())
      .with_derived_time_derivative(a, a, [a, c](std::span<const double> x, double t) {
        return c * a.time_derivative(x, t);
      });
}

HamiltonianSpec shifted(const HamiltonianSpec& a, double c) {
  return HamiltonianSpec(
      a.chart(), [a, c](std::span<const double> x, double t) { return a.value(x, t) + c; },
      [a](std::span<const double> x, double t, std::span<double> g) { a.gradient(x, t, g); },
      a.time_dependence(), a.name())
      .with_derived_time_derivative(a, a, [a](std::span<const double> x, double t) {
        return a.time_derivative(x, t);
      });
}

HamiltonianSpec lift_to(const HamiltonianSpec& h, const PhaseChart& extended_chart) {
  const int n = h.chart().dim_pairs();
  const int m = extended_chart.dim_pairs();
  if (m < n) throw ParameterError("lift_to: target chart is smaller than the base chart");
  auto value = [h, n](std::span<const double> x, double t) {
    std::vector<double> base(static_cast<std::size_t>(2 * n));
    project_to_base(x, n, base);
    return h.value(base, t);
  };
  auto gradient = [h, n, m](std::span<const double> x, double t, std::span<double> g) {
    std::vector<double> base(static_cast<std::size_t>(2 * n));
    project_to_base(x, n, base);
    std::vector<double> gb(static_cast<std::size_t>(2 * n));
    h.gradient(base, t, gb);
    for (auto& v : g) v = 0.0;
    for (int i = 0; i < n; ++i) {
      g[static_cast<std::size_t>(i)] = gb[static_cast<std::size_t>(i)];
      g[static_cast<std::size_t>(m + i)] = gb[static_cast<std::size_t>(n + i)];
    }
  };
  auto dt = [h, n](std::span<const double> x, double t) {
    std::vector<double> base(static_cast<std::size_t>(2 * n));
    project_to_base(x, n, base);
    return h.time_derivative(base, t);
  };
  return HamiltonianSpec(extended_chart, value, gradient, h.time_dependence(), h.name())
      .with_derived_time_derivative(h, h, dt);
}

}  // namespace tetra
