#include <algorithm>
#include <cmath>
#include <sstream>

#include "tetra/dynamics.hpp"
#include "tetra/errors.hpp"

namespace tetra {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// continuous extension (Hairer, Norsett, Wanner)
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

double escape_norm(const PhaseChart& chart, std::span<const double> x) {
  double acc = 0.0;
  for (int i = 0; i < chart.dim(); ++i)
    if (!chart.periodic(i)) acc += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
  return std::sqrt(acc);
}

}  // namespace

std::vector<double> DenseStep::at(double t) const {
  const double th = h > 0.0 ? (t - t0) / h : 0.0;
  const double th1 = 1.0 - th;
  std::vector<double> y(x0.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    y[i] = coeff[0][i] +
           th * (coeff[1][i] + th1 * (coeff[2][i] + th * (coeff[3][i] + th1 * coeff[4][i])));
  return y;
}

DormandPrince::DormandPrince(const HamiltonianSpec& h, IntegratorConfig config)
    : h_(h), config_(config), h_next_(config.initial_step) {
  if (!(config_.tol > 0.0)) throw ParameterError("integrator tolerance must be positive");
  const auto d = static_cast<std::size_t>(h_.chart().dim());
  for (auto& k : k_) k.assign(d, 0.0);
  tmp_.assign(d, 0.0);
  y5_.assign(d, 0.0);
  err_.assign(d, 0.0);
}

void DormandPrince::field(std::span<const double> x, double t, std::span<double> out) {
  ++stats_.evaluations;
  sgrad(h_, x, t, out);
}

std::vector<double> DormandPrince::single_step(double t, std::span<const double> x, double h) {
  const auto d = x.size();
  std::array<std::vector<double>, 6> k;
  for (auto& v : k) v.assign(d, 0.0);
  std::vector<double> y(d);
  field(x, t, k[0]);
  for (std::size_t i = 0; i < d; ++i) y[i] = x[i] + h * a21 * k[0][i];
  field(y, t + c2 * h, k[1]);
  for (std::size_t i = 0; i < d; ++i) y[i] = x[i] + h * (a31 * k[0][i] + a32 * k[1][i]);
  field(y, t + c3 * h, k[2]);
  for (std::size_t i = 0; i < d; ++i)
    y[i] = x[i] + h * (a41 * k[0][i] + a42 * k[1][i] + a43 * k[2][i]);
  field(y, t + c4 * h, k[3]);
  for (std::size_t i = 0; i < d; ++i)
    y[i] = x[i] + h * (a51 * k[0][i] + a52 * k[1][i] + a53 * k[2][i] + a54 * k[3][i]);
  field(y, t + c5 * h, k[4]);
  for (std::size_t i = 0; i < d; ++i)
    y[i] = x[i] + h * (a61 * k[0][i] + a62 * k[1][i] + a63 * k[2][i] + a64 * k[3][i] +
                       a65 * k[4][i]);
  field(y, t + h, k[5]);
  for (std::size_t i = 0; i < d; ++i)
    y[i] = x[i] + h * (a71 * k[0][i] + a73 * k[2][i] + a74 * k[3][i] + a75 * k[4][i] +
                       a76 * k[5][i]);
  h_.chart().reduce(y);
  return y;
}

void DormandPrince::advance(double& t, std::vector<double>& x, double t_end, DenseStep* dense) {
  const auto d = x.size();
  auto& k1 = k_[0];
  auto& k2 = k_[1];
  auto& k3 = k_[2];
  auto& k4 = k_[3];
  auto& k5 = k_[4];
  auto& k6 = k_[5];
  auto& k7 = k_[6];
  if (!fsal_valid_) {
    field(x, t, k1);
    fsal_valid_ = true;
  }
  for (;;) {
    double h = std::min({h_next_, config_.max_step, t_end - t});
    if (h <= 0.0) return;
    const bool final_step = h >= t_end - t;
    for (std::size_t i = 0; i < d; ++i) tmp_[i] = x[i] + h * a21 * k1[i];
    field(tmp_, t + c2 * h, k2);
    for (std::size_t i = 0; i < d; ++i) tmp_[i] = x[i] + h * (a31 * k1[i] + a32 * k2[i]);
    field(tmp_, t + c3 * h, k3);
    for (std::size_t i = 0; i < d; ++i)
      tmp_[i] = x[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    field(tmp_, t + c4 * h, k4);
    for (std::size_t i = 0; i < d; ++i)
      tmp_[i] = x[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    field(tmp_, t + c5 * h, k5);
    for (std::size_t i = 0; i < d; ++i)
      tmp_[i] = x[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    field(tmp_, t + h, k6);
    for (std::size_t i = 0; i < d; ++i)
      y5_[i] = x[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    field(y5_, t + h, k7);
    double err = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double e =
          h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = config_.tol * (1.0 + std::max(std::abs(x[i]), std::abs(y5_[i])));
      err += (e / sc) * (e / sc);
    }
    err = std::sqrt(err / static_cast<double>(d));
    if (!std::isfinite(err)) err = 1e10;
    if (err <= 1.0) {
      ++stats_.steps;
      stats_.max_error_estimate = std::max(stats_.max_error_estimate, err);
      if (dense) {
        dense->t0 = t;
        dense->h = h;
        dense->x0 = x;
        for (auto& c : dense->coeff) c.resize(d);
        for (std::size_t i = 0; i < d; ++i) {
          const double dy = y5_[i] - x[i];
          const double bspl = h * k1[i] - dy;
          dense->coeff[0][i] = x[i];
          dense->coeff[1][i] = dy;
          dense->coeff[2][i] = bspl;
          dense->coeff[3][i] = dy - h * k7[i] - bspl;
          dense->coeff[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                    d6 * k6[i] + d7 * k7[i]);
        }
      }
      const double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
      const double proposed = h * std::clamp(fac, 0.2, 5.0);
      // a step truncated at t_end says nothing about the natural step size
      h_next_ = final_step ? std::max(h_next_, proposed) : proposed;
      t = final_step ? t_end : t + h;
      h_.chart().reduce(y5_);
      if (escape_norm(h_.chart(), y5_) > config_.escape_bound) {
        std::ostringstream os;
        os << "trajectory escaped the bound " << config_.escape_bound << " at t=" << t;
        throw EscapeError(os.str(), x, t - h);
      }
      x.swap(y5_);
      k1.swap(k7);
      return;
    }
    ++stats_.rejected;
    h_next_ = h * std::max(0.2, 0.9 * std::pow(err, -0.2));
    if (h_next_ < config_.min_step) {
      std::ostringstream os;
      os << "step size underflow (h=" << h_next_ << ") at t=" << t;
      throw StiffnessError(os.str(), t);
    }
  }
}

void Trajectory::append(double t, std::vector<double> x) {
  times_.push_back(t);
  states_.push_back(std::move(x));
}

std::vector<double> Trajectory::at(double t) const {
  if (dense_.empty()) throw ParameterError("trajectory has no dense output");
  auto it = std::upper_bound(dense_.begin(), dense_.end(), t,
                             [](double v, const DenseStep& s) { return v < s.t0; });
  if (it != dense_.begin()) --it;
  auto y = it->at(t);
  chart_.reduce(y);
  return y;
}

Trajectory integrate(const HamiltonianSpec& h, std::span<const double> x0, double t0, double t1,
                     const IntegratorConfig& config) {
  if (!(t1 > t0)) throw ParameterError("integrate needs t1 > t0");
  if (static_cast<int>(x0.size()) != h.chart().dim())
    throw ParameterError("initial point has wrong dimension");
  DormandPrince stepper(h, config);
  Trajectory traj(h.chart());
  std::vector<double> x(x0.begin(), x0.end());
  h.chart().reduce(x);
  double t = t0;
  traj.append(t, x);
  long guard = 0;
  while (t < t1) {
    DenseStep step;
    stepper.advance(t, x, t1, &step);
    traj.add_dense(std::move(step));
    traj.append(t, x);
    if (++guard > config.max_steps) throw StiffnessError("step budget exhausted", t);
  }
  traj.set_stats(stepper.stats());
  return traj;
}

Trajectory integrate(const HamiltonianSpec& h, const PhasePoint& x0, double t0, double t1,
                     double tol) {
  IntegratorConfig config;
  config.tol = tol;
  return integrate(h, x0.coords(), t0, t1, config);
}

double default_escape_bound(double R1) { return 10.0 * (std::sqrt(R1) + 1.0); }

}  // namespace tetra
