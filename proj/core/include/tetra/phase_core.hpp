#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace tetra {

// Flat chart with coordinates ordered (p_1..p_n, q_1..q_n) and symplectic
// form dp∧dq.  Any q-coordinate may be periodic with period 1.
//
// Sign convention used everywhere in the library:
//   sgrad H:   dp/dt = -dH/dq,   dq/dt = dH/dp
//   {F,G} = dF(sgrad G) = sum_i (F_q G_p - F_p G_q),  so {p,q} = -1.
class PhaseChart {
 public:
  explicit PhaseChart(int dim_pairs, std::vector<bool> periodic_q = {});

  int dim_pairs() const { return n_; }
  int dim() const { return 2 * n_; }
  bool periodic(int coord) const;
  const std::vector<bool>& periodic_q() const { return periodic_q_; }
  std::string label(int coord) const;

  // wraps periodic coordinates into [0,1)
  void reduce(std::span<double> x) const;
  // a - b, taken on the circle for periodic coordinates (result in [-1/2,1/2))
  double difference(int coord, double a, double b) const;

  // appends extra (p,q) pairs: new p's after the old p's, new q's after the old q's
  PhaseChart extended(int extra_pairs, bool extra_periodic) const;

  bool operator==(const PhaseChart&) const = default;

 private:
  int n_;
  std::vector<bool> periodic_q_;
};

double wrap_unit(double v);          // into [0,1)
double wrap_centered(double v);      // into [-1/2,1/2)

class PhasePoint {
 public:
  PhasePoint(PhaseChart chart, std::vector<double> coords);

  const PhaseChart& chart() const { return chart_; }
  std::span<const double> coords() const { return coords_; }
  const std::vector<double>& vector() const { return coords_; }
  double operator[](int i) const { return coords_[static_cast<std::size_t>(i)]; }

 private:
  PhaseChart chart_;
  std::vector<double> coords_;
};

enum class TimeDependence { kAutonomous, kPeriodic, kGeneral };

using ValueFn = std::function<double(std::span<const double> x, double t)>;
using GradientFn =
    std::function<void(std::span<const double> x, double t, std::span<double> grad)>;

class HamiltonianSpec {
 public:
  HamiltonianSpec(PhaseChart chart, ValueFn value, GradientFn gradient,
                  TimeDependence time = TimeDependence::kAutonomous, std::string name = {});

  const PhaseChart& chart() const { return chart_; }
  bool autonomous() const { return time_ == TimeDependence::kAutonomous; }
  // autonomous fields are trivially 1-periodic
  bool time_periodic() const { return time_ != TimeDependence::kGeneral; }
  TimeDependence time_dependence() const { return time_; }
  const std::string& name() const { return name_; }

  // both throw EvaluationError on non-finite output
  double value(std::span<const double> x, double t) const;
  void gradient(std::span<const double> x, double t, std::span<double> grad) const;
  std::vector<double> gradient(std::span<const double> x, double t) const;

  // analytic dH/dt; autonomous fields report 0 without a callback
  bool has_time_derivative() const { return autonomous() || static_cast<bool>(dt_); }
  double time_derivative(std::span<const double> x, double t) const;
  HamiltonianSpec with_time_derivative(ValueFn dt) const;
  // attaches dt only when both operands have one
  HamiltonianSpec with_derived_time_derivative(const HamiltonianSpec& a, const HamiltonianSpec& b,
                                               ValueFn dt) const;

  HamiltonianSpec renamed(std::string name) const;
  HamiltonianSpec with_time_dependence(TimeDependence time) const;

 private:
  PhaseChart chart_;
  ValueFn value_;
  GradientFn gradient_;
  ValueFn dt_;
  TimeDependence time_;
  std::string name_;
};

void sgrad(const HamiltonianSpec& h, std::span<const double> x, double t, std::span<double> out);
std::vector<double> sgrad(const HamiltonianSpec& h, std::span<const double> x, double t);
std::vector<double> sgrad(const HamiltonianSpec& h, const PhasePoint& x, double t);

double poisson_bracket(const HamiltonianSpec& f, const HamiltonianSpec& g,
                       std::span<const double> x, double t);
double poisson_bracket(const HamiltonianSpec& f, const HamiltonianSpec& g, const PhasePoint& x,
                       double t);

// H(x, r, theta) = G(x, theta) + r on the chart extended by one pair (r, theta),
// theta periodic.  Throws ParameterError for an autonomous G.
HamiltonianSpec autonomize(const HamiltonianSpec& g);

struct VolumeFactor {
  double determinant_ratio;  // sign(Pf) * sqrt(det(omega_tau) / det(omega))
  double analytic;           // 1 - tau {F,G}
  bool degenerate;           // tau {F,G} >= 1: omega_tau not symplectic here
};

VolumeFactor volume_factor(const HamiltonianSpec& f, const HamiltonianSpec& g, double tau,
                           std::span<const double> x, double t = 0.0);

// Pfaffian of a real antisymmetric matrix stored row-major (dim x dim)
double pfaffian(std::vector<double> a, int dim);

// algebra on Hamiltonians sharing a chart
HamiltonianSpec zero_hamiltonian(const PhaseChart& chart);
HamiltonianSpec constant_hamiltonian(const PhaseChart& chart, double c);
HamiltonianSpec sum(const HamiltonianSpec& a, const HamiltonianSpec& b);
HamiltonianSpec product(const HamiltonianSpec& a, const HamiltonianSpec& b);
HamiltonianSpec scaled(const HamiltonianSpec& a, double c);
HamiltonianSpec shifted(const HamiltonianSpec& a, double c);

// pulls h back along the projection from chart.extended(...) to h's chart
HamiltonianSpec lift_to(const HamiltonianSpec& h, const PhaseChart& extended_chart);
// coordinates of an extended-chart point on the base chart with `base_pairs` pairs
void project_to_base(std::span<const double> x, int base_pairs, std::span<double> base);

}  // namespace tetra
