#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tetra/phase_core.hpp"

namespace tetra {

enum class ModelKind { kCircle, kUnitCotangentTorus, kContactSphere };

// One of the three model contact manifolds (Sigma, lambda0) together with
// its symplectization embedding into a flat ambient chart.
//
//   Circle                 Sigma = S^1(u), ambient cylinder (p,q) = (s,u), u periodic
//   UnitCotangentTorus(k)  Sigma = {|p| = 1} in T*T^k, ambient (p,q), q periodic,
//                          embedding (p,q,s) -> (s p, q)
//   ContactSphere(k)       Sigma = S^{2k-1} in C^k, z = p + iq, embedding (z,s) -> sqrt(s) z
//
// Points of Sigma are stored as: Circle {u}; torus (p_hat, q) with |p_hat| = 1;
// sphere (p, q) with |p|^2 + |q|^2 = 1.  The Legendrian L is the point u = 0,
// the fiber {|p| = 1, q = 0}, or the real unit sphere {|p| = 1, q = 0}.
class ContactModel {
 public:
  static ContactModel circle();
  static ContactModel unit_cotangent_torus(int k);
  static ContactModel contact_sphere(int k);

  ModelKind kind() const { return kind_; }
  int k() const { return k_; }
  std::string name() const;

  PhaseChart ambient_chart() const;
  int sigma_dim() const;

  double constraint_residual(std::span<const double> sigma) const;
  // throws ConstraintError if sigma is off the hypersurface beyond 1e-10
  void require_on_sigma(std::span<const double> sigma) const;

  std::vector<double> reeb_flow(std::span<const double> sigma, double t) const;
  std::vector<double> reeb_vector(std::span<const double> sigma) const;
  // lambda0 at sigma applied to a tangent vector in sigma coordinates
  double contact_form(std::span<const double> sigma, std::span<const double> v) const;
  // ambient primitive: p dq for the cotangent models, (p dq - q dp)/2 for the sphere
  double ambient_primitive(std::span<const double> x, std::span<const double> v) const;

  std::vector<double> embed(std::span<const double> sigma, double s) const;
  std::vector<double> embed_differential(std::span<const double> sigma, double s,
                                         std::span<const double> dsigma, double ds) const;
  // inverse of embed on the image: returns sigma and writes s
  std::vector<double> project(std::span<const double> x, double& s) const;
  double s_of(std::span<const double> x) const;
  void s_gradient(std::span<const double> x, std::span<double> grad) const;

  // parameters of the Legendrian: none for the circle, a sign for k = 1,
  // an angle for k = 2, hyperspherical angles (in units of the period) for k >= 3
  int legendrian_param_dim() const;
  std::vector<double> legendrian_point(std::span<const double> params) const;
  // tangent basis of psi_t(L) at psi_t(legendrian_point(params)), sigma coordinates
  std::vector<std::vector<double>> legendrian_tangents(std::span<const double> params,
                                                       double t) const;
  double distance_to_legendrian(std::span<const double> sigma) const;
  // Reeb time t in [0, T] of sigma = psi_t(x), x in L
  double reeb_time(std::span<const double> sigma) const;

  // admissible Reeb-time lengths: T < 1 (circle), T < 1/2 (torus), T <= pi/4 (sphere)
  double max_T() const;
  bool max_T_inclusive() const;

  bool operator==(const ContactModel&) const = default;

 private:
  ContactModel(ModelKind kind, int k) : kind_(kind), k_(k) {}
  ModelKind kind_;
  int k_;
};

enum class ParamKind { kInterval, kPeriodic, kDiscrete };

struct ParamInfo {
  ParamKind kind = ParamKind::kInterval;
  int levels = 0;  // for kDiscrete: values j / levels, j = 0..levels-1
};

// A compact parametrized subset of a flat chart.  Parameters live in [0,1]
// (intervals) or [0,1) (periodic / discrete).
class Region {
 public:
  virtual ~Region() = default;

  virtual std::string name() const = 0;
  virtual const PhaseChart& chart() const = 0;
  virtual std::vector<ParamInfo> params() const = 0;
  virtual std::vector<double> point_at(std::span<const double> params) const = 0;
  virtual std::vector<double> closest_point(std::span<const double> x) const = 0;
  // function whose zero set is a hypersurface containing the region
  virtual double level(std::span<const double> x) const = 0;
  virtual double distance(std::span<const double> x) const;

  bool contains(std::span<const double> x, double tol) const { return distance(x) <= tol; }
  // uniform grid in parameter space, deterministic order (first parameter slowest)
  std::vector<std::vector<double>> seed_params(int count) const;
  // clamps / wraps a parameter vector into the admissible box
  void normalize_params(std::span<double> params) const;
};

using RegionPtr = std::shared_ptr<const Region>;

// Euclidean distance with periodic coordinates measured on the circle
double chart_distance(const PhaseChart& chart, std::span<const double> a,
                      std::span<const double> b);

enum class RegionKind { kFloor, kCeiling, kLowWall, kHighWall };
std::string to_string(RegionKind kind);

class Tetragon {
 public:
  const ContactModel& model() const { return model_; }
  double R0() const { return r0_; }
  double R1() const { return r1_; }
  double T() const { return t_; }

  const Region& floor() const { return *floor_; }
  const Region& ceiling() const { return *ceiling_; }
  const Region& low_wall() const { return *low_; }
  const Region& high_wall() const { return *high_; }
  const Region& region(RegionKind kind) const { return *region_ptr(kind); }
  RegionPtr region_ptr(RegionKind kind) const;

  // Reeb time of an ambient point in the image of the symplectization
  double reeb_time(std::span<const double> x) const;
  // area of the (s, t) rectangle
  double rectangle_area() const { return (r1_ - r0_) * t_; }

 private:
  friend Tetragon build_tetragon(const ContactModel&, double, double, double);
  Tetragon(ContactModel model, double r0, double r1, double t);
  ContactModel model_;
  double r0_, r1_, t_;
  RegionPtr floor_, ceiling_, low_, high_;
};

// Validates 0 < R0 < R1 and the model's T bound, samples psi_t(L) against L.
Tetragon build_tetragon(const ContactModel& model, double R0, double R1, double T);

struct LagrangianResidual {
  double max_abs = 0.0;
  int samples = 0;
  int pairs = 0;
};

// The tetragon surface rounded along the loop gamma_eps: a rectangle in the
// (s, t) plane with corner arcs of radius eps.  Points are
// Phi(x, (s,t)) = embed(psi_t(x), s) for x in L.
class SmoothedTetragon {
 public:
  const Tetragon& tetragon() const { return tet_; }
  double eps() const { return eps_; }
  double area() const;
  double perimeter() const;

  // position and unit tangent on the loop, theta in [0,1), counterclockwise
  std::array<double, 2> loop_point(double theta) const;
  std::array<double, 2> loop_tangent(double theta) const;

  std::vector<double> surface_point(std::span<const double> legendrian_params,
                                    double theta) const;
  // analytic tangent vectors: Legendrian directions first, loop direction last
  std::vector<std::vector<double>> surface_tangents(std::span<const double> legendrian_params,
                                                    double theta) const;

  // max |omega(v_i, v_j)| over `samples` deterministic sample points
  LagrangianResidual residual(int samples) const;

 private:
  friend SmoothedTetragon smooth_tetragon(const Tetragon&, double);
  SmoothedTetragon(Tetragon tet, double eps) : tet_(std::move(tet)), eps_(eps) {}
  Tetragon tet_;
  double eps_;
};

SmoothedTetragon smooth_tetragon(const Tetragon& tet, double eps);

double symplectic_form(std::span<const double> a, std::span<const double> b);

enum class Stabilization {
  kZeroSection,  // extra p' = 0, extra q' free (torus stabilization)
  kCylinder,     // extra coordinates unconstrained; seeds use p' = 0
};

// Region on chart.extended(extra_pairs, periodic) built from a base region.
RegionPtr stabilize(RegionPtr base, int extra_pairs, Stabilization mode);

}  // namespace tetra
