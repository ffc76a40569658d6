#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tetra/phase_core.hpp"
#include "tetra/tetragon.hpp"

namespace tetra {

enum class WindowKind { kPlane, kCylinder };

// Rectangle [u_min,u_max] x [s_min,s_max] in the (u, s) plane of the
// cylinder chart (q, p) = (u, s), cut into cells.  On a cylinder window u is
// periodic and the frame consists of the two s-boundaries only.
struct GridWindow {
  WindowKind kind = WindowKind::kPlane;
  double u_min = 0.0, u_max = 1.0;
  double s_min = 0.0, s_max = 1.0;
  int cells_u = 64, cells_s = 64;

  int nodes_u() const { return kind == WindowKind::kCylinder ? cells_u : cells_u + 1; }
  int nodes_s() const { return cells_s + 1; }
  double hu() const { return (u_max - u_min) / cells_u; }
  double hs() const { return (s_max - s_min) / cells_s; }
  double u(int i) const { return u_min + i * hu(); }
  double s(int j) const { return s_min + j * hs(); }
  bool on_frame(int i, int j) const;
};

class GridField {
 public:
  GridField() = default;
  GridField(int nu, int ns, double value = 0.0)
      : nu_(nu), ns_(ns), v_(static_cast<std::size_t>(nu) * static_cast<std::size_t>(ns), value) {}

  int nu() const { return nu_; }
  int ns() const { return ns_; }
  double& operator()(int i, int j) { return v_[index(i, j)]; }
  double operator()(int i, int j) const { return v_[index(i, j)]; }
  std::vector<double>& data() { return v_; }
  const std::vector<double>& data() const { return v_; }
  bool operator==(const GridField&) const = default;

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nu_) + static_cast<std::size_t>(i);
  }
  int nu_ = 0, ns_ = 0;
  std::vector<double> v_;
};

class NodeMask {
 public:
  NodeMask() = default;
  NodeMask(int nu, int ns) : nu_(nu), ns_(ns), bits_(static_cast<std::size_t>(nu * ns), 0) {}

  int nu() const { return nu_; }
  int ns() const { return ns_; }
  bool operator()(int i, int j) const { return bits_[index(i, j)] != 0; }
  void set(int i, int j, bool v = true) { bits_[index(i, j)] = v ? 1 : 0; }
  std::size_t count() const;
  bool empty() const { return count() == 0; }
  bool intersects(const NodeMask& other) const;
  bool contains(const NodeMask& other) const;  // other is a subset of this
  // Chebyshev dilation by r cells (periodic in u when `periodic_u`)
  NodeMask dilated(int r, bool periodic_u) const;
  bool operator==(const NodeMask&) const = default;

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nu_) + static_cast<std::size_t>(i);
  }
  int nu_ = 0, ns_ = 0;
  std::vector<std::uint8_t> bits_;
};

enum class MaskId { kX0 = 0, kX1 = 1, kY0 = 2, kY1 = 3 };
std::string to_string(MaskId id);

// continuum set in the (u, s) plane given by its distance function
using SetDistance = std::function<double(double u, double s)>;

struct Pb4Geometry {
  GridWindow window;  // cell counts are replaced when gridding
  std::array<SetDistance, 4> sets;
  std::array<std::string, 4> names{"X0", "X1", "Y0", "Y1"};
  int thickening = 1;
};

class Pb4Problem {
 public:
  // nodes within half a cell of a set belong to its mask
  static Pb4Problem from_geometry(const Pb4Geometry& geometry, int cells_u, int cells_s);
  static Pb4Problem from_masks(const GridWindow& window, std::array<NodeMask, 4> masks,
                               int thickening);

  const GridWindow& window() const { return window_; }
  int thickening() const { return thickening_; }
  const NodeMask& raw_mask(MaskId id) const { return raw_[static_cast<std::size_t>(id)]; }
  const NodeMask& mask(MaskId id) const { return thick_[static_cast<std::size_t>(id)]; }
  const std::string& mask_name(MaskId id) const { return names_[static_cast<std::size_t>(id)]; }

  bool has_geometry() const { return geometry_.has_value(); }
  Pb4Problem regrid(int cells_u, int cells_s) const;
  // (X0,X1,Y0,Y1) -> (Y1,Y0,X0,X1)
  Pb4Problem relabeled() const;
  // (X0,X1,Y0,Y1) -> (X1,X0,Y0,Y1): pb4- of this equals pb4+ of the swap
  Pb4Problem swapped_x() const;
  // same window, masks replaced (used for shrink / dilation experiments)
  Pb4Problem with_masks(std::array<NodeMask, 4> raw, int thickening) const;

 private:
  Pb4Problem() = default;
  void finalize();
  GridWindow window_;
  std::array<NodeMask, 4> raw_;
  std::array<NodeMask, 4> thick_;
  std::array<std::string, 4> names_{"X0", "X1", "Y0", "Y1"};
  int thickening_ = 1;
  std::optional<Pb4Geometry> geometry_;
};

// The Circle-model tetragon as a pb4 instance: X0 floor, X1 ceiling,
// Y0 low wall, Y1 high wall, on a plane window whose margin is a fixed
// fraction (10/108) of the rectangle.  `cells` counts cells per axis.
Pb4Problem prototype_problem(double R0, double R1, double T, int cells);
Pb4Geometry prototype_geometry(double R0, double R1, double T);

enum class BracketSign { kPlus, kMinus };

// discrete bracket F_u G_s - F_s G_u at interior nodes (frame nodes hold 0)
GridField bracket_field(const GridWindow& window, const GridField& f, const GridField& g);
// throws InfeasibleError naming the first violated mask (tolerance 1e-12)
void check_feasible(const Pb4Problem& problem, const GridField& f, const GridField& g);
// validated max over interior nodes of +J (pb4+) or -J (pb4-)
double feasible_pair_value(const Pb4Problem& problem, const GridField& f, const GridField& g,
                           BracketSign sign = BracketSign::kPlus);

// projection onto the constraint set (frame zero, mask inequalities)
void project_feasible(const Pb4Problem& problem, GridField& f, GridField& g);

// generic smoothed 0/1 interpolants: for each pair of masks a ramp along
// the separating axis times a cutoff along the other axis, then projected
std::pair<GridField, GridField> indicator_interpolants(const Pb4Problem& problem);

struct Pb4OptimizerConfig {
  int starts = 8;
  double temperature_start = 0.5;
  double temperature_end = 1e-3;
  double temperature_factor = 0.5;
  int iterations_per_level = 30;
  double perturbation = 0.01;
  std::uint64_t seed = 1;
  int threads = 1;
  BracketSign sign = BracketSign::kPlus;
  int two_grid_cells = 0;  // reference resolution for the two-grid proxy, 0 = off
  std::optional<std::pair<GridField, GridField>> warm_start;
};

struct Pb4StartTrace {
  int start = 0;
  bool warm = false;
  double initial_value = 0.0;
  double final_value = 0.0;
  double best_value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool diverged = false;
  std::vector<double> level_best;  // best validated value after each temperature level
};

struct Pb4Report {
  double estimate = 0.0;
  GridField f, g;
  int best_start = 0;
  bool best_is_warm = false;
  BracketSign sign = BracketSign::kPlus;
  std::vector<double> temperatures;
  std::vector<Pb4StartTrace> traces;
  bool converged = true;
  int cells_u = 0, cells_s = 0;
  std::optional<int> reference_cells;
  std::optional<double> reference_estimate;
  std::optional<double> two_grid_difference;
};

Pb4Report estimate_pb4_plus(const Pb4Problem& problem, const Pb4OptimizerConfig& config = {});
Pb4Report estimate_pb4_minus(const Pb4Problem& problem, Pb4OptimizerConfig config = {});

// Smooth compactly supported pair on the cylinder chart (q, p) = (u, s)
// feasible for the prototype masks; used for mean-value checks along chords.
struct SmoothPair {
  HamiltonianSpec f;
  HamiltonianSpec g;
};
SmoothPair prototype_smooth_pair(double R0, double R1, double T);

// Ramp u(s): zero below R0 + delta1, slope sigma = 1/(R1-R0) + delta2 in the
// middle with C^2 cubic-slope transitions, u(R1) = 1, back to zero on
// (R1, R1 + delta1).
class WallWitness {
 public:
  double R0() const { return r0_; }
  double R1() const { return r1_; }
  double delta1() const { return d1_; }
  double delta2() const { return d2_; }
  double max_slope() const { return sigma_; }
  double transition_width() const { return w_; }

  double value(double s) const;
  double slope(double s) const;
  double curvature(double s) const;

  // u composed with the model's symplectization level s(x) on its ambient chart
  HamiltonianSpec hamiltonian(const ContactModel& model) const;

 private:
  friend WallWitness wall_witness(double, double, double, double);
  WallWitness(double r0, double r1, double d1, double d2);
  double r0_, r1_, d1_, d2_, sigma_, a_, ell_, w_;
};

WallWitness wall_witness(double R0, double R1, double delta1, double delta2);

}  // namespace tetra
