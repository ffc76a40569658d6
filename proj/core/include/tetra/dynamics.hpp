#pragma once

#include <array>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tetra/phase_core.hpp"
#include "tetra/tetragon.hpp"

namespace tetra {

struct IntegratorConfig {
  double tol = 1e-10;
  double initial_step = 1e-3;
  double min_step = 1e-13;
  double max_step = 0.05;
  // norm of the non-periodic coordinates beyond which the run is abandoned
  double escape_bound = std::numeric_limits<double>::infinity();
  long max_steps = 5'000'000;
};

struct IntegratorStats {
  long steps = 0;
  long rejected = 0;
  long evaluations = 0;
  double max_error_estimate = 0.0;  // largest accepted scaled error, <= 1 means within tol
};

// One accepted Dormand-Prince step with its continuous extension.
struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  std::vector<double> x0;  // reduced state at t0
  std::array<std::vector<double>, 5> coeff;

  std::vector<double> at(double t) const;  // unreduced; caller reduces
};

// Adaptive Dormand-Prince 5(4) integrator for Hamiltonian vector fields.
class DormandPrince {
 public:
  DormandPrince(const HamiltonianSpec& h, IntegratorConfig config);

  const IntegratorConfig& config() const { return config_; }
  const IntegratorStats& stats() const { return stats_; }

  // Advances (t, x) by one accepted step, never past t_end.  x is reduced on
  // return.  Throws StiffnessError on step underflow, EscapeError past the bound.
  void advance(double& t, std::vector<double>& x, double t_end, DenseStep* dense = nullptr);
  // single explicit step of size h (no error control), reduced result
  std::vector<double> single_step(double t, std::span<const double> x, double h);

 private:
  void field(std::span<const double> x, double t, std::span<double> out);
  const HamiltonianSpec& h_;
  IntegratorConfig config_;
  IntegratorStats stats_;
  double h_next_;
  std::array<std::vector<double>, 7> k_;
  std::vector<double> tmp_, y5_, err_;
  bool fsal_valid_ = false;
};

class Trajectory {
 public:
  explicit Trajectory(PhaseChart chart) : chart_(std::move(chart)) {}

  const PhaseChart& chart() const { return chart_; }
  std::size_t size() const { return times_.size(); }
  double time(std::size_t i) const { return times_[i]; }
  const std::vector<double>& state(std::size_t i) const { return states_[i]; }
  const std::vector<double>& times() const { return times_; }
  const IntegratorStats& stats() const { return stats_; }

  void append(double t, std::vector<double> x);
  void set_stats(const IntegratorStats& s) { stats_ = s; }
  void add_dense(DenseStep step) { dense_.push_back(std::move(step)); }
  bool has_dense() const { return !dense_.empty(); }
  // dense-output evaluation inside the recorded interval
  std::vector<double> at(double t) const;

 private:
  PhaseChart chart_;
  std::vector<double> times_;
  std::vector<std::vector<double>> states_;
  std::vector<DenseStep> dense_;
  IntegratorStats stats_;
};

Trajectory integrate(const HamiltonianSpec& h, std::span<const double> x0, double t0, double t1,
                     const IntegratorConfig& config = {});
Trajectory integrate(const HamiltonianSpec& h, const PhasePoint& x0, double t0, double t1,
                     double tol);

struct ShotConfig {
  IntegratorConfig integrator;
  double tol = 1e-6;           // membership band for the target
  double event_time_tol = 1e-10;
  bool record = false;         // keep the trajectory up to the hit
};

// Result of integrating one seed toward a target region.
struct ShotResult {
  bool hit = false;
  double hit_time = 0.0;  // absolute time of arrival
  std::vector<double> hit_state;
  double hit_distance = std::numeric_limits<double>::infinity();
  double best_distance = std::numeric_limits<double>::infinity();
  std::vector<double> best_point;
  double best_time = 0.0;
  int crossings = 0;
  std::optional<std::string> failure;  // escape or stiffness message
  IntegratorStats stats;
  std::optional<Trajectory> trajectory;
};

// Integrates from (x0, t0) for at most `duration`; stops at the first
// crossing of target.level() that lands within tol of the target.
ShotResult shoot(const HamiltonianSpec& h, std::span<const double> x0, double t0, double duration,
                 const Region& target, const ShotConfig& config);

struct ChordSearchConfig {
  int seeds = 64;
  int phases = 16;  // used only for time-dependent Hamiltonians
  double tol = 1e-6;
  IntegratorConfig integrator;
  int refine_evaluations = 200;
  int refine_candidates = 4;
  bool minimize_time = true;
  int threads = 1;
  // replaces the uniform seed grid when non-empty (region parameters)
  std::vector<std::vector<double>> explicit_seeds;
  std::vector<double> explicit_phases;
};

struct Chord {
  std::vector<double> seed_params;
  double t0 = 0.0;
  double t1 = 0.0;
  double time_length = 0.0;
  std::vector<double> start;
  std::vector<double> end;
  double start_distance = 0.0;
  double end_distance = 0.0;
  std::size_t seed_index = 0;
  bool refined = false;
  Trajectory segment{PhaseChart(1)};
};

struct ChordSearchReport {
  std::optional<Chord> chord;
  double time_budget = 0.0;
  double tol = 0.0;
  double best_distance = std::numeric_limits<double>::infinity();
  std::vector<double> best_point;
  std::size_t shots = 0;
  std::size_t hits = 0;
  std::size_t failures = 0;
  std::vector<std::string> failure_messages;  // first few, in seed order
  long steps = 0;
  double max_error_estimate = 0.0;
  bool found() const { return chord.has_value(); }
};

ChordSearchReport find_chord(const HamiltonianSpec& g, const Region& x0, const Region& x1,
                             double time_budget, const ChordSearchConfig& config = {});

// re-checks a chord: endpoints within tol, time within budget, and an
// independent re-integration reproducing the end point
bool validate_chord(const HamiltonianSpec& g, const Region& x0, const Region& x1,
                    const Chord& chord, double time_budget, double tol,
                    const IntegratorConfig& integrator = {});

struct SeparationConfig {
  int samples = 256;
  int time_samples = 16;
  int refine_starts = 4;
  double refine_tol = 1e-12;
  int max_sweeps = 60;
};

struct Extremum {
  double value = 0.0;
  std::vector<double> params;
  std::vector<double> point;
  double time = 0.0;
};

struct SeparationReport {
  double delta = 0.0;
  Extremum max_y0;  // max of G over Y0 x period
  Extremum min_y1;  // min of G over Y1 x period
  int samples_y0 = 0;
  int samples_y1 = 0;
  double refine_tol = 0.0;
  bool separating = false;
};

SeparationReport separation(const HamiltonianSpec& g, const Region& y0, const Region& y1,
                            const SeparationConfig& config = {});

// kappa / (Delta - delta); throws ParameterError when Delta <= delta
double chord_budget(double kappa, double separation_value, double perturbation = 0.0);

// default escape bound 10 (sqrt(R1) + 1)
double default_escape_bound(double R1);

}  // namespace tetra
