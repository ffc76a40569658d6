#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tetra/dynamics.hpp"
#include "tetra/phase_core.hpp"
#include "tetra/tetragon.hpp"

namespace tetra {

enum class ScenarioId { kSuperconductivity, kUnstableEquilibrium, kMechanical, kReebChord };

std::string to_string(ScenarioId id);
// throws ConfigError on unknown names
ScenarioId scenario_from_string(const std::string& name);

// Wall-localized bump family
//   F_a(x, t) = a m(t) (B_low(x) - B_high(x)) + far_factor a B_far(x),
// with m(t) = 1 + modulation sin(2 pi t) and radial bumps equal to 1 on the
// walls.  The amplitude a is calibrated by bisection so that the measured
// |Delta(F; low, high)| equals `delta`.
struct PerturbationSpec {
  double delta = 0.0;        // 0 disables the perturbation
  double tube_radius = 0.15;
  double far_factor = 0.0;   // amplitude of the far bump relative to the wall bumps
  double modulation = 0.5;
};

enum class PotentialKind {
  kBump,          // U = -depth phi(|q|), phi = 0 near 0 and 1 on the wall shell
  kZero,          // U = 0
  kPeriodicBump,  // U = -depth phi(|q|) (1 + modulation sin(2 pi t))
};

std::string to_string(PotentialKind kind);
PotentialKind potential_from_string(const std::string& name);

enum class ReebModel { kCircle, kSphere };

struct ScenarioConfig {
  ScenarioId id = ScenarioId::kUnstableEquilibrium;
  int k = 1;
  int m = 0;  // torus stabilization (superconductivity only); m >= 1 is search-only
  double R0 = 1.0;
  double R1 = 2.0;
  double T = 0.25;  // Reeb-time length; r for superconductivity

  // superconductivity
  double potential_shift = 0.0;  // U = prod cos(2 pi q_i) + shift
  double coupling = 0.0;         // h_i(p') = coupling |p'|^2 / 2 when m >= 1

  // mechanical: beta is the declared shell maximum -beta of U, depth scales the bump
  double beta = 0.5;
  double potential_depth = 0.5;
  PotentialKind potential = PotentialKind::kBump;
  double potential_modulation = 0.5;

  // Reeb chord: lambda = lambda0 / f with f = base + amplitude sin(angle)
  ReebModel reeb_model = ReebModel::kSphere;
  double conformal_base = 1.5;
  double conformal_amplitude = 0.3;

  PerturbationSpec perturbation;
  ChordSearchConfig search;
  SeparationConfig separation;
  std::uint64_t seed = 1;
};

// defaults reproducing the documented reference runs (R0 = 1, R1 = 2, k = 1)
ScenarioConfig default_scenario_config(ScenarioId id);

struct ScenarioReport {
  ScenarioId id = ScenarioId::kUnstableEquilibrium;
  std::string model;
  double R0 = 0.0, R1 = 0.0, T = 0.0;
  double kappa = 0.0;
  double gamma = 0.0;          // measured Delta(G; low wall, high wall)
  double delta = 0.0;          // measured |Delta(F; low wall, high wall)|
  double combined_delta = 0.0; // measured Delta(G + F; low wall, high wall)
  double perturbation_amplitude = 0.0;
  double budget = 0.0;         // kappa / (gamma - delta), or T / C for Reeb chords
  double time_tol = 1e-9;      // event-time resolution allowed on top of the budget
  double separation_tol = 0.0;
  ChordSearchReport search;
  std::optional<double> increment;
  std::optional<double> expected_increment;
  double increment_tol = 0.0;
  std::optional<double> reference_time;  // closed-form chord time when one is known
  bool certified = true;                 // false for stabilized (m >= 1) runs
  std::vector<std::string> notes;
  bool pass = false;
};

// pass <=> chord found, time_length <= budget + time_tol and increment within tolerance
bool recompute_pass(const ScenarioReport& report);

ScenarioReport run_superconductivity(const ScenarioConfig& config);
ScenarioReport run_unstable_equilibrium(const ScenarioConfig& config);
ScenarioReport run_mechanical(const ScenarioConfig& config);
ScenarioReport run_reeb_chord(const ScenarioConfig& config);
ScenarioReport run_scenario(const ScenarioConfig& config);

// independent runs in parallel, reports in input order
std::vector<ScenarioReport> run_batch(const std::vector<ScenarioConfig>& configs, int threads);

// building blocks, exposed for tests and the CLI

// prod_i cos(2 pi q_i) + shift on the ambient chart of `model`
HamiltonianSpec cosine_potential(const ContactModel& model, double shift = 0.0);
// (|p|^2 - |q|^2) / 2
HamiltonianSpec saddle_hamiltonian(const PhaseChart& chart);
// U(q, t) alone, and |p|^2 / 2 + U(q, t)
HamiltonianSpec mechanical_potential(const PhaseChart& chart, double depth, double R0,
                                     PotentialKind kind, double modulation);
HamiltonianSpec mechanical_hamiltonian(const PhaseChart& chart, double depth, double R0,
                                       PotentialKind kind, double modulation);
// F_a for the given tetragon; `amplitude` is a
HamiltonianSpec wall_bump_perturbation(const Tetragon& tet, double amplitude,
                                       const PerturbationSpec& spec);
// s f(sigma) on the ambient chart: its flow on {H = 1} is the Reeb flow of lambda0 / f
HamiltonianSpec conformal_reeb_hamiltonian(const ContactModel& model, double base,
                                           double amplitude);
double conformal_factor(const ContactModel& model, std::span<const double> sigma, double base,
                        double amplitude);

struct CalibratedPerturbation {
  double amplitude = 0.0;
  double measured_delta = 0.0;
  int iterations = 0;
};
CalibratedPerturbation calibrate_perturbation(const Tetragon& tet, const PerturbationSpec& spec,
                                              const SeparationConfig& separation);

}  // namespace tetra
