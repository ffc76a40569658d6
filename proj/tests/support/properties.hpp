#pragma once

// Invariant probes shared by the unit tests and the acceptance runner.  Each
// returns the measured worst case so callers can compare against their own
// tolerance and print it.

#include <cstdint>
#include <random>
#include <vector>

#include "tetra/pb4.hpp"
#include "tetra/phase_core.hpp"

namespace tetra::props {

// random polynomial of degree <= 3 on a flat chart with analytic gradient
HamiltonianSpec random_polynomial(const PhaseChart& chart, std::mt19937_64& rng, const char* name);

struct BracketProbe {
  double antisymmetry = 0.0;  // max |{F,G} + {G,F}|, exactly 0 expected
  double jacobi = 0.0;        // max |cyclic sum| with finite-difference outer brackets
  double leibniz = 0.0;       // max |{FG,H} - F{G,H} - G{F,H}|
};
BracketProbe bracket_identities(int points, std::uint64_t seed);

// max |determinant ratio - (1 - tau {F,G})| over random points and tau
double volume_factor_gap(int points, std::uint64_t seed);

// max relative |H(t) - H(0)| over [0, 10] for bounded autonomous systems
double energy_drift(double t_end = 10.0);

// max smoothed-tetragon Lagrangian residual over the three models
double lagrangian_residual(int samples = 1000);

// max |det D(phi_1) - 1| over a seed cloud, pendulum flow, finite differences
double symplecticity_gap();

struct Pb4Properties {
  double antisymmetry_rel = 0.0;  // |pb4-(P) - pb4+(swap)| / pb4+(swap)
  double relabel_rel = 0.0;       // |pb4+(relabel) - pb4+(P)| / pb4+(P)
  double big = 0.0, shrunk = 0.0; // monotonicity pair, shrunk uses big's optimum as warm start
  bool shrunk_warm_exact = false; // warm pair re-evaluates to the big estimate
  double base = 0.0, dilated = 0.0;
};
Pb4Properties pb4_properties(int cells, int threads);

// masks with `trim` nodes removed from both ends of each set along its longer axis
Pb4Problem shrunk_problem(const Pb4Problem& problem, int trim);

struct MeanValue {
  int chords = 0;
  double worst_margin = 0.0;  // min over chords of (max {F,G} along the chord - 1/tau)
};
MeanValue mean_value_property(int threads);

// min over random perturbations of Delta(G+F) - (Delta(G) - |Delta(F)|)
double robustness_margin(int trials, std::uint64_t seed);

// enlarging the budget never loses a chord: number of violations
int search_monotonicity_violations(int threads);

}  // namespace tetra::props
