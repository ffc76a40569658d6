#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "properties.hpp"
#include "tetra/dynamics.hpp"
#include "tetra/errors.hpp"
#include "tetra/pb4.hpp"

using namespace tetra;

namespace {

GridField sample(const GridWindow& w, double (*fn)(double, double)) {
  GridField f(w.nodes_u(), w.nodes_s());
  for (int j = 0; j < w.nodes_s(); ++j)
    for (int i = 0; i < w.nodes_u(); ++i) f(i, j) = fn(w.u(i), w.s(j));
  return f;
}

}  // namespace

TEST(BracketField, MatchesHandWrittenStencil) {
  GridWindow w;
  w.u_min = -0.3;
  w.u_max = 1.1;
  w.s_min = 0.5;
  w.s_max = 2.0;
  w.cells_u = 20;
  w.cells_s = 30;
  const auto f = sample(w, [](double u, double s) { return std::sin(3 * u) * s * s; });
  const auto g = sample(w, [](double u, double s) { return std::cos(u + s) + u * s; });
  const auto j = bracket_field(w, f, g);
  for (int b = 1; b < w.nodes_s() - 1; ++b)
    for (int a = 1; a < w.nodes_u() - 1; ++a) EXPECT_NEAR(j(a, b), oracle::grid_bracket(w, f, g, a, b), 1e-12);
  for (int a = 0; a < w.nodes_u(); ++a) {
    EXPECT_EQ(j(a, 0), 0.0);
    EXPECT_EQ(j(a, w.nodes_s() - 1), 0.0);
  }
}

TEST(BracketField, SeparableFieldsFactor) {
  GridWindow w;
  w.cells_u = 16;
  w.cells_s = 16;
  // F depends on s only, G on u only: J = -F'(s) G'(u), exact for quadratics
  const auto f = sample(w, [](double, double s) { return s * s; });
  const auto g = sample(w, [](double u, double) { return u * u; });
  const auto j = bracket_field(w, f, g);
  double mx = -1e300, expected = -1e300;
  for (int b = 1; b < w.nodes_s() - 1; ++b)
    for (int a = 1; a < w.nodes_u() - 1; ++a) {
      EXPECT_NEAR(j(a, b), -4.0 * w.s(b) * w.u(a), 1e-12);
      mx = std::max(mx, j(a, b));
      expected = std::max(expected, -4.0 * w.s(b) * w.u(a));
    }
  EXPECT_NEAR(mx, expected, 1e-12);
}

TEST(BracketField, CylinderWrapsInU) {
  GridWindow w;
  w.kind = WindowKind::kCylinder;
  w.cells_u = 32;
  w.cells_s = 8;
  const auto f = sample(w, [](double u, double s) { return std::sin(2 * std::numbers::pi * u) * s; });
  const auto g = sample(w, [](double, double s) { return s; });
  const auto j = bracket_field(w, f, g);
  // F_u G_s at u = 0 uses the node at u = 1 - hu
  const double fu = (f(1, 3) - f(w.nodes_u() - 1, 3)) / (2 * w.hu());
  EXPECT_NEAR(j(0, 3), fu, 1e-12);
}

TEST(PrototypeProblem, MasksAreDisjointAndThickened) {
  const auto p = prototype_problem(1.0, 2.0, 0.25, 64);
  EXPECT_FALSE(p.mask(MaskId::kX0).intersects(p.mask(MaskId::kX1)));
  EXPECT_FALSE(p.mask(MaskId::kY0).intersects(p.mask(MaskId::kY1)));
  for (int m = 0; m < 4; ++m) {
    const auto id = static_cast<MaskId>(m);
    EXPECT_FALSE(p.raw_mask(id).empty());
    EXPECT_TRUE(p.mask(id).contains(p.raw_mask(id)));
    EXPECT_GT(p.mask(id).count(), p.raw_mask(id).count());
  }
  EXPECT_EQ(p.window().nodes_u(), 65);
}

TEST(PrototypeProblem, RejectsGridsThatMissTheSets) {
  EXPECT_THROW(prototype_problem(1.0, 2.0, 0.25, 48), ParameterError);
  EXPECT_NO_THROW(prototype_problem(1.0, 2.0, 0.25, 192));
}

TEST(FeasiblePair, IndicatorInterpolantsAt128) {
  const auto p = prototype_problem(1.0, 2.0, 0.25, 128);
  const auto [f, g] = indicator_interpolants(p);
  EXPECT_NO_THROW(check_feasible(p, f, g));
  EXPECT_GE(feasible_pair_value(p, f, g), 4.0 * (1 - 0.05));
}

TEST(FeasiblePair, ZeroFieldIsInfeasible) {
  const auto p = prototype_problem(1.0, 2.0, 0.25, 64);
  const GridField zero(p.window().nodes_u(), p.window().nodes_s(), 0.0);
  auto [f, g] = indicator_interpolants(p);
  try {
    feasible_pair_value(p, zero, g);
    FAIL() << "expected InfeasibleError";
  } catch (const InfeasibleError& e) {
    EXPECT_EQ(e.mask(), p.mask_name(MaskId::kX1));
  }
  // nonzero frame value is rejected as well
  f(0, 0) = 0.5;
  EXPECT_THROW(check_feasible(p, f, g), InfeasibleError);
}

TEST(FeasiblePair, ProjectionRestoresFeasibility) {
  const auto p = prototype_problem(1.0, 2.0, 0.25, 64);
  GridField f(p.window().nodes_u(), p.window().nodes_s(), 0.7), g = f;
  project_feasible(p, f, g);
  EXPECT_NO_THROW(check_feasible(p, f, g));
}

TEST(Estimate, ValidatedAndDeterministicAcrossThreads) {
  const auto p = prototype_problem(1.0, 2.0, 0.25, 64);
  Pb4OptimizerConfig one, many;
  many.threads = 8;
  const auto a = estimate_pb4_plus(p, one);
  const auto b = estimate_pb4_plus(p, many);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.f, b.f);
  EXPECT_EQ(a.g, b.g);
  EXPECT_EQ(a.best_start, b.best_start);
  EXPECT_EQ(feasible_pair_value(p, a.f, a.g), a.estimate);
  EXPECT_GE(a.estimate, 3.92);
  EXPECT_LE(a.estimate, 4.40);
  EXPECT_EQ(a.traces.size(), 8u);
  // best value never exceeds the starting interpolant value
  const auto [f0, g0] = indicator_interpolants(p);
  EXPECT_LE(a.estimate, feasible_pair_value(p, f0, g0));
}

TEST(Estimate, MinusEqualsPlusOfTheSwap) {
  const auto p = prototype_problem(1.0, 2.0, 0.25, 64);
  const auto minus = estimate_pb4_minus(p);
  const auto plus_swapped = estimate_pb4_plus(p.swapped_x());
  EXPECT_EQ(minus.sign, BracketSign::kMinus);
  EXPECT_NEAR(minus.estimate, plus_swapped.estimate, 0.05 * plus_swapped.estimate);
}

TEST(Estimate, TwoGridProxyIsReported) {
  const auto p = prototype_problem(1.0, 2.0, 0.25, 64);
  Pb4OptimizerConfig cfg;
  cfg.two_grid_cells = 128;
  const auto rep = estimate_pb4_plus(p, cfg);
  ASSERT_TRUE(rep.two_grid_difference.has_value());
  EXPECT_EQ(rep.reference_cells.value(), 128);
  EXPECT_NEAR(*rep.two_grid_difference, std::abs(rep.estimate - *rep.reference_estimate), 1e-15);
}

TEST(Pb4Property, AntisymmetryMonotonicityDilation) {
  const auto pr = props::pb4_properties(64, 1);
  EXPECT_LE(pr.antisymmetry_rel, 0.05);
  EXPECT_LE(pr.relabel_rel, 0.05);
  EXPECT_LE(pr.shrunk, pr.big);
  EXPECT_TRUE(pr.shrunk_warm_exact);
  EXPECT_LE(pr.base, pr.dilated);
}

TEST(WallWitness, RampMeetsTheSlopeAndEndpointConditions) {
  const auto w = wall_witness(1.0, 2.0, 0.005, 0.01);
  EXPECT_LE(w.max_slope(), 1.01 + 1e-15);
  EXPECT_EQ(w.value(2.0), 1.0);
  EXPECT_EQ(w.value(1.0), 0.0);
  EXPECT_EQ(w.value(1.004), 0.0);
  EXPECT_EQ(w.value(2.0 + 0.005), 0.0);
  EXPECT_EQ(w.value(0.5), 0.0);
  double prev = 0.0;
  for (int i = 0; i <= 10000; ++i) {
    const double s = 1.0 + i * 1e-4;
    const double v = w.value(s);
    EXPECT_GE(v, prev - 1e-15);
    EXPECT_LE(w.slope(s), w.max_slope() + 1e-12);
    prev = v;
  }
  // C^2: slope and curvature agree with differences of the value
  for (double s : {1.01, 1.3, 1.999, 2.002}) {
    const double h = 1e-7;
    EXPECT_NEAR((w.value(s + h) - w.value(s - h)) / (2 * h), w.slope(s), 1e-6 * (1 + std::abs(w.slope(s))));
    EXPECT_NEAR((w.slope(s + h) - w.slope(s - h)) / (2 * h), w.curvature(s), 1e-5 * (1 + std::abs(w.curvature(s))));
  }
}

TEST(WallWitness, RejectsDeltasThatBreakTheSlopeBound) {
  EXPECT_THROW(wall_witness(1.0, 2.0, 0.05, 0.01), ParameterError);
  EXPECT_THROW(wall_witness(2.0, 1.0, 0.005, 0.01), ParameterError);
  EXPECT_THROW(wall_witness(1.0, 2.0, -0.005, 0.01), ParameterError);
}

TEST(WallWitness, FlowTransportsAlongReebLines) {
  const auto w = wall_witness(1.0, 2.0, 0.005, 0.01);
  const auto h = w.hamiltonian(ContactModel::circle());
  for (double s : {1.2, 1.5, 1.999}) {
    const auto tr = integrate(h, std::vector<double>{s, 0.0}, 0.0, 0.2);
    const auto& end = tr.state(tr.size() - 1);
    EXPECT_NEAR(end[0], s, 1e-14);
    EXPECT_NEAR(end[1], w.slope(s) * 0.2, 1e-10);
    EXPECT_LE(end[1], 0.2 * 1.01 + 1e-12);
  }
}

TEST(WallWitness, NoShortChordFromHighToLowWallAndSeparatesFloorFromCeiling) {
  const double T = 0.25;
  const auto tet = build_tetragon(ContactModel::circle(), 1.0, 2.0, T);
  const auto w = wall_witness(1.0, 2.0, 0.005, 0.01);
  const auto h = w.hamiltonian(tet.model());
  ChordSearchConfig cfg;
  cfg.seeds = 1001;  // spacing 1e-3 along the wall
  const double budget = T / 1.01 - 0.01;
  const auto none = find_chord(h, tet.high_wall(), tet.low_wall(), budget, cfg);
  EXPECT_FALSE(none.found());
  EXPECT_EQ(none.shots, 1001u);
  // just above T / sigma the chord appears
  const auto some = find_chord(h, tet.high_wall(), tet.low_wall(), T / w.max_slope() + 1e-3, cfg);
  ASSERT_TRUE(some.found());
  EXPECT_NEAR(some.chord->time_length, T / w.max_slope(), 1e-6);
  EXPECT_NEAR(separation(h, tet.floor(), tet.ceiling()).delta, 1.0, 1e-12);
}
