#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "properties.hpp"
#include "tetra/errors.hpp"
#include "tetra/scenarios.hpp"

using namespace tetra;

namespace {

constexpr double kPi = std::numbers::pi;

double chord_time(const ScenarioReport& r) {
  EXPECT_TRUE(r.search.found());
  return r.search.found() ? r.search.chord->time_length : std::nan("");
}

}  // namespace

TEST(Superconductivity, PlanarChannel) {
  const auto r = run_superconductivity(default_scenario_config(ScenarioId::kSuperconductivity));
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.gamma, 1.0, 1e-9);
  EXPECT_NEAR(r.budget, 0.25, 1e-9);
  EXPECT_NEAR(chord_time(r), 1.0 / (2 * kPi), 1e-6);
  ASSERT_TRUE(r.increment.has_value());
  EXPECT_NEAR(*r.increment, 1.0, 1e-6);
  EXPECT_TRUE(r.certified);
}

TEST(Superconductivity, ShiftedPotentialGivesTheSameReport) {
  auto cfg = default_scenario_config(ScenarioId::kSuperconductivity);
  const auto base = run_superconductivity(cfg);
  cfg.potential_shift = 3.5;
  const auto shifted = run_superconductivity(cfg);
  EXPECT_NEAR(shifted.gamma, base.gamma, 1e-12);
  EXPECT_NEAR(shifted.budget, base.budget, 1e-12);
  EXPECT_EQ(chord_time(shifted), chord_time(base));
  EXPECT_EQ(shifted.search.chord->start, base.search.chord->start);
  EXPECT_EQ(shifted.increment, base.increment);
  EXPECT_EQ(shifted.pass, base.pass);
}

TEST(Superconductivity, TwoDegreesOfFreedom) {
  auto cfg = default_scenario_config(ScenarioId::kSuperconductivity);
  cfg.k = 2;
  const auto r = run_superconductivity(cfg);
  EXPECT_TRUE(r.pass);
  EXPECT_LE(chord_time(r), 0.25 + r.time_tol);
  EXPECT_NEAR(*r.increment, 1.0, 1e-6);
}

TEST(Superconductivity, RejectsLargeRadiusAndHighDimension) {
  auto cfg = default_scenario_config(ScenarioId::kSuperconductivity);
  cfg.T = 0.5;
  EXPECT_THROW(run_superconductivity(cfg), ConfigError);
  cfg = default_scenario_config(ScenarioId::kSuperconductivity);
  cfg.k = 3;
  EXPECT_THROW(run_superconductivity(cfg), ConfigError);
}

TEST(UnstableEquilibrium, Unperturbed) {
  const auto r = run_unstable_equilibrium(default_scenario_config(ScenarioId::kUnstableEquilibrium));
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.budget, kPi / 4, 1e-9);
  EXPECT_NEAR(chord_time(r), 0.5 * std::log(2.0), 1e-4);
  EXPECT_NEAR(*r.increment, std::sqrt(2.0) - 1.0, 1e-6);
  EXPECT_NEAR(*r.reference_time, 0.5 * std::log(2.0), 1e-15);
}

TEST(UnstableEquilibrium, PerturbedBudgetGrowsToPiOverThree) {
  auto cfg = default_scenario_config(ScenarioId::kUnstableEquilibrium);
  cfg.perturbation.delta = 0.25;
  cfg.perturbation.far_factor = 10.0;
  const auto r = run_unstable_equilibrium(cfg);
  EXPECT_NEAR(r.delta, 0.25, 0.01);
  EXPECT_NEAR(r.budget, kPi / 4 / (1.0 - r.delta), 1e-12);
  EXPECT_LE(chord_time(r), kPi / 3 + 1e-6);
  EXPECT_GE(r.combined_delta, r.gamma - r.delta - 1e-6);
  EXPECT_TRUE(r.pass);
}

TEST(UnstableEquilibrium, DeltaAtOrAboveRadiusIsRejected) {
  auto cfg = default_scenario_config(ScenarioId::kUnstableEquilibrium);
  cfg.perturbation.delta = 1.0;
  try {
    run_unstable_equilibrium(cfg);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("delta"), std::string::npos) << msg;
    EXPECT_NE(msg.find("gamma"), std::string::npos) << msg;
  }
  cfg.perturbation.delta = 0.0;
  cfg.k = 3;
  EXPECT_THROW(run_unstable_equilibrium(cfg), ConfigError);
}

TEST(Mechanical, BumpPotential) {
  const auto r = run_mechanical(default_scenario_config(ScenarioId::kMechanical));
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.gamma, 1.0, 1e-3);
  EXPECT_NEAR(r.budget, kPi / 4, 1e-3);
  EXPECT_LE(chord_time(r), kPi / 4 + 1e-6);
}

TEST(Mechanical, FreeMotionWithZeroPotential) {
  auto cfg = default_scenario_config(ScenarioId::kMechanical);
  cfg.potential = PotentialKind::kZero;
  cfg.beta = 0.0;
  const auto r = run_mechanical(cfg);
  EXPECT_NEAR(r.gamma, 0.5, 1e-9);
  EXPECT_NEAR(r.budget, kPi / 2, 1e-8);
  EXPECT_TRUE(r.pass);
}

TEST(Mechanical, PeriodicPotentialUsesThePerPeriodMaximum) {
  auto cfg = default_scenario_config(ScenarioId::kMechanical);
  cfg.potential = PotentialKind::kPeriodicBump;
  cfg.potential_modulation = 0.5;
  cfg.search.phases = 4;
  cfg.beta = 0.5;
  EXPECT_THROW(run_mechanical(cfg), ConfigError);
  cfg.beta = 0.25;
  const auto r = run_mechanical(cfg);
  EXPECT_NEAR(r.gamma, 0.75, 1e-3);
  EXPECT_TRUE(r.pass);
}

TEST(ReebChord, ConstantFactorGivesTimeOverConstant) {
  auto cfg = default_scenario_config(ScenarioId::kReebChord);
  cfg.conformal_base = 1.6;
  cfg.conformal_amplitude = 0.0;
  const auto r = run_reeb_chord(cfg);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(chord_time(r), cfg.T / 1.6, 1e-8);
}

TEST(ReebChord, SphereWithVaryingFactor) {
  const auto cfg = default_scenario_config(ScenarioId::kReebChord);
  const auto r = run_reeb_chord(cfg);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.gamma, 1.2, 1e-6);
  EXPECT_LE(chord_time(r), cfg.T / 1.2 + 1e-6);
}

TEST(ReebChord, CircleTimeMatchesQuadrature) {
  auto cfg = default_scenario_config(ScenarioId::kReebChord);
  cfg.reeb_model = ReebModel::kCircle;
  cfg.T = 0.5;
  cfg.conformal_base = 1.5;
  cfg.conformal_amplitude = 0.3;
  const auto r = run_reeb_chord(cfg);
  EXPECT_TRUE(r.pass);
  // the Reeb field of lambda0 / f moves u at speed f
  const double expected = oracle::simpson(
      [](double u) { return 1.0 / (1.5 + 0.3 * std::sin(2 * kPi * u)); }, 0.0, 0.5, 2000);
  EXPECT_NEAR(chord_time(r), expected, 1e-8);
  EXPECT_LE(chord_time(r), r.budget);
}

TEST(ReebChord, RejectsNonPositiveFactorAndHigherDimension) {
  auto cfg = default_scenario_config(ScenarioId::kReebChord);
  cfg.conformal_base = 0.2;
  cfg.conformal_amplitude = 0.3;
  EXPECT_THROW(run_reeb_chord(cfg), ConfigError);
  cfg = default_scenario_config(ScenarioId::kReebChord);
  cfg.k = 2;
  EXPECT_THROW(run_reeb_chord(cfg), ConfigError);
}

TEST(Perturbation, MeasuredDeltaIsMonotoneInAmplitude) {
  const auto tet = build_tetragon(ContactModel::contact_sphere(1), 1.0, 2.0, kPi / 4);
  PerturbationSpec spec;
  spec.far_factor = 10.0;
  double prev = -1.0;
  for (double a : {0.05, 0.1, 0.2, 0.4}) {
    const auto f = wall_bump_perturbation(tet, a, spec);
    const double d = std::abs(separation(f, tet.low_wall(), tet.high_wall()).delta);
    EXPECT_GT(d, prev);
    prev = d;
  }
  double prev_amp = 0.0;
  for (double delta : {0.1, 0.25, 0.5}) {
    spec.delta = delta;
    const auto cal = calibrate_perturbation(tet, spec, SeparationConfig{});
    EXPECT_NEAR(cal.measured_delta, delta, 0.01);
    EXPECT_GT(cal.amplitude, prev_amp);
    prev_amp = cal.amplitude;
  }
}

TEST(Perturbation, FarBumpIsLargerThanOnTheWalls) {
  const auto tet = build_tetragon(ContactModel::contact_sphere(1), 1.0, 2.0, kPi / 4);
  PerturbationSpec spec;
  spec.far_factor = 10.0;
  spec.modulation = 0.0;
  const auto f = wall_bump_perturbation(tet, 0.1, spec);
  double wall_max = 0.0;
  for (const auto& p : tet.high_wall().seed_params(64))
    wall_max = std::max(wall_max, std::abs(f.value(tet.high_wall().point_at(p), 0.0)));
  double anywhere = 0.0;
  for (int i = 0; i <= 40; ++i)
    for (int j = 0; j <= 40; ++j) {
      const std::vector<double> x{-2.0 + 0.1 * i, -2.0 + 0.1 * j};
      anywhere = std::max(anywhere, std::abs(f.value(x, 0.0)));
    }
  EXPECT_GE(anywhere, 9.0 * wall_max);
}

TEST(RobustnessProperty, FiftyRandomPerturbations) { EXPECT_GE(props::robustness_margin(50, 2024), -1e-6); }

TEST(Report, PassIsRecomputable) {
  auto r = run_unstable_equilibrium(default_scenario_config(ScenarioId::kUnstableEquilibrium));
  EXPECT_EQ(recompute_pass(r), r.pass);
  auto tight = r;
  tight.budget = r.search.chord->time_length * 0.5;
  EXPECT_FALSE(recompute_pass(tight));
  auto off = r;
  off.increment = *r.increment + 1e-3;
  EXPECT_FALSE(recompute_pass(off));
  auto lost = r;
  lost.search.chord.reset();
  EXPECT_FALSE(recompute_pass(lost));
}

TEST(Batch, ReportsKeepInputOrderAndMatchSingleRuns) {
  std::vector<ScenarioConfig> cfgs{default_scenario_config(ScenarioId::kReebChord),
                                   default_scenario_config(ScenarioId::kSuperconductivity),
                                   default_scenario_config(ScenarioId::kUnstableEquilibrium)};
  const auto reports = run_batch(cfgs, 4);
  ASSERT_EQ(reports.size(), 3u);
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    EXPECT_EQ(reports[i].id, cfgs[i].id);
    const auto single = run_scenario(cfgs[i]);
    EXPECT_EQ(reports[i].search.chord->time_length, single.search.chord->time_length);
    EXPECT_EQ(reports[i].pass, single.pass);
  }
}

TEST(Names, RoundTripAndRejectUnknown) {
  for (auto id : {ScenarioId::kSuperconductivity, ScenarioId::kUnstableEquilibrium, ScenarioId::kMechanical,
                  ScenarioId::kReebChord})
    EXPECT_EQ(scenario_from_string(to_string(id)), id);
  EXPECT_THROW(scenario_from_string("warp_drive"), ConfigError);
  EXPECT_THROW(potential_from_string("square"), ConfigError);
}
