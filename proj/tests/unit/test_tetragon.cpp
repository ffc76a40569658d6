#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "properties.hpp"
#include "tetra/errors.hpp"
#include "tetra/tetragon.hpp"

using namespace tetra;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<ContactModel> all_models() {
  return {ContactModel::circle(), ContactModel::unit_cotangent_torus(1),
          ContactModel::unit_cotangent_torus(2), ContactModel::contact_sphere(1),
          ContactModel::contact_sphere(2), ContactModel::contact_sphere(3)};
}

double admissible_T(const ContactModel& m) {
  switch (m.kind()) {
    case ModelKind::kCircle:
      return 0.25;
    case ModelKind::kUnitCotangentTorus:
      return 0.4;
    case ModelKind::kContactSphere:
      return kPi / 4;
  }
  return 0.0;
}

std::vector<double> legendrian_params(const ContactModel& m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> a(static_cast<std::size_t>(m.legendrian_param_dim()));
  for (auto& v : a) v = unit(rng);
  if (m.k() == 1 && m.kind() != ModelKind::kCircle && !a.empty()) a[0] = a[0] < 0.5 ? 0.0 : 0.5;
  return a;
}

}  // namespace

TEST(ReebFlow, SphereQuarterTurnMapsRealToImaginary) {
  const auto m = ContactModel::contact_sphere(1);
  const auto z = m.reeb_flow(std::vector<double>{1.0, 0.0}, kPi / 4);
  EXPECT_NEAR(z[0], 0.0, 1e-15);
  EXPECT_NEAR(z[1], 1.0, 1e-15);
}

TEST(ReebFlow, TorusIsStraightLineGeodesic) {
  const auto m = ContactModel::unit_cotangent_torus(2);
  const auto x = m.reeb_flow(std::vector<double>{1.0, 0.0, 0.0, 0.0}, 0.3);
  EXPECT_DOUBLE_EQ(x[0], 1.0);
  EXPECT_DOUBLE_EQ(x[1], 0.0);
  EXPECT_NEAR(x[2], 0.3, 1e-15);
  EXPECT_NEAR(x[3], 0.0, 1e-15);
}

TEST(ReebFlow, CircleTranslates) {
  const auto m = ContactModel::circle();
  EXPECT_NEAR(wrap_unit(m.reeb_flow(std::vector<double>{0.9}, 0.25)[0]), 0.15, 1e-15);
}

TEST(ReebFlow, IdentityAtZeroAndGroupLaw) {
  std::mt19937_64 rng(1);
  for (const auto& m : all_models()) {
    const auto x = m.legendrian_point(legendrian_params(m, rng));
    const auto x0 = m.reeb_flow(x, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(x0[i], x[i], 1e-15) << m.name();
    const auto two_step = m.reeb_flow(m.reeb_flow(x, 0.13), 0.21);
    const auto one_step = m.reeb_flow(x, 0.34);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(two_step[i], one_step[i], 1e-14) << m.name();
  }
}

TEST(ReebFlow, StaysOnSigmaAndRejectsOffSigmaPoints) {
  std::mt19937_64 rng(2);
  for (const auto& m : all_models()) {
    const auto x = m.legendrian_point(legendrian_params(m, rng));
    for (double t = 0.0; t < 3.0; t += 0.173) EXPECT_LE(std::abs(m.constraint_residual(m.reeb_flow(x, t))), 1e-10);
  }
  EXPECT_THROW(ContactModel::contact_sphere(1).reeb_flow(std::vector<double>{1.1, 0.0}, 0.1), ConstraintError);
  EXPECT_THROW(ContactModel::unit_cotangent_torus(2).reeb_flow(std::vector<double>{0.5, 0.0, 0.0, 0.0}, 0.1),
               ConstraintError);
}

TEST(ContactForm, OneOnReebZeroOnLegendrian) {
  std::mt19937_64 rng(3);
  for (const auto& m : all_models()) {
    for (int trial = 0; trial < 20; ++trial) {
      const auto a = legendrian_params(m, rng);
      const auto x = m.legendrian_point(a);
      const double t = 0.05 * trial;
      const auto y = m.reeb_flow(x, t);
      EXPECT_NEAR(m.contact_form(y, m.reeb_vector(y)), 1.0, 1e-12) << m.name();
      for (const auto& v : m.legendrian_tangents(a, t)) EXPECT_LE(std::abs(m.contact_form(y, v)), 1e-10) << m.name();
    }
  }
}

TEST(Embedding, PullsBackPrimitiveToScaledContactForm) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (const auto& m : all_models()) {
    for (int trial = 0; trial < 20; ++trial) {
      const auto a = legendrian_params(m, rng);
      const auto sigma = m.reeb_flow(m.legendrian_point(a), 0.1 * trial);
      const double s = 1.0 + 0.05 * trial;
      // a tangent vector to Sigma: Reeb direction plus Legendrian directions
      auto dsigma = m.reeb_vector(sigma);
      for (const auto& v : m.legendrian_tangents(a, 0.1 * trial)) {
        const double c = unit(rng);
        for (std::size_t i = 0; i < v.size(); ++i) dsigma[i] += c * v[i];
      }
      const auto x = m.embed(sigma, s);
      const auto dx = m.embed_differential(sigma, s, dsigma, unit(rng));
      EXPECT_NEAR(m.ambient_primitive(x, dx), s * m.contact_form(sigma, dsigma), 1e-10) << m.name();
      double s_back = 0.0;
      const auto sigma_back = m.project(x, s_back);
      EXPECT_NEAR(s_back, s, 1e-12);
      EXPECT_NEAR(m.s_of(x), s, 1e-12);
      for (std::size_t i = 0; i < sigma.size(); ++i) {
        const bool periodic_coord = m.kind() != ModelKind::kContactSphere &&
                                    (m.kind() == ModelKind::kCircle || i >= static_cast<std::size_t>(m.k()));
        const double d = periodic_coord ? wrap_centered(sigma_back[i] - sigma[i]) : sigma_back[i] - sigma[i];
        EXPECT_NEAR(d, 0.0, 1e-12) << m.name();
      }
    }
  }
}

TEST(BuildTetragon, SphereWallsAreShells) {
  const auto tet = build_tetragon(ContactModel::contact_sphere(1), 1.0, 2.0, kPi / 4);
  for (double a : {0.0, 0.3, 1.0}) {
    for (double sign : {0.0, 0.5}) {
      const auto h = tet.high_wall().point_at(std::vector<double>{a, sign});
      EXPECT_NEAR(h[1], 0.0, 1e-15);
      EXPECT_GE(std::abs(h[0]), 1.0 - 1e-15);
      EXPECT_LE(std::abs(h[0]), std::sqrt(2.0) + 1e-15);
      const auto l = tet.low_wall().point_at(std::vector<double>{a, sign});
      EXPECT_NEAR(l[0], 0.0, 1e-15);
      EXPECT_GE(std::abs(l[1]), 1.0 - 1e-15);
      EXPECT_LE(std::abs(l[1]), std::sqrt(2.0) + 1e-15);
    }
  }
  EXPECT_NEAR(tet.high_wall().distance(std::vector<double>{1.2, 0.0}), 0.0, 1e-12);
  EXPECT_NEAR(tet.low_wall().distance(std::vector<double>{0.0, -1.3}), 0.0, 1e-12);
  EXPECT_GT(tet.low_wall().distance(std::vector<double>{1.2, 0.0}), 0.5);
}

TEST(BuildTetragon, CircleQuadrilateralArea) {
  const auto tet = build_tetragon(ContactModel::circle(), 1.0, 2.0, 0.25);
  EXPECT_DOUBLE_EQ(tet.rectangle_area(), 0.25);
  const auto c = tet.ceiling().point_at(std::vector<double>{1.0});
  EXPECT_DOUBLE_EQ(c[0], 2.0);
  EXPECT_DOUBLE_EQ(c[1], 0.25);
}

TEST(BuildTetragon, RejectsOutOfRangeParameters) {
  EXPECT_THROW(build_tetragon(ContactModel::unit_cotangent_torus(2), 1.0, 2.0, 0.6), ParameterError);
  EXPECT_THROW(build_tetragon(ContactModel::unit_cotangent_torus(2), 1.0, 2.0, 0.5), ParameterError);
  EXPECT_THROW(build_tetragon(ContactModel::circle(), 1.0, 2.0, 1.0), ParameterError);
  EXPECT_THROW(build_tetragon(ContactModel::contact_sphere(1), 1.0, 2.0, kPi / 4 + 1e-6), ParameterError);
  EXPECT_NO_THROW(build_tetragon(ContactModel::contact_sphere(1), 1.0, 2.0, kPi / 4));
  EXPECT_THROW(build_tetragon(ContactModel::circle(), 2.0, 1.0, 0.25), ParameterError);
  EXPECT_THROW(build_tetragon(ContactModel::circle(), 0.0, 1.0, 0.25), ParameterError);
  EXPECT_THROW(build_tetragon(ContactModel::circle(), 1.0, 2.0, -0.1), ParameterError);
  try {
    build_tetragon(ContactModel::unit_cotangent_torus(2), 1.0, 2.0, 0.6);
  } catch (const ParameterError& e) {
    EXPECT_NE(std::string(e.what()).find("< 0.5"), std::string::npos) << e.what();
  }
}

TEST(BuildTetragon, RegionsLieOnTheirLevelSets) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const auto& m : all_models()) {
    const double T = admissible_T(m);
    const auto tet = build_tetragon(m, 1.0, 2.0, T);
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<double> params{unit(rng)};
      const auto leg = legendrian_params(m, rng);
      params.insert(params.end(), leg.begin(), leg.end());
      const auto f = tet.floor().point_at(params);
      const auto c = tet.ceiling().point_at(params);
      const auto h = tet.high_wall().point_at(params);
      const auto l = tet.low_wall().point_at(params);
      EXPECT_NEAR(m.s_of(f), 1.0, 1e-12) << m.name();
      EXPECT_NEAR(m.s_of(c), 2.0, 1e-12) << m.name();
      EXPECT_NEAR(tet.reeb_time(h), 0.0, 1e-10) << m.name();
      EXPECT_NEAR(tet.reeb_time(l), T, 1e-10) << m.name();
      EXPECT_NEAR(tet.reeb_time(f), params[0] * T, 1e-10) << m.name();
      for (auto kind : {RegionKind::kFloor, RegionKind::kCeiling, RegionKind::kLowWall, RegionKind::kHighWall}) {
        const auto& r = tet.region(kind);
        const auto x = r.point_at(params);
        EXPECT_TRUE(r.contains(x, 1e-9)) << m.name() << " " << to_string(kind);
        EXPECT_LE(std::abs(r.level(x)), 1e-10) << m.name() << " " << to_string(kind);
      }
    }
  }
}

TEST(BuildTetragon, SeedsAreMembersAndInteriorsAreDisjoint) {
  for (const auto& m : all_models()) {
    const auto tet = build_tetragon(m, 1.0, 2.0, admissible_T(m));
    const std::array kinds{RegionKind::kFloor, RegionKind::kCeiling, RegionKind::kLowWall, RegionKind::kHighWall};
    for (auto kind : kinds) {
      const auto& r = tet.region(kind);
      for (const auto& p : r.seed_params(64)) {
        const auto x = r.point_at(p);
        EXPECT_LE(r.distance(x), 1e-9) << m.name();
        // away from the corners a point belongs to exactly one region
        if (p[0] > 0.05 && p[0] < 0.95)
          for (auto other : kinds)
            if (other != kind) EXPECT_GT(tet.region(other).distance(x), 1e-3) << m.name() << " " << to_string(kind);
      }
    }
  }
}

TEST(BuildTetragon, FloorFlowsToItsFarEdge) {
  const auto m = ContactModel::contact_sphere(2);
  const double T = kPi / 4;
  const auto tet = build_tetragon(m, 1.0, 2.0, T);
  for (double a : {0.0, 0.2, 0.7}) {
    const std::vector<double> params{a, 0.37};
    double s = 0.0;
    const auto sigma = m.project(tet.floor().point_at(params), s);
    const auto end = m.embed(m.reeb_flow(sigma, T - a * T), s);
    const auto edge = tet.floor().point_at(std::vector<double>{1.0, 0.37});
    for (std::size_t i = 0; i < end.size(); ++i) EXPECT_NEAR(end[i], edge[i], 1e-12);
  }
}

TEST(SmoothTetragon, RoundedRectangleArea) {
  const auto tet = build_tetragon(ContactModel::circle(), 1.0, 2.0, 0.25);
  for (double eps : {0.01, 0.05, 0.1}) {
    const auto st = smooth_tetragon(tet, eps);
    EXPECT_NEAR(st.area(), 0.25 - (4.0 - kPi) * eps * eps, 1e-15);
    EXPECT_NEAR(st.perimeter(), 2.0 * (1.0 + 0.25) - (8.0 - 2.0 * kPi) * eps, 1e-14);
  }
}

TEST(SmoothTetragon, LoopIsClosedAndHugsTheRectangle) {
  const auto tet = build_tetragon(ContactModel::circle(), 1.0, 2.0, 0.25);
  const double eps = 0.02;
  const auto st = smooth_tetragon(tet, eps);
  const auto start = st.loop_point(0.0);
  const auto end = st.loop_point(1.0 - 1e-12);
  EXPECT_NEAR(start[0], end[0], 1e-9);
  EXPECT_NEAR(start[1], end[1], 1e-9);
  // every loop point is within (sqrt 2 - 1) eps of the rectangle boundary
  for (int i = 0; i < 400; ++i) {
    const auto p = st.loop_point(i / 400.0);
    const double ds = std::min(std::abs(p[0] - 1.0), std::abs(p[0] - 2.0));
    const double dt = std::min(std::abs(p[1]), std::abs(p[1] - 0.25));
    EXPECT_LE(std::min(ds, dt), (std::sqrt(2.0) - 1.0) * eps + 1e-12);
    EXPECT_GE(p[0], 1.0 - 1e-15);
    EXPECT_LE(p[0], 2.0 + 1e-15);
    const auto tan = st.loop_tangent(i / 400.0);
    EXPECT_NEAR(std::hypot(tan[0], tan[1]), 1.0, 1e-12);
  }
}

TEST(SmoothTetragon, RejectsLargeOrNonPositiveEps) {
  const auto tet = build_tetragon(ContactModel::circle(), 1.0, 2.0, 0.25);
  EXPECT_THROW(smooth_tetragon(tet, 0.125), ParameterError);
  EXPECT_THROW(smooth_tetragon(tet, 0.0), ParameterError);
  EXPECT_NO_THROW(smooth_tetragon(tet, 0.12));
}

TEST(SmoothTetragon, CircleResidualIsIdenticallyZero) {
  const auto st = smooth_tetragon(build_tetragon(ContactModel::circle(), 1.0, 2.0, 0.25), 0.05);
  EXPECT_EQ(st.residual(100).max_abs, 0.0);
}

TEST(SmoothTetragon, SphereK2IsLagrangian) {
  const auto st = smooth_tetragon(build_tetragon(ContactModel::contact_sphere(2), 1.0, 2.0, 0.5), 0.05);
  const auto r = st.residual(1000);
  EXPECT_GE(r.samples, 1000);
  EXPECT_LE(r.max_abs, 1e-8);
}

TEST(SmoothTetragonProperty, LagrangianAcrossModels) { EXPECT_LE(props::lagrangian_residual(1000), 1e-8); }

TEST(SmoothTetragon, TangentsSpanTheFiniteDifferenceTangentPlane) {
  const auto st = smooth_tetragon(build_tetragon(ContactModel::unit_cotangent_torus(2), 1.0, 2.0, 0.4), 0.05);
  const std::vector<double> a{0.3};
  auto residual_after_projection = [](std::vector<double> w, const std::vector<double>& v) {
    double vv = 0.0, wv = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      vv += v[i] * v[i];
      wv += w[i] * v[i];
    }
    double r = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) r = std::max(r, std::abs(w[i] - wv / vv * v[i]));
    return r;
  };
  for (double theta : {0.05, 0.31, 0.62, 0.9}) {
    const auto tangents = st.surface_tangents(a, theta);
    ASSERT_EQ(tangents.size(), 2u);
    const double h = 1e-6;
    const auto xp = st.surface_point(a, theta + h), xm = st.surface_point(a, theta - h);
    std::vector<double> d_theta(xp.size());
    for (std::size_t i = 0; i < xp.size(); ++i) d_theta[i] = (xp[i] - xm[i]) / (2 * h);
    // theta is arc length over the perimeter, the analytic loop tangent is per unit length
    for (std::size_t i = 0; i < xp.size(); ++i) EXPECT_NEAR(d_theta[i], st.perimeter() * tangents[1][i], 1e-5);
    const std::vector<double> ap{0.3 + h}, am{0.3 - h};
    const auto yp = st.surface_point(ap, theta), ym = st.surface_point(am, theta);
    std::vector<double> d_a(yp.size());
    for (std::size_t i = 0; i < yp.size(); ++i) d_a[i] = (yp[i] - ym[i]) / (2 * h);
    EXPECT_LE(residual_after_projection(d_a, tangents[0]), 1e-5);
    EXPECT_LE(std::abs(symplectic_form(d_a, d_theta)), 1e-6);
    EXPECT_LE(std::abs(symplectic_form(tangents[0], tangents[1])), 1e-12);
  }
}

TEST(Stabilize, ExtendsChartAndKeepsMembership) {
  const auto tet = build_tetragon(ContactModel::circle(), 1.0, 2.0, 0.25);
  const auto r = stabilize(tet.region_ptr(RegionKind::kFloor), 1, Stabilization::kZeroSection);
  EXPECT_EQ(r->chart().dim_pairs(), 2);
  EXPECT_EQ(r->params().size(), 2u);
  for (const auto& p : r->seed_params(16)) {
    const auto x = r->point_at(p);
    EXPECT_LE(r->distance(x), 1e-12);
    EXPECT_EQ(x[1], 0.0);
  }
  // p' off the zero section is not a member
  EXPECT_GT(r->distance(std::vector<double>{1.0, 0.3, 0.1, 0.2}), 0.29);
  EXPECT_THROW(stabilize(tet.region_ptr(RegionKind::kFloor), 0, Stabilization::kZeroSection), ParameterError);
}
