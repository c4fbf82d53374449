#include <cmath>

#include <gtest/gtest.h>

#include "dthsem/dthsem.hpp"

using namespace dth;

namespace {

Vector z4(double q, double t, double p, double wp) {
  Vector z(4);
  z << q, t, p, wp;
  return z;
}

Vector with_energy(double q, double p, double h) { return z4(q, 0, p, h - 0.5 * p * p + std::cos(q)); }

struct Setup {
  RegionBounds bounds = with_safety_factor(estimate_bounds(*pendulum(), Vector::Zero(4), 2.0, 33), 1.1);
  StepOptions options;
  Setup() { options.constants = derive_constants(bounds, 0.5); }
};

const Setup& setup() {
  static const Setup s;
  return s;
}

Vector one(double x) { return Vector::Constant(1, x); }

}  // namespace

TEST(Step, ZeroEnergyPointIsFixed) {
  const Vector z = z4(0, 0, 1, 0.5);
  const StepResult r = step(*pendulum(), z, Direction::forward, setup().options);
  EXPECT_TRUE(r.fixed_point);
  EXPECT_EQ(r.lambda, 0.0);
  EXPECT_EQ(r.z_next, z);
  EXPECT_TRUE(r.theorem_backed);
}

TEST(Step, SmallPositiveEnergyStepsByLeadingOrderMultiplier) {
  const Vector z = z4(0, 0, 1, 0.501);
  const StepResult r = step(*pendulum(), z, Direction::forward, setup().options);
  EXPECT_NEAR(r.lambda, std::sqrt(8e-3), 0.02 * std::sqrt(8e-3));
  EXPECT_TRUE(r.beyond_window);  // H_k/psi_k = 1e-3 exceeds the EU_1 window
  EXPECT_FALSE(r.theorem_backed);
  EXPECT_NEAR(r.z_next[1] - z[1], r.lambda, 1e-15);
  EXPECT_EQ(r.z_next[3], z[3]);
  EXPECT_LE(r.energy_residual, 1e-12);

  const StepResult b = step(*pendulum(), z, Direction::backward, setup().options);
  EXPECT_NEAR(b.lambda, -std::sqrt(8e-3), 0.02 * std::sqrt(8e-3));
}

TEST(Step, NegativeRatioInRegionIHasNoMultiplier) {
  try {
    step(*pendulum(), with_energy(0.5, 0.2, -0.01), Direction::forward, setup().options);
    FAIL() << "expected StepNonexistenceError";
  } catch (const StepNonexistenceError& e) {
    EXPECT_EQ(e.verdict(), "none (EU_1(i))");
  }
}

TEST(Step, WindowOnlySearchStaysInsideTheorem) {
  StepOptions o = setup().options;
  o.search_radius = 1e-12;  // below Lambda: no extended search
  EXPECT_THROW(step(*pendulum(), z4(0, 0, 1, 0.501), Direction::forward, o), StepNonexistenceError);
}

TEST(Propagate, PendulumEnergyAndConjugateMomentum) {
  StepOptions o = setup().options;
  const Vector z0 = ExtendedState::from_parts(
                        one(1.0), 0.0, one(0.5),
                        choose_conjugate_momentum(*pendulum(), one(1.0), 0.0, one(0.5), 0.1, o))
                        .coords();
  const DTHTrajectory t = propagate(*pendulum(), z0, 1000, o);
  ASSERT_EQ(t.steps(), 1000u);
  EXPECT_EQ(t.vertices.size(), 1001u);
  EXPECT_EQ(t.count(EventKind::terminated), 0u);
  const ConservationReport r = conservation_report(*pendulum(), t);
  EXPECT_LE(r.max_energy_residual, 1e-10);
  EXPECT_LE(r.max_wp_change, 1e-12);
  EXPECT_TRUE(r.wp_conservation_expected);
  EXPECT_LE(r.max_symplectic_defect, 1e-6);
  EXPECT_LE(r.max_midpoint_identity, 1e-10);
  EXPECT_LE(r.max_midpoint_gap, 1e-12);
}

TEST(Propagate, IndependentWalkOfTrajectoryLists) {
  const Vector z0 = with_energy(0.8, -0.3, 1e-3);
  const DTHTrajectory t = propagate(*pendulum(), z0, 200, setup().options);
  ASSERT_EQ(t.vertices.size(), t.steps() + 1);
  ASSERT_EQ(t.midpoints.size(), t.steps());
  for (std::size_t k = 0; k < t.steps(); ++k) {
    const Vector& a = t.vertices[k];
    const Vector& b = t.vertices[k + 1];
    const double lam = t.multipliers[k];
    EXPECT_LE((t.midpoints[k] - 0.5 * (a + b)).norm(), 1e-12);
    EXPECT_NEAR(b[1] - a[1], lam, 1e-14);  // Delta t = lambda
    EXPECT_NEAR(b[0] - a[0], lam * t.midpoints[k][2], 1e-13);
    EXPECT_NEAR(b[2] - a[2], -lam * std::sin(t.midpoints[k][0]), 1e-13);
    EXPECT_LE(std::abs(pendulum()->value(t.midpoints[k])), 1e-12);
  }
}

TEST(Propagate, StopsAtFixedPoint) {
  const DTHTrajectory t = propagate(*pendulum(), z4(0, 0, 1, 0.5), 10, setup().options);
  EXPECT_EQ(t.steps(), 0u);
  EXPECT_EQ(t.count(EventKind::fixed_point), 1u);
}

TEST(Propagate, LogsTerminationWithVerdict) {
  const DTHTrajectory t = propagate(*pendulum(), with_energy(0.5, 0.2, -0.01), 10, setup().options);
  ASSERT_EQ(t.count(EventKind::terminated), 1u);
  EXPECT_NE(t.events[0].detail.find("EU_1(i)"), std::string::npos);
}

TEST(Propagate, RejectsBadArguments) {
  EXPECT_THROW(propagate(*pendulum(), z4(0, 0, 1, 0.5), 0, setup().options), ParameterError);
  EXPECT_THROW(propagate(*pendulum(), Vector::Zero(3), 1, setup().options), DimensionError);
}

TEST(Propagate, OscillatorEnergyAtRoundingLevel) {
  const auto m = oscillator(1.0);
  StepOptions o;
  o.constants = derive_constants(with_safety_factor(estimate_bounds(*m, Vector::Zero(4), 2.0, 17), 1.1), 0.5);
  const Vector z0 = ExtendedState::from_parts(one(1.0), 0.0, one(0.0),
                                              choose_conjugate_momentum(*m, one(1.0), 0.0, one(0.0), 0.1, o))
                        .coords();
  const DTHTrajectory t = propagate(*m, z0, 300, o);
  ASSERT_EQ(t.steps(), 300u);
  EXPECT_LE(conservation_report(*m, t).max_energy_residual, 1e-15);
}

TEST(Propagate, ForwardThenBackwardRecoversVertices) {
  const DTHTrajectory t = propagate(*pendulum(), with_energy(1.0, 0.5, 1e-3), 30, setup().options);
  for (std::size_t k = 0; k < t.steps(); ++k) {
    const StepResult b = step(*pendulum(), t.vertices[k + 1], Direction::backward, setup().options);
    EXPECT_LE((b.z_next - t.vertices[k]).norm(), 1e-9);
    EXPECT_NEAR(b.lambda, -t.multipliers[k], 1e-9);
  }
}

TEST(Propagate, FollowGhostTakesTheGhostBranch) {
  const double q = std::acos(8.0 - std::sqrt(64.0 + 1.0 - 0.15));
  Vector c(4);
  c << q, 0, 4, 0;
  StepOptions o;
  o.constants = derive_constants(with_safety_factor(estimate_bounds(*pendulum(), c, 0.2, 33), 1.1), 0.15);
  o.solve.tol_g = 1e-15;
  const RootPrediction p0 = predict_roots(*pendulum(), with_energy(q, 4.0, 0.0), o.constants);
  ASSERT_EQ(p0.region.tag, RegionTag::II);
  const Vector z = with_energy(q, 4.0, 1e-9 * p0.region.psi_k);
  const int sign = p0.region.psi_k / p0.region.psi_prime_k > 0 ? -1 : 1;  // ghost side: lambda = -rho s
  const Direction dir = sign > 0 ? Direction::forward : Direction::backward;

  const StepResult plain = step(*pendulum(), z, dir, o);
  EXPECT_TRUE(plain.bifurcation);
  EXPECT_FALSE(plain.ghost_taken);

  o.policy = BranchPolicy::follow_ghost;
  const StepResult ghost = step(*pendulum(), z, dir, o);
  EXPECT_TRUE(ghost.ghost_taken);
  EXPECT_GT(std::abs(ghost.lambda), 10 * std::abs(plain.lambda));
}

TEST(ClassifyVertex, MainResultCases) {
  const auto m = pendulum();
  const DerivedConstants& k = setup().options.constants;
  const VertexClass none = classify_vertex(*m, with_energy(0.5, 0.2, -0.01), setup().bounds, k);
  EXPECT_EQ(none.kind, VertexKind::none);
  EXPECT_EQ(none.label, "(i)");

  const VertexClass fixed = classify_vertex(*m, z4(0, 0, 1, 0.5), k);
  EXPECT_EQ(fixed.kind, VertexKind::fixed_point);
  EXPECT_EQ(fixed.label, "(ii)");

  const RootPrediction base = predict_roots(*m, with_energy(0.5, 0.2, 0.0), k);
  const double L = base.capital_lambda;
  const Vector z = with_energy(0.5, 0.2, 0.5 * 3.0 / 32 * L * L * base.region.psi_k);
  const VertexClass pass = classify_vertex(*m, z, k);
  EXPECT_EQ(pass.kind, VertexKind::pass_through);
  EXPECT_EQ(pass.label, "(iii)");
  const MultiplierSet s = solve_roots(*m, z, predict_roots(*m, z, k));
  EXPECT_TRUE(s.lambda_minus() && s.lambda_plus());

  EXPECT_THROW(classify_vertex(*m, z4(3.0, 0, 0, 0), setup().bounds, k), PreconditionError);
  EXPECT_EQ(classify_vertex(*m, z4(0, 0, 0, 1), k).kind, VertexKind::degenerate);
}

TEST(ClassifyVertex, RegionThreeZeroEnergyIsFixedPoint) {
  const double q = 2.3;
  const double p = std::sqrt(-std::sin(q) * std::sin(q) / std::cos(q));
  const DerivedConstants k = derive_constants(
      with_safety_factor(estimate_bounds(*pendulum(), z4(2.3, 0, 1, 0), 1.0, 33), 1.1), 0.5);
  const VertexClass v = classify_vertex(*pendulum(), with_energy(q, p, 0.0), k);
  EXPECT_EQ(v.region, RegionTag::III);
  EXPECT_EQ(v.kind, VertexKind::fixed_point);
  EXPECT_EQ(v.label, "(viii)");
}

TEST(ChooseConjugateMomentum, PendulumExample) {
  const StepOptions& o = setup().options;
  const double psi0 = 0.25 * std::cos(1.0) + std::sin(1.0) * std::sin(1.0);
  const double wp = choose_conjugate_momentum(*pendulum(), one(1.0), 0.0, one(0.5), 0.1, o);
  EXPECT_NEAR(wp, std::cos(1.0) - 0.125 + psi0 * 0.00125, 2e-4);
  const StepResult r = step(*pendulum(), z4(1.0, 0.0, 0.5, wp), Direction::forward, o);
  EXPECT_GE(r.lambda, 0.09);
  EXPECT_LE(r.lambda, 0.11);
  EXPECT_NEAR(r.lambda, 0.1, 1e-6);
}

TEST(ChooseConjugateMomentum, LimitsAndScaling) {
  const StepOptions& o = setup().options;
  const double wp_small = choose_conjugate_momentum(*pendulum(), one(1.0), 0.0, one(0.5), 1e-4, o);
  EXPECT_NEAR(wp_small, std::cos(1.0) - 0.125, 1e-8);
  const double h1 = pendulum()->value(z4(1.0, 0, 0.5, choose_conjugate_momentum(*pendulum(), one(1.0), 0.0, one(0.5), 0.02, o)));
  const double h2 = pendulum()->value(z4(1.0, 0, 0.5, choose_conjugate_momentum(*pendulum(), one(1.0), 0.0, one(0.5), 0.01, o)));
  EXPECT_NEAR(h1 / h2, 4.0, 0.05);
  EXPECT_THROW(choose_conjugate_momentum(*pendulum(), one(1.0), 0.0, one(0.5), 0.0, o), ParameterError);
  EXPECT_THROW(choose_conjugate_momentum(*free_time(), one(1.0), 0.0, one(0.5), 0.1, o), UnsupportedRegionError);
}
