#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dthsem/dthsem.hpp"

using namespace dth;

namespace {

const double kPi = 3.141592653589793;

Vector z4(double q, double t, double p, double wp) {
  Vector z(4);
  z << q, t, p, wp;
  return z;
}

struct PendulumRegion {
  RegionBounds bounds = with_safety_factor(estimate_bounds(*pendulum(), Vector::Zero(4), 2.0, 33), 1.1);
  DerivedConstants constants = derive_constants(bounds, 0.5);
};

const PendulumRegion& region() {
  static const PendulumRegion r;
  return r;
}

// Bounds around the psi = 0 curve at p = 4, where psi' is large.
struct CurveRegion {
  double q_star = std::acos(8.0 - std::sqrt(65.0));
  RegionBounds bounds;
  DerivedConstants constants;
  CurveRegion() {
    bounds = with_safety_factor(estimate_bounds(*pendulum(), z4(q_star, 0, 4, 0), 0.2, 33), 1.1);
    constants = derive_constants(bounds, 0.15);
  }
};

const CurveRegion& curve() {
  static const CurveRegion r;
  return r;
}

// wp giving H(z) = h for the pendulum.
Vector with_energy(double q, double p, double h) {
  return z4(q, 0, p, h - 0.5 * p * p + std::cos(q));
}

DerivedConstants unit_constants() {
  DerivedConstants k;
  k.K = 0.28125;
  k.lambda_delta = 0.375;
  return k;
}

// Sign changes of g on a uniform grid strictly inside (lo, hi).
int sign_changes(const Vector& z, double lo, double hi, int n) {
  int changes = 0;
  double prev = 0;
  for (int i = 1; i <= n; ++i) {
    const double g = g_eval(*pendulum(), lo + (hi - lo) * i / (n + 1), z);
    if (prev != 0 && (g > 0) != (prev > 0)) ++changes;
    if (g != 0) prev = g;
  }
  return changes;
}

}  // namespace

TEST(ClassifyRegion, Examples) {
  const CubicModel a = cubic_model(*pendulum(), z4(kPi / 2, 0, 1, 0), region().constants);
  EXPECT_EQ(classify_region(a).tag, RegionTag::I);

  const CubicModel b = cubic_model(0.0, 0.0, -1.0, unit_constants());
  EXPECT_EQ(classify_region(b).tag, RegionTag::III);

  const CubicModel c = cubic_model(*pendulum(), z4(0, 0, 0, 1), region().constants);
  EXPECT_EQ(classify_region(c).tag, RegionTag::degenerate);

  const CubicModel d = cubic_model(0.0, 1e-3, 1.0, unit_constants());  // 1 > 24 K 1e-3
  EXPECT_EQ(classify_region(d).tag, RegionTag::II);
}

TEST(CapitalLambda, ArithmeticExamples) {
  const CubicModel one = cubic_model(0.0, 1.0, 0.0, unit_constants());
  EXPECT_NEAR(capital_lambda(classify_region(one), one), 0.9 * std::sqrt(1.0 / 27.0), 1e-12);
  EXPECT_NEAR(capital_lambda(classify_region(one), one), 0.17321, 1e-5);

  const CubicModel three = cubic_model(0.0, 0.0, 1.0, unit_constants());
  EXPECT_NEAR(capital_lambda(classify_region(three), three), 0.9 / 13.5, 1e-12);
}

TEST(CapitalLambda, ShrinkStaysInsideOpenInterval) {
  const CubicModel one = cubic_model(0.0, 1.0, 0.0, unit_constants());
  const Region r = classify_region(one);
  const double sup = std::sqrt(1.0 / 27.0);
  EXPECT_LT(capital_lambda(r, one, 0.999999), sup);
  EXPECT_NEAR(capital_lambda(r, one, 0.999999), sup, 1e-6);
  EXPECT_THROW(capital_lambda(r, one, 1.0), ParameterError);
  const CubicModel deg = cubic_model(0.0, 0.0, 0.0, unit_constants());
  EXPECT_THROW(capital_lambda(classify_region(deg), deg), UnsupportedRegionError);
}

TEST(PredictRoots, RegionINegativeRatioHasNoRoots) {
  const RootPrediction p = predict_roots(*pendulum(), with_energy(0.5, 0.2, -0.01), region().constants);
  EXPECT_EQ(p.region.tag, RegionTag::I);
  ASSERT_EQ(p.claims.size(), 1u);
  EXPECT_EQ(p.claims[0].verdict, Verdict::none);
  EXPECT_EQ(p.describe_side(1), "none (EU_1(i))");
  EXPECT_EQ(p.describe_side(-1), "none (EU_1(i))");
}

TEST(PredictRoots, RegionIZeroEnergyHasOnlyZeroRoot) {
  const Vector z = z4(0, 0, 1, 0.5);
  const RootPrediction p = predict_roots(*pendulum(), z, region().constants);
  EXPECT_TRUE(p.zero_root);
  const MultiplierSet s = solve_roots(*pendulum(), z, p);
  ASSERT_EQ(s.roots.size(), 1u);
  EXPECT_EQ(s.roots[0].lambda, 0.0);
  EXPECT_TRUE(s.has_zero());
  EXPECT_EQ(sign_changes(z, -p.capital_lambda, 0, 1024), 0);
  EXPECT_EQ(sign_changes(z, 0, p.capital_lambda, 1024), 0);
}

TEST(PredictRoots, RegionIIIPositiveRatioGivesForwardRootOnly) {
  const double q = 2.3;
  const double p = std::sqrt(-std::sin(q) * std::sin(q) / std::cos(q));
  const RegionBounds b = with_safety_factor(estimate_bounds(*pendulum(), z4(2.3, 0, 1, 0), 1.0, 33), 1.1);
  const DerivedConstants k = derive_constants(b, 0.5);
  const RootPrediction base = predict_roots(*pendulum(), with_energy(q, p, 0.0), k);
  ASSERT_EQ(base.region.tag, RegionTag::III);
  const double L = base.capital_lambda;
  const double ratio = 0.5 * L * L * L / 48;
  const Vector z = with_energy(q, p, ratio * base.region.psi_prime_k);
  const RootPrediction pr = predict_roots(*pendulum(), z, k);
  EXPECT_EQ(pr.side_verdict(1), Verdict::exists_unique);
  EXPECT_EQ(pr.side_verdict(-1), Verdict::none);
  EXPECT_EQ(pr.describe_side(1), "exists-unique (EU_3(ii))");
  const MultiplierSet s = solve_roots(*pendulum(), z, pr, SolveOptions{1e-14});
  ASSERT_EQ(s.roots.size(), 1u);
  EXPECT_GT(s.roots[0].lambda, 0.0);
  EXPECT_LT(s.roots[0].lambda, L);
  EXPECT_EQ(sign_changes(z, -L, 0, 1024), 0);
}

TEST(SolveRoots, SmallPositiveEnergyGivesSymmetricPair) {
  // H_k = 1e-3, psi_k = 1: leading order lambda = +-sqrt(8e-3).
  const Vector z = z4(0, 0, 1, 0.501);
  const double ld = region().constants.lambda_delta;
  const std::vector<Root> roots = scan_roots(*pendulum(), z, -ld, ld, 512);
  ASSERT_EQ(roots.size(), 2u);
  EXPECT_NEAR(roots[0].lambda, -std::sqrt(8e-3), 0.02 * std::sqrt(8e-3));
  EXPECT_NEAR(roots[1].lambda, std::sqrt(8e-3), 0.02 * std::sqrt(8e-3));
  for (const Root& r : roots) EXPECT_LE(std::abs(g_eval(*pendulum(), r.lambda, z)), 1e-12);
}

TEST(SolveRoots, ExistsUniqueInsideWindowOnRegionIGrid) {
  const auto m = pendulum();
  for (double q = -1.4; q <= 1.41; q += 0.35) {
    for (double p = -1.4; p <= 1.41; p += 0.35) {
      const RootPrediction base = predict_roots(*m, with_energy(q, p, 0.0), region().constants);
      if (base.region.tag != RegionTag::I) continue;
      const double L = base.capital_lambda;
      const Vector z = with_energy(q, p, 0.5 * 3.0 / 32.0 * L * L * base.region.psi_k);
      const RootPrediction pr = predict_roots(*m, z, region().constants);
      const MultiplierSet s = solve_roots(*m, z, pr);
      ASSERT_TRUE(s.lambda_minus() && s.lambda_plus()) << q << " " << p;
      EXPECT_GT(*s.lambda_minus(), -L);
      EXPECT_LT(*s.lambda_plus(), L);
      EXPECT_EQ(sign_changes(z, -L, 0, 256), 1);
      EXPECT_EQ(sign_changes(z, 0, L, 256), 1);
      EXPECT_TRUE(s.complete());
    }
  }
}

TEST(SolveRoots, MonotoneSegmentsHaveConstantDerivativeSign) {
  const auto m = pendulum();
  for (double q : {-1.0, 0.3, 1.2}) {
    const Vector z = with_energy(q, 0.7, 1e-5);
    const RootPrediction pr = predict_roots(*m, z, region().constants);
    for (const SearchSegment& s : pr.segments) {
      if (!s.monotone) continue;
      int pos = 0, neg = 0;
      for (int i = 0; i < 128; ++i) {
        const double d = g_derivative(*m, s.lo + (s.hi - s.lo) * (i + 0.5) / 128, z);
        (d > 0 ? pos : neg)++;
      }
      EXPECT_TRUE(pos == 0 || neg == 0);
    }
  }
}

TEST(SolveRoots, RegionTwoGhostNearPsiSignChange) {
  const double psi_target = 0.15;
  // q with psi = 0.15 at p = 4: psi = 16 cos q + sin^2 q.
  const double c = 8.0 - std::sqrt(64.0 + 1.0 - psi_target);
  const double q = std::acos(c);
  const Vector base = with_energy(q, 4.0, 0.0);
  const RootPrediction p0 = predict_roots(*pendulum(), base, curve().constants);
  ASSERT_EQ(p0.region.tag, RegionTag::II);
  ASSERT_GT(*p0.S, 6.0);

  const Vector z = with_energy(q, 4.0, 1e-9 * p0.region.psi_k);
  PredictionOptions po;
  po.zero_tol = 1e-15;
  const RootPrediction pr = predict_roots(*pendulum(), z, curve().constants, po);
  EXPECT_TRUE(pr.ghost_expected);
  const MultiplierSet s = solve_roots(*pendulum(), z, pr, SolveOptions{1e-15});
  ASSERT_TRUE(s.lambda_minus() && s.lambda_plus() && s.lambda_ghost());
  EXPECT_LT(std::abs(*s.lambda_plus()), 1e-3);
  EXPECT_GT(std::abs(*s.lambda_ghost() / *pr.rho), 1.2);
}

TEST(SolveRoots, RegionTwoSUnitsAgreeWithLambdaUnits) {
  const double q = std::acos(8.0 - std::sqrt(64.0 + 1.0 - 0.15));
  const RootPrediction p0 = predict_roots(*pendulum(), with_energy(q, 4.0, 0.0), curve().constants);
  const Vector z = with_energy(q, 4.0, 0.5 * p0.thresholds.at("vi_upper") * p0.region.psi_k);
  const RootPrediction pr = predict_roots(*pendulum(), z, curve().constants);
  const MultiplierSet s = solve_roots(*pendulum(), z, pr);
  const double rho = *pr.rho;
  for (const Root& r : s.roots) {
    // Bisection for g(-rho s) = 0 in s around s = -lambda/rho.
    double a = -r.lambda / rho * 0.9, b = -r.lambda / rho * 1.1;
    double ga = g_eval(*pendulum(), -rho * a, z);
    ASSERT_NE(ga > 0, g_eval(*pendulum(), -rho * b, z) > 0);
    for (int i = 0; i < 200 && std::abs(b - a) * std::abs(rho) > 1e-16; ++i) {
      const double mid = 0.5 * (a + b);
      const double gm = g_eval(*pendulum(), -rho * mid, z);
      if ((gm > 0) == (ga > 0)) {
        a = mid;
        ga = gm;
      } else {
        b = mid;
      }
    }
    const double slope = std::abs(g_derivative(*pendulum(), r.lambda, z));
    EXPECT_NEAR(-rho * 0.5 * (a + b), r.lambda, std::max(1e-14, 4e-12 / slope));
  }
}

TEST(SolveRoots, ResidualsWithinTolerance) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1.4, 1.4);
  const SolveOptions so;
  for (int k = 0; k < 30; ++k) {
    const Vector z = with_energy(u(rng), u(rng), 1e-6);
    const RootPrediction pr = predict_roots(*pendulum(), z, region().constants);
    for (const Root& r : solve_roots(*pendulum(), z, pr, so).roots) {
      EXPECT_LE(std::abs(g_eval(*pendulum(), r.lambda, z)), so.tol_g);
      EXPECT_LE(r.residual, so.tol_g);
    }
  }
}

TEST(Claim, ContainsRespectsClosedness) {
  Claim c{-1.0, 2.0, false, true, Verdict::none, "x"};
  EXPECT_FALSE(c.contains(-1.0));
  EXPECT_TRUE(c.contains(2.0));
  EXPECT_TRUE(c.contains(0.0));
  EXPECT_FALSE(c.contains(2.5));
}

TEST(GhostCheck, ConstantZeroEnergySequencePassesVacuously) {
  const Vector z = z4(0, 0, 1, 0.5);
  const RootPrediction p = predict_roots(*pendulum(), z, region().constants);
  const MultiplierSet s = solve_roots(*pendulum(), z, p);
  const std::vector<MultiplierSet> sets(3, s);
  const std::vector<CubicModel> cubics(3, p.cubic);
  const GhostReport r = ghost_check(sets, cubics, region().bounds, 0.5);
  EXPECT_EQ(r.ghosts_detected, 0);
  EXPECT_TRUE(r.ghost_bound_holds);
  EXPECT_EQ(r.pm_final, 0.0);
}

TEST(GhostCheck, PlusMinusRootsShrinkAwayFromPsiZero) {
  const auto m = pendulum();
  std::vector<MultiplierSet> sets;
  std::vector<CubicModel> cubics;
  PredictionOptions po;
  po.zero_tol = 1e-16;
  for (double r = 1e-5; r > 1e-13; r /= 10) {
    const Vector z = with_energy(0.4, 0.6, r * PendulumModel::psi_closed(0.4, 0.6));
    const RootPrediction pr = predict_roots(*m, z, region().constants, po);
    sets.push_back(solve_roots(*m, z, pr, SolveOptions{1e-16}));
    cubics.push_back(pr.cubic);
  }
  const GhostReport rep = ghost_check(sets, cubics, region().bounds, 0.1);
  EXPECT_TRUE(rep.pm_nonincreasing);
  EXPECT_LT(rep.pm_final, 1e-5);
  EXPECT_EQ(rep.ghosts_detected, 0);
}

TEST(GhostCheck, RejectsIncreasingRatio) {
  const auto m = pendulum();
  std::vector<MultiplierSet> sets;
  std::vector<CubicModel> cubics;
  for (double r : {1e-6, 1e-5}) {
    const Vector z = with_energy(0.4, 0.6, r);
    const RootPrediction pr = predict_roots(*m, z, region().constants);
    sets.push_back(solve_roots(*m, z, pr));
    cubics.push_back(pr.cubic);
  }
  EXPECT_THROW(ghost_check(sets, cubics, region().bounds, 0.1), PreconditionError);
}
