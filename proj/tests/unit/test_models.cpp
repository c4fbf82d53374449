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

Vector central_gradient(const HamiltonianModel& m, const Vector& z, double h) {
  Vector g(z.size());
  for (int i = 0; i < z.size(); ++i) {
    Vector a = z, b = z;
    a[i] += h;
    b[i] -= h;
    g[i] = (m.value(a) - m.value(b)) / (2 * h);
  }
  return g;
}

}  // namespace

TEST(Pendulum, EquilibriumEnergy) { EXPECT_EQ(pendulum()->value(z4(0, 0, 0, 1)), 0.0); }

TEST(Pendulum, DerivativesMatchClosedForms) {
  const auto m = pendulum();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int k = 0; k < 30; ++k) {
    const double q = u(rng), t = u(rng), p = u(rng), wp = u(rng);
    const Vector z = z4(q, t, p, wp);
    EXPECT_DOUBLE_EQ(m->value(z), wp + 0.5 * p * p - std::cos(q));
    EXPECT_EQ(m->gradient(z), z4(std::sin(q), 0, p, 1));
    Matrix h = Matrix::Zero(4, 4);
    h(0, 0) = std::cos(q);
    h(2, 2) = 1.0;
    EXPECT_EQ(m->hessian(z), h);
  }
}

TEST(Pendulum, AnalyticDerivativesAgreeWithFiniteDifferencesToSecondOrder) {
  const auto m = pendulum();
  const Vector z = z4(0.8, 0.0, 1.1, 0.3);
  const Vector g = m->gradient(z);
  const double e1 = (central_gradient(*m, z, 1e-2) - g).norm();
  const double e2 = (central_gradient(*m, z, 5e-3) - g).norm();
  EXPECT_NEAR(e1 / e2, 4.0, 0.5);
}

TEST(Pendulum, PsiZeroSetIsTheVCurve) {
  for (double q = kPi / 2 + 0.05; q < kPi - 0.01; q += 0.1) {
    for (double sign : {-1.0, 1.0}) {
      const double p = sign * std::sqrt(-std::sin(q) * std::sin(q) / std::cos(q));
      EXPECT_NEAR(psi(*pendulum(), z4(q, 0, p, 0)), 0.0, 1e-12) << "q = " << q;
      EXPECT_NEAR(PendulumModel::psi_closed(q, p), 0.0, 1e-12);
    }
  }
}

TEST(Pendulum, PsiPrimeVanishesOnAxesLines) {
  const auto m = pendulum();
  for (double x = -3; x <= 3; x += 0.25) {
    EXPECT_EQ(sample_fields(*m, z4(x, 0, 0, 0)).psi_prime, 0.0);
    for (double q : {0.0, kPi, -kPi}) {
      EXPECT_NEAR(sample_fields(*m, z4(q, 0, x, 0)).psi_prime, 0.0, 1e-14);
    }
  }
}

TEST(Pendulum, ClosedFormsMatchSampledFields) {
  const auto m = pendulum();
  FunctionModel fd(
      1, [m](const Vector& z) { return m->value(z); }, [m](const Vector& z) { return m->gradient(z); },
      [m](const Vector& z) { return m->hessian(z); });
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int k = 0; k < 50; ++k) {
    const double q = u(rng), p = u(rng);
    const Vector z = z4(q, u(rng), p, u(rng));
    const FieldSample a = sample_fields(*m, z);
    EXPECT_NEAR(a.psi, PendulumModel::psi_closed(q, p), 1e-12);
    EXPECT_NEAR(a.psi_prime, PendulumModel::psi_prime_closed(q, p), 1e-12);
    const FieldSample b = sample_fields(fd, z);
    EXPECT_NEAR(b.psi_prime, PendulumModel::psi_prime_closed(q, p), 1e-8 * (1 + std::abs(b.psi_prime)));
  }
}

TEST(Pendulum, AnalyticPsiHessianMatchesFiniteDifferences) {
  const auto m = pendulum();
  const Vector z = z4(0.9, 0.0, -1.2, 0.4);
  const Matrix a = *m->psi_hessian(z);
  const double h = 1e-4;
  for (int i = 0; i < 4; ++i) {
    Vector zp = z, zm = z;
    zp[i] += h;
    zm[i] -= h;
    const Vector col = (*m->psi_gradient(zp) - *m->psi_gradient(zm)) / (2 * h);
    EXPECT_LE((col - a.col(i)).norm(), 1e-7);
  }
}

TEST(Oscillator, GradientExample) {
  EXPECT_EQ(oscillator(1.0)->gradient(z4(1, 0, 0, 3)), z4(1, 0, 0, 1));
}

TEST(Oscillator, PsiIsPositiveQuadraticForm) {
  const double w = 1.7;
  const auto m = oscillator(w);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int k = 0; k < 30; ++k) {
    const double q = u(rng), p = u(rng);
    const FieldSample f = sample_fields(*m, z4(q, u(rng), p, u(rng)));
    EXPECT_NEAR(f.psi, w * w * (p * p + w * w * q * q), 1e-12);
    EXPECT_GE(f.psi, 0.0);
    EXPECT_NEAR(f.psi_prime, 0.0, 1e-12);
  }
  EXPECT_EQ(psi(*m, z4(0, 1, 0, 2)), 0.0);
}

TEST(Oscillator, RejectsNonPositiveOmega) {
  EXPECT_THROW(OscillatorModel(0.0), ParameterError);
  EXPECT_THROW(oscillator(-1.0), ParameterError);
}

TEST(FreeTime, EverythingVanishes) {
  const auto m = free_time(2);
  Vector z = Vector::LinSpaced(6, -1, 1);
  const FieldSample f = sample_fields(*m, z);
  EXPECT_EQ(f.H, z[5]);
  EXPECT_EQ(f.psi, 0.0);
  EXPECT_EQ(f.psi_prime, 0.0);
  EXPECT_EQ(f.hess, Matrix::Zero(6, 6));
}

TEST(MakeModel, NamesAndParameters) {
  EXPECT_EQ(make_model("pendulum", {})->name(), "pendulum");
  const auto osc = make_model("oscillator", {{"omega", 2.0}});
  EXPECT_EQ(std::dynamic_pointer_cast<const OscillatorModel>(osc)->omega(), 2.0);
  EXPECT_EQ(make_model("free", {{"dof", 3}})->dof(), 3);
  EXPECT_THROW(make_model("double-pendulum", {}), ParameterError);
  EXPECT_THROW(make_model("pendulum", {{"omega", 1.0}}), ParameterError);
  EXPECT_THROW(make_model("oscillator", {{"omega", 0.0}}), ParameterError);
}
