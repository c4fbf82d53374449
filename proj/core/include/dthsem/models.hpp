#pragma once

#include <map>
#include <memory>
#include <string>

#include "dthsem/extphase.hpp"

namespace dth {

/// Nonlinear pendulum, unit mass and unit gravity-length:
///   H(q, t, p, wp) = wp + p^2/2 - cos q.
/// Carries analytic psi_z and psi_zz so it can serve as an oracle for the
/// finite-difference paths.
class PendulumModel final : public HamiltonianModel {
 public:
  int dof() const override { return 1; }
  double value(const Vector& z) const override;
  Vector gradient(const Vector& z) const override;
  Matrix hessian(const Vector& z) const override;
  std::optional<Vector> psi_gradient(const Vector& z) const override;
  std::optional<Matrix> psi_hessian(const Vector& z) const override;
  AxisHints axis_hints() const override { return {true, true}; }
  std::string name() const override { return "pendulum"; }

  // Closed forms on the (q, p) plane.
  static double psi_closed(double q, double p);        // p^2 cos q + sin^2 q
  static double psi_prime_closed(double q, double p);  // -p^3 sin q
};

/// Linear oscillator H = wp + (p^2 + omega^2 q^2)/2. psi' vanishes
/// identically and the midpoint equation is linear.
class OscillatorModel final : public HamiltonianModel {
 public:
  /// Throws ParameterError unless omega > 0.
  explicit OscillatorModel(double omega = 1.0);

  double omega() const noexcept { return omega_; }

  int dof() const override { return 1; }
  double value(const Vector& z) const override;
  Vector gradient(const Vector& z) const override;
  Matrix hessian(const Vector& z) const override;
  std::optional<Vector> psi_gradient(const Vector& z) const override;
  std::optional<Matrix> psi_hessian(const Vector& z) const override;
  AxisHints axis_hints() const override { return {true, true}; }
  std::string name() const override { return "oscillator"; }

 private:
  double omega_;
};

/// H = wp: the free-time system. Every curvature quantity vanishes.
class FreeTimeModel final : public HamiltonianModel {
 public:
  explicit FreeTimeModel(int dof = 1);
  int dof() const override { return dof_; }
  double value(const Vector& z) const override;
  Vector gradient(const Vector& z) const override;
  Matrix hessian(const Vector& z) const override;
  std::optional<Vector> psi_gradient(const Vector& z) const override;
  std::optional<Matrix> psi_hessian(const Vector& z) const override;
  AxisHints axis_hints() const override { return {true, true}; }
  std::string name() const override { return "free"; }

 private:
  int dof_;
};

std::shared_ptr<const HamiltonianModel> pendulum();
std::shared_ptr<const HamiltonianModel> oscillator(double omega);
std::shared_ptr<const HamiltonianModel> free_time(int dof = 1);

/// Looks a built-in model up by name ("pendulum", "oscillator", "free").
/// Recognised parameters: "omega" for the oscillator, "dof" for free.
/// Throws ParameterError for unknown names or parameters.
std::shared_ptr<const HamiltonianModel> make_model(const std::string& name,
                                                   const std::map<std::string, double>& params);

}  // namespace dth
