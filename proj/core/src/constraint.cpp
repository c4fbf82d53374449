#include "dthsem/constraint.hpp"

#include <cmath>

namespace dth {

ConstraintSample evaluate_constraint(const HamiltonianModel& model, double lambda,
                                     const Vector& z_k, const MidpointOptions& options) {
  const MidpointSolution sol = solve_midpoint(model, lambda, z_k, options);
  ConstraintSample s;
  s.lambda = lambda;
  s.z_bar = sol.z_bar;
  s.iterations = sol.iterations;
  s.residual = sol.residual;
  s.g = checked_value(model, sol.z_bar);
  s.dg = checked_gradient(model, sol.z_bar).dot(midpoint_sensitivity(model, lambda, sol.z_bar));
  return s;
}

double g_eval(const HamiltonianModel& model, double lambda, const Vector& z_k, double tol) {
  const MidpointSolution sol = solve_midpoint(model, lambda, z_k, constraint_midpoint_options(tol));
  return checked_value(model, sol.z_bar);
}

double g_derivative(const HamiltonianModel& model, double lambda, const Vector& z_k,
                    double tol) {
  return evaluate_constraint(model, lambda, z_k, constraint_midpoint_options(tol)).dg;
}

double CubicModel::evaluate(double lambda) const {
  const double l2 = lambda * lambda;
  return H_k - psi_k * l2 / 8.0 - psi_prime_k * l2 * lambda / 24.0;
}

double CubicModel::derivative(double lambda) const {
  return -psi_k * lambda / 4.0 - psi_prime_k * lambda * lambda / 8.0;
}

double CubicModel::bound(double lambda) const {
  const double l2 = lambda * lambda;
  return K * l2 * l2;
}

double CubicModel::derivative_bound(double lambda) const {
  return 4.0 * K * std::abs(lambda * lambda * lambda);
}

CubicModel cubic_model(double H_k, double psi_k, double psi_prime_k,
                       const DerivedConstants& constants) {
  CubicModel c;
  c.H_k = H_k;
  c.psi_k = psi_k;
  c.psi_prime_k = psi_prime_k;
  c.K = constants.K;
  c.lambda_delta = constants.lambda_delta;
  return c;
}

CubicModel cubic_model(const HamiltonianModel& model, const Vector& z_k,
                       const DerivedConstants& constants, const FieldOptions& options) {
  const FieldSample f = sample_fields(model, z_k, options);
  return cubic_model(f.H, f.psi, f.psi_prime, constants);
}

}  // namespace dth
