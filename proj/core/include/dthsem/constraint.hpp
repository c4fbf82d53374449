#pragma once

#include "dthsem/bounds.hpp"
#include "dthsem/decoupler.hpp"
#include "dthsem/extphase.hpp"

namespace dth {

/// g(lambda, z_k) = H(zbar(lambda, z_k)) together with its exact derivative.
struct ConstraintSample {
  double lambda = 0.0;
  double g = 0.0;
  double dg = 0.0;
  Vector z_bar;
  int iterations = 0;
  double residual = 0.0;
};

/// Midpoint settings used for constraint evaluation: the default solver
/// tolerance plus one polishing step.
inline MidpointOptions constraint_midpoint_options(double tol = 1e-12) {
  return MidpointOptions{tol, 50, 1};
}

ConstraintSample evaluate_constraint(const HamiltonianModel& model, double lambda,
                                     const Vector& z_k, const MidpointOptions& options);

/// H at the midpoint solution. Propagates decoupler errors.
double g_eval(const HamiltonianModel& model, double lambda, const Vector& z_k,
              double tol = 1e-12);

/// dg/dlambda = H_z(zbar)^T zbar_lambda, by implicit differentiation.
double g_derivative(const HamiltonianModel& model, double lambda, const Vector& z_k,
                    double tol = 1e-12);

/// g(lambda) ~ H_k - psi_k lambda^2 / 8 - psi'_k lambda^3 / 24 with
/// |error| <= K lambda^4 for |lambda| <= lambda_delta.
struct CubicModel {
  double H_k = 0.0;
  double psi_k = 0.0;
  double psi_prime_k = 0.0;
  double K = 0.0;
  double lambda_delta = 0.0;

  double evaluate(double lambda) const;
  double derivative(double lambda) const;
  /// K lambda^4.
  double bound(double lambda) const;
  /// 4 K |lambda|^3, the matching bound for the derivative.
  double derivative_bound(double lambda) const;
};

CubicModel cubic_model(const HamiltonianModel& model, const Vector& z_k,
                       const DerivedConstants& constants, const FieldOptions& options = {});

/// Same, from precomputed H_k, psi_k, psi'_k.
CubicModel cubic_model(double H_k, double psi_k, double psi_prime_k,
                       const DerivedConstants& constants);

}  // namespace dth
