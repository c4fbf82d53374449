#pragma once

#include "dthsem/bounds.hpp"
#include "dthsem/extphase.hpp"

namespace dth {

/// Solution of f(lambda, z, zbar) = zbar - z - (lambda/2) J H_z(zbar) = 0.
struct MidpointSolution {
  Vector z_bar;
  Vector z_partner;  // 2 zbar - z
  double lambda = 0.0;
  int iterations = 0;
  double residual = 0.0;  // |f| at z_bar
};

struct MidpointOptions {
  double tol = 1e-12;
  int max_iter = 50;
  /// Extra Newton steps taken after |f| <= tol. Cheap, and pushes the
  /// residual to rounding level when H(zbar) must be resolved finely.
  int polish_steps = 0;
};

/// f_zbar = I - (lambda/2) J H_zz(zbar).
Matrix midpoint_jacobian(const HamiltonianModel& model, double lambda, const Vector& z_bar);

/// Residual f(lambda, z, zbar).
Vector midpoint_residual(const HamiltonianModel& model, double lambda, const Vector& z,
                         const Vector& z_bar);

/// Newton iteration started from zbar = z. Returns the first iterate with
/// |f| <= tol (followed by `polish_steps` further steps).
/// Throws NonconvergenceError after max_iter steps and LinearSolveError when
/// f_zbar is numerically singular.
MidpointSolution solve_midpoint(const HamiltonianModel& model, double lambda, const Vector& z,
                                const MidpointOptions& options);

inline MidpointSolution solve_midpoint(const HamiltonianModel& model, double lambda,
                                       const Vector& z, double tol = 1e-12, int max_iter = 50) {
  return solve_midpoint(model, lambda, z, MidpointOptions{tol, max_iter, 0});
}

/// Newton-Kantorovich data for the midpoint equation at zbar0 = z.
struct KantorovichReport {
  double alpha = 0.0;
  double beta = 2.0;
  double gamma = 0.5;
  double eta = 0.0;
  double r_minus = 0.0;
  double r_plus = 0.0;
  double lambda_delta = 0.0;
  /// alpha < 1/2, |lambda| small enough for beta and gamma to hold, and the
  /// closed ball B(z, r_minus) inside the bounded region.
  bool guaranteed = false;
};

/// beta = 2 and gamma = 1/2 are the constants the decoupling argument
/// establishes for |lambda| <= min(1/M2, 1/gamma_H); eta is computed from an
/// actual Newton step. alpha >= 1/2 gives guaranteed = false with r_minus and
/// r_plus set to NaN.
KantorovichReport kantorovich_report(const HamiltonianModel& model, double lambda,
                                     const Vector& z, const RegionBounds& bounds,
                                     double delta = 0.5);

/// zbar_lambda = (1/2) f_zbar^{-1} J H_z(zbar), the lambda-derivative of the
/// decoupling function at a converged midpoint.
Vector midpoint_sensitivity(const HamiltonianModel& model, double lambda, const Vector& z_bar);

}  // namespace dth
