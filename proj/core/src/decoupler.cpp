#include "dthsem/decoupler.hpp"

#include <cmath>
#include <limits>

#include "dthsem/errors.hpp"

namespace dth {

Matrix midpoint_jacobian(const HamiltonianModel& model, double lambda, const Vector& z_bar) {
  const Matrix h = checked_hessian(model, z_bar);
  const Eigen::Index half = h.rows() / 2;
  // J H = [H_lower; -H_upper] by rows.
  Matrix jh(h.rows(), h.cols());
  jh.topRows(half) = h.bottomRows(half);
  jh.bottomRows(half) = -h.topRows(half);
  return Matrix::Identity(h.rows(), h.cols()) - 0.5 * lambda * jh;
}

Vector midpoint_residual(const HamiltonianModel& model, double lambda, const Vector& z,
                         const Vector& z_bar) {
  return z_bar - z - 0.5 * lambda * apply_J(checked_gradient(model, z_bar));
}

MidpointSolution solve_midpoint(const HamiltonianModel& model, double lambda, const Vector& z,
                                const MidpointOptions& options) {
  if (!std::isfinite(lambda)) throw ParameterError("solve_midpoint: lambda is not finite");
  if (!(options.tol > 0.0)) throw ParameterError("solve_midpoint: tol must be positive");
  if (options.max_iter < 1) throw ParameterError("solve_midpoint: max_iter must be >= 1");
  if (z.size() != model.dim()) throw DimensionError("solve_midpoint: state has wrong length");
  if (!z.allFinite()) throw EvaluationError("solve_midpoint: state is not finite", z);

  MidpointSolution out;
  out.lambda = lambda;
  Vector z_bar = z;
  Vector f = midpoint_residual(model, lambda, z, z_bar);
  double res = f.norm();
  int it = 0;
  while (res > options.tol) {
    if (it >= options.max_iter) {
      throw NonconvergenceError("solve_midpoint: Newton iteration did not converge", res, it);
    }
    z_bar -= lu_solve(midpoint_jacobian(model, lambda, z_bar), f);
    f = midpoint_residual(model, lambda, z, z_bar);
    res = f.norm();
    ++it;
    if (!std::isfinite(res)) {
      throw NonconvergenceError("solve_midpoint: Newton iterate left the finite range", res, it);
    }
  }
  for (int k = 0; k < options.polish_steps && res > 0.0; ++k) {
    const Vector candidate = z_bar - lu_solve(midpoint_jacobian(model, lambda, z_bar), f);
    const Vector fc = midpoint_residual(model, lambda, z, candidate);
    if (!(fc.norm() <= res)) break;
    z_bar = candidate;
    f = fc;
    res = fc.norm();
    ++it;
  }
  out.z_bar = z_bar;
  out.z_partner = 2.0 * z_bar - z;
  out.iterations = it;
  out.residual = res;
  return out;
}

KantorovichReport kantorovich_report(const HamiltonianModel& model, double lambda,
                                     const Vector& z, const RegionBounds& bounds, double delta) {
  if (!std::isfinite(lambda)) throw ParameterError("kantorovich_report: lambda is not finite");
  KantorovichReport r;
  r.lambda_delta = derive_constants(bounds, delta).lambda_delta;

  // f(lambda, z, z) = -(lambda/2) J H_z(z)
  const Vector f0 = -0.5 * lambda * apply_J(checked_gradient(model, z));
  const Vector step = lu_solve(midpoint_jacobian(model, lambda, z), f0);
  r.eta = step.norm();
  r.alpha = r.beta * r.gamma * r.eta;

  const double bg = r.beta * r.gamma;
  if (r.alpha <= 0.5) {
    const double root = std::sqrt(1.0 - 2.0 * r.alpha);
    r.r_minus = (1.0 - root) / bg;
    r.r_plus = (1.0 + root) / bg;
  } else {
    r.r_minus = r.r_plus = std::numeric_limits<double>::quiet_NaN();
  }

  const double lam = std::abs(lambda);
  const bool perturbation_ok = lam * bounds.M2 <= 1.0 && lam * bounds.gamma_H <= 1.0;
  r.guaranteed = r.alpha < 0.5 && perturbation_ok && bounds.contains_ball(z, r.r_minus);
  return r;
}

Vector midpoint_sensitivity(const HamiltonianModel& model, double lambda, const Vector& z_bar) {
  const Vector rhs = 0.5 * apply_J(checked_gradient(model, z_bar));
  return lu_solve(midpoint_jacobian(model, lambda, z_bar), rhs);
}

}  // namespace dth
