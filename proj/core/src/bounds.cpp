#include "dthsem/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dthsem/errors.hpp"
#include "dthsem/parallel.hpp"

namespace dth {

bool RegionBounds::axis_bounded(int i) const {
  return bounded_axes.empty() || bounded_axes.at(static_cast<std::size_t>(i));
}

bool RegionBounds::contains_ball(const Vector& z, double r) const {
  if (center.size() != z.size()) throw DimensionError("RegionBounds: state and center differ in length");
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (!axis_bounded(static_cast<int>(i))) continue;
    if (std::abs(z[i] - center[i]) + r > radius) return false;
  }
  return true;
}

namespace {

bool derivatives_invariant_along(const HamiltonianModel& model, const Vector& center,
                                 double radius, int axis) {
  // Probe a handful of points; a shift along the axis must leave H_z and
  // H_zz untouched.
  const int d = model.dim();
  std::vector<Vector> probes;
  probes.push_back(center);
  for (int k = 0; k < d; ++k) {
    Vector z = center;
    z[k] += 0.37 * radius * ((k % 2) ? 1.0 : -1.0);
    z[(k + 1) % d] += 0.21 * radius;
    probes.push_back(z);
  }
  for (const Vector& z : probes) {
    const Vector g0 = checked_gradient(model, z);
    const Matrix h0 = checked_hessian(model, z);
    for (double shift : {radius, -0.5 * radius, 1.0}) {
      Vector zs = z;
      zs[axis] += shift;
      const Vector g1 = checked_gradient(model, zs);
      const Matrix h1 = checked_hessian(model, zs);
      const double gtol = 1e-10 * (1.0 + g0.norm());
      const double htol = 1e-10 * (1.0 + h0.norm());
      if ((g1 - g0).norm() > gtol || (h1 - h0).norm() > htol) return false;
    }
  }
  return true;
}

}  // namespace

std::vector<bool> detect_varying_axes(const HamiltonianModel& model, const Vector& center,
                                      double radius) {
  const int n = model.dof();
  std::vector<bool> varying(static_cast<std::size_t>(model.dim()), true);
  const AxisHints hints = model.axis_hints();

  const int t_axis = time_index(n);
  const bool t_free = hints.time_independent.has_value()
                          ? *hints.time_independent
                          : derivatives_invariant_along(model, center, radius, t_axis);
  varying[static_cast<std::size_t>(t_axis)] = !t_free;

  const int wp_axis = conjugate_momentum_index(n);
  const bool wp_affine = hints.affine_in_conjugate_momentum.has_value()
                             ? *hints.affine_in_conjugate_momentum
                             : derivatives_invariant_along(model, center, radius, wp_axis);
  varying[static_cast<std::size_t>(wp_axis)] = !wp_affine;
  return varying;
}

RegionBounds estimate_bounds(const HamiltonianModel& model, const Vector& center, double radius,
                             int samples_per_axis, const BoundsOptions& options) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw ParameterError("estimate_bounds: radius must be positive and finite");
  }
  if (samples_per_axis < 3) throw ParameterError("estimate_bounds: samples_per_axis must be >= 3");
  if (center.size() != model.dim()) throw DimensionError("estimate_bounds: center has wrong length");
  if (!center.allFinite()) throw ParameterError("estimate_bounds: center is not finite");

  const int d = model.dim();
  const std::vector<bool> varying = detect_varying_axes(model, center, radius);
  std::vector<int> axes;
  for (int i = 0; i < d; ++i) {
    if (varying[static_cast<std::size_t>(i)]) axes.push_back(i);
  }

  const long m = samples_per_axis;
  long total = 1;
  for (std::size_t k = 0; k < axes.size(); ++k) {
    if (total > options.max_points / m) {
      throw ParameterError("estimate_bounds: grid too large; lower samples_per_axis");
    }
    total *= m;
  }

  // Row-major strides over the sampled axes.
  std::vector<long> stride(axes.size(), 1);
  for (int k = static_cast<int>(axes.size()) - 2; k >= 0; --k) {
    stride[static_cast<std::size_t>(k)] = stride[static_cast<std::size_t>(k) + 1] * m;
  }
  auto point = [&](long idx) {
    Vector z = center;
    for (std::size_t k = 0; k < axes.size(); ++k) {
      const long ik = (idx / stride[k]) % m;
      z[axes[k]] = center[axes[k]] - radius + 2.0 * radius * static_cast<double>(ik) /
                                                  static_cast<double>(m - 1);
    }
    return z;
  };

  std::vector<double> m1(static_cast<std::size_t>(total)), m2(m1.size()), n1(m1.size()),
      n2(m1.size());
  std::vector<Matrix> hess(m1.size());

  parallel_for(static_cast<std::size_t>(total), options.threads, [&](std::size_t idx) {
    const Vector z = point(static_cast<long>(idx));
    const Vector g = checked_gradient(model, z);
    hess[idx] = checked_hessian(model, z);
    m1[idx] = g.norm();
    m2[idx] = hess[idx].norm();
    n1[idx] = psi_gradient(model, z, options.psi_step).norm();
    n2[idx] = psi_hessian(model, z, options.psi_step).norm();
  });

  RegionBounds out;
  out.M1 = *std::max_element(m1.begin(), m1.end());
  out.M2 = *std::max_element(m2.begin(), m2.end());
  out.N1 = *std::max_element(n1.begin(), n1.end());
  out.N2 = *std::max_element(n2.begin(), n2.end());

  // Axis-aligned pairs at power-of-two strides; a max over a superset of
  // the pairs of any coarser nested grid.
  double lip = 0.0;
  const double h = 2.0 * radius / static_cast<double>(m - 1);
  for (std::size_t k = 0; k < axes.size(); ++k) {
    for (long s = 1; s < m; s *= 2) {
      for (long idx = 0; idx < total; ++idx) {
        const long ik = (idx / stride[k]) % m;
        if (ik + s >= m) continue;
        const long jdx = idx + s * stride[k];
        const double num = (hess[static_cast<std::size_t>(jdx)] - hess[static_cast<std::size_t>(idx)]).norm();
        lip = std::max(lip, num / (static_cast<double>(s) * h));
      }
    }
  }
  out.gamma_H = lip;

  out.center = center;
  out.radius = radius;
  out.bounded_axes = varying;
  out.samples_per_axis = samples_per_axis;
  out.sample_count = total;
  out.mode = BoundsMode::sampled;
  out.safety_factor = 1.0;
  return out;
}

RegionBounds with_safety_factor(RegionBounds bounds, double factor) {
  if (!(factor >= 1.0) || !std::isfinite(factor)) {
    throw ParameterError("safety factor must be a finite number >= 1");
  }
  bounds.M1 *= factor;
  bounds.M2 *= factor;
  bounds.gamma_H *= factor;
  bounds.N1 *= factor;
  bounds.N2 *= factor;
  bounds.safety_factor *= factor;
  return bounds;
}

DerivedConstants derive_constants(const RegionBounds& b, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("derive_constants: delta must lie in (0, 1)");
  for (double c : {b.M1, b.M2, b.gamma_H, b.N1, b.N2}) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw ParameterError("derive_constants: bounds must be finite and nonnegative");
    }
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  auto recip = [](double x) { return x > 0.0 ? 1.0 / x : inf; };

  DerivedConstants c;
  c.delta = delta;
  c.gamma_z = 2.0 * b.M1 * b.M2 + b.M1 * b.M1;
  c.gamma_h = b.N1 * c.gamma_z + b.M1 * b.M1 * b.N2;
  c.K = (b.M1 * b.M1 * b.M2 * b.M2 * b.M2 + 2.0 * c.gamma_h) / 32.0;
  const double ball = 1.0 - (1.0 - delta) * (1.0 - delta);
  c.lambda_delta = std::min({recip(b.M2), recip(b.gamma_H), ball * recip(2.0 * b.M1)});
  return c;
}

}  // namespace dth
