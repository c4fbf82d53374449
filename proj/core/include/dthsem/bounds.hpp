#pragma once

#include <vector>

#include "dthsem/extphase.hpp"

namespace dth {

enum class BoundsMode { sampled, user_supplied };

/// Sup-norm and Lipschitz constants of H and psi over a box region:
///   |H_z| <= M1, |H_zz| <= M2, |H_zz(a) - H_zz(b)| <= gamma_H |a - b|,
///   |psi_z| <= N1, |psi_zz| <= N2.
/// Vectors use the Euclidean norm and matrices the Frobenius norm.
///
/// The region is the box |z_i - center_i| <= radius over the axes flagged in
/// `bounded_axes`; along the remaining axes (t or wp when the model does not
/// vary with them) it is unbounded.
struct RegionBounds {
  double M1 = 0.0;
  double M2 = 0.0;
  double gamma_H = 0.0;
  double N1 = 0.0;
  double N2 = 0.0;

  Vector center;
  double radius = 0.0;
  std::vector<bool> bounded_axes;  // empty means every axis is bounded

  int samples_per_axis = 0;
  long sample_count = 0;
  BoundsMode mode = BoundsMode::sampled;
  double safety_factor = 1.0;

  bool axis_bounded(int i) const;

  /// True if the closed ball of radius r about z lies in the region.
  bool contains_ball(const Vector& z, double r) const;
};

/// gamma_z, gamma_h, K and lambda_delta built from a RegionBounds.
struct DerivedConstants {
  double gamma_z = 0.0;
  double gamma_h = 0.0;
  double K = 0.0;
  double lambda_delta = 0.0;
  double delta = 0.5;
};

struct BoundsOptions {
  /// Worker threads for the grid sweep; 0 picks hardware concurrency.
  unsigned threads = 0;
  /// Step for finite-difference psi derivatives (<= 0: automatic).
  double psi_step = 0.0;
  /// Refuse grids larger than this many points.
  long max_points = 4'000'000;
};

/// Grid-samples the derivative norms over the box of the given radius.
///
/// Each bounded axis carries `samples_per_axis` equally spaced points,
/// endpoints included, so refining m -> 2m - 1 nests the grids. gamma_H is
/// the largest difference quotient over axis-aligned pairs at strides
/// 1, 2, 4, ... The t and wp axes are left out when the model's derivatives
/// do not change along them (from its AxisHints, otherwise by probing).
///
/// Sampled values are lower bounds of the true suprema; apply a safety
/// factor before using them in certificates.
RegionBounds estimate_bounds(const HamiltonianModel& model, const Vector& center, double radius,
                             int samples_per_axis, const BoundsOptions& options = {});

/// Copy with M1, M2, gamma_H, N1 and N2 multiplied by `factor` (>= 1).
RegionBounds with_safety_factor(RegionBounds bounds, double factor);

/// Applies the closed-form relations
///   gamma_z = 2 M1 M2 + M1^2
///   gamma_h = N1 gamma_z + M1^2 N2
///   K       = (M1^2 M2^3 + 2 gamma_h) / 32
///   lambda_delta = min(1/M2, 1/gamma_H, (1 - (1 - delta)^2) / (2 M1))
/// with a zero denominator contributing +infinity to the min.
/// Throws ParameterError unless 0 < delta < 1.
DerivedConstants derive_constants(const RegionBounds& bounds, double delta);

/// Which axes the model's derivatives actually depend on (t and wp are the
/// only candidates for exclusion). Result has one flag per coordinate.
std::vector<bool> detect_varying_axes(const HamiltonianModel& model, const Vector& center,
                                      double radius);

}  // namespace dth
