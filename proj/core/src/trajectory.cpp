#include "dthsem/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dthsem/errors.hpp"

namespace dth {

std::string to_string(BranchPolicy policy) {
  return policy == BranchPolicy::smallest ? "smallest" : "follow-ghost";
}

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::bifurcation: return "bifurcation";
    case EventKind::ghost_taken: return "ghost-taken";
    case EventKind::terminated: return "terminated";
    case EventKind::fixed_point: return "fixed-point";
    case EventKind::prediction_indeterminate: return "prediction-indeterminate";
  }
  return "?";
}

std::string to_string(VertexKind kind) {
  switch (kind) {
    case VertexKind::pass_through: return "pass-through";
    case VertexKind::bifurcates: return "bifurcates";
    case VertexKind::begins_or_ends: return "begins-or-ends";
    case VertexKind::none: return "none";
    case VertexKind::fixed_point: return "fixed-point";
    case VertexKind::indeterminate: return "indeterminate";
    case VertexKind::degenerate: return "degenerate";
  }
  return "?";
}

std::size_t DTHTrajectory::count(EventKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      events.begin(), events.end(), [kind](const TrajectoryEvent& e) { return e.kind == kind; }));
}

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------

StepResult step(const HamiltonianModel& model, const Vector& z_k, Direction direction,
                const StepOptions& opt) {
  const int sign = direction == Direction::forward ? 1 : -1;
  PredictionOptions po = opt.prediction;
  po.zero_tol = opt.solve.tol_g;

  StepResult res;
  res.prediction = predict_roots(model, z_k, opt.constants, po);
  const RootPrediction& pred = res.prediction;

  if (pred.zero_root) {
    res.fixed_point = true;
    res.lambda = 0.0;
    res.z_next = z_k;
    res.z_mid = z_k;
    res.energy_residual = std::abs(pred.cubic.H_k);
    res.theorem_backed = pred.region.tag != RegionTag::degenerate;
    res.roots.roots.push_back(Root{0.0, res.energy_residual, RootKind::zero, res.theorem_backed});
    return res;
  }

  RootPrediction side = pred;
  side.segments.clear();
  for (const SearchSegment& s : pred.segments) {
    if ((sign > 0 && s.lo >= 0.0) || (sign < 0 && s.hi <= 0.0)) side.segments.push_back(s);
  }
  res.roots = solve_roots(model, z_k, side, opt.solve);

  auto right_sign = [sign](const Root& r) { return sign * r.lambda > 0.0; };
  std::vector<Root> candidates;
  for (const Root& r : res.roots.roots) {
    if (right_sign(r)) candidates.push_back(r);
  }

  if (candidates.empty()) {
    double w = opt.search_radius > 0.0 ? opt.search_radius : opt.constants.lambda_delta;
    const double L = pred.capital_lambda;
    if (std::isfinite(w) && w > L) {
      std::vector<Root> far;
      try {
        far = sign > 0 ? scan_roots(model, z_k, L, w, opt.search_points, opt.solve)
                       : scan_roots(model, z_k, -w, -L, opt.search_points, opt.solve);
      } catch (const Error& e) {
        res.roots.brackets.push_back({sign > 0 ? L : -w, sign > 0 ? w : -L, false, false, e.what()});
      }
      for (const Root& r : far) {
        if (right_sign(r)) {
          candidates.push_back(r);
          res.roots.roots.push_back(r);
        }
      }
      res.beyond_window = !candidates.empty();
    }
  }
  if (candidates.empty()) {
    throw StepNonexistenceError(sign > 0 ? "no forward multiplier" : "no backward multiplier",
                                pred.describe_side(sign));
  }

  auto by_magnitude = [](const Root& a, const Root& b) {
    return std::abs(a.lambda) < std::abs(b.lambda);
  };
  std::sort(candidates.begin(), candidates.end(), by_magnitude);
  const bool has_ghost = std::any_of(candidates.begin(), candidates.end(),
                                     [](const Root& r) { return r.kind == RootKind::ghost; });
  const bool has_regular = std::any_of(candidates.begin(), candidates.end(),
                                       [](const Root& r) { return r.kind != RootKind::ghost; });
  Root chosen = candidates.front();
  if (opt.policy == BranchPolicy::follow_ghost && has_ghost) {
    chosen = *std::find_if(candidates.begin(), candidates.end(),
                           [](const Root& r) { return r.kind == RootKind::ghost; });
    res.ghost_taken = true;
  }
  res.bifurcation = has_ghost && has_regular;
  res.theorem_backed = chosen.theorem_backed;
  res.lambda = chosen.lambda;

  const MidpointSolution sol = solve_midpoint(model, chosen.lambda, z_k, opt.solve.midpoint);
  res.z_mid = sol.z_bar;
  res.z_next = sol.z_partner;
  res.energy_residual = std::abs(checked_value(model, sol.z_bar));
  return res;
}

DTHTrajectory propagate(const HamiltonianModel& model, const Vector& z0, int steps,
                        const StepOptions& opt) {
  if (steps < 1) throw ParameterError("propagate: step count must be >= 1");
  if (z0.size() != model.dim()) throw DimensionError("propagate: initial state has wrong length");
  if (!z0.allFinite()) throw ParameterError("propagate: initial state is not finite");

  DTHTrajectory traj;
  traj.dof = model.dof();
  traj.vertices.push_back(z0);
  Vector z = z0;
  for (int k = 0; k < steps; ++k) {
    StepResult r;
    try {
      r = step(model, z, Direction::forward, opt);
    } catch (const StepNonexistenceError& e) {
      traj.events.push_back({k, EventKind::terminated, std::string(e.what()) + ": " + e.verdict()});
      break;
    } catch (const Error& e) {
      traj.events.push_back({k, EventKind::terminated, std::string("solver failure: ") + e.what()});
      break;
    }
    if (r.fixed_point) {
      traj.events.push_back(
          {k, EventKind::fixed_point, "H_k = " + fmt(r.prediction.cubic.H_k) + ", lambda = 0"});
      break;
    }
    if (r.bifurcation) {
      std::string detail = "ghost root(s) at";
      for (const Root& root : r.roots.roots) {
        if (root.kind == RootKind::ghost) detail += " " + fmt(root.lambda);
      }
      traj.events.push_back({k, EventKind::bifurcation, detail});
    }
    if (r.ghost_taken) {
      traj.events.push_back({k, EventKind::ghost_taken, "lambda = " + fmt(r.lambda)});
    }
    if (!r.theorem_backed) {
      std::string detail = r.beyond_window
                               ? "root beyond theorem window: lambda = " + fmt(r.lambda) +
                                     ", Lambda = " + fmt(r.prediction.capital_lambda)
                               : "root not covered by an existence statement: lambda = " +
                                     fmt(r.lambda);
      detail += "; window verdict " + r.prediction.describe_side(1);
      traj.events.push_back({k, EventKind::prediction_indeterminate, detail});
    }
    traj.multipliers.push_back(r.lambda);
    traj.midpoints.push_back(r.z_mid);
    traj.energy_residuals.push_back(r.energy_residual);
    traj.vertices.push_back(r.z_next);
    z = r.z_next;
  }
  return traj;
}

// ---------------------------------------------------------------------------

VertexClass classify_vertex(const RootPrediction& p, double shrink) {
  VertexClass v;
  v.region = p.region.tag;
  v.ratio = p.ratio;
  v.capital_lambda = p.capital_lambda;
  v.S = p.S;
  const double r = p.ratio;
  const double L = p.capital_lambda;

  // Region I statements, usable in region II after shrinking Lambda so
  // that S < 6/5.
  auto large_psi = [&](double lam, double pass_limit) {
    if (p.zero_root) {
      v.kind = VertexKind::fixed_point;
      v.label = "(ii)";
    } else if (r < 0.0) {
      v.kind = VertexKind::none;
      v.label = "(i)";
    } else if (r < pass_limit) {
      v.kind = VertexKind::pass_through;
      v.label = "(iii)";
    } else {
      v.kind = VertexKind::indeterminate;
    }
    v.capital_lambda = lam;
  };

  switch (p.region.tag) {
    case RegionTag::degenerate:
      v.kind = VertexKind::degenerate;
      break;
    case RegionTag::I:
      large_psi(L, 3.0 / 32.0 * L * L);
      break;
    case RegionTag::II: {
      const double rho = *p.rho;
      const double S = *p.S;
      auto small_window = [&] {
        const double lb = std::min(L, shrink * 1.2 * std::abs(rho));
        const double sb = lb / std::abs(rho);
        const double limit =
            std::min(lb * lb * (6.0 + sb) / 48.0, lb * lb * (2.0 - sb) / 16.0);
        large_psi(lb, limit);
        v.S = sb;
      };
      if (S > 6.0) {
        const double t_iii = L * L * (6.0 - S) / 48.0;
        const double t_pass = std::min(L * L * (6.0 + S) / 48.0, 9.0 / 125.0 * rho * rho);
        if (p.zero_root) {
          v.kind = VertexKind::bifurcates;
          v.label = "(v)";
        } else if (r < 0.0 && r > t_iii) {
          v.kind = VertexKind::begins_or_ends;
          v.label = "(iv)";
        } else if (r > 0.0 && r < t_pass) {
          v.kind = VertexKind::bifurcates;
          v.label = "(vi)";
        } else {
          small_window();
        }
      } else {
        small_window();
      }
      break;
    }
    case RegionTag::III:
      if (p.zero_root) {
        v.kind = VertexKind::fixed_point;
        v.label = "(viii)";
      } else if (std::abs(r) < L * L * L / 48.0) {
        v.kind = VertexKind::begins_or_ends;
        v.label = "(vii)";
      } else if (std::abs(r) > L * L * L / 16.0) {
        v.kind = VertexKind::none;
        v.label = "EU_3(iv)";
      } else {
        v.kind = VertexKind::indeterminate;
      }
      break;
  }
  return v;
}

VertexClass classify_vertex(const HamiltonianModel& model, const Vector& z0,
                            const DerivedConstants& constants, const PredictionOptions& options) {
  return classify_vertex(predict_roots(model, z0, constants, options), options.shrink);
}

VertexClass classify_vertex(const HamiltonianModel& model, const Vector& z0,
                            const RegionBounds& bounds, const DerivedConstants& constants,
                            const PredictionOptions& options) {
  if (!bounds.contains_ball(z0, 0.0)) {
    throw PreconditionError("classify_vertex: point lies outside the bounded region");
  }
  return classify_vertex(model, z0, constants, options);
}

// ---------------------------------------------------------------------------

double symplectic_defect(const HamiltonianModel& model, double lambda, const Vector& z,
                         const ConservationOptions& options) {
  if (!(options.fd_step > 0.0)) throw ParameterError("symplectic_defect: fd_step must be positive");
  const Eigen::Index d = z.size();
  const double h = options.fd_step;
  Matrix D(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    Vector zp = z, zm = z;
    zp[i] += h;
    zm[i] -= h;
    const Vector fp = solve_midpoint(model, lambda, zp, options.midpoint).z_partner;
    const Vector fm = solve_midpoint(model, lambda, zm, options.midpoint).z_partner;
    D.col(i) = (fp - fm) / (2.0 * h);
  }
  const Matrix J = symplectic_matrix(model.dof());
  return (D.transpose() * J * D - J).norm();
}

ConservationReport conservation_report(const HamiltonianModel& model,
                                       const DTHTrajectory& traj,
                                       const ConservationOptions& options) {
  if (traj.vertices.empty()) throw PreconditionError("conservation_report: empty trajectory");
  if (traj.midpoints.size() + 1 != traj.vertices.size() ||
      traj.multipliers.size() != traj.midpoints.size()) {
    throw PreconditionError("conservation_report: inconsistent trajectory lists");
  }
  ConservationReport rep;
  const int n = model.dof();
  const int wp = conjugate_momentum_index(n);
  const auto varying = detect_varying_axes(model, traj.vertices.front(), 1.0);
  rep.wp_conservation_expected = !varying[static_cast<std::size_t>(time_index(n))];
  const int stride = std::max(1, options.symplectic_stride);

  for (std::size_t k = 0; k < traj.multipliers.size(); ++k) {
    const Vector& a = traj.vertices[k];
    const Vector& b = traj.vertices[k + 1];
    const Vector& m = traj.midpoints[k];
    const double lam = traj.multipliers[k];
    rep.max_energy_residual = std::max(rep.max_energy_residual, std::abs(checked_value(model, m)));
    rep.max_wp_change = std::max(rep.max_wp_change, std::abs(b[wp] - a[wp]));
    const Vector dz = b - a - lam * apply_J(checked_gradient(model, m));
    rep.max_midpoint_identity = std::max(rep.max_midpoint_identity, dz.norm());
    rep.max_midpoint_gap = std::max(rep.max_midpoint_gap, (m - 0.5 * (a + b)).norm());
    if (static_cast<int>(k) % stride == 0) {
      const double defect = symplectic_defect(model, lam, a, options);
      rep.symplectic_defects.push_back(defect);
      rep.max_symplectic_defect = std::max(rep.max_symplectic_defect, defect);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------

double choose_conjugate_momentum(const HamiltonianModel& model, const Vector& q0, double t0,
                                 const Vector& p0, double lambda_target,
                                 const StepOptions& options) {
  if (!(lambda_target > 0.0) || !std::isfinite(lambda_target)) {
    throw ParameterError("choose_conjugate_momentum: lambda_target must be positive");
  }
  if (q0.size() != model.dof() || p0.size() != model.dof()) {
    throw DimensionError("choose_conjugate_momentum: q0/p0 length differs from the model's dof");
  }
  const int wp = conjugate_momentum_index(model.dof());
  Vector z = ExtendedState::from_parts(q0, t0, p0, 0.0).coords();

  const double psi0 = psi(model, z);
  const double tau = options.prediction.tolerances.psi_scale;
  if (std::abs(psi0) <= tau) {
    throw UnsupportedRegionError(
        "choose_conjugate_momentum: psi(z0) is zero; use region III analysis (H_k/psi'_k) instead");
  }

  // Newton on F(wp) = H(z) - psi(z) lambda^2 / 8; exact in one step when H is
  // affine in wp.
  const double l2 = lambda_target * lambda_target;
  auto residual = [&](const Vector& x) { return checked_value(model, x) - psi(model, x) * l2 / 8.0; };
  for (int it = 0; it < 30; ++it) {
    const double F = residual(z);
    const double dH = checked_gradient(model, z)[wp];
    if (dH == 0.0) throw UnsupportedRegionError("choose_conjugate_momentum: H does not depend on wp");
    z[wp] -= F / dH;
    if (std::abs(F) <= 1e-15 * (1.0 + std::abs(z[wp]))) break;
  }
  const double wp_a = z[wp];

  auto forward_lambda = [&](double w) -> std::optional<double> {
    Vector x = z;
    x[wp] = w;
    try {
      const StepResult r = step(model, x, Direction::forward, options);
      if (r.fixed_point || !(r.lambda > 0.0)) return std::nullopt;
      return r.lambda;
    } catch (const Error&) {
      return std::nullopt;
    }
  };

  const auto lam_a = forward_lambda(wp_a);
  if (!lam_a) return wp_a;
  const double dH = checked_gradient(model, z)[wp];
  const double wp_b = wp_a + psi(model, z) * (l2 - *lam_a * *lam_a) / (8.0 * dH);
  const auto lam_b = forward_lambda(wp_b);
  if (!lam_b) return wp_a;
  if (*lam_b == *lam_a) return wp_b;
  const double wp_c = wp_b + (lambda_target - *lam_b) * (wp_b - wp_a) / (*lam_b - *lam_a);
  return forward_lambda(wp_c) ? wp_c : wp_b;
}

}  // namespace dth
