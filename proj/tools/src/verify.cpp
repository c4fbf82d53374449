#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

#include "dthsem/cli/commands.hpp"

namespace dth::cli {
namespace {

std::string num(double x) {
  std::ostringstream ss;
  ss.precision(3);
  ss << x;
  return ss.str();
}

struct Suite {
  const Config& cfg;
  std::shared_ptr<const HamiltonianModel> model;
  Constants k;
  std::mt19937_64 rng;
  std::vector<CheckResult> results;

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

  // Random point well inside the bounded region; unbounded axes vary over
  // [-1, 1] about the centre.
  Vector sample_state() {
    Vector z(model->dim());
    for (int i = 0; i < model->dim(); ++i) {
      const double w = k.bounds.axis_bounded(i) ? 0.75 * k.bounds.radius : 1.0;
      z[i] = k.bounds.center[i] + uniform(-w, w);
    }
    return z;
  }

  double sample_lambda() {
    const double ld = std::isfinite(k.derived.lambda_delta) ? k.derived.lambda_delta : 1.0;
    return uniform(-ld, ld);
  }

  void check(const std::string& module, const std::string& name,
             const std::function<std::pair<bool, std::string>()>& body) {
    CheckResult r{module, name, false, ""};
    try {
      auto [passed, detail] = body();
      r.passed = passed;
      r.detail = detail;
    } catch (const std::exception& e) {
      r.detail = std::string("exception: ") + e.what();
    }
    results.push_back(std::move(r));
  }
};

double solve_wp(const HamiltonianModel& model, Vector z, double target) {
  const int iw = conjugate_momentum_index(model.dof());
  z[iw] = 0.0;
  const double h0 = model.value(z);
  const double h1 = model.gradient(z)[iw];
  if (std::abs(h1) < 1e-14) throw PreconditionError("H does not depend on wp");
  return (target - h0) / h1;
}

// Sign changes of g over `points` samples strictly inside (lo, hi). Samples
// with |g| <= tol_g carry no usable sign and are skipped.
int dense_sign_changes(const HamiltonianModel& model, const Vector& z, double lo, double hi,
                       int points, double tol, double tol_g) {
  int changes = 0;
  double prev = 0.0;
  for (int i = 1; i <= points; ++i) {
    const double lam = lo + (hi - lo) * i / (points + 1);
    const double g = g_eval(model, lam, z, tol);
    if (std::abs(g) <= tol_g) continue;
    if (prev != 0.0 && (g > 0.0) != (prev > 0.0)) ++changes;
    prev = g;
  }
  return changes;
}

struct ConsistencyStats {
  int points = 0;
  int degenerate = 0;
  int claims_checked = 0;
  int pass_through = 0;
  int monotone_segments = 0;
  int region_II = 0;
  std::vector<std::string> failures;
  std::vector<std::string> monotone_failures;
  std::vector<std::string> residual_failures;
  std::vector<std::string> pass_failures;
  std::vector<std::string> s_failures;
  double max_residual = 0.0;
};

// wp chosen so the ratio H/psi (or H/psi') lands in a different case of the
// existence statements depending on `variant`.
Vector place_ratio(const HamiltonianModel& model, Vector z, const DerivedConstants& k,
                   const PredictionOptions& po, int variant) {
  z[conjugate_momentum_index(model.dof())] = solve_wp(model, z, 0.0);
  RootPrediction p0;
  try {
    p0 = predict_roots(model, z, k, po);
  } catch (const UnsupportedRegionError&) {
    return z;
  }
  const auto& th = p0.thresholds;
  double ratio = 0.0;
  switch (p0.region.tag) {
    case RegionTag::I: {
      const double f[] = {-1.0, 0.0, 0.5, 2.0};
      ratio = f[variant % 4] * th.at("exists_below");
      break;
    }
    case RegionTag::III: {
      const double f[] = {-0.5, 0.0, 0.5, 4.0};
      ratio = f[variant % 4] * th.at("exists_below");
      break;
    }
    case RegionTag::II: {
      const double pos = 0.5 * std::min(th.at("iv_upper"), th.at("vi_upper"));
      const double options[] = {pos, 0.0, -0.5 * std::abs(th.at("iii_lower")), 2.0 * th.at("vii_lower")};
      ratio = options[variant % 4];
      break;
    }
    case RegionTag::degenerate:
      return z;
  }
  const double scale = p0.region.tag == RegionTag::III ? p0.region.psi_prime_k : p0.region.psi_k;
  z[conjugate_momentum_index(model.dof())] = solve_wp(model, z, ratio * scale);
  return z;
}

void consistency_at(const HamiltonianModel& model, const Vector& z, const DerivedConstants& k,
                    const PredictionOptions& po, const SolveOptions& so, double shrink,
                    ConsistencyStats& st) {
  ++st.points;
  RootPrediction pred;
  try {
    pred = predict_roots(model, z, k, po);
  } catch (const UnsupportedRegionError&) {
    ++st.degenerate;
    return;
  }
  if (pred.region.tag == RegionTag::degenerate) {
    ++st.degenerate;
    return;
  }
  const MultiplierSet roots = solve_roots(model, z, pred, so);
  auto where = [&](const std::string& what) {
    std::ostringstream ss;
    ss << what << " at (";
    for (int i = 0; i < z.size(); ++i) ss << (i ? "," : "") << num(z[i]);
    ss << ")";
    return ss.str();
  };

  for (const Claim& c : pred.claims) {
    int n = 0;
    for (const Root& r : roots.roots) {
      if (c.contains(r.lambda)) ++n;
    }
    if (c.verdict == Verdict::exists_unique) {
      ++st.claims_checked;
      if (n != 1) st.failures.push_back(where(c.label + " expects one root, found " + std::to_string(n)));
    } else if (c.verdict == Verdict::exists) {
      ++st.claims_checked;
      if (n < 1) st.failures.push_back(where(c.label + " expects a root, found none"));
    } else if (c.verdict == Verdict::none) {
      ++st.claims_checked;
      const int changes = dense_sign_changes(model, z, c.lo, c.hi, 1024, so.midpoint.tol, so.tol_g);
      if (n != 0 || changes != 0) {
        st.failures.push_back(where(c.label + " expects none, solver " + std::to_string(n) +
                                    ", scan " + std::to_string(changes)));
      }
    }
  }

  for (const Root& r : roots.roots) {
    const double g = std::abs(g_eval(model, r.lambda, z, so.midpoint.tol));
    st.max_residual = std::max(st.max_residual, g);
    if (g > so.tol_g) st.residual_failures.push_back(where("|g| = " + num(g)));
  }

  for (const SearchSegment& s : pred.segments) {
    if (!s.monotone || !(s.hi > s.lo)) continue;
    ++st.monotone_segments;
    int pos = 0, neg = 0;
    for (int i = 0; i < 128; ++i) {
      const double lam = s.lo + (s.hi - s.lo) * (i + 0.5) / 128.0;
      const double d = g_derivative(model, lam, z, so.midpoint.tol);
      if (d > 0.0) ++pos;
      if (d < 0.0) ++neg;
    }
    if (pos > 0 && neg > 0) {
      st.monotone_failures.push_back(where("segment (" + num(s.lo) + ", " + num(s.hi) + ")"));
    }
  }

  const VertexClass v = classify_vertex(pred, shrink);
  if (v.kind == VertexKind::pass_through) {
    ++st.pass_through;
    if (!roots.lambda_minus() || !roots.lambda_plus()) {
      st.pass_failures.push_back(where("pass-through " + v.label + " without both roots"));
    }
  }

  if (pred.region.tag == RegionTag::II) {
    ++st.region_II;
    // Roots in s-units, lambda = -rho s, by a scan and bisection in s.
    const double rho = *pred.rho;
    const double S = *pred.S;
    auto gs = [&](double s) { return g_eval(model, -rho * s, z, so.midpoint.tol); };
    std::vector<double> s_roots;
    const int n = 2048;
    double s_prev = -S * (1.0 - 1.0 / n);
    double g_prev = gs(s_prev);
    for (int i = 1; i < n; ++i) {
      const double s = -S + 2.0 * S * (i + 0.5) / n;
      const double g = gs(s);
      if ((g > 0.0) != (g_prev > 0.0)) {
        double a = s_prev, b = s, ga = g_prev;
        while (std::abs(b - a) * std::abs(rho) > so.tol_lambda) {
          const double m = 0.5 * (a + b);
          if (m == a || m == b) break;
          const double gm = gs(m);
          if (gm == 0.0) { a = b = m; break; }
          if ((gm > 0.0) == (ga > 0.0)) { a = m; ga = gm; } else { b = m; }
        }
        s_roots.push_back(0.5 * (a + b));
      }
      s_prev = s;
      g_prev = g;
    }
    for (double s : s_roots) {
      const double lam = -rho * s;
      const double slope = std::abs(g_derivative(model, lam, z, so.midpoint.tol));
      const double tol = std::max(so.tol_lambda, 4.0 * so.tol_g / std::max(slope, 1e-300));
      const bool matched = std::any_of(roots.roots.begin(), roots.roots.end(),
                                       [&](const Root& r) { return std::abs(r.lambda - lam) <= tol; });
      if (!matched) st.s_failures.push_back(where("s-root " + num(s) + " unmatched"));
    }
  }
}

std::string first_of(const std::vector<std::string>& v) {
  return v.empty() ? "" : "; first: " + v.front();
}

// Vertices of a run that stops at the first vertex with t >= t_end.
struct Path {
  std::vector<double> t;
  std::vector<Vector> z;
};

Path run_until(const HamiltonianModel& model, const Vector& q0, const Vector& p0,
               double lambda_target, const StepOptions& opt, double t_end) {
  const double wp = choose_conjugate_momentum(model, q0, 0.0, p0, lambda_target, opt);
  Vector z = ExtendedState::from_parts(q0, 0.0, p0, wp).coords();
  const int it = time_index(model.dof());
  Path path;
  path.t.push_back(z[it]);
  path.z.push_back(z);
  for (int guard = 0; z[it] < t_end && guard < 1000000; ++guard) {
    z = step(model, z, Direction::forward, opt).z_next;
    path.t.push_back(z[it]);
    path.z.push_back(z);
  }
  return path;
}

// Cubic Lagrange interpolation of the reference path at time t.
Vector interpolate(const Path& ref, double t) {
  const std::size_t i = std::upper_bound(ref.t.begin(), ref.t.end(), t) - ref.t.begin();
  const std::size_t s = std::min(std::max<std::size_t>(i, 2) - 2, ref.t.size() - 4);
  Vector out = Vector::Zero(ref.z.front().size());
  for (std::size_t a = s; a < s + 4; ++a) {
    double w = 1.0;
    for (std::size_t b = s; b < s + 4; ++b) {
      if (b != a) w *= (t - ref.t[b]) / (ref.t[a] - ref.t[b]);
    }
    out += w * ref.z[a];
  }
  return out;
}

// Error in the (q, p) components only; t is matched by construction and wp
// differs between runs by design.
double endpoint_error(const Path& run, const Path& ref, int dof) {
  const Vector a = run.z.back();
  const Vector b = interpolate(ref, run.t.back());
  double e = 0.0;
  for (int i = 0; i < dof; ++i) {
    e += std::pow(a[i] - b[i], 2);
    e += std::pow(a[momentum_index(dof, i)] - b[momentum_index(dof, i)], 2);
  }
  return std::sqrt(e);
}

void extphase_checks(Suite& s) {
  const int d = s.model->dim();
  s.check("extphase", "apply_J isometry, J^2 = -I", [&] {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      Vector v(d);
      for (int j = 0; j < d; ++j) v[j] = s.uniform(-10, 10);
      const Vector jv = apply_J(v);
      worst = std::max(worst, std::abs(jv.norm() - v.norm()) / v.norm());
      worst = std::max(worst, (apply_J(jv) + v).norm());
    }
    return std::pair{worst <= 1e-15, "max deviation " + num(worst)};
  });
  s.check("extphase", "psi equals quadratic form of H_z, H_zz", [&] {
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const Vector z = s.sample_state();
      const FieldSample f = sample_fields(*s.model, z);
      const Vector a = apply_J(f.grad);
      const double q = a.dot(f.hess * a);
      worst = std::max(worst, std::abs(f.psi - q) / std::max(1.0, std::abs(q)));
    }
    return std::pair{worst <= 1e-12, "max relative deviation " + num(worst)};
  });
  s.check("extphase", "FD gradient error is second order", [&] {
    int used = 0, bad = 0;
    for (int i = 0; i < 20; ++i) {
      const Vector z = s.sample_state();
      const Vector g = s.model->gradient(z);
      double e[2];
      for (int h = 0; h < 2; ++h) {
        const double step = h == 0 ? 1e-2 : 5e-3;
        Vector fd(d);
        for (int j = 0; j < d; ++j) {
          Vector zp = z, zm = z;
          zp[j] += step;
          zm[j] -= step;
          fd[j] = (s.model->value(zp) - s.model->value(zm)) / (2 * step);
        }
        e[h] = (fd - g).norm();
      }
      if (e[0] < 1e-9) continue;  // exact (e.g. quadratic) or too flat to tell
      ++used;
      const double ratio = e[0] / e[1];
      if (ratio < 3.5 || ratio > 4.5) ++bad;
    }
    return std::pair{bad == 0, std::to_string(used) + " points with resolvable error, " +
                                   std::to_string(bad) + " off the 4x ratio"};
  });
  s.check("extphase", "autonomize: dH/dt = dHc/dt, dH/dwp = 1", [&] {
    ClassicalHamiltonian c;
    c.dof = 1;
    c.value = [](const Vector& y) { return 0.5 * y[2] * y[2] - std::cos(y[0]) + y[1] * y[2]; };
    c.gradient = [](const Vector& y) {
      Vector g(3);
      g << std::sin(y[0]), y[2], y[2] + y[1];
      return g;
    };
    const FunctionModel lifted = autonomize(c);
    bool exact = true;
    for (int i = 0; i < 20; ++i) {
      Vector z(4);
      z << s.uniform(-2, 2), s.uniform(-2, 2), s.uniform(-2, 2), s.uniform(-2, 2);
      const Vector g = lifted.gradient(z);
      const Vector gc = c.gradient(z.head(3));
      exact = exact && g[1] == gc[1] && g[3] == 1.0;
    }
    return std::pair{exact, exact ? "exact on 20 points" : "mismatch"};
  });
}

void model_checks(Suite& s) {
  const int d = s.model->dim();
  s.check("models", "analytic derivatives match central differences", [&] {
    double worst_g = 0.0, worst_h = 0.0;
    const double h = 1e-5;
    for (int i = 0; i < 20; ++i) {
      const Vector z = s.sample_state();
      const Vector g = s.model->gradient(z);
      const Matrix hs = s.model->hessian(z);
      for (int j = 0; j < d; ++j) {
        Vector zp = z, zm = z;
        zp[j] += h;
        zm[j] -= h;
        const double fd = (s.model->value(zp) - s.model->value(zm)) / (2 * h);
        worst_g = std::max(worst_g, std::abs(fd - g[j]));
        const Vector col = (s.model->gradient(zp) - s.model->gradient(zm)) / (2 * h);
        worst_h = std::max(worst_h, (col - hs.col(j)).norm());
      }
    }
    return std::pair{worst_g <= 1e-7 && worst_h <= 1e-7,
                     "gradient " + num(worst_g) + ", hessian " + num(worst_h)};
  });
  s.check("models", "psi, psi' agree between analytic and FD paths", [&] {
    auto m = s.model;
    FunctionModel fd_model(
        m->dof(), [m](const Vector& z) { return m->value(z); },
        [m](const Vector& z) { return m->gradient(z); }, [m](const Vector& z) { return m->hessian(z); });
    double worst = 0.0, worst_closed = 0.0;
    const bool is_pendulum = m->name() == "pendulum";
    for (int i = 0; i < 30; ++i) {
      const Vector z = s.sample_state();
      const FieldSample a = sample_fields(*m, z);
      const FieldSample b = sample_fields(fd_model, z);
      worst = std::max({worst, std::abs(a.psi - b.psi), std::abs(a.psi_prime - b.psi_prime)});
      if (is_pendulum) {
        worst_closed = std::max({worst_closed,
                                 std::abs(a.psi - PendulumModel::psi_closed(z[0], z[2])),
                                 std::abs(a.psi_prime - PendulumModel::psi_prime_closed(z[0], z[2]))});
      }
    }
    std::string detail = "FD path " + num(worst);
    if (is_pendulum) detail += ", closed forms " + num(worst_closed);
    return std::pair{worst <= 1e-8 && worst_closed <= 1e-12, detail};
  });
}

bool dominates(const RegionBounds& big, const RegionBounds& small) {
  return big.M1 >= small.M1 && big.M2 >= small.M2 && big.gamma_H >= small.gamma_H &&
         big.N1 >= small.N1 && big.N2 >= small.N2;
}

void bounds_checks(Suite& s) {
  const Vector c = s.k.bounds.center;
  const double R = s.k.bounds.radius > 0.0 ? s.k.bounds.radius : 2.0;
  s.check("bounds", "refining m -> 2m-1 never lowers a constant", [&] {
    const RegionBounds a = estimate_bounds(*s.model, c, R, 9);
    const RegionBounds b = estimate_bounds(*s.model, c, R, 17);
    return std::pair{dominates(b, a), "9 vs 17 samples per axis"};
  });
  s.check("bounds", "enlarging the region never lowers a constant", [&] {
    const RegionBounds a = estimate_bounds(*s.model, c, 0.5 * R, 9);
    const RegionBounds b = estimate_bounds(*s.model, c, R, 17);
    return std::pair{dominates(b, a), "radius " + num(0.5 * R) + " vs " + num(R)};
  });
  s.check("bounds", "derive_constants is deterministic", [&] {
    const DerivedConstants a = derive_constants(s.k.bounds, s.cfg.delta);
    const DerivedConstants b = derive_constants(s.k.bounds, s.cfg.delta);
    const bool same = a.K == b.K && a.gamma_z == b.gamma_z && a.gamma_h == b.gamma_h &&
                      (a.lambda_delta == b.lambda_delta ||
                       (std::isinf(a.lambda_delta) && std::isinf(b.lambda_delta)));
    return std::pair{same, "K = " + num(a.K) + ", lambda_delta = " + num(a.lambda_delta)};
  });
  if (s.model->name() == "pendulum") {
    s.check("bounds", "pendulum sampled constants below closed forms", [&] {
      // Box |q|, |p| <= 2: |H_z|^2 = sin^2 q + p^2 + 1, |H_zz|_F^2 = cos^2 q + 1,
      // |H_zz(a) - H_zz(b)| = |cos a - cos b| <= |a - b|.
      const double m1 = std::sqrt(6.0), m2 = std::sqrt(2.0), gh = 1.0;
      const RegionBounds b = estimate_bounds(*s.model, Vector::Zero(4), 2.0, 64);
      const bool below = b.M1 <= m1 + 1e-12 && b.M2 <= m2 + 1e-12 && b.gamma_H <= gh + 1e-12;
      const bool close = b.M1 >= 0.98 * m1 && b.M2 >= 0.98 * m2 && b.gamma_H >= 0.98 * gh;
      return std::pair{below && close, "M1 " + num(b.M1) + ", M2 " + num(b.M2) + ", gamma_H " +
                                           num(b.gamma_H) + " at 64 samples"};
    });
  }
}

void decoupler_checks(Suite& s) {
  const int n = std::max(20, s.cfg.verify.samples / 2);
  s.check("decoupler", "certified solves converge inside B(z, r-)", [&] {
    int certified = 0, bad = 0;
    for (int i = 0; i < n; ++i) {
      const Vector z = s.sample_state();
      const double lam = s.sample_lambda();
      const KantorovichReport rep = kantorovich_report(*s.model, lam, z, s.k.bounds, s.cfg.delta);
      if (!rep.guaranteed) continue;
      ++certified;
      const MidpointSolution sol = solve_midpoint(*s.model, lam, z);
      if ((sol.z_bar - z).norm() > rep.r_minus + 1e-12) ++bad;
    }
    return std::pair{bad == 0 && certified == n,
                     std::to_string(certified) + "/" + std::to_string(n) + " certified, " +
                         std::to_string(bad) + " outside the ball"};
  });
  s.check("decoupler", "|f_zbar^-1| < 2 for |lambda| <= 1/M2", [&] {
    const double lmax = s.k.bounds.M2 > 0.0 ? 1.0 / s.k.bounds.M2 : 1.0;
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      const Vector zb = s.sample_state();
      const double lam = s.uniform(-lmax, lmax);
      const Matrix f = midpoint_jacobian(*s.model, lam, zb);
      for (int j = 0; j < 4; ++j) {
        Vector u(zb.size());
        for (int a = 0; a < u.size(); ++a) u[a] = s.uniform(-1, 1);
        u.normalize();
        worst = std::max(worst, lu_solve(f, u).norm());
      }
    }
    return std::pair{worst < 2.0, "max |f^-1 u| = " + num(worst)};
  });
  s.check("decoupler", "midpoint identity and time reversal", [&] {
    double ident = 0.0, rev = 0.0;
    for (int i = 0; i < n; ++i) {
      const Vector z = s.sample_state();
      const double lam = s.sample_lambda();
      const MidpointSolution a = solve_midpoint(*s.model, lam, z);
      const Vector jh = apply_J(s.model->gradient(a.z_bar));
      ident = std::max(ident, (a.z_partner - z - lam * jh).norm());
      const MidpointSolution b = solve_midpoint(*s.model, -lam, a.z_partner);
      rev = std::max(rev, (b.z_bar - a.z_bar).norm());
    }
    return std::pair{ident <= 1e-10 && rev <= 1e-10,
                     "identity " + num(ident) + ", reversal " + num(rev)};
  });
}

void constraint_checks(Suite& s) {
  const double K = s.k.derived.K * s.cfg.verify.k_scale;
  const double tol = 1e-12;
  s.check("constraint", "|g - cubic| <= K lambda^4", [&] {
    int bad = 0;
    double worst = 0.0;
    for (int i = 0; i < s.cfg.verify.samples; ++i) {
      const Vector z = s.sample_state();
      const double lam = s.sample_lambda();
      const CubicModel cm = cubic_model(*s.model, z, s.k.derived);
      const double err = std::abs(g_eval(*s.model, lam, z, tol) - cm.evaluate(lam));
      const double bound = K * std::pow(lam, 4);
      if (err > bound + 10 * tol) ++bad;
      if (bound > 0.0) worst = std::max(worst, err / bound);
    }
    // The constant in use must also be at least the lemma's K, recomputed
    // here from the bounds.
    const RegionBounds& b = s.k.bounds;
    const double gz = 2.0 * b.M1 * b.M2 + b.M1 * b.M1;
    const double gh = b.N1 * gz + b.M1 * b.M1 * b.N2;
    const double k_lemma = (b.M1 * b.M1 * std::pow(b.M2, 3) + 2.0 * gh) / 32.0;
    const bool audit = K >= k_lemma * (1.0 - 1e-12);
    std::string detail = std::to_string(bad) + "/" + std::to_string(s.cfg.verify.samples) +
                         " violations, max error/bound " + num(worst) + ", K " + num(K) +
                         (audit ? " >= " : " < ") + "lemma K " + num(k_lemma);
    return std::pair{bad == 0 && audit, detail};
  });
  s.check("constraint", "|dg - cubic'| <= 4K|lambda|^3", [&] {
    int bad = 0;
    for (int i = 0; i < s.cfg.verify.samples; ++i) {
      const Vector z = s.sample_state();
      const double lam = s.sample_lambda();
      const CubicModel cm = cubic_model(*s.model, z, s.k.derived);
      const double err = std::abs(g_derivative(*s.model, lam, z, tol) - cm.derivative(lam));
      if (err > 4.0 * K * std::pow(std::abs(lam), 3) + 10 * tol) ++bad;
    }
    return std::pair{bad == 0, std::to_string(bad) + " violations"};
  });
  s.check("constraint", "dg/dlambda = 0 at lambda = 0", [&] {
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) worst = std::max(worst, std::abs(g_derivative(*s.model, 0.0, s.sample_state())));
    return std::pair{worst <= 1e-12, "max " + num(worst)};
  });
}

void report_consistency(Suite& s, const std::string& tag, const ConsistencyStats& st) {
  s.check("multiplier", "prediction/solver consistency" + tag, [&] {
    return std::pair{st.failures.empty(),
                     std::to_string(st.claims_checked) + " claims on " + std::to_string(st.points) +
                         " points (" + std::to_string(st.degenerate) + " degenerate), " +
                         std::to_string(st.failures.size()) + " mismatches" + first_of(st.failures)};
  });
  s.check("multiplier", "monotone segments keep the sign of dg" + tag, [&] {
    return std::pair{st.monotone_failures.empty(),
                     std::to_string(st.monotone_segments) + " segments" + first_of(st.monotone_failures)};
  });
  s.check("multiplier", "root residuals within tol_g" + tag, [&] {
    return std::pair{st.residual_failures.empty(),
                     "max |g| " + num(st.max_residual) + first_of(st.residual_failures)};
  });
  s.check("multiplier", "region II s-units match lambda-units" + tag, [&] {
    return std::pair{st.s_failures.empty(),
                     std::to_string(st.region_II) + " region-II points" + first_of(st.s_failures)};
  });
  s.check("trajectory", "pass-through implies lambda- and lambda+" + tag, [&] {
    return std::pair{st.pass_failures.empty(),
                     std::to_string(st.pass_through) + " pass-through points" + first_of(st.pass_failures)};
  });
}

void multiplier_checks(Suite& s) {
  PredictionOptions po;
  po.shrink = s.cfg.shrink;
  po.zero_tol = s.cfg.tol_g;
  SolveOptions so;
  so.tol_g = s.cfg.tol_g;
  so.tol_lambda = s.cfg.tol_lambda;

  ConsistencyStats st;
  const int n = s.cfg.verify.grid;
  const int d = s.model->dof();
  const double w = 0.75 * s.k.bounds.radius;
  try {
    int variant = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        Vector z = s.k.bounds.center;
        z[0] += -w + 2 * w * i / (n - 1);
        z[momentum_index(d, 0)] += -w + 2 * w * j / (n - 1);
        z = place_ratio(*s.model, z, s.k.derived, po, variant++);
        consistency_at(*s.model, z, s.k.derived, po, so, s.cfg.shrink, st);
      }
    }
  } catch (const Error& e) {
    st.failures.push_back(std::string("exception: ") + e.what());
  }
  report_consistency(s, "", st);

  if (s.model->name() != "pendulum") return;

  // Near the psi = 0 curve at p = 4, where regions II and III occur.
  const double qs = std::acos(8.0 - std::sqrt(65.0));
  Vector c(4);
  c << qs, 0.0, 4.0, 0.0;
  const RegionBounds b = with_safety_factor(estimate_bounds(*s.model, c, 0.2, 33), s.cfg.safety_factor);
  const DerivedConstants k = derive_constants(b, 0.15);
  ConsistencyStats near;
  try {
    int variant = 0;
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        Vector z = c;
        z[0] += -0.02 + 0.04 * i / 5;
        z[2] += -0.15 + 0.3 * j / 5;
        z = place_ratio(*s.model, z, k, po, variant++);
        consistency_at(*s.model, z, k, po, so, s.cfg.shrink, near);
      }
    }
    for (int i = 0; i < 8; ++i) {
      const double q = qs - 0.004 + 0.008 * i / 7;
      Vector z(4);
      z << q, 0.0, std::sqrt(-std::sin(q) * std::sin(q) / std::cos(q)), 0.0;
      z = place_ratio(*s.model, z, k, po, i);
      consistency_at(*s.model, z, k, po, so, s.cfg.shrink, near);
    }
  } catch (const Error& e) {
    near.failures.push_back(std::string("exception: ") + e.what());
  }
  report_consistency(s, " (near psi = 0)", near);
}

void trajectory_checks(Suite& s) {
  const int d = s.model->dof();
  StepOptions opt = step_options(s.cfg, s.k.derived);
  Vector z0;
  try {
    if (s.cfg.state || s.cfg.initial) {
      z0 = initial_state(s.cfg, *s.model, opt);
    } else {
      const Vector q = Vector::Constant(d, 1.0), p = Vector::Constant(d, 0.5);
      z0 = ExtendedState::from_parts(q, 0.0, p, choose_conjugate_momentum(*s.model, q, 0.0, p, 0.1, opt))
               .coords();
    }
  } catch (const UnsupportedRegionError& e) {
    s.check("trajectory", "trajectory checks", [&] {
      return std::pair{true, std::string("not applicable: ") + e.what()};
    });
    return;
  }

  const int steps = std::min(s.cfg.steps, 500);
  const DTHTrajectory traj = propagate(*s.model, z0, steps, opt);
  s.check("trajectory", "trajectory invariants (independent walk)", [&] {
    std::vector<std::string> bad;
    const std::size_t N = traj.multipliers.size();
    if (traj.vertices.size() != N + 1 || traj.midpoints.size() != N || traj.energy_residuals.size() != N) {
      bad.push_back("list sizes");
    }
    double gap = 0.0, ident = 0.0, energy = 0.0, dwp = 0.0;
    const int iw = conjugate_momentum_index(d);
    for (std::size_t k = 0; k < N && bad.empty(); ++k) {
      const Vector& a = traj.vertices[k];
      const Vector& b = traj.vertices[k + 1];
      const Vector& m = traj.midpoints[k];
      gap = std::max(gap, (m - 0.5 * (a + b)).norm());
      ident = std::max(ident, (b - a - traj.multipliers[k] * apply_J(s.model->gradient(m))).norm());
      energy = std::max(energy, std::abs(s.model->value(m)));
      dwp = std::max(dwp, std::abs(b[iw] - a[iw]));
    }
    const bool wp_expected = s.model->axis_hints().time_independent.value_or(false);
    const bool pass = bad.empty() && traj.steps() > 0 && gap <= 1e-12 && ident <= 1e-10 &&
                      energy <= s.cfg.tol_g && (!wp_expected || dwp <= 1e-12);
    return std::pair{pass, std::to_string(traj.steps()) + " steps, max |H(zbar)| " + num(energy) +
                               ", identity " + num(ident) + ", |dwp| " + num(dwp)};
  });
  s.check("trajectory", "forward then backward recovers z_k", [&] {
    double worst = 0.0;
    int used = 0;
    for (std::size_t k = 0; k + 1 < traj.vertices.size() && used < 20; ++k) {
      const StepResult back = step(*s.model, traj.vertices[k + 1], Direction::backward, opt);
      if (back.bifurcation) continue;
      ++used;
      worst = std::max(worst, (back.z_next - traj.vertices[k]).norm());
    }
    return std::pair{used > 0 && worst <= 1e-9, std::to_string(used) + " vertices, max " + num(worst)};
  });
  s.check("trajectory", "second-order convergence", [&] {
    const Vector q = z0.head(d);
    const Vector p = z0.segment(d + 1, d);
    const double T = 3.0;
    const Path ref = run_until(*s.model, q, p, 0.05 / 32, opt, T + 0.3);
    const double e1 = endpoint_error(run_until(*s.model, q, p, 0.1, opt, T), ref, d);
    const double e2 = endpoint_error(run_until(*s.model, q, p, 0.05, opt, T), ref, d);
    const double ratio = e1 / e2;
    return std::pair{ratio >= 3.5 && ratio <= 4.5, "error ratio " + num(ratio) + " (0.1 -> 0.05)"};
  });
}

}  // namespace

std::vector<CheckResult> run_checks(const Config& cfg) {
  Suite s{cfg, build_model(cfg), {}, std::mt19937_64(cfg.seed), {}};
  s.k = build_constants(cfg, *s.model, Vector::Zero(s.model->dim()), 2.0);
  extphase_checks(s);
  model_checks(s);
  bounds_checks(s);
  decoupler_checks(s);
  constraint_checks(s);
  multiplier_checks(s);
  trajectory_checks(s);
  return s.results;
}

}  // namespace dth::cli
