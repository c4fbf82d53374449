#include "dthsem/multiplier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dthsem/errors.hpp"

namespace dth {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool positive_finite(double x) { return x > 0.0 && std::isfinite(x); }

}  // namespace

std::string to_string(RegionTag tag) {
  switch (tag) {
    case RegionTag::I: return "I";
    case RegionTag::II: return "II";
    case RegionTag::III: return "III";
    case RegionTag::degenerate: return "degenerate";
  }
  return "?";
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::exists_unique: return "exists-unique";
    case Verdict::exists: return "exists";
    case Verdict::none: return "none";
    case Verdict::indeterminate: return "indeterminate";
  }
  return "?";
}

std::string to_string(RootKind kind) {
  switch (kind) {
    case RootKind::minus: return "minus";
    case RootKind::plus: return "plus";
    case RootKind::ghost: return "ghost";
    case RootKind::zero: return "zero";
  }
  return "?";
}

bool Claim::contains(double lambda) const {
  const bool above = lo_closed ? lambda >= lo : lambda > lo;
  const bool below = hi_closed ? lambda <= hi : lambda < hi;
  return above && below;
}

Region classify_region(const CubicModel& cubic, const RegionTolerances& tol) {
  Region r;
  r.psi_k = cubic.psi_k;
  r.psi_prime_k = cubic.psi_prime_k;
  r.threshold = 24.0 * cubic.K * std::abs(cubic.psi_k);
  const double ld = std::isfinite(cubic.lambda_delta) ? cubic.lambda_delta : 0.0;
  r.tau_psi = tol.psi_scale * (1.0 + std::abs(cubic.psi_prime_k) * ld);
  r.tau_psi_prime = tol.psi_prime;

  const double pp2 = cubic.psi_prime_k * cubic.psi_prime_k;
  if (std::abs(cubic.psi_k) > r.tau_psi) {
    r.tag = pp2 <= r.threshold ? RegionTag::I : RegionTag::II;
  } else if (std::abs(cubic.psi_prime_k) > r.tau_psi_prime) {
    r.tag = RegionTag::III;
  } else {
    r.tag = RegionTag::degenerate;
  }
  return r;
}

double capital_lambda(const Region& region, const CubicModel& cubic, double shrink) {
  if (!(shrink > 0.0 && shrink < 1.0)) throw ParameterError("capital_lambda: shrink must lie in (0, 1)");
  double bound = kInf;
  switch (region.tag) {
    case RegionTag::I:
      if (cubic.K > 0.0) bound = std::sqrt(std::abs(cubic.psi_k) / (96.0 * cubic.K));
      break;
    case RegionTag::II:
    case RegionTag::III:
      if (cubic.K > 0.0) bound = std::abs(cubic.psi_prime_k) / (48.0 * cubic.K);
      break;
    case RegionTag::degenerate:
      throw UnsupportedRegionError("capital_lambda: no existence theorem covers psi = psi' = 0");
  }
  bound = std::min(bound, cubic.lambda_delta);
  if (!positive_finite(bound)) {
    throw UnsupportedRegionError("capital_lambda: search radius is not a positive finite number");
  }
  return shrink * bound;
}

// ---------------------------------------------------------------------------
// predict_roots

namespace {

void predict_region_I(RootPrediction& p, double L) {
  const double r = p.ratio;
  const double lower = 3.0 / 32.0 * L * L;
  const double upper = 5.0 / 32.0 * L * L;
  p.thresholds["exists_below"] = lower;
  p.thresholds["none_above"] = upper;
  auto both = [&](Verdict v, const std::string& label) {
    p.claims.push_back({-L, 0.0, false, false, v, label});
    p.claims.push_back({0.0, L, false, false, v, label});
  };
  if (p.zero_root) {
    both(Verdict::none, "EU_1(ii)");
  } else if (r < 0.0) {
    p.claims.push_back({-L, L, false, false, Verdict::none, "EU_1(i)"});
  } else if (r < lower) {
    both(Verdict::exists_unique, "EU_1(iii)");
  } else if (r > upper) {
    p.claims.push_back({-L, L, false, false, Verdict::none, "EU_1(iv)"});
  } else {
    both(Verdict::indeterminate, "EU_1 gap");
  }
  p.segments = {{-L, 0.0, true}, {0.0, L, true}};
}

void predict_region_III(RootPrediction& p, double L) {
  const double r = p.ratio;
  const double exists_below = L * L * L / 48.0;
  const double none_above = L * L * L / 16.0;
  p.thresholds["exists_below"] = exists_below;
  p.thresholds["none_above"] = none_above;
  if (p.zero_root) {
    p.claims.push_back({-L, 0.0, false, false, Verdict::none, "EU_3(iii)"});
    p.claims.push_back({0.0, L, false, false, Verdict::none, "EU_3(iii)"});
  } else if (r < 0.0 && -r < exists_below) {
    p.claims.push_back({-L, 0.0, false, false, Verdict::exists_unique, "EU_3(i)"});
    p.claims.push_back({0.0, L, true, false, Verdict::none, "EU_3(i)"});
  } else if (r > 0.0 && r < exists_below) {
    p.claims.push_back({0.0, L, false, false, Verdict::exists_unique, "EU_3(ii)"});
    p.claims.push_back({-L, 0.0, false, true, Verdict::none, "EU_3(ii)"});
  } else if (std::abs(r) > none_above) {
    p.claims.push_back({-L, L, false, false, Verdict::none, "EU_3(iv)"});
  } else {
    p.claims.push_back({-L, 0.0, false, false, Verdict::indeterminate, "EU_3 gap"});
    p.claims.push_back({0.0, L, false, false, Verdict::indeterminate, "EU_3 gap"});
  }
  p.segments = {{-L, 0.0, true}, {0.0, L, true}};
}

void predict_region_II(RootPrediction& p, double L) {
  const double rho = p.region.psi_k / p.region.psi_prime_k;
  const double S = L / std::abs(rho);
  p.rho = rho;
  p.S = S;
  const double r = p.ratio;

  // s-interval (a, b) to lambda-interval; lambda = -rho s flips order when
  // rho > 0.
  auto claim = [&](double a, double b, bool a_closed, bool b_closed, Verdict v,
                   const std::string& label) {
    Claim c;
    if (rho > 0.0) {
      c = {-rho * b, -rho * a, b_closed, a_closed, v, label};
    } else {
      c = {-rho * a, -rho * b, a_closed, b_closed, v, label};
    }
    p.claims.push_back(c);
  };
  auto segment = [&](double a, double b, bool monotone) {
    const double l1 = -rho * a;
    const double l2 = -rho * b;
    p.segments.push_back({std::min(l1, l2), std::max(l1, l2), monotone});
  };

  const double t_iii = L * L * (6.0 - S) / 48.0;
  const double t_iv = L * L * (6.0 + S) / 48.0;
  const double t_v = L * L * (2.0 - S) / 16.0;
  const double t_vi = 9.0 / 125.0 * rho * rho;
  const double t_vii = 2.0 / 3.0 * rho * rho;
  p.thresholds["S"] = S;
  p.thresholds["iii_lower"] = t_iii;
  p.thresholds["iv_upper"] = t_iv;
  p.thresholds["v_upper"] = t_v;
  p.thresholds["vi_upper"] = t_vi;
  p.thresholds["vii_lower"] = t_vii;

  const double six_fifths = 1.2;
  const double two = std::min(2.0, S);
  bool covered_neg = false;  // (-S, 0)
  bool covered_pos = false;  // (0, min(S, 6/5))
  bool covered_far = S <= six_fifths;  // (6/5, S)

  if (p.zero_root || r < 0.0) {
    const std::string label = p.zero_root ? "EU_2(ii)" : "EU_2(i)";
    claim(-S, 0.0, false, false, Verdict::none, label);
    claim(0.0, two, false, false, Verdict::none, label);
    covered_neg = covered_pos = true;
    if (S > 6.0 && (p.zero_root || r > t_iii)) {
      claim(2.0, S, true, false, Verdict::exists, "EU_2(iii)");
      covered_far = true;
    }
    if (p.zero_root && S >= 6.0) {
      claim(six_fifths, S, false, false, Verdict::exists, "EU_2(vi)(b)");
      covered_far = true;
    }
  } else {
    if (r < t_iv) {
      claim(-S, 0.0, false, false, Verdict::exists_unique, "EU_2(iv)");
      covered_neg = true;
    }
    if (S < six_fifths && r < t_v) {
      claim(0.0, S, false, false, Verdict::exists_unique, "EU_2(v)");
      covered_pos = true;
    }
    if (r < t_vi) {
      if (S >= six_fifths) {
        claim(0.0, six_fifths, false, false, Verdict::exists_unique, "EU_2(vi)(a)");
        covered_pos = true;
      }
      if (S >= 6.0) {
        claim(six_fifths, S, false, false, Verdict::exists, "EU_2(vi)(b)");
        covered_far = true;
      }
    }
    if (r > t_vii) {
      claim(0.0, S, false, false, Verdict::none, "EU_2(vii)");
      covered_pos = covered_far = true;
    }
  }
  if (!covered_neg) claim(-S, 0.0, false, false, Verdict::indeterminate, "EU_2 gap");
  if (!covered_pos) {
    claim(0.0, std::min(S, six_fifths), false, false, Verdict::indeterminate, "EU_2 gap");
  }
  if (!covered_far) claim(six_fifths, S, false, false, Verdict::indeterminate, "EU_2 gap");

  p.ghost_expected = false;
  for (const Claim& c : p.claims) {
    const bool existence = c.verdict == Verdict::exists || c.verdict == Verdict::exists_unique;
    if (existence && (c.label == "EU_2(iii)" || c.label == "EU_2(vi)(b)")) p.ghost_expected = true;
  }

  segment(-S, 0.0, true);
  segment(0.0, std::min(S, six_fifths), true);
  if (S > six_fifths) segment(six_fifths, std::min(S, 6.0), false);
  if (S > 6.0) segment(6.0, S, true);
}

}  // namespace

RootPrediction predict_roots(const Region& region, const CubicModel& cubic,
                             const PredictionOptions& options) {
  RootPrediction p;
  p.region = region;
  p.cubic = cubic;
  p.zero_root = std::abs(cubic.H_k) <= options.zero_tol;

  if (region.tag == RegionTag::degenerate) {
    double w = options.degenerate_radius;
    if (!(w > 0.0)) w = options.shrink * cubic.lambda_delta;
    if (!positive_finite(w)) w = 1.0;
    p.capital_lambda = w;
    p.ratio = std::numeric_limits<double>::quiet_NaN();
    p.segments = {{-w, 0.0, false}, {0.0, w, false}};
    return p;
  }

  const double L = capital_lambda(region, cubic, options.shrink);
  p.capital_lambda = L;
  switch (region.tag) {
    case RegionTag::I:
      p.ratio = p.zero_root ? 0.0 : cubic.H_k / cubic.psi_k;
      predict_region_I(p, L);
      break;
    case RegionTag::II:
      p.ratio = p.zero_root ? 0.0 : cubic.H_k / cubic.psi_k;
      predict_region_II(p, L);
      break;
    case RegionTag::III:
      p.ratio = p.zero_root ? 0.0 : cubic.H_k / cubic.psi_prime_k;
      predict_region_III(p, L);
      break;
    case RegionTag::degenerate:
      break;
  }
  return p;
}

RootPrediction predict_roots(const HamiltonianModel& model, const Vector& z_k,
                             const DerivedConstants& constants, const PredictionOptions& options) {
  const CubicModel cubic = cubic_model(model, z_k, constants);
  return predict_roots(classify_region(cubic, options.tolerances), cubic, options);
}

Verdict RootPrediction::side_verdict(int sign) const {
  if (region.tag == RegionTag::degenerate) return Verdict::indeterminate;
  const double side_lo = sign > 0 ? 0.0 : -capital_lambda;
  const double side_hi = sign > 0 ? capital_lambda : 0.0;

  bool any_exists = false;
  bool any_unique = false;
  std::vector<std::pair<double, double>> none_parts;
  for (const Claim& c : claims) {
    const double lo = std::max(c.lo, side_lo);
    const double hi = std::min(c.hi, side_hi);
    if (!(lo < hi)) continue;
    if (c.verdict == Verdict::exists_unique) any_unique = true;
    if (c.verdict == Verdict::exists) any_exists = true;
    if (c.verdict == Verdict::none) none_parts.emplace_back(lo, hi);
  }
  if (any_unique) return Verdict::exists_unique;
  if (any_exists) return Verdict::exists;
  std::sort(none_parts.begin(), none_parts.end());
  double reach = side_lo;
  const double slack = 1e-15 * capital_lambda;
  for (const auto& [lo, hi] : none_parts) {
    if (lo > reach + slack) break;
    reach = std::max(reach, hi);
  }
  return reach >= side_hi - slack ? Verdict::none : Verdict::indeterminate;
}

std::string RootPrediction::describe_side(int sign) const {
  const Verdict v = side_verdict(sign);
  if (region.tag == RegionTag::degenerate) return "indeterminate (degenerate: psi = psi' = 0)";
  const double side_lo = sign > 0 ? 0.0 : -capital_lambda;
  const double side_hi = sign > 0 ? capital_lambda : 0.0;
  std::vector<std::string> labels;
  for (const Claim& c : claims) {
    if (!(std::max(c.lo, side_lo) < std::min(c.hi, side_hi))) continue;
    const bool relevant = v == Verdict::indeterminate || c.verdict == v ||
                          (v == Verdict::exists && c.verdict == Verdict::exists_unique);
    if (relevant && std::find(labels.begin(), labels.end(), c.label) == labels.end()) {
      labels.push_back(c.label);
    }
  }
  std::string out = to_string(v);
  if (!labels.empty()) {
    out += " (";
    for (std::size_t i = 0; i < labels.size(); ++i) out += (i ? ", " : "") + labels[i];
    out += ")";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Root finding

namespace {

double sgn(double x) { return (x > 0.0) - (x < 0.0); }

struct Evaluator {
  const HamiltonianModel& model;
  const Vector& z;
  const SolveOptions& opt;

  ConstraintSample operator()(double lambda) const {
    return evaluate_constraint(model, lambda, z, opt.midpoint);
  }
};

RootKind kind_by_sign(double lambda) {
  if (lambda > 0.0) return RootKind::plus;
  if (lambda < 0.0) return RootKind::minus;
  return RootKind::zero;
}

}  // namespace

std::optional<Root> refine_root(const HamiltonianModel& model, const Vector& z_k, double lo,
                                double hi, double g_lo, double g_hi,
                                const SolveOptions& opt) {
  if (!(lo < hi)) throw ParameterError("refine_root: empty bracket");
  if (sgn(g_lo) * sgn(g_hi) >= 0.0) throw PreconditionError("refine_root: no sign change");
  const Evaluator eval{model, z_k, opt};

  double a = lo, b = hi, ga = g_lo, gb = g_hi;
  double best_x = std::abs(ga) <= std::abs(gb) ? a : b;
  double best_g = std::min(std::abs(ga), std::abs(gb));
  // Secant guess for the first point keeps the count low on tame brackets.
  double x = a - ga * (b - a) / (gb - ga);
  if (!(x > a && x < b)) x = 0.5 * (a + b);
  double last_width = b - a;

  for (int iter = 0; iter < 300; ++iter) {
    const ConstraintSample s = eval(x);
    if (std::abs(s.g) < best_g) {
      best_g = std::abs(s.g);
      best_x = x;
    }
    if (std::abs(s.g) <= opt.tol_g) {
      // Polish: a couple of Newton steps that stay inside the bracket and
      // reduce |g|.
      double px = x, pg = s.g, pd = s.dg;
      for (int k = 0; k < 2 && pg != 0.0 && pd != 0.0; ++k) {
        const double nx = px - pg / pd;
        if (!(nx > a && nx < b) || nx == px) break;
        const ConstraintSample t = eval(nx);
        if (!(std::abs(t.g) < std::abs(pg))) break;
        px = nx;
        pg = t.g;
        pd = t.dg;
      }
      return Root{px, std::abs(pg), kind_by_sign(px), false};
    }
    if (sgn(s.g) == sgn(ga)) {
      a = x;
      ga = s.g;
    } else {
      b = x;
      gb = s.g;
    }
    const double width = b - a;
    if (width <= opt.tol_lambda) break;

    double next = 0.5 * (a + b);
    if (s.dg != 0.0 && std::isfinite(s.dg)) {
      const double nx = x - s.g / s.dg;
      if (nx > a && nx < b && width < 0.75 * last_width) next = nx;
      if (nx > a && nx < b && iter == 0) next = nx;
    }
    last_width = width;
    if (next == x) next = 0.5 * (a + b);
    x = next;
  }
  if (best_g <= opt.tol_g) return Root{best_x, best_g, kind_by_sign(best_x), false};
  return std::nullopt;
}

namespace {

void push_unique(std::vector<Root>& roots, const Root& r, double tol_lambda) {
  for (Root& existing : roots) {
    if (std::abs(existing.lambda - r.lambda) <= 10.0 * tol_lambda + 1e-12 * std::abs(r.lambda)) {
      if (r.residual < existing.residual) existing = r;
      return;
    }
  }
  roots.push_back(r);
}

// Scan of the open interval (lo, hi) on `points` samples including the
// endpoints. An endpoint at lambda = 0 is skipped when `skip_zero` is set.
std::vector<Root> scan_interval(const HamiltonianModel& model, const Vector& z_k, double lo,
                                double hi, int points, bool skip_zero, const SolveOptions& opt) {
  if (points < 2) throw ParameterError("scan: need at least 2 points");
  const Evaluator eval{model, z_k, opt};
  std::vector<Root> roots;
  std::vector<double> xs(static_cast<std::size_t>(points));
  std::vector<double> gs(xs.size());
  for (int i = 0; i < points; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    xs[static_cast<std::size_t>(i)] = (i == points - 1) ? hi : x;
  }
  for (std::size_t i = 0; i < xs.size(); ++i) gs[i] = eval(xs[i]).g;

  auto usable = [&](std::size_t i) { return !(skip_zero && xs[i] == 0.0); };
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const bool interior = i > 0 && i + 1 < xs.size();
    if (interior && usable(i) && std::abs(gs[i]) <= opt.tol_g) {
      push_unique(roots, Root{xs[i], std::abs(gs[i]), kind_by_sign(xs[i]), false}, opt.tol_lambda);
    }
  }
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (!usable(i) || !usable(i + 1)) continue;
    if (std::abs(gs[i]) <= opt.tol_g || std::abs(gs[i + 1]) <= opt.tol_g) continue;
    if (sgn(gs[i]) * sgn(gs[i + 1]) < 0.0) {
      if (auto r = refine_root(model, z_k, xs[i], xs[i + 1], gs[i], gs[i + 1], opt)) {
        push_unique(roots, *r, opt.tol_lambda);
      }
    }
  }
  return roots;
}

}  // namespace

std::vector<Root> scan_roots(const HamiltonianModel& model, const Vector& z_k, double lo,
                             double hi, int points, const SolveOptions& options) {
  if (!(lo < hi)) throw ParameterError("scan_roots: empty interval");
  const bool skip_zero = std::abs(checked_value(model, z_k)) <= options.tol_g;
  std::vector<Root> roots = scan_interval(model, z_k, lo, hi, points, skip_zero, options);
  std::sort(roots.begin(), roots.end(),
            [](const Root& a, const Root& b) { return a.lambda < b.lambda; });
  return roots;
}

MultiplierSet solve_roots(const HamiltonianModel& model, const Vector& z_k,
                          const RootPrediction& prediction, const SolveOptions& opt) {
  if (!(opt.tol_g > 0.0) || !(opt.tol_lambda > 0.0)) {
    throw ParameterError("solve_roots: tolerances must be positive");
  }
  const Evaluator eval{model, z_k, opt};
  MultiplierSet out;
  std::vector<Root> found;
  const bool zero = prediction.zero_root;
  const bool degenerate = prediction.region.tag == RegionTag::degenerate;

  if (zero) {
    found.push_back(Root{0.0, std::abs(prediction.cubic.H_k), RootKind::zero, !degenerate});
  }

  for (const SearchSegment& seg : prediction.segments) {
    SearchedInterval si{seg.lo, seg.hi, seg.monotone, true, ""};
    try {
      if (seg.monotone) {
        const bool touches_zero = seg.lo == 0.0 || seg.hi == 0.0;
        if (zero && touches_zero) {
          si.note = "g(0) = 0 and g monotone: no interior root";
        } else {
          const double g_lo = seg.lo == 0.0 ? prediction.cubic.H_k : eval(seg.lo).g;
          const double g_hi = seg.hi == 0.0 ? prediction.cubic.H_k : eval(seg.hi).g;
          if (sgn(g_lo) * sgn(g_hi) < 0.0 && std::abs(g_lo) > opt.tol_g &&
              std::abs(g_hi) > opt.tol_g) {
            if (auto r = refine_root(model, z_k, seg.lo, seg.hi, g_lo, g_hi, opt)) {
              push_unique(found, *r, opt.tol_lambda);
            } else {
              si.note = "bracket found but |g| <= tol_g not reached";
            }
          } else {
            for (double e : {seg.lo, seg.hi}) {
              const double ge = e == seg.lo ? g_lo : g_hi;
              if (e != 0.0 && std::abs(ge) <= opt.tol_g) {
                push_unique(found, Root{e, std::abs(ge), kind_by_sign(e), false}, opt.tol_lambda);
              }
            }
          }
        }
      } else {
        for (const Root& r :
             scan_interval(model, z_k, seg.lo, seg.hi, opt.scan_points, zero, opt)) {
          push_unique(found, r, opt.tol_lambda);
        }
        si.note = "dense scan";
      }
    } catch (const Error& e) {
      si.searched = false;
      si.note = e.what();
    }
    out.brackets.push_back(si);
  }

  for (Root& r : found) {
    if (r.kind == RootKind::zero) continue;
    r.kind = kind_by_sign(r.lambda);
    if (prediction.region.tag == RegionTag::II && prediction.rho) {
      const double s = -r.lambda / *prediction.rho;
      if (s > 1.2) r.kind = RootKind::ghost;
    }
    r.theorem_backed = false;
    if (!degenerate) {
      for (const Claim& c : prediction.claims) {
        const bool existence = c.verdict == Verdict::exists || c.verdict == Verdict::exists_unique;
        if (existence && c.contains(r.lambda)) r.theorem_backed = true;
      }
    }
  }
  std::sort(found.begin(), found.end(),
            [](const Root& a, const Root& b) { return a.lambda < b.lambda; });
  out.roots = std::move(found);
  return out;
}

std::optional<double> MultiplierSet::lambda_minus() const {
  std::optional<double> best;
  for (const Root& r : roots) {
    if (r.kind == RootKind::minus && (!best || std::abs(r.lambda) < std::abs(*best))) best = r.lambda;
  }
  return best;
}

std::optional<double> MultiplierSet::lambda_plus() const {
  std::optional<double> best;
  for (const Root& r : roots) {
    if (r.kind == RootKind::plus && (!best || r.lambda < *best)) best = r.lambda;
  }
  return best;
}

std::optional<double> MultiplierSet::lambda_ghost() const {
  std::optional<double> best;
  for (const Root& r : roots) {
    if (r.kind == RootKind::ghost && (!best || std::abs(r.lambda) < std::abs(*best))) {
      best = r.lambda;
    }
  }
  return best;
}

bool MultiplierSet::has_zero() const {
  return std::any_of(roots.begin(), roots.end(),
                     [](const Root& r) { return r.kind == RootKind::zero; });
}

bool MultiplierSet::complete() const {
  return std::all_of(brackets.begin(), brackets.end(),
                     [](const SearchedInterval& b) { return b.searched; });
}

// ---------------------------------------------------------------------------

GhostReport ghost_check(const std::vector<MultiplierSet>& sets,
                        const std::vector<CubicModel>& cubics, const RegionBounds& bounds,
                        double psi_min) {
  if (sets.size() != cubics.size()) {
    throw PreconditionError("ghost_check: root sets and cubic models differ in length");
  }
  if (sets.empty()) throw PreconditionError("ghost_check: empty sequence");
  if (!(psi_min > 0.0)) throw PreconditionError("ghost_check: psi_min must be positive");

  double prev_ratio = kInf;
  for (const CubicModel& c : cubics) {
    if (!(std::abs(c.psi_k) > psi_min)) {
      throw PreconditionError("ghost_check: |psi_k| <= psi_min along the sequence");
    }
    const double ratio = c.H_k / c.psi_k;
    if (ratio < 0.0) throw PreconditionError("ghost_check: H_k/psi_k must be nonnegative");
    if (ratio > prev_ratio * (1.0 + 1e-9) + 1e-300) {
      throw PreconditionError("ghost_check: H_k/psi_k must decrease along the sequence");
    }
    prev_ratio = ratio;
  }

  GhostReport rep;
  const double mn = bounds.M1 * bounds.N1;
  rep.ghost_bound = mn > 0.0 ? 1.2 * psi_min / mn : kInf;
  rep.min_ghost = kInf;
  for (const MultiplierSet& s : sets) {
    double pm = 0.0;
    if (auto m = s.lambda_minus()) pm = std::max(pm, std::abs(*m));
    if (auto p = s.lambda_plus()) pm = std::max(pm, std::abs(*p));
    if (!rep.pm_magnitude.empty() && pm > rep.pm_magnitude.back()) rep.pm_nonincreasing = false;
    rep.pm_magnitude.push_back(pm);

    double ghost = std::numeric_limits<double>::quiet_NaN();
    for (const Root& r : s.roots) {
      if (r.kind != RootKind::ghost) continue;
      ++rep.ghosts_detected;
      if (std::isnan(ghost) || std::abs(r.lambda) < ghost) ghost = std::abs(r.lambda);
    }
    rep.ghost_magnitude.push_back(ghost);
    if (!std::isnan(ghost)) rep.min_ghost = std::min(rep.min_ghost, ghost);
  }
  rep.pm_final = rep.pm_magnitude.back();
  rep.ghost_bound_holds = rep.ghosts_detected == 0 || rep.min_ghost > rep.ghost_bound;
  return rep;
}

}  // namespace dth
