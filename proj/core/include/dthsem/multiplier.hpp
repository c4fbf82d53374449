#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dthsem/bounds.hpp"
#include "dthsem/constraint.hpp"

namespace dth {

enum class RegionTag { I, II, III, degenerate };

std::string to_string(RegionTag tag);

/// Numeric gates standing in for the exact conditions psi_k = 0 and
/// psi'_k != 0:
///   tau_psi       = psi_scale * (1 + |psi'_k| lambda_delta)
///   tau_psi_prime = psi_prime
struct RegionTolerances {
  double psi_scale = 1e-9;
  double psi_prime = 1e-9;
};

struct Region {
  RegionTag tag = RegionTag::degenerate;
  double psi_k = 0.0;
  double psi_prime_k = 0.0;
  double threshold = 0.0;  // 24 K |psi_k|
  double tau_psi = 0.0;
  double tau_psi_prime = 0.0;
};

/// I:   |psi| >  tau_psi and psi'^2 <= 24 K |psi|
/// II:  |psi| >  tau_psi and psi'^2 >  24 K |psi|
/// III: |psi| <= tau_psi and |psi'| > tau_psi'
/// degenerate otherwise.
Region classify_region(const CubicModel& cubic, const RegionTolerances& tolerances = {});

/// shrink * min(sqrt(|psi|/96K), lambda_delta) in region I and
/// shrink * min(|psi'|/48K, lambda_delta) in regions II and III. A zero K
/// drops its term from the min. Throws UnsupportedRegionError for degenerate
/// points and ParameterError unless 0 < shrink < 1.
double capital_lambda(const Region& region, const CubicModel& cubic, double shrink = 0.9);

enum class Verdict { exists_unique, exists, none, indeterminate };

std::string to_string(Verdict verdict);

/// A statement about the roots of g on an interval of lambda.
struct Claim {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_closed = false;
  bool hi_closed = false;
  Verdict verdict = Verdict::indeterminate;
  std::string label;  // theorem case, e.g. "EU_1(iii)"

  bool contains(double lambda) const;
};

/// Open lambda-interval the solver searches. Monotone segments are handled
/// by an endpoint sign test; the others by a dense scan.
struct SearchSegment {
  double lo = 0.0;
  double hi = 0.0;
  bool monotone = false;
};

struct PredictionOptions {
  double shrink = 0.9;
  /// |H_k| at or below this counts as H_k = 0.
  double zero_tol = 1e-12;
  RegionTolerances tolerances;
  /// Search half-width at degenerate points; <= 0 uses shrink * lambda_delta.
  double degenerate_radius = 0.0;
};

struct RootPrediction {
  Region region;
  CubicModel cubic;
  double capital_lambda = 0.0;
  std::optional<double> S;    // region II: |psi'/psi| Lambda
  std::optional<double> rho;  // region II: psi/psi', so lambda = -rho s
  double ratio = 0.0;         // H/psi (I, II) or H/psi' (III)
  bool zero_root = false;
  bool ghost_expected = false;
  std::vector<Claim> claims;
  std::vector<SearchSegment> segments;
  std::map<std::string, double> thresholds;

  /// Verdict for multipliers of the given sign (+1 forward, -1 backward),
  /// e.g. "exists-unique (EU_1(iii))" or "none (EU_1(i))".
  std::string describe_side(int sign) const;
  /// Combined verdict for the given sign.
  Verdict side_verdict(int sign) const;
};

RootPrediction predict_roots(const Region& region, const CubicModel& cubic,
                             const PredictionOptions& options = {});

/// classify_region + predict_roots from a model and a point.
RootPrediction predict_roots(const HamiltonianModel& model, const Vector& z_k,
                             const DerivedConstants& constants,
                             const PredictionOptions& options = {});

enum class RootKind { minus, plus, ghost, zero };

std::string to_string(RootKind kind);

struct Root {
  double lambda = 0.0;
  double residual = 0.0;  // |g(lambda)|
  RootKind kind = RootKind::zero;
  bool theorem_backed = false;
};

struct SearchedInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool monotone = false;
  bool searched = true;
  std::string note;
};

struct MultiplierSet {
  std::vector<Root> roots;  // ascending in lambda
  std::vector<SearchedInterval> brackets;

  std::optional<double> lambda_minus() const;
  std::optional<double> lambda_plus() const;
  std::optional<double> lambda_ghost() const;
  bool has_zero() const;
  bool complete() const;
};

struct SolveOptions {
  double tol_g = 1e-12;
  double tol_lambda = 1e-14;
  int scan_points = 256;
  MidpointOptions midpoint = constraint_midpoint_options();
};

/// Roots of g(lambda, z_k) = 0 over the prediction's search segments.
/// Decoupler failures inside a segment leave it flagged unsearched.
MultiplierSet solve_roots(const HamiltonianModel& model, const Vector& z_k,
                          const RootPrediction& prediction, const SolveOptions& options = {});

/// Sign-change roots of g on the open interval (lo, hi) from a uniform scan
/// of `points` samples plus bracketed refinement. Roots come back with kind
/// by sign and theorem_backed = false. Throws on decoupler failure.
std::vector<Root> scan_roots(const HamiltonianModel& model, const Vector& z_k, double lo,
                             double hi, int points, const SolveOptions& options = {});

/// Refines a sign-changing bracket [lo, hi] (g_lo, g_hi of opposite sign)
/// by safeguarded Newton-bisection. Returns nullopt if |g| <= tol_g is not
/// reached before the bracket shrinks below tol_lambda.
std::optional<Root> refine_root(const HamiltonianModel& model, const Vector& z_k, double lo,
                                double hi, double g_lo, double g_hi,
                                const SolveOptions& options = {});

struct GhostReport {
  std::vector<double> pm_magnitude;  // max(|lambda-|, |lambda+|) per element
  std::vector<double> ghost_magnitude;  // smallest |lambda*| per element, NaN if absent
  double pm_final = 0.0;
  bool pm_nonincreasing = true;
  double min_ghost = 0.0;  // +inf when no ghost was found
  double ghost_bound = 0.0;  // (6/5) psi_min / (M1 N1)
  int ghosts_detected = 0;
  bool ghost_bound_holds = true;
};

/// Checks the two halves of the ghost-multiplier statement along a sequence
/// with |psi_k| > psi_min and H_k/psi_k decreasing to 0 from above.
/// Throws PreconditionError when the sequence violates those assumptions.
GhostReport ghost_check(const std::vector<MultiplierSet>& sets,
                        const std::vector<CubicModel>& cubics, const RegionBounds& bounds,
                        double psi_min);

}  // namespace dth
