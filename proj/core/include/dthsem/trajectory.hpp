#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dthsem/multiplier.hpp"

namespace dth {

enum class Direction { forward, backward };

/// Which root a step takes when several of the required sign exist.
///   smallest:     smallest |lambda| of the required sign.
///   follow_ghost: a ghost root of the required sign when one exists.
enum class BranchPolicy { smallest, follow_ghost };

std::string to_string(BranchPolicy policy);

struct StepOptions {
  DerivedConstants constants;
  PredictionOptions prediction;
  SolveOptions solve;
  BranchPolicy policy = BranchPolicy::smallest;
  /// Outer edge of the search beyond Lambda_k when the theorem window holds
  /// no root of the required sign. <= 0 uses lambda_delta; a value at or
  /// below Lambda_k keeps the search inside the window.
  double search_radius = 0.0;
  int search_points = 24;
};

struct StepResult {
  double lambda = 0.0;
  Vector z_next;  // partner vertex: z_{k+1} forward, z_{k-1} backward
  Vector z_mid;
  double energy_residual = 0.0;  // |H(z_mid)|
  RootPrediction prediction;
  MultiplierSet roots;
  bool fixed_point = false;
  bool bifurcation = false;      // a ghost root of the required sign sat beside lambda+-
  bool ghost_taken = false;
  bool theorem_backed = false;
  bool beyond_window = false;    // root found outside (-Lambda_k, Lambda_k)
};

/// One DTH step from z_k. A point with |H_k| <= tol_g is a fixed point and
/// returns lambda = 0, z_next = z_k.
/// Throws StepNonexistenceError (with the theorem verdict for that side)
/// when no root of the required sign is found.
StepResult step(const HamiltonianModel& model, const Vector& z_k, Direction direction,
                const StepOptions& options);

enum class EventKind { bifurcation, ghost_taken, terminated, fixed_point, prediction_indeterminate };

std::string to_string(EventKind kind);

struct TrajectoryEvent {
  int index = 0;
  EventKind kind = EventKind::terminated;
  std::string detail;
};

/// Vertices z_0..z_N, midpoints zbar_0..zbar_{N-1} and multipliers
/// lambda_0..lambda_{N-1} of a piecewise-linear DTH trajectory.
struct DTHTrajectory {
  int dof = 1;
  std::vector<Vector> vertices;
  std::vector<Vector> midpoints;
  std::vector<double> multipliers;
  std::vector<double> energy_residuals;  // |H(zbar_k)|
  std::vector<TrajectoryEvent> events;

  std::size_t steps() const { return multipliers.size(); }
  std::size_t count(EventKind kind) const;
};

/// Steps forward from z0 up to `steps` times. Stops early (logging a
/// terminated event) on nonexistence or solver failure, and after logging
/// a fixed-point event when lambda = 0.
DTHTrajectory propagate(const HamiltonianModel& model, const Vector& z0, int steps,
                        const StepOptions& options);

enum class VertexKind {
  pass_through,
  bifurcates,
  begins_or_ends,
  none,
  fixed_point,
  indeterminate,
  degenerate
};

std::string to_string(VertexKind kind);

struct VertexClass {
  VertexKind kind = VertexKind::indeterminate;
  std::string label;  // main-result case, e.g. "(iii)"
  RegionTag region = RegionTag::degenerate;
  double ratio = 0.0;  // H/psi or H/psi'
  double capital_lambda = 0.0;
  std::optional<double> S;
};

/// Case table of the existence theorem for DTH trajectories through z0.
VertexClass classify_vertex(const HamiltonianModel& model, const Vector& z0,
                            const DerivedConstants& constants,
                            const PredictionOptions& options = {});

/// Same, after checking that z0 lies in the bounded region (PreconditionError
/// otherwise).
VertexClass classify_vertex(const HamiltonianModel& model, const Vector& z0,
                            const RegionBounds& bounds, const DerivedConstants& constants,
                            const PredictionOptions& options = {});

/// classify_vertex from a precomputed prediction.
VertexClass classify_vertex(const RootPrediction& prediction, double shrink = 0.9);

struct ConservationOptions {
  double fd_step = 1e-6;
  /// Check the symplectic defect on every k-th step (1 = all).
  int symplectic_stride = 1;
  MidpointOptions midpoint{1e-13, 50, 2};
};

struct ConservationReport {
  double max_energy_residual = 0.0;      // max |H(zbar_k)|
  double max_wp_change = 0.0;            // max |wp_{k+1} - wp_k|
  bool wp_conservation_expected = false; // model independent of t
  double max_symplectic_defect = 0.0;    // max |D^T J D - J|_F
  double max_midpoint_identity = 0.0;    // max |z_{k+1} - z_k - lambda_k J H_z(zbar_k)|
  double max_midpoint_gap = 0.0;         // max |zbar_k - (z_k + z_{k+1})/2|
  std::vector<double> symplectic_defects;
};

/// |D^T J D - J|_F for the finite-difference Jacobian D of the fixed-lambda
/// map z -> 2 zbar(lambda, z) - z.
double symplectic_defect(const HamiltonianModel& model, double lambda, const Vector& z,
                         const ConservationOptions& options = {});

/// Throws PreconditionError on an empty trajectory.
ConservationReport conservation_report(const HamiltonianModel& model,
                                       const DTHTrajectory& trajectory,
                                       const ConservationOptions& options = {});

/// wp_0 that puts the first forward multiplier near lambda_target: the
/// leading-order choice H(z0) = psi(z0) lambda_target^2 / 8, then one
/// correction and one secant step on the solved lambda+. The refinement is
/// skipped (leading-order value returned) if a step cannot be taken.
/// Throws UnsupportedRegionError when psi(z0) is numerically zero and
/// ParameterError unless lambda_target > 0.
double choose_conjugate_momentum(const HamiltonianModel& model, const Vector& q0, double t0,
                                 const Vector& p0, double lambda_target,
                                 const StepOptions& options);

}  // namespace dth
