#pragma once

#include <functional>
#include <optional>
#include <string>

#include "dthsem/linalg.hpp"

namespace dth {

// Coordinates are ordered (q_1..q_n, t, p_1..p_n, wp), where wp is the
// momentum conjugate to time. The position block is (q, t) and the momentum
// block is (p, wp), so J is the standard block matrix [0 I; -I 0].

inline int extended_dim(int dof) { return 2 * dof + 2; }
inline int time_index(int dof) { return dof; }
inline int conjugate_momentum_index(int dof) { return 2 * dof + 1; }
inline int momentum_index(int dof, int i) { return dof + 1 + i; }

/// A point z = (q, t, p, wp) of extended phase space.
class ExtendedState {
 public:
  /// Throws DimensionError unless coords has length 2*dof+2 with dof >= 1,
  /// ParameterError if any component is not finite.
  ExtendedState(int dof, Vector coords);

  static ExtendedState from_parts(const Vector& q, double t, const Vector& p, double wp);

  int dof() const noexcept { return dof_; }
  int dim() const noexcept { return extended_dim(dof_); }
  const Vector& coords() const noexcept { return coords_; }

  double q(int i) const { return coords_[i]; }
  double t() const { return coords_[time_index(dof_)]; }
  double p(int i) const { return coords_[momentum_index(dof_, i)]; }
  double wp() const { return coords_[conjugate_momentum_index(dof_)]; }

 private:
  int dof_;
  Vector coords_;
};

enum class DerivativeMode { analytic, finite_difference };

/// Structural facts a model may know about itself. Unset fields are probed
/// numerically where needed.
struct AxisHints {
  std::optional<bool> time_independent;
  std::optional<bool> affine_in_conjugate_momentum;
};

/// Evaluator bundle for H, H_z and H_zz on extended phase space.
///
/// Implementations must be safe to call concurrently: no mutation during
/// evaluation.
class HamiltonianModel {
 public:
  virtual ~HamiltonianModel() = default;

  virtual int dof() const = 0;
  int dim() const { return extended_dim(dof()); }

  virtual double value(const Vector& z) const = 0;
  virtual Vector gradient(const Vector& z) const = 0;
  virtual Matrix hessian(const Vector& z) const = 0;

  /// Analytic gradient of psi, if the model knows one.
  virtual std::optional<Vector> psi_gradient(const Vector&) const { return std::nullopt; }
  /// Analytic hessian of psi, if the model knows one.
  virtual std::optional<Matrix> psi_hessian(const Vector&) const { return std::nullopt; }

  virtual AxisHints axis_hints() const { return {}; }
  virtual std::string name() const { return "user"; }
};

/// Model assembled from callables. Missing gradient or hessian callables
/// are replaced by central differences.
class FunctionModel final : public HamiltonianModel {
 public:
  using ValueFn = std::function<double(const Vector&)>;
  using GradientFn = std::function<Vector(const Vector&)>;
  using HessianFn = std::function<Matrix(const Vector&)>;

  FunctionModel(int dof, ValueFn value, GradientFn gradient = {}, HessianFn hessian = {},
                double fd_step = 1e-5, std::string name = "user");

  int dof() const override { return dof_; }
  double value(const Vector& z) const override;
  Vector gradient(const Vector& z) const override;
  Matrix hessian(const Vector& z) const override;
  AxisHints axis_hints() const override { return hints_; }
  std::string name() const override { return name_; }

  DerivativeMode gradient_mode() const noexcept;
  DerivativeMode hessian_mode() const noexcept;
  double fd_step() const noexcept { return fd_step_; }

  void set_axis_hints(AxisHints hints) { hints_ = hints; }

 private:
  int dof_;
  ValueFn value_;
  GradientFn gradient_;
  HessianFn hessian_;
  double fd_step_;
  std::string name_;
  AxisHints hints_;
};

/// Classical (non-extended) Hamiltonian H_c(q, p, t). Callables take the
/// reduced vector y = (q_1..q_n, t, p_1..p_n) of length 2n+1, which is the
/// extended state with wp dropped.
struct ClassicalHamiltonian {
  int dof = 1;
  FunctionModel::ValueFn value;
  FunctionModel::GradientFn gradient;  // optional; length 2n+1
  FunctionModel::HessianFn hessian;    // optional; (2n+1)x(2n+1)
  double fd_step = 1e-5;
  std::optional<bool> time_independent;
  std::string name = "classical";
};

/// Lifts H_c to H(q, t, p, wp) = wp + H_c(q, p, t).
FunctionModel autonomize(const ClassicalHamiltonian& classical);

/// Applies J = [0 I; -I 0] to v = (a, b): returns (b, -a).
/// Throws DimensionError on odd length.
Vector apply_J(const Vector& v);

/// Dense J for the given degree-of-freedom count.
Matrix symplectic_matrix(int dof);

/// Everything the existence theory needs at one point.
struct FieldSample {
  double H = 0.0;
  Vector grad;
  Matrix hess;
  double psi = 0.0;
  double psi_prime = 0.0;
};

struct FieldOptions {
  /// Central-difference step for psi_z; <= 0 selects 1e-5 * max(1, |z|).
  double psi_step = 0.0;
};

// Finite-checked evaluation. Throw EvaluationError carrying z.
double checked_value(const HamiltonianModel& model, const Vector& z);
Vector checked_gradient(const HamiltonianModel& model, const Vector& z);
/// Symmetrized hessian.
Matrix checked_hessian(const HamiltonianModel& model, const Vector& z);

/// psi = (J H_z)^T H_zz (J H_z) from precomputed derivatives.
double psi_from(const Vector& grad, const Matrix& hess);
double psi(const HamiltonianModel& model, const Vector& z);
Vector psi_gradient(const HamiltonianModel& model, const Vector& z, double step = 0.0);
Matrix psi_hessian(const HamiltonianModel& model, const Vector& z, double step = 0.0);

/// H, H_z, H_zz, psi and psi' = [psi, H] = psi_z^T J H_z at z.
FieldSample sample_fields(const HamiltonianModel& model, const Vector& z,
                          const FieldOptions& options = {});

double default_psi_step(const Vector& z);

}  // namespace dth
