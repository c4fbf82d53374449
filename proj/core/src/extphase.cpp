#include "dthsem/extphase.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "dthsem/errors.hpp"

namespace dth {

namespace {

void require_dim(const HamiltonianModel& model, const Vector& z) {
  if (z.size() != model.dim()) {
    std::ostringstream os;
    os << "state has length " << z.size() << ", model '" << model.name() << "' expects "
       << model.dim();
    throw DimensionError(os.str());
  }
}

Vector central_gradient(const std::function<double(const Vector&)>& f, const Vector& z,
                        double h) {
  Vector g(z.size());
  Vector zp = z;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double zi = z[i];
    zp[i] = zi + h;
    const double fp = f(zp);
    zp[i] = zi - h;
    const double fm = f(zp);
    zp[i] = zi;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

Matrix central_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& z,
                        double h) {
  const Eigen::Index n = z.size();
  Matrix jac(n, n);
  Vector zp = z;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double zj = z[j];
    zp[j] = zj + h;
    const Vector fp = f(zp);
    zp[j] = zj - h;
    const Vector fm = f(zp);
    zp[j] = zj;
    jac.col(j) = (fp - fm) / (2.0 * h);
  }
  return jac;
}

}  // namespace

ExtendedState::ExtendedState(int dof, Vector coords) : dof_(dof), coords_(std::move(coords)) {
  if (dof_ < 1) throw DimensionError("ExtendedState: degree-of-freedom count must be >= 1");
  if (coords_.size() != extended_dim(dof_)) {
    throw DimensionError("ExtendedState: expected " + std::to_string(extended_dim(dof_)) +
                         " coordinates, got " + std::to_string(coords_.size()));
  }
  if (!coords_.allFinite()) throw ParameterError("ExtendedState: non-finite component");
}

ExtendedState ExtendedState::from_parts(const Vector& q, double t, const Vector& p, double wp) {
  if (q.size() != p.size()) throw DimensionError("ExtendedState: q and p differ in length");
  const int n = static_cast<int>(q.size());
  Vector z(extended_dim(n));
  z.head(n) = q;
  z[time_index(n)] = t;
  z.segment(n + 1, n) = p;
  z[conjugate_momentum_index(n)] = wp;
  return ExtendedState(n, std::move(z));
}

// ---------------------------------------------------------------------------

FunctionModel::FunctionModel(int dof, ValueFn value, GradientFn gradient, HessianFn hessian,
                             double fd_step, std::string name)
    : dof_(dof),
      value_(std::move(value)),
      gradient_(std::move(gradient)),
      hessian_(std::move(hessian)),
      fd_step_(fd_step),
      name_(std::move(name)) {
  if (dof_ < 1) throw ParameterError("FunctionModel: dof must be >= 1");
  if (!value_) throw ParameterError("FunctionModel: value callable is required");
  if (!(fd_step_ > 0.0)) throw ParameterError("FunctionModel: fd_step must be positive");
}

double FunctionModel::value(const Vector& z) const { return value_(z); }

Vector FunctionModel::gradient(const Vector& z) const {
  if (gradient_) return gradient_(z);
  return central_gradient(value_, z, fd_step_);
}

Matrix FunctionModel::hessian(const Vector& z) const {
  if (hessian_) return hessian_(z);
  // Differencing an already differenced gradient needs a coarser step.
  const double h = gradient_ ? fd_step_ : std::max(fd_step_, 1e-4);
  return symmetrize(central_jacobian([this](const Vector& x) { return gradient(x); }, z, h));
}

DerivativeMode FunctionModel::gradient_mode() const noexcept {
  return gradient_ ? DerivativeMode::analytic : DerivativeMode::finite_difference;
}

DerivativeMode FunctionModel::hessian_mode() const noexcept {
  return hessian_ ? DerivativeMode::analytic : DerivativeMode::finite_difference;
}

FunctionModel autonomize(const ClassicalHamiltonian& classical) {
  if (!classical.value) throw ParameterError("autonomize: classical value callable is required");
  const int n = classical.dof;
  const int m = 2 * n + 1;

  auto value = [c = classical.value, m](const Vector& z) { return z[m] + c(z.head(m)); };

  FunctionModel::GradientFn gradient;
  if (classical.gradient) {
    gradient = [c = classical.gradient, m](const Vector& z) {
      const Vector gc = c(z.head(m));
      if (gc.size() != m) throw DimensionError("autonomize: classical gradient has wrong length");
      Vector g(m + 1);
      g.head(m) = gc;
      g[m] = 1.0;
      return g;
    };
  } else {
    gradient = [c = classical.value, m, h = classical.fd_step](const Vector& z) {
      Vector g(m + 1);
      g.head(m) = central_gradient(c, z.head(m), h);
      g[m] = 1.0;
      return g;
    };
  }

  FunctionModel::HessianFn hessian;
  if (classical.hessian) {
    hessian = [c = classical.hessian, m](const Vector& z) {
      const Matrix hc = c(z.head(m));
      if (hc.rows() != m || hc.cols() != m) {
        throw DimensionError("autonomize: classical hessian has wrong shape");
      }
      Matrix h = Matrix::Zero(m + 1, m + 1);
      h.topLeftCorner(m, m) = hc;
      return h;
    };
  } else {
    hessian = [gradient, m, h = classical.gradient ? classical.fd_step
                                                   : std::max(classical.fd_step, 1e-4)](
                  const Vector& z) {
      Matrix out = central_jacobian(gradient, z, h);
      out.row(m).setZero();
      out.col(m).setZero();
      return symmetrize(out);
    };
  }

  FunctionModel model(n, std::move(value), std::move(gradient), std::move(hessian),
                      classical.fd_step, classical.name);
  model.set_axis_hints({classical.time_independent, true});
  return model;
}

// ---------------------------------------------------------------------------

Vector apply_J(const Vector& v) {
  if (v.size() % 2 != 0) throw DimensionError("apply_J: vector length must be even");
  const Eigen::Index h = v.size() / 2;
  Vector out(v.size());
  out.head(h) = v.tail(h);
  out.tail(h) = -v.head(h);
  return out;
}

Matrix symplectic_matrix(int dof) {
  const int h = dof + 1;
  Matrix j = Matrix::Zero(2 * h, 2 * h);
  j.topRightCorner(h, h).setIdentity();
  j.bottomLeftCorner(h, h) = -Matrix::Identity(h, h);
  return j;
}

double checked_value(const HamiltonianModel& model, const Vector& z) {
  require_dim(model, z);
  const double h = model.value(z);
  if (!std::isfinite(h)) throw EvaluationError("model value is not finite", z);
  return h;
}

Vector checked_gradient(const HamiltonianModel& model, const Vector& z) {
  require_dim(model, z);
  Vector g = model.gradient(z);
  if (g.size() != model.dim()) throw DimensionError("model gradient has wrong length");
  if (!g.allFinite()) throw EvaluationError("model gradient is not finite", z);
  return g;
}

Matrix checked_hessian(const HamiltonianModel& model, const Vector& z) {
  require_dim(model, z);
  Matrix h = model.hessian(z);
  if (h.rows() != model.dim() || h.cols() != model.dim()) {
    throw DimensionError("model hessian has wrong shape");
  }
  if (!h.allFinite()) throw EvaluationError("model hessian is not finite", z);
  return symmetrize(h);
}

double psi_from(const Vector& grad, const Matrix& hess) {
  const Vector jg = apply_J(grad);
  return jg.dot(hess * jg);
}

double psi(const HamiltonianModel& model, const Vector& z) {
  return psi_from(checked_gradient(model, z), checked_hessian(model, z));
}

double default_psi_step(const Vector& z) { return 1e-5 * std::max(1.0, z.norm()); }

Vector psi_gradient(const HamiltonianModel& model, const Vector& z, double step) {
  require_dim(model, z);
  if (auto g = model.psi_gradient(z)) {
    if (!g->allFinite()) throw EvaluationError("model psi gradient is not finite", z);
    return *g;
  }
  const double h = step > 0.0 ? step : default_psi_step(z);
  Vector g = central_gradient([&model](const Vector& x) { return psi(model, x); }, z, h);
  if (!g.allFinite()) throw EvaluationError("psi gradient is not finite", z);
  return g;
}

Matrix psi_hessian(const HamiltonianModel& model, const Vector& z, double step) {
  require_dim(model, z);
  if (auto h = model.psi_hessian(z)) {
    if (!h->allFinite()) throw EvaluationError("model psi hessian is not finite", z);
    return symmetrize(*h);
  }
  const bool analytic_gradient = model.psi_gradient(z).has_value();
  double h = step > 0.0 ? step : default_psi_step(z);
  if (!analytic_gradient) h = std::max(h, 1e-3 * std::max(1.0, z.norm()));
  Matrix out = central_jacobian(
      [&model, h](const Vector& x) { return psi_gradient(model, x, h); }, z, h);
  if (!out.allFinite()) throw EvaluationError("psi hessian is not finite", z);
  return symmetrize(out);
}

FieldSample sample_fields(const HamiltonianModel& model, const Vector& z,
                          const FieldOptions& options) {
  if (!z.allFinite()) throw EvaluationError("sample_fields: state is not finite", z);
  FieldSample s;
  s.H = checked_value(model, z);
  s.grad = checked_gradient(model, z);
  s.hess = checked_hessian(model, z);
  s.psi = psi_from(s.grad, s.hess);
  const Vector psi_z = psi_gradient(model, z, options.psi_step);
  s.psi_prime = psi_z.dot(apply_J(s.grad));
  if (!std::isfinite(s.psi) || !std::isfinite(s.psi_prime)) {
    throw EvaluationError("sample_fields: psi or psi' is not finite", z);
  }
  return s;
}

}  // namespace dth
