#include "dthsem/models.hpp"

#include <cmath>

#include "dthsem/errors.hpp"

namespace dth {

namespace {

// Pendulum and oscillator share the layout z = (q, t, p, wp).
constexpr int kQ = 0;
constexpr int kP = 2;
constexpr int kWp = 3;

}  // namespace

double PendulumModel::value(const Vector& z) const {
  return z[kWp] + 0.5 * z[kP] * z[kP] - std::cos(z[kQ]);
}

Vector PendulumModel::gradient(const Vector& z) const {
  Vector g(4);
  g << std::sin(z[kQ]), 0.0, z[kP], 1.0;
  return g;
}

Matrix PendulumModel::hessian(const Vector& z) const {
  Matrix h = Matrix::Zero(4, 4);
  h(kQ, kQ) = std::cos(z[kQ]);
  h(kP, kP) = 1.0;
  return h;
}

std::optional<Vector> PendulumModel::psi_gradient(const Vector& z) const {
  const double q = z[kQ];
  const double p = z[kP];
  const double s = std::sin(q);
  const double c = std::cos(q);
  Vector g(4);
  g << -p * p * s + 2.0 * s * c, 0.0, 2.0 * p * c, 0.0;
  return g;
}

std::optional<Matrix> PendulumModel::psi_hessian(const Vector& z) const {
  const double q = z[kQ];
  const double p = z[kP];
  Matrix h = Matrix::Zero(4, 4);
  h(kQ, kQ) = -p * p * std::cos(q) + 2.0 * std::cos(2.0 * q);
  h(kQ, kP) = h(kP, kQ) = -2.0 * p * std::sin(q);
  h(kP, kP) = 2.0 * std::cos(q);
  return h;
}

double PendulumModel::psi_closed(double q, double p) {
  const double s = std::sin(q);
  return p * p * std::cos(q) + s * s;
}

double PendulumModel::psi_prime_closed(double q, double p) { return -p * p * p * std::sin(q); }

// ---------------------------------------------------------------------------

OscillatorModel::OscillatorModel(double omega) : omega_(omega) {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw ParameterError("oscillator: omega must be a positive finite number");
  }
}

double OscillatorModel::value(const Vector& z) const {
  const double w2 = omega_ * omega_;
  return z[kWp] + 0.5 * (z[kP] * z[kP] + w2 * z[kQ] * z[kQ]);
}

Vector OscillatorModel::gradient(const Vector& z) const {
  Vector g(4);
  g << omega_ * omega_ * z[kQ], 0.0, z[kP], 1.0;
  return g;
}

Matrix OscillatorModel::hessian(const Vector&) const {
  Matrix h = Matrix::Zero(4, 4);
  h(kQ, kQ) = omega_ * omega_;
  h(kP, kP) = 1.0;
  return h;
}

std::optional<Vector> OscillatorModel::psi_gradient(const Vector& z) const {
  const double w2 = omega_ * omega_;
  Vector g(4);
  g << 2.0 * w2 * w2 * z[kQ], 0.0, 2.0 * w2 * z[kP], 0.0;
  return g;
}

std::optional<Matrix> OscillatorModel::psi_hessian(const Vector&) const {
  const double w2 = omega_ * omega_;
  Matrix h = Matrix::Zero(4, 4);
  h(kQ, kQ) = 2.0 * w2 * w2;
  h(kP, kP) = 2.0 * w2;
  return h;
}

// ---------------------------------------------------------------------------

FreeTimeModel::FreeTimeModel(int dof) : dof_(dof) {
  if (dof < 1) throw ParameterError("free: dof must be >= 1");
}

double FreeTimeModel::value(const Vector& z) const { return z[conjugate_momentum_index(dof_)]; }

Vector FreeTimeModel::gradient(const Vector&) const {
  Vector g = Vector::Zero(dim());
  g[conjugate_momentum_index(dof_)] = 1.0;
  return g;
}

Matrix FreeTimeModel::hessian(const Vector&) const { return Matrix::Zero(dim(), dim()); }

std::optional<Vector> FreeTimeModel::psi_gradient(const Vector&) const {
  return Vector::Zero(dim());
}

std::optional<Matrix> FreeTimeModel::psi_hessian(const Vector&) const {
  return Matrix::Zero(dim(), dim());
}

// ---------------------------------------------------------------------------

std::shared_ptr<const HamiltonianModel> pendulum() { return std::make_shared<PendulumModel>(); }

std::shared_ptr<const HamiltonianModel> oscillator(double omega) {
  return std::make_shared<OscillatorModel>(omega);
}

std::shared_ptr<const HamiltonianModel> free_time(int dof) {
  return std::make_shared<FreeTimeModel>(dof);
}

std::shared_ptr<const HamiltonianModel> make_model(const std::string& name,
                                                   const std::map<std::string, double>& params) {
  auto reject_extra = [&](std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : params) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || key == a;
      if (!ok) throw ParameterError("model '" + name + "' has no parameter '" + key + "'");
    }
  };
  if (name == "pendulum") {
    reject_extra({});
    return pendulum();
  }
  if (name == "oscillator") {
    reject_extra({"omega"});
    auto it = params.find("omega");
    return oscillator(it == params.end() ? 1.0 : it->second);
  }
  if (name == "free") {
    reject_extra({"dof"});
    auto it = params.find("dof");
    return free_time(it == params.end() ? 1 : static_cast<int>(it->second));
  }
  throw ParameterError("unknown model '" + name + "' (expected pendulum, oscillator or free)");
}

}  // namespace dth
