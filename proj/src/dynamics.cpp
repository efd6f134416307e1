#include "adcons/dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "adcons/random.hpp"

namespace adcons {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

Vector sample_ball(Rng& rng, Eigen::Index dim, double radius) {
  Vector dir(dim);
  double norm = 0.0;
  while (norm == 0.0) {
    for (Eigen::Index k = 0; k < dim; ++k) dir(k) = rng.normal();
    norm = dir.norm();
  }
  const double r = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(dim));
  return (r / norm) * dir;
}

}  // namespace

LinearModel::LinearModel(Matrix a, Matrix b) : A(std::move(a)), B(std::move(b)) {
  require(A.rows() >= 1 && A.rows() == A.cols(), "LinearModel: A must be square with n >= 1");
  require(B.rows() == A.rows(), "LinearModel: B must have n rows");
  require(B.cols() >= 1, "LinearModel: B must have p >= 1 columns");
}

NonlinearModel::NonlinearModel(LinearModel lin, Matrix d1, Nonlinearity fn, double lipschitz)
    : linear(std::move(lin)), D1(std::move(d1)), f(std::move(fn)), gamma(lipschitz) {
  require(D1.rows() == linear.n() && D1.cols() >= 1, "NonlinearModel: D1 must be n x m, m >= 1");
  require(static_cast<bool>(f), "NonlinearModel: f must be callable");
  require(gamma > 0.0 && std::isfinite(gamma), "NonlinearModel: gamma must be positive");
}

Vector linear_drift(const LinearModel& model, const Vector& x, const Vector& u) {
  require(x.size() == model.n(), "linear_drift: x has wrong length");
  require(u.size() == model.p(), "linear_drift: u has wrong length");
  return model.A * x + model.B * u;
}

Vector nonlinear_drift(const NonlinearModel& model, const Vector& x, const Vector& u) {
  Vector out = linear_drift(model.linear, x, u);
  const Vector fx = model.f(x);
  require(fx.size() == model.m(), "nonlinear_drift: f(x) length does not match D1 columns");
  out.noalias() += model.D1 * fx;
  return out;
}

LipschitzReport check_lipschitz(const NonlinearModel& model, int n_samples, double radius,
                                std::uint64_t seed) {
  require(n_samples >= 1, "check_lipschitz: n_samples must be >= 1");
  require(radius > 0.0, "check_lipschitz: radius must be positive");
  Rng rng(seed);
  LipschitzReport report;
  for (int s = 0; s < n_samples; ++s) {
    const Vector x = sample_ball(rng, model.n(), radius);
    const Vector y = sample_ball(rng, model.n(), radius);
    const double dx = (x - y).norm();
    if (dx == 0.0) continue;
    report.max_ratio = std::max(report.max_ratio, (model.f(x) - model.f(y)).norm() / dx);
  }
  report.pass = report.max_ratio <= model.gamma * (1.0 + 1e-9);
  return report;
}

Nonlinearity sine_nonlinearity(Matrix m) {
  return [m = std::move(m)](const Vector& x) -> Vector { return m * x.array().sin().matrix(); };
}

Nonlinearity linear_nonlinearity(Matrix m) {
  return [m = std::move(m)](const Vector& x) -> Vector { return m * x; };
}

NonlinearModel manipulator_model() {
  Matrix a(4, 4);
  a << 0.0, 1.0, 0.0, 0.0,
      -48.6, -1.25, 48.6, 0.0,
      0.0, 0.0, 0.0, 10.0,
      1.95, 0.0, -1.95, 0.0;
  Matrix b(4, 1);
  b << 0.0, 21.6, 0.0, 0.0;
  Matrix coupling = Matrix::Zero(4, 4);
  coupling(3, 2) = -0.333;
  return NonlinearModel(LinearModel(std::move(a), std::move(b)), Matrix::Identity(4, 4),
                        sine_nonlinearity(std::move(coupling)), 0.333);
}

}  // namespace adcons
